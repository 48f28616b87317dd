#include "mvred/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace mvred {

namespace {

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

const std::set<std::string>& reserved_preds() {
  static const std::set<std::string> words = {
      "and", "or", "not", "dia", "box", "box_gamma", "dia_d",
      "andA", "orA", "e", "lattice"};
  return words;
}

// ---------------------------------------------------------------------------
// Shared lexer for programs and formulas.  Tokenization is parser-driven:
// value literals (which may contain '.', ',', brackets and parens) are
// scanned as raw text only at value positions.

struct Tok {
  enum Type { End, LIdent, UIdent, Sym } type = End;
  std::string text;
  int line = 0;
};

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;
  std::string where;  // label for error messages

  [[noreturn]] void err(const std::string& msg, int at_line) const {
    fail(ErrorKind::Parse, where + ":" + std::to_string(at_line) + ": " + msg);
  }
  [[noreturn]] void err(const std::string& msg) const { err(msg, line); }

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') { ++line; ++pos; }
      else if (std::isspace(static_cast<unsigned char>(c))) ++pos;
      else if (c == '%') { while (pos < src.size() && src[pos] != '\n') ++pos; }
      else break;
    }
  }

  Tok next() {
    skip_ws();
    if (pos >= src.size()) return {Tok::End, "", line};
    char c = src[pos];
    int at = line;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < src.size() && is_ident_char(src[pos])) ++pos;
      std::string text(src.substr(start, pos - start));
      bool upper = std::isupper(static_cast<unsigned char>(c)) || c == '_';
      return {upper ? Tok::UIdent : Tok::LIdent, text, at};
    }
    auto two = [&](const char* s) { return src.compare(pos, 2, s) == 0; };
    auto three = [&](const char* s) { return src.compare(pos, 3, s) == 0; };
    if (three("<-A") && (pos + 3 >= src.size() || !is_ident_char(src[pos + 3]))) {
      pos += 3;
      return {Tok::Sym, "<-A", at};
    }
    if (two(":-")) { pos += 2; return {Tok::Sym, ":-", at}; }
    if (two("<-")) { pos += 2; return {Tok::Sym, "<-", at}; }
    if (two("->")) { pos += 2; return {Tok::Sym, "->", at}; }
    if (two("~A") && (pos + 2 >= src.size() || !is_ident_char(src[pos + 2]))) {
      pos += 2;
      return {Tok::Sym, "~A", at};
    }
    ++pos;
    return {Tok::Sym, std::string(1, c), at};
  }

  Tok peek() {
    auto save_pos = pos;
    auto save_line = line;
    Tok t = next();
    pos = save_pos;
    line = save_line;
    return t;
  }

  void expect_sym(const std::string& s) {
    Tok t = next();
    if (t.type != Tok::Sym || t.text != s)
      err("expected '" + s + "', got '" + (t.type == Tok::End ? "<eof>" : t.text) + "'",
          t.line);
  }

  // Raw scan of a value literal at the current position.  Bracketed and
  // parenthesized groups are taken whole; otherwise value characters are
  // idents, digits, and '.' or '/' when a digit follows (so the clause
  // terminator stays out of the value).
  std::string scan_value() {
    skip_ws();
    if (pos >= src.size()) err("expected a truth value, got end of input");
    char c = src[pos];
    if (c == '[' || c == '(') {
      std::size_t start = pos;
      int depth = 0;
      while (pos < src.size()) {
        char g = src[pos];
        if (g == '[' || g == '(') ++depth;
        else if (g == ']' || g == ')') {
          if (--depth == 0) { ++pos; break; }
        } else if (g == '\n') ++line;
        ++pos;
      }
      if (depth != 0) err("unbalanced brackets in value literal");
      return std::string(src.substr(start, pos - start));
    }
    std::size_t start = pos;
    while (pos < src.size()) {
      char g = src[pos];
      if (is_ident_char(g)) { ++pos; continue; }
      if ((g == '.' || g == '/') && pos + 1 < src.size() &&
          std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
        ++pos;
        continue;
      }
      break;
    }
    if (pos == start) err("expected a truth value");
    return std::string(src.substr(start, pos - start));
  }

  // Inner text of a bracketed value "[...]" whose opening '[' was already
  // consumed as a token.
  std::string scan_until_rbracket() {
    std::size_t start = pos;
    int depth = 0;
    while (pos < src.size()) {
      char g = src[pos];
      if (g == '[' || g == '(') ++depth;
      else if (g == ')') --depth;
      else if (g == ']') {
        if (depth == 0) {
          std::string inner(src.substr(start, pos - start));
          ++pos;
          return inner;
        }
        --depth;
      } else if (g == '\n') ++line;
      ++pos;
    }
    err("unterminated '[' in modal atom");
  }
};

TruthValue resolve_or_fail(const Lexer& lx, const Lattice& lat, const std::string& text,
                           int at_line) {
  auto v = resolve_value_text(lat, text);
  if (!v)
    lx.err("unknown value literal '" + text + "' for lattice " + lat.name, at_line);
  return *v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Built-ins.

bool builtin_pred(const std::string& pred) { return pred == "eq" || pred == "leq"; }

bool eval_builtin(const std::string& pred, const std::vector<Term>& args) {
  if (pred == "eq") return args[0].name == args[1].name;
  return args[0].name <= args[1].name;  // lexicographic order on constant names
}

// ---------------------------------------------------------------------------
// Herbrand base.

std::optional<std::size_t> HerbrandBase::index_of(const Atom& ground_atom) const {
  auto pit = std::lower_bound(preds.begin(), preds.end(), ground_atom.pred,
                              [](const PredInfo& p, const std::string& n) {
                                return p.name < n;
                              });
  if (pit == preds.end() || pit->name != ground_atom.pred) return std::nullopt;
  if (pit->arity != static_cast<int>(ground_atom.args.size())) return std::nullopt;
  std::size_t idx = 0;
  for (const Term& t : ground_atom.args) {
    if (t.is_var) return std::nullopt;
    auto cit = std::lower_bound(constants.begin(), constants.end(), t.name);
    if (cit == constants.end() || *cit != t.name) return std::nullopt;
    idx = idx * constants.size() + static_cast<std::size_t>(cit - constants.begin());
  }
  return pit->offset + idx;
}

Atom HerbrandBase::atom(std::size_t id) const {
  // The owning predicate is the last one whose offset is <= id.
  std::size_t lo = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].offset <= id) lo = i;
  const PredInfo& p = preds[lo];
  Atom a;
  a.pred = p.name;
  a.args.resize(p.arity);
  std::size_t rest = id - p.offset;
  for (int i = p.arity - 1; i >= 0; --i) {
    a.args[i] = Term{false, constants[rest % constants.size()]};
    rest /= constants.size();
  }
  return a;
}

std::string HerbrandBase::atom_text(std::size_t id) const { return print_atom(atom(id)); }

HerbrandBase herbrand_base(const Program& p) {
  HerbrandBase base;
  base.constants = p.constants;
  for (const auto& [name, arity] : p.predicates)
    base.preds.push_back({name, arity, 0});
  // std::map iteration is already name-ordered; offsets accumulate.
  std::size_t off = 0;
  for (auto& pred : base.preds) {
    pred.offset = off;
    std::size_t tuples = 1;
    for (int i = 0; i < pred.arity; ++i) {
      tuples *= base.constants.size();
      if (tuples > (1u << 31))
        fail(ErrorKind::Semantic, "Herbrand base too large for predicate " + pred.name);
    }
    if (pred.arity > 0 && base.constants.empty()) tuples = 0;
    off += tuples;
  }
  base.size_ = off;
  return base;
}

// ---------------------------------------------------------------------------
// Program parsing.

namespace {

struct ProgramParser {
  Lexer lx;
  Program prog;
  std::map<std::string, int> arities;  // includes built-ins
  std::set<std::string> const_set;

  Atom parse_plain_atom() {
    Tok t = lx.next();
    if (t.type != Tok::LIdent)
      lx.err("expected a predicate name, got '" + t.text + "'", t.line);
    if (reserved_preds().count(t.text))
      lx.err("'" + t.text + "' is reserved and cannot be used as a predicate", t.line);
    Atom a;
    a.pred = t.text;
    Tok nxt = lx.peek();
    if (nxt.type == Tok::Sym && nxt.text == "(") {
      lx.next();
      while (true) {
        Tok arg = lx.next();
        if (arg.type == Tok::LIdent)
          a.args.push_back(Term{false, arg.text});
        else if (arg.type == Tok::UIdent)
          a.args.push_back(Term{true, arg.text});
        else
          lx.err("expected a term, got '" + arg.text + "'", arg.line);
        Tok sep = lx.next();
        if (sep.type == Tok::Sym && sep.text == ")") break;
        if (!(sep.type == Tok::Sym && sep.text == ","))
          lx.err("expected ',' or ')' in argument list", sep.line);
      }
    }
    return a;
  }

  void note_atom(const Atom& a, bool is_head) {
    int arity = static_cast<int>(a.args.size());
    if (builtin_pred(a.pred)) {
      if (is_head) lx.err("built-in predicate '" + a.pred + "' cannot be a rule head");
      if (arity != 2)
        lx.err("built-in predicate '" + a.pred + "' takes exactly 2 arguments");
    }
    auto [it, fresh] = arities.emplace(a.pred, arity);
    if (!fresh && it->second != arity)
      lx.err("arity mismatch for predicate '" + a.pred + "': used with " +
             std::to_string(it->second) + " and " + std::to_string(arity));
    for (const Term& t : a.args)
      if (!t.is_var) const_set.insert(t.name);
  }

  void parse_clauses() {
    while (true) {
      Tok t = lx.peek();
      if (t.type == Tok::End) break;
      Rule r;
      r.head = parse_plain_atom();
      note_atom(r.head, true);
      Tok sep = lx.next();
      if (sep.type == Tok::Sym && sep.text == "<-") {
        lx.expect_sym("@");
        int at = lx.line;
        std::string vt = lx.scan_value();
        r.fact_value = resolve_or_fail(lx, prog.lattice, vt, at);
      } else if (sep.type == Tok::Sym && sep.text == ":-") {
        while (true) {
          Conjunct conj;
          while (true) {
            Literal lit;
            Tok p = lx.peek();
            if (p.type == Tok::Sym && p.text == "~") {
              lx.next();
              lit.negated = true;
            }
            lit.atom = parse_plain_atom();
            note_atom(lit.atom, false);
            conj.push_back(std::move(lit));
            Tok c = lx.peek();
            if (c.type == Tok::Sym && c.text == ",") { lx.next(); continue; }
            break;
          }
          r.body.push_back(std::move(conj));
          Tok c = lx.peek();
          if (c.type == Tok::Sym && c.text == ";") { lx.next(); continue; }
          break;
        }
      } else {
        lx.err("expected '<-' or ':-' after clause head", sep.line);
      }
      lx.expect_sym(".");
      prog.rules.push_back(std::move(r));
    }
  }
};

}  // namespace

Program parse_program(const std::string& text) {
  // The lattice declaration is line-based: "lattice SELECTOR." up to the
  // first line end, so selectors may contain dots (file paths).
  std::size_t i = 0, n = text.size();
  int line = 1;
  auto skip_blank = [&] {
    while (i < n) {
      if (text[i] == '\n') { ++line; ++i; }
      else if (std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      else if (text[i] == '%') { while (i < n && text[i] != '\n') ++i; }
      else break;
    }
  };
  skip_blank();
  const std::string kw = "lattice";
  if (text.compare(i, kw.size(), kw) != 0 ||
      (i + kw.size() < n && is_ident_char(text[i + kw.size()])))
    fail(ErrorKind::Parse, "program:" + std::to_string(line) +
                               ": program must start with a lattice declaration");
  i += kw.size();
  std::size_t eol = text.find('\n', i);
  if (eol == std::string::npos) eol = n;
  std::string decl = text.substr(i, eol - i);
  // Strip a trailing comment, whitespace, and the terminating dot.
  if (auto cmt = decl.find('%'); cmt != std::string::npos) decl.resize(cmt);
  while (!decl.empty() && std::isspace(static_cast<unsigned char>(decl.back())))
    decl.pop_back();
  if (decl.empty() || decl.back() != '.')
    fail(ErrorKind::Parse, "program:" + std::to_string(line) +
                               ": lattice declaration must end with '.'");
  decl.pop_back();
  std::size_t b = 0;
  while (b < decl.size() && std::isspace(static_cast<unsigned char>(decl[b]))) ++b;
  std::string selector = decl.substr(b);
  if (selector.empty())
    fail(ErrorKind::Parse,
         "program:" + std::to_string(line) + ": empty lattice selector");

  ProgramParser pp{Lexer{text, eol, line, "program"}, {}, {}, {}};
  pp.prog.lattice = lattice_from_selector(selector);
  pp.parse_clauses();

  for (const auto& [name, arity] : pp.arities)
    if (!builtin_pred(name)) pp.prog.predicates.emplace(name, arity);
  pp.prog.constants.assign(pp.const_set.begin(), pp.const_set.end());
  return pp.prog;
}

// ---------------------------------------------------------------------------
// Printing.

std::string print_atom(const Atom& a) {
  std::string out = a.pred;
  if (!a.args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) out += ",";
      out += a.args[i].name;
    }
    out += ")";
  }
  return out;
}

namespace {

std::string print_body(const std::vector<Conjunct>& body) {
  std::string out;
  for (std::size_t d = 0; d < body.size(); ++d) {
    if (d) out += "; ";
    for (std::size_t i = 0; i < body[d].size(); ++i) {
      if (i) out += ", ";
      if (body[d][i].negated) out += "~";
      out += print_atom(body[d][i].atom);
    }
  }
  return out;
}

}  // namespace

std::string print_rule(const Lattice& lat, const Rule& r) {
  if (r.is_fact())
    return print_atom(r.head) + " <- @" + lat.id(*r.fact_value) + ".";
  return print_atom(r.head) + " :- " + print_body(r.body) + ".";
}

std::string print_program(const Program& p) {
  std::string out = "lattice " + p.lattice.selector + ".\n";
  for (const Rule& r : p.rules) out += print_rule(p.lattice, r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Grounding.

namespace {

void collect_vars(const Atom& a, std::vector<std::string>& order,
                  std::set<std::string>& seen) {
  for (const Term& t : a.args)
    if (t.is_var && seen.insert(t.name).second) order.push_back(t.name);
}

Atom substitute(const Atom& a, const std::map<std::string, std::string>& sigma) {
  Atom out = a;
  for (Term& t : out.args)
    if (t.is_var) t = Term{false, sigma.at(t.name)};
  return out;
}

}  // namespace

GroundProgram ground(const Program& p) {
  GroundProgram gp;
  gp.lattice = p.lattice;
  gp.base = herbrand_base(p);

  for (const Rule& r : p.rules) {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    collect_vars(r.head, vars, seen);
    for (const Conjunct& conj : r.body)
      for (const Literal& lit : conj) collect_vars(lit.atom, vars, seen);
    if (!vars.empty() && p.constants.empty())
      fail(ErrorKind::Semantic,
           "cannot ground rule '" + print_rule(p.lattice, r) +
               "': variables but no constants");

    // Odometer over the (sorted) constants, last variable fastest.
    std::vector<std::size_t> digit(vars.size(), 0);
    while (true) {
      std::map<std::string, std::string> sigma;
      for (std::size_t i = 0; i < vars.size(); ++i)
        sigma[vars[i]] = p.constants[digit[i]];

      GroundRule gr;
      Atom head = substitute(r.head, sigma);
      auto hid = gp.base.index_of(head);
      if (!hid) fail(ErrorKind::Semantic, "head atom escapes the Herbrand base");
      gr.head = static_cast<std::uint32_t>(*hid);
      gr.fact_value = r.fact_value;

      bool rule_is_top = false;  // some disjunct became constantly top
      for (const Conjunct& conj : r.body) {
        std::vector<GroundLiteral> out;
        bool dead = false;
        for (const Literal& lit : conj) {
          Atom ga = substitute(lit.atom, sigma);
          if (builtin_pred(ga.pred)) {
            // Built-ins have a fixed two-valued extension; fold them away.
            bool val = eval_builtin(ga.pred, ga.args);
            if (lit.negated) val = !val;
            if (!val) { dead = true; break; }
            continue;
          }
          auto id = gp.base.index_of(ga);
          if (!id) fail(ErrorKind::Semantic, "body atom escapes the Herbrand base");
          out.push_back({lit.negated, static_cast<std::uint32_t>(*id)});
        }
        if (dead) continue;
        if (out.empty()) { rule_is_top = true; break; }
        gr.body.push_back(std::move(out));
      }

      if (!r.is_fact()) {
        if (rule_is_top) {
          // The body is constantly top: keep the rule as a top-annotated fact.
          gr.body.clear();
          gr.fact_value = p.lattice.top;
          gp.rules.push_back(std::move(gr));
        } else if (gr.body.empty()) {
          // Every disjunct died on a false built-in: trivially satisfied.
        } else {
          gp.rules.push_back(std::move(gr));
        }
      } else {
        gp.rules.push_back(std::move(gr));
      }

      // Advance the odometer.
      std::size_t k = vars.size();
      while (k > 0 && ++digit[k - 1] == p.constants.size()) digit[--k] = 0;
      if (vars.empty() || k == 0) break;
    }
  }
  return gp;
}

std::vector<GroundRule> merge_rules_by_head(const GroundProgram& gp) {
  std::vector<GroundRule> out;
  for (const GroundRule& r : gp.rules)
    if (r.is_fact()) out.push_back(r);
  std::map<std::uint32_t, std::size_t> merged;  // head atom -> index in out
  for (const GroundRule& r : gp.rules) {
    if (r.is_fact()) continue;
    auto it = merged.find(r.head);
    if (it == merged.end()) {
      merged.emplace(r.head, out.size());
      out.push_back(r);
    } else {
      for (const auto& conj : r.body) out[it->second].body.push_back(conj);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formula parsing.  Two mutually recursive layers share the lexer: the meta
// layer (classical connectives, modal atoms, flattened operators, abstract
// operators) and the many-valued layer (inside E, box_gamma, dia_d).

namespace {

struct FormulaParser {
  Lexer lx;
  const Lattice& lat;

  Formula node(FKind k, std::vector<Formula> kids = {}) {
    Formula f;
    f.kind = k;
    f.kids = std::move(kids);
    return f;
  }

  Atom parse_atom_args(const std::string& pred, bool flat, std::string* value_out) {
    Atom a;
    a.pred = pred;
    Tok nxt = lx.peek();
    if (!(nxt.type == Tok::Sym && nxt.text == "(")) {
      if (flat) lx.err("flat atom needs a value attribute");
      return a;
    }
    lx.next();
    std::vector<bool> is_value;  // per argument: scanned as a raw value literal
    while (true) {
      lx.skip_ws();
      char c = lx.pos < lx.src.size() ? lx.src[lx.pos] : '\0';
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '[' || c == '(') {
        a.args.push_back(Term{false, lx.scan_value()});
        is_value.push_back(true);
      } else {
        Tok arg = lx.next();
        if (arg.type != Tok::LIdent && arg.type != Tok::UIdent)
          lx.err("expected a term, got '" + arg.text + "'", arg.line);
        a.args.push_back(Term{arg.type == Tok::UIdent, arg.text});
        is_value.push_back(false);
      }
      Tok sep = lx.next();
      if (sep.type == Tok::Sym && sep.text == ")") break;
      if (!(sep.type == Tok::Sym && sep.text == ","))
        lx.err("expected ',' or ')' in argument list", sep.line);
    }
    if (flat) {
      *value_out = a.args.back().name;
      a.args.pop_back();
      is_value.pop_back();
    }
    for (bool v : is_value)
      if (v)
        lx.err(flat ? "value literal must be the last argument of a flat atom"
                    : "value literal not allowed in a plain atom");
    return a;
  }

  // Leaf or unary of the meta layer.
  Formula meta_unary() {
    Tok t = lx.peek();
    if (t.type == Tok::Sym && t.text == "(") {
      lx.next();
      Formula f = meta_expr();
      lx.expect_sym(")");
      return f;
    }
    if (t.type == Tok::Sym && t.text == "[") {
      lx.next();
      int at = lx.line;
      std::string vt = lx.scan_until_rbracket();
      TruthValue v = resolve_or_fail(lx, lat, vt, at);
      Formula f = node(FKind::MAtom);
      f.value = v;
      std::string dummy;
      Tok p = lx.next();
      if (p.type != Tok::LIdent)
        lx.err("expected a predicate after the modal value", p.line);
      if (reserved_preds().count(p.text))
        lx.err("'" + p.text + "' is reserved and cannot be used as a predicate",
               p.line);
      f.atom = parse_atom_args(p.text, false, &dummy);
      return f;
    }
    if (t.type == Tok::Sym && t.text == "~A") {
      lx.next();
      return node(FKind::NotA, {meta_unary()});
    }
    if (t.type == Tok::UIdent && t.text == "E") {
      lx.next();
      lx.expect_sym("(");
      Formula inner = mv_expr();
      lx.expect_sym(")");
      return node(FKind::Encap, {inner});
    }
    if (t.type == Tok::LIdent) {
      if (t.text == "not") { lx.next(); return node(FKind::Not, {meta_unary()}); }
      if (t.text == "dia") { lx.next(); return node(FKind::Dia, {meta_unary()}); }
      if (t.text == "box_gamma" || t.text == "box") {
        lx.next();
        return node(FKind::BoxGamma, {mv_unary()});
      }
      if (t.text == "dia_d") { lx.next(); return node(FKind::DiaD, {mv_unary()}); }
      lx.next();
      // Flat atom (p_F) or plain atom.
      if (t.text.size() > 2 && t.text.ends_with("_F")) {
        std::string base_pred = t.text.substr(0, t.text.size() - 2);
        if (reserved_preds().count(base_pred))
          lx.err("'" + base_pred + "' is reserved", t.line);
        std::string vt;
        Formula f = node(FKind::FlatAtom);
        f.atom = parse_atom_args(base_pred, true, &vt);
        if (vt == "e")
          f.value = std::nullopt;
        else
          f.value = resolve_or_fail(lx, lat, vt, t.line);
        return f;
      }
      if (reserved_preds().count(t.text))
        lx.err("'" + t.text + "' is reserved and cannot be used as a predicate",
               t.line);
      std::string dummy;
      Formula f = node(FKind::Atom);
      f.atom = parse_atom_args(t.text, false, &dummy);
      return f;
    }
    lx.err("unexpected '" + (t.type == Tok::End ? "<eof>" : t.text) +
               "' in formula",
           t.line);
  }

  Formula meta_and() {
    Formula f = meta_unary();
    while (true) {
      Tok t = lx.peek();
      if (t.type == Tok::LIdent && t.text == "and") {
        lx.next();
        f = node(FKind::And, {std::move(f), meta_unary()});
      } else if (t.type == Tok::LIdent && t.text == "andA") {
        lx.next();
        f = node(FKind::AndA, {std::move(f), meta_unary()});
      } else {
        return f;
      }
    }
  }

  Formula meta_or() {
    Formula f = meta_and();
    while (true) {
      Tok t = lx.peek();
      if (t.type == Tok::LIdent && t.text == "or") {
        lx.next();
        f = node(FKind::Or, {std::move(f), meta_and()});
      } else if (t.type == Tok::LIdent && t.text == "orA") {
        lx.next();
        f = node(FKind::OrA, {std::move(f), meta_and()});
      } else {
        return f;
      }
    }
  }

  Formula meta_expr() {
    Formula f = meta_or();
    Tok t = lx.peek();
    if (t.type == Tok::Sym && t.text == "->") {
      lx.next();
      return node(FKind::Impl, {std::move(f), meta_expr()});
    }
    if (t.type == Tok::Sym && t.text == "<-A") {
      lx.next();
      return node(FKind::LarrA, {std::move(f), meta_expr()});
    }
    return f;
  }

  // Many-valued layer.
  Formula mv_unary() {
    Tok t = lx.peek();
    if (t.type == Tok::Sym && t.text == "(") {
      lx.next();
      Formula f = mv_expr();
      lx.expect_sym(")");
      return f;
    }
    if (t.type == Tok::Sym && t.text == "~") {
      lx.next();
      return node(FKind::MvNeg, {mv_unary()});
    }
    if (t.type == Tok::Sym && t.text == "@") {
      lx.next();
      int at = lx.line;
      std::string vt = lx.scan_value();
      Formula f = node(FKind::MvConst);
      f.value = resolve_or_fail(lx, lat, vt, at);
      return f;
    }
    if (t.type == Tok::LIdent) {
      lx.next();
      if (lat.extras.count(t.text)) {
        const Connective& con = lat.extras.at(t.text);
        lx.expect_sym("(");
        std::vector<Formula> kids;
        kids.push_back(mv_expr());
        if (con.arity == 2) {
          lx.expect_sym(",");
          kids.push_back(mv_expr());
        }
        lx.expect_sym(")");
        Formula f = node(FKind::MvOp, std::move(kids));
        f.op_name = t.text;
        return f;
      }
      if (reserved_preds().count(t.text))
        lx.err("'" + t.text + "' is reserved and cannot be used as a predicate",
               t.line);
      std::string dummy;
      Formula f = node(FKind::Atom);
      f.atom = parse_atom_args(t.text, false, &dummy);
      return f;
    }
    lx.err("unexpected '" + (t.type == Tok::End ? "<eof>" : t.text) +
               "' in many-valued formula",
           t.line);
  }

  Formula mv_and() {
    Formula f = mv_unary();
    while (true) {
      Tok t = lx.peek();
      if (t.type == Tok::LIdent && t.text == "and") {
        lx.next();
        f = node(FKind::MvAnd, {std::move(f), mv_unary()});
      } else {
        return f;
      }
    }
  }

  Formula mv_or() {
    Formula f = mv_and();
    while (true) {
      Tok t = lx.peek();
      if (t.type == Tok::LIdent && t.text == "or") {
        lx.next();
        f = node(FKind::MvOr, {std::move(f), mv_and()});
      } else {
        return f;
      }
    }
  }

  Formula mv_expr() {
    Formula f = mv_or();
    Tok t = lx.peek();
    if (t.type == Tok::Sym && t.text == "<-") {
      lx.next();
      return node(FKind::MvLarr, {std::move(f), mv_expr()});
    }
    if (t.type == Tok::Sym && t.text == "->") {
      lx.next();
      return node(FKind::MvRarr, {std::move(f), mv_expr()});
    }
    return f;
  }
};

}  // namespace

Formula parse_formula(const Lattice& lat, const std::string& text) {
  FormulaParser fp{Lexer{text, 0, 1, "formula"}, lat};
  Formula f = fp.meta_expr();
  Tok t = fp.lx.next();
  if (t.type != Tok::End)
    fp.lx.err("unexpected trailing '" + t.text + "'", t.line);
  return f;
}

// ---------------------------------------------------------------------------
// Formula printing with minimal parentheses.

namespace {

int prec_of(FKind k) {
  switch (k) {
    case FKind::Impl: case FKind::LarrA: case FKind::MvLarr: case FKind::MvRarr:
      return 1;
    case FKind::Or: case FKind::OrA: case FKind::MvOr:
      return 2;
    case FKind::And: case FKind::AndA: case FKind::MvAnd:
      return 3;
    case FKind::Not: case FKind::NotA: case FKind::MvNeg: case FKind::Dia:
    case FKind::BoxGamma: case FKind::DiaD:
      return 4;
    default:
      return 5;
  }
}

bool is_binary(FKind k) { return prec_of(k) <= 3 && k != FKind::MvOp; }

void print_rec(const Lattice& lat, const Formula& f, std::string& out);

void print_child(const Lattice& lat, const Formula& f, const Formula& kid,
                 bool right_side, std::string& out) {
  int pp = prec_of(f.kind), kp = prec_of(kid.kind);
  bool parens = false;
  if (is_binary(kid.kind)) {
    if (kp < pp) parens = true;
    else if (kp == pp && kid.kind != f.kind) parens = true;
    else if (kp == pp && pp == 1 && !right_side) parens = true;  // arrows right-assoc
    else if (kp == pp && pp > 1 && right_side) parens = true;    // and/or left-assoc
  }
  if (parens) out += "(";
  print_rec(lat, kid, out);
  if (parens) out += ")";
}

void print_rec(const Lattice& lat, const Formula& f, std::string& out) {
  switch (f.kind) {
    case FKind::Atom: out += print_atom(f.atom); return;
    case FKind::MvConst: out += "@" + lat.id(*f.value); return;
    case FKind::MAtom:
      out += "[" + lat.id(*f.value) + "]" + print_atom(f.atom);
      return;
    case FKind::FlatAtom: {
      out += f.atom.pred + "_F(";
      for (const Term& t : f.atom.args) out += t.name + ", ";
      out += (f.value ? lat.id(*f.value) : std::string("e")) + ")";
      return;
    }
    case FKind::Encap:
      out += "E(";
      print_rec(lat, f.kids[0], out);
      out += ")";
      return;
    case FKind::MvOp: {
      out += f.op_name + "(";
      print_rec(lat, f.kids[0], out);
      if (f.kids.size() > 1) {
        out += ", ";
        print_rec(lat, f.kids[1], out);
      }
      out += ")";
      return;
    }
    case FKind::MvNeg:
      out += "~";
      print_child(lat, f, f.kids[0], false, out);
      return;
    case FKind::NotA:
      out += "~A ";
      print_child(lat, f, f.kids[0], false, out);
      return;
    case FKind::Not:
      out += "not ";
      print_child(lat, f, f.kids[0], false, out);
      return;
    case FKind::Dia:
      out += "dia ";
      print_child(lat, f, f.kids[0], false, out);
      return;
    case FKind::BoxGamma:
      out += "box_gamma ";
      print_child(lat, f, f.kids[0], false, out);
      return;
    case FKind::DiaD:
      out += "dia_d ";
      print_child(lat, f, f.kids[0], false, out);
      return;
    default: break;
  }
  const char* op = nullptr;
  switch (f.kind) {
    case FKind::MvAnd: case FKind::And: op = " and "; break;
    case FKind::AndA: op = " andA "; break;
    case FKind::MvOr: case FKind::Or: op = " or "; break;
    case FKind::OrA: op = " orA "; break;
    case FKind::MvLarr: op = " <- "; break;
    case FKind::MvRarr: case FKind::Impl: op = " -> "; break;
    case FKind::LarrA: op = " <-A "; break;
    default: op = " ? "; break;
  }
  print_child(lat, f, f.kids[0], false, out);
  out += op;
  print_child(lat, f, f.kids[1], true, out);
}

}  // namespace

std::string print_formula(const Lattice& lat, const Formula& f) {
  std::string out;
  print_rec(lat, f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Formula classification.

namespace {

template <typename Pred>
bool any_node(const Formula& f, Pred pred) {
  if (pred(f)) return true;
  for (const Formula& k : f.kids)
    if (any_node(k, pred)) return true;
  return false;
}

}  // namespace

bool is_mv_formula(const Formula& f) {
  return !any_node(f, [](const Formula& n) {
    switch (n.kind) {
      case FKind::Atom: case FKind::MvConst: case FKind::MvNeg: case FKind::MvAnd:
      case FKind::MvOr: case FKind::MvLarr: case FKind::MvRarr: case FKind::MvOp:
        return false;
      default:
        return true;
    }
  });
}

bool has_flat_ops(const Formula& f) {
  return any_node(f, [](const Formula& n) {
    switch (n.kind) {
      case FKind::FlatAtom: case FKind::Encap: case FKind::NotA: case FKind::AndA:
      case FKind::OrA: case FKind::LarrA: case FKind::Dia:
        return true;
      default:
        return false;
    }
  });
}

bool has_abstract_ops(const Formula& f) {
  return any_node(f, [](const Formula& n) {
    return n.kind == FKind::BoxGamma || n.kind == FKind::DiaD;
  });
}

bool formula_is_ground(const Formula& f) {
  return !any_node(f, [](const Formula& n) {
    for (const Term& t : n.atom.args)
      if (t.is_var) return true;
    return false;
  });
}

}  // namespace mvred
