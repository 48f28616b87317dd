#include "mvred/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mvred {

namespace {

// ---------------------------------------------------------------------------
// Exact rationals for the graded lattices.  Grid points are i/(k-1), so all
// arithmetic stays well inside 64 bits.

struct Rat {
  long long n = 0, d = 1;
};

Rat make_rat(long long n, long long d) {
  if (d < 0) { n = -n; d = -d; }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) { n /= g; d /= g; }
  return Rat{n, d};
}

bool rat_lt(Rat a, Rat b) { return a.n * b.d < b.n * a.d; }

long long pow10ll(int e) {
  long long r = 1;
  while (e-- > 0) r *= 10;
  return r;
}

// Canonical text: integer when whole, terminating decimal when the
// denominator is 2^a 5^b, fraction text otherwise (e.g. 1/6 for k=7 grids).
std::string rat_text(Rat r) {
  if (r.d == 1) return std::to_string(r.n);
  long long d = r.d;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(r.n) + "/" + std::to_string(r.d);
  int digits = std::max(twos, fives);
  long long scaled = r.n * pow10ll(digits) / r.d;
  std::string frac = std::to_string(scaled);
  frac.insert(frac.begin(), digits - static_cast<int>(frac.size()), '0');
  while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
  return "0." + frac;
}

std::optional<Rat> rat_parse(std::string_view s) {
  auto all_digits = [](std::string_view v) {
    return !v.empty() &&
           std::all_of(v.begin(), v.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    long long d = std::stoll(std::string(den));
    if (d == 0) return std::nullopt;
    return make_rat(std::stoll(std::string(num)), d);
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    if (!all_digits(s)) return std::nullopt;
    return make_rat(std::stoll(std::string(s)), 1);
  }
  auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
  if (!all_digits(whole) || !all_digits(frac) || frac.size() > 15) return std::nullopt;
  long long scale = pow10ll(static_cast<int>(frac.size()));
  return make_rat(std::stoll(std::string(whole)) * scale + std::stoll(std::string(frac)),
                  scale);
}

// ---------------------------------------------------------------------------
// Order-theoretic derivation: meet/join tables as glb/lub of leq.

std::optional<std::uint32_t> bound_of(const std::vector<std::uint8_t>& leq,
                                      std::size_t n, std::uint32_t a,
                                      std::uint32_t b, bool lower) {
  auto le = [&](std::uint32_t x, std::uint32_t y) { return leq[x * n + y] != 0; };
  std::vector<std::uint32_t> cand;
  for (std::uint32_t c = 0; c < n; ++c) {
    bool in = lower ? (le(c, a) && le(c, b)) : (le(a, c) && le(b, c));
    if (in) cand.push_back(c);
  }
  for (std::uint32_t m : cand) {
    bool extreme = true;
    for (std::uint32_t c : cand)
      if (lower ? !le(c, m) : !le(m, c)) { extreme = false; break; }
    if (extreme) return m;
  }
  return std::nullopt;
}

// Fills meet/join/implies/bottom/top from elems + leq_tab.  Throws a Lattice
// error naming the offending pair when leq is not a (bounded) lattice order.
void finalize_tables(Lattice& lat) {
  std::size_t n = lat.size();
  lat.meet_tab.assign(n * n, TruthValue{0});
  lat.join_tab.assign(n * n, TruthValue{0});
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      auto m = bound_of(lat.leq_tab, n, a, b, true);
      auto j = bound_of(lat.leq_tab, n, a, b, false);
      if (!m)
        fail(ErrorKind::Lattice, "no greatest lower bound for (" + lat.elems[a] +
                                     ", " + lat.elems[b] + ")");
      if (!j)
        fail(ErrorKind::Lattice, "no least upper bound for (" + lat.elems[a] +
                                     ", " + lat.elems[b] + ")");
      lat.meet_tab[a * n + b] = TruthValue{*m};
      lat.join_tab[a * n + b] = TruthValue{*j};
    }

  auto global = [&](bool least) -> std::optional<std::uint32_t> {
    for (std::uint32_t c = 0; c < n; ++c) {
      bool ok = true;
      for (std::uint32_t x = 0; x < n; ++x)
        if (least ? !lat.leq(TruthValue{c}, TruthValue{x})
                  : !lat.leq(TruthValue{x}, TruthValue{c})) { ok = false; break; }
      if (ok) return c;
    }
    return std::nullopt;
  };
  auto bot = global(true), top = global(false);
  if (!bot || !top) fail(ErrorKind::Lattice, "lattice is not bounded");
  lat.bottom = TruthValue{*bot};
  lat.top = TruthValue{*top};

  // Residuum by enumeration: sup of {c | c meet a <= b}.  The fold over join
  // is that supremum; residuation itself is re-checked by check_lattice.
  lat.implies_tab.assign(n * n, TruthValue{0});
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      TruthValue r = lat.bottom;
      for (std::uint32_t c = 0; c < n; ++c)
        if (lat.leq(lat.meet(TruthValue{c}, TruthValue{a}), TruthValue{b}))
          r = lat.join(r, TruthValue{c});
      lat.implies_tab[a * n + b] = r;
    }
}

void set_leq(Lattice& lat, std::uint32_t a, std::uint32_t b) {
  lat.leq_tab[a * lat.size() + b] = 1;
}

// ---------------------------------------------------------------------------
// Built-in lattices.

Lattice make_belnap4() {
  Lattice lat;
  lat.kind = LatticeKind::Belnap;
  lat.name = "belnap4";
  lat.selector = lat.name;
  lat.elems = {"f", "bot", "top", "t"};
  std::size_t n = 4;
  lat.leq_tab.assign(n * n, 0);
  const std::uint32_t F = 0, BOT = 1, TOP = 2, T = 3;
  for (std::uint32_t x = 0; x < n; ++x) {
    set_leq(lat, x, x);
    set_leq(lat, F, x);
    set_leq(lat, x, T);
  }
  lat.neg_tab = {TruthValue{T}, TruthValue{BOT}, TruthValue{TOP}, TruthValue{F}};
  finalize_tables(lat);

  // Knowledge ordering: bot <=k f,t <=k top; f and t incomparable.
  std::vector<std::uint8_t> leq_k(n * n, 0);
  for (std::uint32_t x = 0; x < n; ++x) {
    leq_k[x * n + x] = 1;
    leq_k[BOT * n + x] = 1;
    leq_k[x * n + TOP] = 1;
  }
  Connective otimes{2, {}}, oplus{2, {}};
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      otimes.table.push_back(TruthValue{*bound_of(leq_k, n, a, b, true)});
      oplus.table.push_back(TruthValue{*bound_of(leq_k, n, a, b, false)});
    }
  lat.extras["otimes"] = std::move(otimes);
  lat.extras["oplus"] = std::move(oplus);

  // Conflation swaps the knowledge extremes and fixes the classical values.
  lat.extras["minus"] =
      Connective{1, {TruthValue{F}, TruthValue{TOP}, TruthValue{BOT}, TruthValue{T}}};
  // Moore's crisping: t exactly on {top, t}.
  lat.extras["mu"] =
      Connective{1, {TruthValue{F}, TruthValue{F}, TruthValue{T}, TruthValue{T}}};
  // Pseudo-complement x -> f.
  Connective neg_t{1, {}};
  for (std::uint32_t x = 0; x < n; ++x)
    neg_t.table.push_back(lat.implies(TruthValue{x}, lat.bottom));
  lat.extras["neg_t"] = std::move(neg_t);
  return lat;
}

void require_grid(int k, const std::string& name) {
  if (k < 2)
    fail(ErrorKind::Usage, name + " needs at least 2 grid points, got " +
                               std::to_string(k));
}

Lattice make_fuzzy_chain(int k) {
  require_grid(k, "fuzzy_chain");
  Lattice lat;
  lat.kind = LatticeKind::Fuzzy;
  lat.name = "fuzzy:" + std::to_string(k);
  lat.selector = lat.name;
  for (int i = 0; i < k; ++i) lat.elems.push_back(rat_text(make_rat(i, k - 1)));
  std::size_t n = k;
  lat.leq_tab.assign(n * n, 0);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a; b < n; ++b) set_leq(lat, a, b);
  lat.neg_tab.resize(n);
  for (std::uint32_t i = 0; i < n; ++i)
    lat.neg_tab[i] = TruthValue{static_cast<std::uint32_t>(k - 1) - i};
  finalize_tables(lat);
  return lat;
}

Lattice make_interval(int k) {
  require_grid(k, "interval");
  Lattice lat;
  lat.kind = LatticeKind::Interval;
  lat.name = "interval:" + std::to_string(k);
  lat.selector = lat.name;
  std::vector<std::pair<int, int>> iv;  // grid index pairs lo <= hi
  for (int lo = 0; lo < k; ++lo)
    for (int hi = lo; hi < k; ++hi) iv.emplace_back(lo, hi);
  for (auto [lo, hi] : iv)
    lat.elems.push_back("[" + rat_text(make_rat(lo, k - 1)) + "," +
                        rat_text(make_rat(hi, k - 1)) + "]");
  std::size_t n = iv.size();
  lat.leq_tab.assign(n * n, 0);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (iv[a].first <= iv[b].first && iv[a].second <= iv[b].second)
        set_leq(lat, a, b);
  // neg [x,y] = [1-y, 1-x]; the grid is closed under reflection.
  lat.neg_tab.resize(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    std::pair<int, int> m{k - 1 - iv[a].second, k - 1 - iv[a].first};
    auto it = std::find(iv.begin(), iv.end(), m);
    lat.neg_tab[a] = TruthValue{static_cast<std::uint32_t>(it - iv.begin())};
  }
  finalize_tables(lat);
  return lat;
}

Lattice make_confidence(int k) {
  require_grid(k, "confidence");
  Lattice lat;
  lat.kind = LatticeKind::Confidence;
  lat.name = "confidence:" + std::to_string(k);
  lat.selector = lat.name;
  std::vector<std::pair<int, int>> iv;
  std::vector<std::string> iv_name;
  for (int lo = 0; lo < k; ++lo)
    for (int hi = lo; hi < k; ++hi) {
      iv.emplace_back(lo, hi);
      iv_name.push_back("[" + rat_text(make_rat(lo, k - 1)) + "," +
                        rat_text(make_rat(hi, k - 1)) + "]");
    }
  std::vector<std::pair<int, int>> pairs;  // (belief interval, doubt interval)
  for (std::size_t b = 0; b < iv.size(); ++b)
    for (std::size_t d = 0; d < iv.size(); ++d) {
      pairs.emplace_back(static_cast<int>(b), static_cast<int>(d));
      lat.elems.push_back("(" + iv_name[b] + "," + iv_name[d] + ")");
    }
  std::size_t n = pairs.size();
  lat.leq_tab.assign(n * n, 0);
  auto ivle = [&](int a, int b) {
    return iv[a].first <= iv[b].first && iv[a].second <= iv[b].second;
  };
  // Truth goes up with belief and down with doubt.
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (ivle(pairs[a].first, pairs[b].first) && ivle(pairs[b].second, pairs[a].second))
        set_leq(lat, a, b);
  // neg swaps belief and doubt.
  lat.neg_tab.resize(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    std::pair<int, int> m{pairs[a].second, pairs[a].first};
    auto it = std::find(pairs.begin(), pairs.end(), m);
    lat.neg_tab[a] = TruthValue{static_cast<std::uint32_t>(it - pairs.begin())};
  }
  finalize_tables(lat);
  return lat;
}

// ---------------------------------------------------------------------------
// Declaration file parsing.

struct DeclLexer {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;

  void skip_ws() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') { ++line; ++pos; }
      else if (std::isspace(static_cast<unsigned char>(c))) ++pos;
      else if (c == '#') { while (pos < src.size() && src[pos] != '\n') ++pos; }
      else break;
    }
  }

  [[noreturn]] void err(const std::string& msg) {
    fail(ErrorKind::Parse, "lattice declaration line " + std::to_string(line) +
                               ": " + msg);
  }

  std::string next() {
    skip_ws();
    if (pos >= src.size()) return "";
    char c = src[pos];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                                  src[pos] == '_'))
        ++pos;
      return std::string(src.substr(start, pos - start));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
        ++pos;
      return std::string(src.substr(start, pos - start));
    }
    if (src.compare(pos, 2, "->") == 0) { pos += 2; return "->"; }
    if (src.compare(pos, 2, "<=") == 0) { pos += 2; return "<="; }
    ++pos;
    return std::string(1, c);
  }

  std::string peek() {
    auto save_pos = pos;
    auto save_line = line;
    std::string t = next();
    pos = save_pos;
    line = save_line;
    return t;
  }

  void expect(const std::string& tok) {
    std::string got = next();
    if (got != tok)
      err("expected '" + tok + "', got '" + (got.empty() ? "<eof>" : got) + "'");
  }
};

}  // namespace

std::optional<TruthValue> Lattice::find(std::string_view elem_id) const {
  for (std::uint32_t i = 0; i < elems.size(); ++i)
    if (elems[i] == elem_id) return TruthValue{i};
  return std::nullopt;
}

const Connective* Lattice::extra(std::string_view op_name) const {
  auto it = extras.find(std::string(op_name));
  return it == extras.end() ? nullptr : &it->second;
}

TruthValue residuum(const Lattice& lat, TruthValue a, TruthValue b) {
  TruthValue r = lat.bottom;
  for (std::uint32_t c = 0; c < lat.size(); ++c)
    if (lat.leq(lat.meet(TruthValue{c}, a), b)) r = lat.join(r, TruthValue{c});
  if (!lat.leq(lat.meet(r, a), b))
    fail(ErrorKind::Lattice,
         "lattice " + lat.name + " is not residuated at (" + lat.id(a) + ", " +
             lat.id(b) + "): sup of the candidate set escapes it");
  return r;
}

std::vector<AxiomViolation> check_lattice(const Lattice& lat) {
  std::vector<AxiomViolation> out;
  std::size_t n = lat.size();
  auto V = [&](std::uint32_t i) { return TruthValue{i}; };
  auto name = [&](TruthValue v) { return lat.id(v); };
  auto report = [&](const std::string& axiom, const std::string& detail) {
    // One witness per law keeps the diagnostics readable.
    for (const auto& v : out)
      if (v.axiom == axiom) return;
    out.push_back({axiom, detail});
  };

  for (std::uint32_t a = 0; a < n; ++a)
    if (!lat.leq(V(a), V(a)))
      report("leq-reflexive", name(V(a)) + " is not leq itself");
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a != b && lat.leq(V(a), V(b)) && lat.leq(V(b), V(a)))
        report("leq-antisymmetric",
               name(V(a)) + " and " + name(V(b)) + " are mutually leq");
      for (std::uint32_t c = 0; c < n; ++c)
        if (lat.leq(V(a), V(b)) && lat.leq(V(b), V(c)) && !lat.leq(V(a), V(c)))
          report("leq-transitive", name(V(a)) + " <= " + name(V(b)) + " <= " +
                                       name(V(c)) + " but not " + name(V(a)) +
                                       " <= " + name(V(c)));
    }

  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      TruthValue m = lat.meet(V(a), V(b)), j = lat.join(V(a), V(b));
      if (!lat.leq(m, V(a)) || !lat.leq(m, V(b)))
        report("meet-is-glb", "meet(" + name(V(a)) + ", " + name(V(b)) + ") = " +
                                  name(m) + " is not a lower bound");
      if (!lat.leq(V(a), j) || !lat.leq(V(b), j))
        report("join-is-lub", "join(" + name(V(a)) + ", " + name(V(b)) + ") = " +
                                  name(j) + " is not an upper bound");
      for (std::uint32_t c = 0; c < n; ++c) {
        if (lat.leq(V(c), V(a)) && lat.leq(V(c), V(b)) && !lat.leq(V(c), m))
          report("meet-is-glb", "lower bound " + name(V(c)) + " of (" + name(V(a)) +
                                    ", " + name(V(b)) + ") is not leq meet = " +
                                    name(m));
        if (lat.leq(V(a), V(c)) && lat.leq(V(b), V(c)) && !lat.leq(j, V(c)))
          report("join-is-lub", "upper bound " + name(V(c)) + " of (" + name(V(a)) +
                                    ", " + name(V(b)) + ") is not geq join = " +
                                    name(j));
      }
    }

  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      if (lat.meet(V(a), V(b)) != lat.meet(V(b), V(a)))
        report("meet-commutative", "at (" + name(V(a)) + ", " + name(V(b)) + ")");
      if (lat.join(V(a), V(b)) != lat.join(V(b), V(a)))
        report("join-commutative", "at (" + name(V(a)) + ", " + name(V(b)) + ")");
      if (lat.meet(V(a), lat.join(V(a), V(b))) != V(a))
        report("absorption", "meet(" + name(V(a)) + ", join(" + name(V(a)) + ", " +
                                 name(V(b)) + ")) != " + name(V(a)));
      if (lat.join(V(a), lat.meet(V(a), V(b))) != V(a))
        report("absorption", "join(" + name(V(a)) + ", meet(" + name(V(a)) + ", " +
                                 name(V(b)) + ")) != " + name(V(a)));
      for (std::uint32_t c = 0; c < n; ++c) {
        if (lat.meet(V(a), lat.meet(V(b), V(c))) != lat.meet(lat.meet(V(a), V(b)), V(c)))
          report("meet-associative", "at (" + name(V(a)) + ", " + name(V(b)) + ", " +
                                         name(V(c)) + ")");
        if (lat.join(V(a), lat.join(V(b), V(c))) != lat.join(lat.join(V(a), V(b)), V(c)))
          report("join-associative", "at (" + name(V(a)) + ", " + name(V(b)) + ", " +
                                         name(V(c)) + ")");
      }
    }
    if (lat.meet(V(a), V(a)) != V(a) || lat.join(V(a), V(a)) != V(a))
      report("idempotence", "at " + name(V(a)));
  }

  for (std::uint32_t a = 0; a < n; ++a) {
    if (!lat.leq(lat.bottom, V(a)))
      report("bounded", "bottom " + name(lat.bottom) + " is not leq " + name(V(a)));
    if (!lat.leq(V(a), lat.top))
      report("bounded", name(V(a)) + " is not leq top " + name(lat.top));
  }

  if (lat.neg(lat.bottom) != lat.top)
    report("neg-bounds", "neg(" + name(lat.bottom) + ") = " +
                             name(lat.neg(lat.bottom)) + ", expected " + name(lat.top));
  if (lat.neg(lat.top) != lat.bottom)
    report("neg-bounds", "neg(" + name(lat.top) + ") = " + name(lat.neg(lat.top)) +
                             ", expected " + name(lat.bottom));
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (lat.leq(V(a), V(b)) && !lat.leq(lat.neg(V(b)), lat.neg(V(a))))
        report("neg-antitonic", name(V(a)) + " <= " + name(V(b)) + " but neg(" +
                                    name(V(b)) + ") = " + name(lat.neg(V(b))) +
                                    " is not leq neg(" + name(V(a)) + ") = " +
                                    name(lat.neg(V(a))));

  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      TruthValue r = lat.implies(V(a), V(b));
      if (!lat.leq(lat.meet(r, V(a)), V(b)))
        report("residuation", "implies(" + name(V(a)) + ", " + name(V(b)) + ") = " +
                                  name(r) + " is not in the candidate set");
      for (std::uint32_t c = 0; c < n; ++c)
        if (lat.leq(lat.meet(V(c), V(a)), V(b)) && !lat.leq(V(c), r))
          report("residuation", "candidate " + name(V(c)) + " for implies(" +
                                    name(V(a)) + ", " + name(V(b)) +
                                    ") is not leq the table value " + name(r));
      bool is_top = lat.implies(V(a), V(b)) == lat.top;
      if (is_top != lat.leq(V(a), V(b)))
        report("implies-top-iff-leq", "implies(" + name(V(a)) + ", " + name(V(b)) +
                                          ") = " + name(r) +
                                          (is_top ? " although " : " but ") +
                                          name(V(a)) +
                                          (is_top ? " is not leq " : " <= ") +
                                          name(V(b)));
    }

  for (const auto& [op_name, con] : lat.extras) {
    std::size_t want = con.arity == 1 ? n : n * n;
    if (con.arity != 1 && con.arity != 2)
      report("extra-connective", op_name + " has unsupported arity " +
                                     std::to_string(con.arity));
    else if (con.table.size() != want)
      report("extra-connective", op_name + " table has " +
                                     std::to_string(con.table.size()) +
                                     " entries, expected " + std::to_string(want));
    else
      for (TruthValue v : con.table)
        if (v.i >= n) {
          report("extra-connective", op_name + " maps outside the carrier");
          break;
        }
  }

  return out;
}

Lattice builtin_lattice(const std::string& name, int k) {
  if (name == "belnap4") return make_belnap4();
  if (name == "fuzzy_chain") return make_fuzzy_chain(k);
  if (name == "interval") return make_interval(k);
  if (name == "confidence") return make_confidence(k);
  fail(ErrorKind::Usage, "unknown built-in lattice '" + name + "'");
}

Lattice load_lattice_text(const std::string& text, const std::string& display_name) {
  DeclLexer lx{text};
  lx.expect("lattice");
  std::string decl_name = lx.next();
  if (decl_name.empty() || !std::isalpha(static_cast<unsigned char>(decl_name[0])))
    lx.err("expected lattice name");
  lx.expect("{");

  Lattice lat;
  lat.kind = LatticeKind::Custom;
  lat.name = decl_name.empty() ? display_name : decl_name;
  lat.selector = "file:" + display_name;
  std::map<std::string, std::uint32_t> index;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> leq_facts;
  std::map<std::uint32_t, std::uint32_t> neg_map;
  struct OpDecl {
    int arity;
    std::map<std::vector<std::uint32_t>, std::uint32_t> entries;
  };
  std::map<std::string, OpDecl> ops;

  auto elem = [&](const std::string& id) -> std::uint32_t {
    auto it = index.find(id);
    if (it == index.end()) lx.err("unknown element '" + id + "'");
    return it->second;
  };

  for (std::string key = lx.next(); key != "}"; key = lx.next()) {
    if (key.empty()) lx.err("unexpected end of declaration");
    if (key == "elements") {
      lx.expect(":");
      for (std::string id = lx.next(); id != ";"; id = lx.next()) {
        if (id.empty()) lx.err("unterminated elements entry");
        if (id == "e") lx.err("element id 'e' is reserved for the error mark");
        if (index.count(id)) lx.err("element id '" + id + "' repeated");
        index[id] = static_cast<std::uint32_t>(lat.elems.size());
        lat.elems.push_back(id);
      }
    } else if (key == "leq") {
      lx.expect(":");
      while (true) {
        std::string a = lx.next();
        lx.expect("<=");
        std::string b = lx.next();
        leq_facts.emplace_back(elem(a), elem(b));
        std::string sep = lx.next();
        if (sep == ";") break;
        if (sep != ",") lx.err("expected ',' or ';' after leq pair");
      }
    } else if (key == "neg") {
      lx.expect(":");
      std::string a = lx.next();
      lx.expect("->");
      std::string b = lx.next();
      if (!neg_map.emplace(elem(a), elem(b)).second)
        lx.err("neg entry for '" + a + "' repeated");
      lx.expect(";");
    } else if (key == "op") {
      std::string op_name = lx.next();
      lx.expect("/");
      std::string ar = lx.next();
      if (ar != "1" && ar != "2") lx.err("op arity must be 1 or 2");
      int arity = ar == "1" ? 1 : 2;
      auto [it, fresh] = ops.emplace(op_name, OpDecl{arity, {}});
      if (!fresh && it->second.arity != arity)
        lx.err("op '" + op_name + "' redeclared with different arity");
      lx.expect(":");
      std::vector<std::uint32_t> args;
      if (arity == 2) {
        lx.expect("(");
        std::string a = lx.next();
        lx.expect(",");
        std::string b = lx.next();
        lx.expect(")");
        args = {elem(a), elem(b)};
      } else {
        args = {elem(lx.next())};
      }
      lx.expect("->");
      std::string r = lx.next();
      if (!it->second.entries.emplace(args, elem(r)).second)
        lx.err("op '" + op_name + "' entry repeated");
      lx.expect(";");
    } else {
      lx.err("unknown section '" + key + "'");
    }
  }

  if (lat.elems.empty()) fail(ErrorKind::Parse, "lattice has no elements");
  std::size_t n = lat.size();
  lat.leq_tab.assign(n * n, 0);
  for (std::uint32_t x = 0; x < n; ++x) lat.leq_tab[x * n + x] = 1;
  for (auto [a, b] : leq_facts) lat.leq_tab[a * n + b] = 1;
  // Reflexive-transitive closure; declarations may list covers only.
  for (std::uint32_t via = 0; via < n; ++via)
    for (std::uint32_t a = 0; a < n; ++a)
      if (lat.leq_tab[a * n + via])
        for (std::uint32_t b = 0; b < n; ++b)
          if (lat.leq_tab[via * n + b]) lat.leq_tab[a * n + b] = 1;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b)
      if (lat.leq_tab[a * n + b] && lat.leq_tab[b * n + a])
        fail(ErrorKind::Parse, "leq is not a partial order: " + lat.elems[a] +
                                   " and " + lat.elems[b] + " are mutually leq");

  lat.neg_tab.resize(n);
  for (std::uint32_t x = 0; x < n; ++x) {
    auto it = neg_map.find(x);
    if (it == neg_map.end())
      fail(ErrorKind::Parse, "neg entry missing for '" + lat.elems[x] + "'");
    lat.neg_tab[x] = TruthValue{it->second};
  }

  finalize_tables(lat);

  for (auto& [op_name, decl] : ops) {
    Connective con{decl.arity, {}};
    if (decl.arity == 1) {
      for (std::uint32_t a = 0; a < n; ++a) {
        auto it = decl.entries.find({a});
        if (it == decl.entries.end())
          fail(ErrorKind::Parse,
               "op '" + op_name + "' missing entry for " + lat.elems[a]);
        con.table.push_back(TruthValue{it->second});
      }
    } else {
      for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b) {
          auto it = decl.entries.find({a, b});
          if (it == decl.entries.end())
            fail(ErrorKind::Parse, "op '" + op_name + "' missing entry for (" +
                                       lat.elems[a] + ", " + lat.elems[b] + ")");
          con.table.push_back(TruthValue{it->second});
        }
    }
    lat.extras[op_name] = std::move(con);
  }
  return lat;
}

Lattice load_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot open lattice file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_lattice_text(buf.str(), path);
}

Lattice lattice_from_selector(const std::string& selector) {
  auto colon = selector.find(':');
  if (colon == std::string::npos) {
    if (selector == "belnap4") return make_belnap4();
    fail(ErrorKind::Usage, "unknown lattice selector '" + selector +
                               "' (expected belnap4, fuzzy:k, interval:k, "
                               "confidence:k, or file:PATH)");
  }
  std::string head = selector.substr(0, colon), rest = selector.substr(colon + 1);
  if (head == "file") return load_lattice_file(rest);
  if (head == "fuzzy" || head == "interval" || head == "confidence") {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(rest, &used);
      if (used != rest.size()) k = 0;
    } catch (const std::exception&) {
      k = 0;
    }
    if (k <= 0)
      fail(ErrorKind::Usage, "bad grid size in lattice selector '" + selector + "'");
    return builtin_lattice(head == "fuzzy" ? "fuzzy_chain" : head, k);
  }
  fail(ErrorKind::Usage, "unknown lattice selector '" + selector + "'");
}

namespace {

std::string strip_ws(std::string_view text) {
  std::string out;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

// Splits "a,b" at the top bracket level; returns false when there is not
// exactly one splitting comma.
bool split_pair(std::string_view s, std::string& a, std::string& b) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '[' || c == '(') ++depth;
    else if (c == ']' || c == ')') --depth;
    else if (c == ',' && depth == 0) {
      a = std::string(s.substr(0, i));
      b = std::string(s.substr(i + 1));
      return !a.empty() && !b.empty();
    }
  }
  return false;
}

std::optional<std::string> canon_rat(std::string_view s) {
  auto r = rat_parse(s);
  if (!r || r->n < 0 || rat_lt(Rat{1, 1}, *r)) return std::nullopt;
  return rat_text(*r);
}

std::optional<std::string> canon_interval(std::string_view s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return std::nullopt;
  std::string lo, hi;
  if (!split_pair(s.substr(1, s.size() - 2), lo, hi)) return std::nullopt;
  auto cl = canon_rat(lo), ch = canon_rat(hi);
  if (!cl || !ch) return std::nullopt;
  return "[" + *cl + "," + *ch + "]";
}

}  // namespace

std::optional<TruthValue> resolve_value_text(const Lattice& lat, std::string_view text) {
  std::string s = strip_ws(text);
  if (auto v = lat.find(s)) return v;
  switch (lat.kind) {
    case LatticeKind::Fuzzy: {
      auto c = canon_rat(s);
      return c ? lat.find(*c) : std::nullopt;
    }
    case LatticeKind::Interval: {
      auto c = canon_interval(s);
      return c ? lat.find(*c) : std::nullopt;
    }
    case LatticeKind::Confidence: {
      if (s.size() < 2 || s.front() != '(' || s.back() != ')') return std::nullopt;
      std::string b, d;
      if (!split_pair(std::string_view(s).substr(1, s.size() - 2), b, d))
        return std::nullopt;
      auto cb = canon_interval(b), cd = canon_interval(d);
      if (!cb || !cd) return std::nullopt;
      return lat.find("(" + *cb + "," + *cd + ")");
    }
    default:
      return std::nullopt;
  }
}

}  // namespace mvred
