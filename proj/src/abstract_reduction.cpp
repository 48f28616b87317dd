#include "mvred/abstract_reduction.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mvred/semantics.hpp"

namespace mvred {

namespace {

Formula atom_leaf(const HerbrandBase& base, std::size_t id) {
  Formula f;
  f.kind = FKind::Atom;
  f.atom = base.atom(id);
  return f;
}

Formula unary_node(FKind kind, Formula kid) {
  Formula f;
  f.kind = kind;
  f.kids.push_back(std::move(kid));
  return f;
}

Formula binary_node(FKind kind, Formula left, Formula right) {
  Formula f;
  f.kind = kind;
  f.kids.push_back(std::move(left));
  f.kids.push_back(std::move(right));
  return f;
}

// True on every valuation index satisfying the whole of gamma.
bool sat_all(const GroundProgram& gp, const Interpretation& I,
             const std::vector<Sentence>& gamma, const Matrix* mat) {
  for (const Sentence& s : gamma)
    if (!satisfies_sentence(gp, I, s, mat)) return false;
  return true;
}

void check_space(const GroundProgram& gp, const ValuationSpace& vs) {
  if (vs.base.size() != gp.base.size() ||
      vs.lattice.size() != gp.lattice.size())
    fail(ErrorKind::Semantic, "valuation space does not match the program");
}

}  // namespace

Interpretation ValuationSpace::decode(std::uint64_t index) const {
  Interpretation I;
  I.val.resize(base.size());
  std::uint64_t w = lattice.size();
  for (std::size_t k = base.size(); k-- > 0;) {
    I.val[k] = TruthValue{static_cast<std::uint32_t>(index % w)};
    index /= w;
  }
  return I;
}

ValuationSpace valuation_space(const GroundProgram& gp, std::uint64_t budget) {
  ValuationSpace vs{gp.lattice, gp.base, 1};
  std::uint64_t w = gp.lattice.size();
  for (std::size_t k = 0; k < gp.base.size(); ++k) {
    if (vs.count > budget / w)
      fail(ErrorKind::Budget,
           "valuation space " + std::to_string(w) + "^" +
               std::to_string(gp.base.size()) + " exceeds budget " +
               std::to_string(budget));
    vs.count *= w;
  }
  if (vs.count > budget)
    fail(ErrorKind::Budget, "valuation space " + std::to_string(vs.count) +
                                " exceeds budget " + std::to_string(budget));
  return vs;
}

Matrix matrix_from_ids(const Lattice& lat, const std::vector<std::string>& ids) {
  if (ids.empty())
    fail(ErrorKind::Usage, "designated set must not be empty");
  Matrix m;
  m.designated.assign(lat.size(), false);
  for (const std::string& id : ids) {
    std::optional<TruthValue> v = resolve_value_text(lat, id);
    if (!v)
      fail(ErrorKind::Usage, "unknown designated value '" + id +
                                 "' for lattice " + lat.name);
    m.designated[v->i] = true;
  }
  return m;
}

Sentence sentence_of(const GroundRule& r) { return Sentence{r}; }
Sentence sentence_of(const Formula& f) { return Sentence{f}; }

std::vector<Sentence> program_sentences(const GroundProgram& gp) {
  std::vector<Sentence> out;
  out.reserve(gp.rules.size());
  for (const GroundRule& r : gp.rules) out.push_back(Sentence{r});
  return out;
}

std::string print_sentence(const GroundProgram& gp, const Sentence& s) {
  if (const GroundRule* r = std::get_if<GroundRule>(&s))
    return print_formula(gp.lattice, rule_formula(gp, *r));
  return print_formula(gp.lattice, std::get<Formula>(s));
}

bool satisfies_sentence(const GroundProgram& gp, const Interpretation& I,
                        const Sentence& s, const Matrix* mat) {
  if (const GroundRule* r = std::get_if<GroundRule>(&s))
    return satisfies_rule(gp, I, *r);
  const Formula& f = std::get<Formula>(s);
  if (!is_mv_formula(f))
    fail(ErrorKind::Semantic, "sentence is not a many-valued formula: " +
                                  print_formula(gp.lattice, f));
  if (!formula_is_ground(f))
    fail(ErrorKind::Semantic,
         "sentence is not ground: " + print_formula(gp.lattice, f));
  if (!mat)
    fail(ErrorKind::Semantic, "bare formula sentence '" +
                                  print_formula(gp.lattice, f) +
                                  "' needs a designated set");
  return mat->is_designated(valuation(gp, I, f));
}

std::vector<std::uint8_t> models_of(const GroundProgram& gp, const ValuationSpace& vs,
                                    const std::vector<Sentence>& gamma,
                                    const Matrix* mat) {
  check_space(gp, vs);
  std::vector<std::uint8_t> out(vs.count, 0);
  for (std::uint64_t idx = 0; idx < vs.count; ++idx) {
    Interpretation I = vs.decode(idx);
    out[idx] = sat_all(gp, I, gamma, mat) ? 1 : 0;
  }
  return out;
}

bool consequence(const GroundProgram& gp, const ValuationSpace& vs,
                 const std::vector<Sentence>& gamma, const Sentence& phi,
                 const Matrix* mat) {
  check_space(gp, vs);
  for (std::uint64_t idx = 0; idx < vs.count; ++idx) {
    Interpretation I = vs.decode(idx);
    if (!sat_all(gp, I, gamma, mat)) continue;
    if (!satisfies_sentence(gp, I, phi, mat)) return false;
  }
  return true;
}

SuszkoModel suszko_model(const GroundProgram& gp, const ValuationSpace& vs,
                         const std::vector<Sentence>& gamma, const Matrix* mat) {
  return SuszkoModel{vs, models_of(gp, vs, gamma, mat)};
}

std::vector<std::uint8_t> extent_box(const GroundProgram& gp, const SuszkoModel& m,
                                     const Sentence& phi, const Matrix* mat) {
  check_space(gp, m.vs);
  if (m.val_gamma.size() != m.vs.count)
    fail(ErrorKind::Semantic, "model does not cover the valuation space");
  std::uint64_t n = m.vs.count;
  std::vector<std::uint8_t> out(n, 0);
  if (n <= 512) {
    // Walk the relation row of every world.  Each row is the model set, so
    // the loop re-derives the same answer everywhere; that redundancy is the
    // point, the evaluation follows the satisfaction clause literally.
    std::vector<Interpretation> worlds;
    worlds.reserve(n);
    for (std::uint64_t idx = 0; idx < n; ++idx) worlds.push_back(m.vs.decode(idx));
    for (std::uint64_t w = 0; w < n; ++w) {
      bool holds = true;
      for (std::uint64_t succ = 0; succ < n; ++succ) {
        if (!m.val_gamma[succ]) continue;
        if (!satisfies_sentence(gp, worlds[succ], phi, mat)) {
          holds = false;
          break;
        }
      }
      out[w] = holds ? 1 : 0;
    }
    return out;
  }
  bool holds = true;
  for (std::uint64_t succ = 0; succ < n; ++succ) {
    if (!m.val_gamma[succ]) continue;
    if (!satisfies_sentence(gp, m.vs.decode(succ), phi, mat)) {
      holds = false;
      break;
    }
  }
  std::fill(out.begin(), out.end(), holds ? 1 : 0);
  return out;
}

LemmaVerdict verify_suszko(const GroundProgram& gp, const ValuationSpace& vs,
                           const std::vector<Sentence>& gamma,
                           const std::vector<Sentence>& suite, const Matrix* mat) {
  SuszkoModel m = suszko_model(gp, vs, gamma, mat);
  return verify_suszko_model(gp, m, gamma, suite, mat);
}

LemmaVerdict verify_suszko_model(const GroundProgram& gp, const SuszkoModel& m,
                                 const std::vector<Sentence>& gamma,
                                 const std::vector<Sentence>& suite,
                                 const Matrix* mat) {
  LemmaVerdict v;
  v.lemma = "suszko";
  v.pass = true;
  for (const Sentence& s : suite) {
    ++v.formulas_checked;
    bool lhs = consequence(gp, m.vs, gamma, s, mat);
    std::vector<std::uint8_t> ext = extent_box(gp, m, s, mat);
    bool all_true = std::all_of(ext.begin(), ext.end(),
                                [](std::uint8_t b) { return b != 0; });
    bool all_false = std::none_of(ext.begin(), ext.end(),
                                  [](std::uint8_t b) { return b != 0; });
    if (!all_true && !all_false) {
      v.pass = false;
      v.witness_formula = print_sentence(gp, s);
      v.side_left = "box extent not two-valued";
      v.witness = "box extent not two-valued for: " + v.witness_formula;
      return v;
    }
    bool rhs = all_true;
    if (lhs != rhs) {
      v.pass = false;
      v.witness_formula = print_sentence(gp, s);
      v.side_left = lhs ? "consequence holds" : "consequence fails";
      v.side_right = rhs ? "box_gamma holds" : "box_gamma fails";
      v.witness = v.witness_formula + ": " + v.side_left + ", " + v.side_right;
      return v;
    }
  }
  return v;
}

MatrixModel matrix_model(const GroundProgram& gp, const Interpretation& I,
                         const Matrix& mat) {
  if (I.val.size() != gp.base.size())
    fail(ErrorKind::Semantic, "interpretation does not cover the Herbrand base");
  if (mat.designated.size() != gp.lattice.size())
    fail(ErrorKind::Usage, "designated set does not match the carrier");
  if (std::none_of(mat.designated.begin(), mat.designated.end(),
                   [](bool b) { return b; }))
    fail(ErrorKind::Usage, "designated set must not be empty");
  return MatrixModel{gp.lattice, gp.base, I.val, mat};
}

std::vector<bool> extent_dia(const GroundProgram& gp, const MatrixModel& m,
                             const Formula& phi) {
  if (!is_mv_formula(phi))
    fail(ErrorKind::Semantic, "dia_d takes a many-valued formula, got: " +
                                  print_formula(m.lattice, phi));
  Interpretation I{m.val};
  TruthValue v = valuation(gp, I, phi);
  std::size_t n = m.lattice.size();
  std::vector<bool> out(n, false);
  for (std::size_t w = 0; w < n; ++w) {
    // The successors of every world are the designated values; the formula
    // holds exactly at the world carrying its value.
    for (std::size_t succ = 0; succ < n; ++succ) {
      if (!m.mat.designated[succ]) continue;
      if (TruthValue{static_cast<std::uint32_t>(succ)} == v) {
        out[w] = true;
        break;
      }
    }
  }
  return out;
}

LemmaVerdict verify_matrix(const GroundProgram& gp, const MatrixModel& m,
                           const std::vector<Formula>& suite) {
  LemmaVerdict v;
  v.lemma = "matrix";
  v.pass = true;
  Interpretation I{m.val};
  for (const Formula& phi : suite) {
    ++v.formulas_checked;
    TruthValue value = valuation(gp, I, phi);
    bool lhs = m.mat.is_designated(value);
    std::vector<bool> ext = extent_dia(gp, m, phi);
    bool all_true = std::all_of(ext.begin(), ext.end(), [](bool b) { return b; });
    bool all_false = std::none_of(ext.begin(), ext.end(), [](bool b) { return b; });
    if (!all_true && !all_false) {
      v.pass = false;
      v.witness_formula = print_formula(m.lattice, phi);
      v.side_left = "dia extent not two-valued";
      v.witness = "dia extent not two-valued for: " + v.witness_formula;
      return v;
    }
    bool rhs = all_true;
    if (lhs != rhs) {
      v.pass = false;
      v.witness_formula = print_formula(m.lattice, phi);
      v.side_left = std::string("value ") + m.lattice.id(value) +
                    (lhs ? " designated" : " not designated");
      v.side_right = rhs ? "dia_d holds" : "dia_d fails";
      v.witness = v.witness_formula + ": " + v.side_left + ", " + v.side_right;
      return v;
    }
  }
  return v;
}

std::vector<Sentence> clause_suite(const GroundProgram& gp, int depth) {
  std::vector<Sentence> out;
  std::size_t n = gp.base.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t v = 0; v < gp.lattice.size(); ++v) {
      GroundRule r;
      r.head = static_cast<std::uint32_t>(a);
      r.fact_value = TruthValue{static_cast<std::uint32_t>(v)};
      out.push_back(Sentence{r});
    }
  if (depth >= 1) {
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t b = 0; b < n; ++b)
        for (int neg = 0; neg < 2; ++neg) {
          GroundRule r;
          r.head = static_cast<std::uint32_t>(h);
          r.body = {{GroundLiteral{neg != 0, static_cast<std::uint32_t>(b)}}};
          out.push_back(Sentence{r});
        }
  }
  if (depth >= 2) {
    for (std::size_t h = 0; h < n; ++h)
      for (std::size_t b1 = 0; b1 < n; ++b1)
        for (int n1 = 0; n1 < 2; ++n1)
          for (std::size_t b2 = 0; b2 < n; ++b2)
            for (int n2 = 0; n2 < 2; ++n2) {
              GroundLiteral l1{n1 != 0, static_cast<std::uint32_t>(b1)};
              GroundLiteral l2{n2 != 0, static_cast<std::uint32_t>(b2)};
              GroundRule conj;
              conj.head = static_cast<std::uint32_t>(h);
              conj.body = {{l1, l2}};
              out.push_back(Sentence{conj});
              GroundRule disj;
              disj.head = static_cast<std::uint32_t>(h);
              disj.body = {{l1}, {l2}};
              out.push_back(Sentence{disj});
            }
  }
  return out;
}

std::vector<Formula> formula_suite(const GroundProgram& gp, int depth) {
  std::vector<Formula> out;
  std::set<std::string> seen;
  auto push = [&](Formula f) {
    std::string key = print_formula(gp.lattice, f);
    if (seen.insert(key).second) out.push_back(std::move(f));
  };
  for (std::size_t a = 0; a < gp.base.size(); ++a)
    push(atom_leaf(gp.base, a));
  const FKind ops[] = {FKind::MvAnd, FKind::MvOr, FKind::MvRarr};
  for (int d = 1; d <= depth; ++d) {
    std::size_t prev = out.size();
    for (std::size_t i = 0; i < prev; ++i)
      push(unary_node(FKind::MvNeg, out[i]));
    for (FKind op : ops)
      for (std::size_t i = 0; i < prev; ++i)
        for (std::size_t j = 0; j < prev; ++j)
          push(binary_node(op, out[i], out[j]));
  }
  return out;
}

bool eval_abstract(const GroundProgram& gp, const ValuationSpace& vs,
                   const std::vector<Sentence>& gamma, const Interpretation& I,
                   const Formula& meta, const Matrix* mat) {
  switch (meta.kind) {
    case FKind::BoxGamma:
      return consequence(gp, vs, gamma, sentence_of(meta.kids[0]), mat);
    case FKind::DiaD: {
      if (!mat)
        fail(ErrorKind::Usage, "dia_d needs a designated set");
      const Formula& body = meta.kids[0];
      if (!is_mv_formula(body))
        fail(ErrorKind::Semantic, "dia_d takes a many-valued formula, got: " +
                                      print_formula(gp.lattice, body));
      return mat->is_designated(valuation(gp, I, body));
    }
    case FKind::Not:
      return !eval_abstract(gp, vs, gamma, I, meta.kids[0], mat);
    case FKind::And:
      return eval_abstract(gp, vs, gamma, I, meta.kids[0], mat) &&
             eval_abstract(gp, vs, gamma, I, meta.kids[1], mat);
    case FKind::Or:
      return eval_abstract(gp, vs, gamma, I, meta.kids[0], mat) ||
             eval_abstract(gp, vs, gamma, I, meta.kids[1], mat);
    case FKind::Impl:
      return !eval_abstract(gp, vs, gamma, I, meta.kids[0], mat) ||
             eval_abstract(gp, vs, gamma, I, meta.kids[1], mat);
    default:
      fail(ErrorKind::Semantic, "not an abstract meta formula: " +
                                    print_formula(gp.lattice, meta));
  }
}

}  // namespace mvred
