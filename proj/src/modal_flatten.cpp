#include "mvred/modal_flatten.hpp"

#include <algorithm>
#include <set>

namespace mvred {

namespace {

Formula flat_atom_node(const Atom& atom, std::optional<TruthValue> value) {
  Formula f;
  f.kind = FKind::FlatAtom;
  f.atom = atom;
  f.value = value;
  return f;
}

Formula unary_node(FKind kind, Formula kid) {
  Formula f;
  f.kind = kind;
  f.kids.push_back(std::move(kid));
  return f;
}

Formula binary_node(FKind kind, Formula a, Formula b) {
  Formula f;
  f.kind = kind;
  f.kids.push_back(std::move(a));
  f.kids.push_back(std::move(b));
  return f;
}

// The clause as a many-valued formula for encapsulation.  Facts contribute
// their head atom alone: an annotation is a value, not a formula, and the
// reflected model value already carries it.
Formula clause_mv_formula(const GroundProgram& gp, const GroundRule& r) {
  if (r.is_fact()) {
    Formula head;
    head.kind = FKind::Atom;
    head.atom = gp.base.atom(r.head);
    return head;
  }
  return rule_formula(gp, r);
}

const char* kind_word(FKind k) {
  switch (k) {
    case FKind::MvConst: return "a value constant";
    case FKind::MvRarr: return "->";
    case FKind::MvOp: return "an extra connective";
    default: return "a non-many-valued operator";
  }
}

}  // namespace

std::optional<TruthValue> SemanticReflection::kappa(
    const std::string& pred, const std::vector<Term>& args) const {
  if (builtin_pred(pred)) {
    if (args.size() != 2) return std::nullopt;
    for (const Term& t : args)
      if (t.is_var) return std::nullopt;
    return eval_builtin(pred, args) ? lattice.top : lattice.bottom;
  }
  Atom a;
  a.pred = pred;
  a.args = args;
  std::optional<std::size_t> id = base.index_of(a);
  if (!id) return std::nullopt;
  return value[*id];
}

SemanticReflection reflect(const GroundProgram& gp, const Interpretation& I) {
  if (I.val.size() != gp.base.size())
    fail(ErrorKind::Semantic, "interpretation does not cover the Herbrand base");
  return SemanticReflection{gp.lattice, gp.base, I.val};
}

Formula encapsulate(const SemanticReflection& refl, const Formula& mv) {
  switch (mv.kind) {
    case FKind::Atom:
      return flat_atom_node(mv.atom, refl.kappa(mv.atom.pred, mv.atom.args));
    case FKind::MvNeg:
      return unary_node(FKind::NotA, encapsulate(refl, mv.kids[0]));
    case FKind::MvAnd:
      return binary_node(FKind::AndA, encapsulate(refl, mv.kids[0]),
                         encapsulate(refl, mv.kids[1]));
    case FKind::MvOr:
      return binary_node(FKind::OrA, encapsulate(refl, mv.kids[0]),
                         encapsulate(refl, mv.kids[1]));
    case FKind::MvLarr:
      return binary_node(FKind::LarrA, encapsulate(refl, mv.kids[0]),
                         encapsulate(refl, mv.kids[1]));
    default:
      fail(ErrorKind::Semantic,
           std::string("cannot encapsulate ") + kind_word(mv.kind) +
               ": only ~, and, or and <- over atoms are covered");
  }
}

KripkeFlat build_kripke_flat(const GroundProgram& gp, const Interpretation& I,
                             ImplMode mode) {
  return KripkeFlat{reflect(gp, I), mode};
}

std::vector<std::vector<std::uint32_t>> relation_flat(const KripkeFlat& m,
                                                      const std::string& name) {
  const Lattice& lat = m.refl.lattice;
  std::uint32_t n = static_cast<std::uint32_t>(lat.size());
  std::vector<std::vector<std::uint32_t>> rows;
  if (name == "neg") {
    for (std::uint32_t x = 0; x < n; ++x)
      rows.push_back({lat.neg(TruthValue{x}).i, x});
    return rows;
  }
  if (name == "any") {
    for (std::uint32_t x = 0; x < n; ++x)
      for (std::uint32_t y = 0; y < n; ++y) rows.push_back({x, y});
    return rows;
  }
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y) {
      TruthValue a{x}, b{y};
      if (name == "and") {
        rows.push_back({lat.meet(a, b).i, x, y});
      } else if (name == "or") {
        rows.push_back({lat.join(a, b).i, x, y});
      } else if (name == "impl") {
        if (m.mode == ImplMode::Full || lat.leq(a, b))
          rows.push_back({lat.implies(a, b).i, x, y});
      } else {
        fail(ErrorKind::Usage, "unknown relation: " + name);
      }
    }
  return rows;
}

// Pointwise satisfaction, written directly against the relational reading:
// every operator searches its accessibility relation for witnesses.  In a
// triple (r, x, y) the first operand of the connective sits at y and the
// second at x, so an implication node head <-A body looks for
// r = implies(x, y) with the head at y and the body at x.
bool eval_flat(const KripkeFlat& m, const Formula& f, TruthValue world) {
  const Lattice& lat = m.refl.lattice;
  std::uint32_t n = static_cast<std::uint32_t>(lat.size());
  switch (f.kind) {
    case FKind::FlatAtom: {
      if (!f.value) return false;
      std::optional<TruthValue> k = m.refl.kappa(f.atom.pred, f.atom.args);
      return k && *k == *f.value && world == *f.value;
    }
    case FKind::NotA:
      for (std::uint32_t y = 0; y < n; ++y)
        if (lat.neg(TruthValue{y}) == world && eval_flat(m, f.kids[0], TruthValue{y}))
          return true;
      return false;
    case FKind::AndA:
    case FKind::OrA:
    case FKind::LarrA:
      for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
          TruthValue a{x}, b{y}, r{0};
          if (f.kind == FKind::AndA) {
            r = lat.meet(a, b);
          } else if (f.kind == FKind::OrA) {
            r = lat.join(a, b);
          } else {
            if (m.mode == ImplMode::Verbatim && !lat.leq(a, b)) continue;
            r = lat.implies(a, b);
          }
          if (r == world && eval_flat(m, f.kids[0], b) && eval_flat(m, f.kids[1], a))
            return true;
        }
      return false;
    case FKind::Dia:
      for (std::uint32_t y = 0; y < n; ++y)
        if (eval_flat(m, f.kids[0], TruthValue{y})) return true;
      return false;
    default:
      fail(ErrorKind::Semantic, "not a flattened formula");
  }
}

// Set-valued evaluation, bottom-up over subformula extents.  Kept separate
// from eval_flat so the two can be played against each other in tests.
std::vector<bool> extent_flat(const KripkeFlat& m, const Formula& f) {
  const Lattice& lat = m.refl.lattice;
  std::uint32_t n = static_cast<std::uint32_t>(lat.size());
  std::vector<bool> out(n, false);
  switch (f.kind) {
    case FKind::FlatAtom: {
      if (!f.value) return out;
      std::optional<TruthValue> k = m.refl.kappa(f.atom.pred, f.atom.args);
      if (k && *k == *f.value) out[f.value->i] = true;
      return out;
    }
    case FKind::NotA: {
      std::vector<bool> kid = extent_flat(m, f.kids[0]);
      for (std::uint32_t y = 0; y < n; ++y)
        if (kid[y]) out[lat.neg(TruthValue{y}).i] = true;
      return out;
    }
    case FKind::AndA:
    case FKind::OrA:
    case FKind::LarrA: {
      std::vector<bool> first = extent_flat(m, f.kids[0]);
      std::vector<bool> second = extent_flat(m, f.kids[1]);
      for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
          if (!second[x] || !first[y]) continue;
          TruthValue a{x}, b{y};
          if (f.kind == FKind::AndA) {
            out[lat.meet(a, b).i] = true;
          } else if (f.kind == FKind::OrA) {
            out[lat.join(a, b).i] = true;
          } else if (m.mode == ImplMode::Full || lat.leq(a, b)) {
            out[lat.implies(a, b).i] = true;
          }
        }
      return out;
    }
    case FKind::Dia: {
      std::vector<bool> kid = extent_flat(m, f.kids[0]);
      bool any = std::any_of(kid.begin(), kid.end(), [](bool b) { return b; });
      return std::vector<bool>(n, any);
    }
    default:
      fail(ErrorKind::Semantic, "not a flattened formula");
  }
}

FlatProgram transform_flatten(const GroundProgram& gp, const Interpretation& I) {
  SemanticReflection refl = reflect(gp, I);
  FlatProgram fp;
  for (const GroundRule& r : gp.rules)
    fp.clauses.push_back(encapsulate(refl, clause_mv_formula(gp, r)));
  return fp;
}

std::string print_flat_program(const GroundProgram& gp, const FlatProgram& fp) {
  const Lattice& lat = gp.lattice;
  std::string out;
  for (const Formula& c : fp.clauses) {
    if (c.kind == FKind::LarrA) {
      out += print_formula(lat, c.kids[0]) + " <-A ";
      const Formula& body = c.kids[1];
      if (body.kind == FKind::FlatAtom) {
        out += print_formula(lat, body);
      } else {
        out += "(" + print_formula(lat, body) + ")";
      }
    } else {
      out += print_formula(lat, c);
    }
    out += ".\n";
  }
  return out;
}

namespace {

// Ground many-valued subformulas of every clause, outermost first, deduped
// on their printed text.
std::vector<Formula> suite_formulas(const GroundProgram& gp) {
  std::vector<Formula> suite;
  std::set<std::string> seen;
  auto add = [&](const Formula& f, auto&& self) -> void {
    if (seen.insert(print_formula(gp.lattice, f)).second) suite.push_back(f);
    for (const Formula& kid : f.kids) self(kid, self);
  };
  for (const GroundRule& r : gp.rules) {
    Formula cf = clause_mv_formula(gp, r);
    add(cf, add);
  }
  return suite;
}

// Under the verbatim implication relation, a formula whose implication
// subformula compares incomparable-or-above loses its world: no triple of
// R_impl witnesses it, so the whole extent collapses to the empty set.
bool verbatim_starves(const GroundProgram& gp, const Interpretation& I,
                      const Formula& f) {
  for (const Formula& kid : f.kids)
    if (verbatim_starves(gp, I, kid)) return true;
  if (f.kind == FKind::MvLarr)
    return !gp.lattice.leq(valuation(gp, I, f.kids[1]),
                           valuation(gp, I, f.kids[0]));
  return false;
}

Formula dia_node(Formula kid) { return unary_node(FKind::Dia, std::move(kid)); }

Formula random_flat_formula(Rng& rng, const GroundProgram& gp,
                            const SemanticReflection& refl, int depth) {
  std::uint32_t n = static_cast<std::uint32_t>(gp.lattice.size());
  if (depth == 0 || rng.chance(2, 5)) {
    std::size_t id = rng.below(gp.base.size());
    Atom atom = gp.base.atom(id);
    // half the leaves carry the reflected value, the rest perturb it or use
    // the error mark
    std::optional<TruthValue> value = refl.value[id];
    std::uint64_t roll = rng.below(4);
    if (roll == 0) {
      value = std::nullopt;
    } else if (roll <= 1) {
      value = TruthValue{static_cast<std::uint32_t>(rng.below(n))};
    }
    return flat_atom_node(atom, value);
  }
  switch (rng.below(4)) {
    case 0:
      return unary_node(FKind::NotA, random_flat_formula(rng, gp, refl, depth - 1));
    case 1:
      return binary_node(FKind::AndA, random_flat_formula(rng, gp, refl, depth - 1),
                         random_flat_formula(rng, gp, refl, depth - 1));
    case 2:
      return binary_node(FKind::OrA, random_flat_formula(rng, gp, refl, depth - 1),
                         random_flat_formula(rng, gp, refl, depth - 1));
    default:
      return binary_node(FKind::LarrA, random_flat_formula(rng, gp, refl, depth - 1),
                         random_flat_formula(rng, gp, refl, depth - 1));
  }
}

}  // namespace

Verdict verify_flat_model(const GroundProgram& gp, const Interpretation& I,
                          const KripkeFlat& m, std::uint64_t seed) {
  const Lattice& lat = gp.lattice;
  std::uint32_t n = static_cast<std::uint32_t>(lat.size());
  Verdict v;
  v.check = "flatten";
  v.pass = false;

  // (a) the encapsulation of every ground subformula holds exactly at the
  // world named by its value, and (b) its dia closure is all worlds; both
  // drop to the empty set where the verbatim implication filter starves an
  // implication subformula.
  for (const Formula& phi : suite_formulas(gp)) {
    TruthValue val = valuation(gp, I, phi);
    bool empty = m.mode == ImplMode::Verbatim && verbatim_starves(gp, I, phi);
    Formula flat = encapsulate(m.refl, phi);
    std::vector<bool> ext = extent_flat(m, flat);
    for (std::uint32_t w = 0; w < n; ++w) {
      bool want = !empty && TruthValue{w} == val;
      if (ext[w] != want) {
        v.counterexample = "extent of E(" + print_formula(lat, phi) +
                           ") is wrong at world " + lat.id(TruthValue{w});
        return v;
      }
      if (eval_flat(m, flat, TruthValue{w}) != ext[w]) {
        v.counterexample = "pointwise and set evaluation disagree on E(" +
                           print_formula(lat, phi) + ") at world " +
                           lat.id(TruthValue{w});
        return v;
      }
    }
    std::vector<bool> dia = extent_flat(m, dia_node(flat));
    for (std::uint32_t w = 0; w < n; ++w)
      if (dia[w] != !empty) {
        v.counterexample = "dia E(" + print_formula(lat, phi) +
                           ") is not two-valued at world " + lat.id(TruthValue{w});
        return v;
      }
  }

  // (c) sampled formulas, image or not: the dia closure is all worlds or
  // none, and a value-perturbed atom holds nowhere.
  for (std::size_t a = 0; a < gp.base.size(); ++a) {
    Atom atom = gp.base.atom(a);
    for (std::uint32_t w = 0; w < n; ++w) {
      Formula probe = flat_atom_node(atom, TruthValue{w});
      std::vector<bool> dia = extent_flat(m, dia_node(probe));
      bool kappa_hit = m.refl.value[a] == TruthValue{w};
      for (std::uint32_t world = 0; world < n; ++world)
        if (dia[world] != kappa_hit) {
          v.counterexample = "dia " + print_formula(lat, probe) +
                             " disagrees with the reflected value";
          return v;
        }
    }
    Formula marked = flat_atom_node(atom, std::nullopt);
    std::vector<bool> ext = extent_flat(m, marked);
    if (std::any_of(ext.begin(), ext.end(), [](bool b) { return b; })) {
      v.counterexample =
          "error-marked atom " + print_formula(lat, marked) + " holds somewhere";
      return v;
    }
  }
  Rng rng(seed);
  for (int round = 0; round < 40 && gp.base.size() > 0; ++round) {
    Formula f = random_flat_formula(rng, gp, m.refl, 3);
    std::vector<bool> dia = extent_flat(m, dia_node(f));
    bool first = dia.empty() ? false : dia[0];
    for (std::uint32_t w = 0; w < n; ++w)
      if (dia[w] != first) {
        v.counterexample =
            "dia " + print_formula(lat, f) + " is neither empty nor all worlds";
        return v;
      }
  }

  // (d) the true dia atoms pin one value per Herbrand atom and reconstruct
  // the interpretation.
  Interpretation rebuilt;
  rebuilt.val.assign(gp.base.size(), lat.bottom);
  for (std::size_t a = 0; a < gp.base.size(); ++a) {
    Atom atom = gp.base.atom(a);
    int hits = 0;
    for (std::uint32_t w = 0; w < n; ++w)
      if (eval_flat(m, dia_node(flat_atom_node(atom, TruthValue{w})), lat.bottom)) {
        rebuilt.val[a] = TruthValue{w};
        ++hits;
      }
    if (hits != 1) {
      v.counterexample = "recovery sees " + std::to_string(hits) +
                         " true values for " + gp.base.atom_text(a);
      return v;
    }
  }
  if (!(rebuilt == I)) {
    v.counterexample = "recovered interpretation differs from the model";
    return v;
  }

  v.pass = true;
  return v;
}

Verdict verify_flat(const GroundProgram& gp, const Interpretation& I,
                    ImplMode mode, std::uint64_t seed) {
  return verify_flat_model(gp, I, build_kripke_flat(gp, I, mode), seed);
}

Verdict verify_corollary_models(const GroundProgram& gp, const KripkeUnary& mu,
                                const KripkeFlat& mf) {
  const Lattice& lat = gp.lattice;
  Verdict v;
  v.check = "corollary";
  v.pass = false;
  for (std::size_t a = 0; a < gp.base.size(); ++a) {
    Formula mv;
    mv.kind = FKind::Atom;
    mv.atom = gp.base.atom(a);
    Formula flat = encapsulate(mf.refl, mv);
    for (std::uint32_t w = 0; w < lat.size(); ++w) {
      Formula matom;
      matom.kind = FKind::MAtom;
      matom.value = TruthValue{w};
      matom.atom = mv.atom;
      bool left = eval_flat(mf, flat, TruthValue{w});
      bool right = holds_unary(mu, matom);
      if (left != right) {
        v.counterexample = "E(" + gp.base.atom_text(a) + ") at world " +
                           lat.id(TruthValue{w}) + ": flat " +
                           (left ? "holds" : "fails") + ", unary " +
                           (right ? "holds" : "fails");
        return v;
      }
    }
  }
  v.pass = true;
  return v;
}

Verdict verify_corollary(const GroundProgram& gp, const Interpretation& I) {
  return verify_corollary_models(gp, build_kripke_unary(gp, I),
                                 build_kripke_flat(gp, I, ImplMode::Verbatim));
}

}  // namespace mvred
