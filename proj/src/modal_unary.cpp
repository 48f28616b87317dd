#include "mvred/modal_unary.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace mvred {

namespace {

// Clauses grouped by head atom in first-occurrence order.
struct HeadGroup {
  std::uint32_t head = 0;
  TruthValue fact_join;
  bool has_fact = false;
  std::vector<const GroundRule*> rules;
};

std::vector<HeadGroup> group_by_head(const GroundProgram& gp) {
  std::vector<HeadGroup> groups;
  std::map<std::uint32_t, std::size_t> where;
  for (const GroundRule& r : gp.rules) {
    auto it = where.find(r.head);
    if (it == where.end()) {
      it = where.emplace(r.head, groups.size()).first;
      groups.push_back({r.head, gp.lattice.bottom, false, {}});
    }
    HeadGroup& g = groups[it->second];
    if (r.is_fact()) {
      g.fact_join = g.has_fact ? gp.lattice.join(g.fact_join, *r.fact_value)
                               : *r.fact_value;
      g.has_fact = true;
    } else {
      g.rules.push_back(&r);
    }
  }
  return groups;
}

std::size_t occurrence_count(const HeadGroup& g) {
  std::size_t n = 0;
  for (const GroundRule* r : g.rules)
    for (const auto& conj : r->body) n += conj.size();
  return n;
}

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > std::numeric_limits<std::uint64_t>::max() - b
             ? std::numeric_limits<std::uint64_t>::max()
             : a + b;
}

}  // namespace

std::uint64_t transform_clause_count(const GroundProgram& gp) {
  std::uint64_t total = 0;
  for (const HeadGroup& g : group_by_head(gp)) {
    std::size_t occ = occurrence_count(g);
    total = saturating_add(
        total, occ == 0 ? 1 : saturating_pow(gp.lattice.size(), occ));
  }
  return total;
}

ModalProgram transform_unary(const GroundProgram& gp, std::uint64_t clause_budget) {
  const Lattice& lat = gp.lattice;
  std::uint64_t count = transform_clause_count(gp);
  if (count > clause_budget)
    fail(ErrorKind::Budget,
         "modal transformation needs " + std::to_string(count) +
             " clauses, over the budget of " + std::to_string(clause_budget));

  ModalProgram mp;
  for (const HeadGroup& g : group_by_head(gp)) {
    TruthValue base = g.has_fact ? g.fact_join : lat.bottom;
    // The merged body: all disjuncts of all rules for this head, in order.
    std::vector<const std::vector<GroundLiteral>*> conjs;
    for (const GroundRule* r : g.rules)
      for (const auto& conj : r->body) conjs.push_back(&conj);

    std::size_t occ = 0;
    for (const auto* conj : conjs) occ += conj->size();
    if (occ == 0) {
      mp.clauses.push_back({{base, g.head}, {}});
      continue;
    }

    std::vector<std::uint32_t> assign(occ, 0);
    while (true) {
      ModalClause clause;
      TruthValue beta = base;
      std::size_t pos = 0;
      for (const auto* conj : conjs) {
        std::vector<ModalAtom> body_conj;
        TruthValue meet_val = lat.top;
        for (const GroundLiteral& lit : *conj) {
          TruthValue a{assign[pos++]};
          body_conj.push_back({a, lit.atom});
          meet_val = lat.meet(meet_val, lit.negated ? lat.neg(a) : a);
        }
        beta = lat.join(beta, meet_val);
        clause.body.push_back(std::move(body_conj));
      }
      clause.head = {beta, g.head};
      mp.clauses.push_back(std::move(clause));

      std::size_t k = occ;
      while (k > 0 && ++assign[k - 1] == lat.size()) assign[--k] = 0;
      if (k == 0) break;
    }
  }
  return mp;
}

std::string print_modal_atom(const GroundProgram& gp, const ModalAtom& a) {
  return "[" + gp.lattice.id(a.value) + "]" + gp.base.atom_text(a.atom);
}

std::string print_modal_program(const GroundProgram& gp, const ModalProgram& mp) {
  std::string out;
  for (const ModalClause& c : mp.clauses) {
    out += print_modal_atom(gp, c.head);
    if (!c.body.empty()) {
      out += " :- ";
      for (std::size_t d = 0; d < c.body.size(); ++d) {
        if (d) out += "; ";
        for (std::size_t i = 0; i < c.body[d].size(); ++i) {
          if (i) out += ", ";
          out += print_modal_atom(gp, c.body[d][i]);
        }
      }
    }
    out += ".\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kripke reading.

KripkeUnary build_kripke_unary(const GroundProgram& gp, const Interpretation& I) {
  if (I.val.size() != gp.base.size())
    fail(ErrorKind::Semantic, "interpretation does not cover the Herbrand base");
  return {gp.lattice, gp.base, I.val};
}

std::vector<std::pair<TruthValue, TruthValue>> relation_unary(const KripkeUnary& m,
                                                              TruthValue v) {
  std::vector<std::pair<TruthValue, TruthValue>> out;
  for (std::uint32_t w = 0; w < m.lattice.size(); ++w)
    out.emplace_back(TruthValue{w}, v);
  return out;
}

namespace {

std::size_t atom_id_or_fail(const KripkeUnary& m, const Atom& a) {
  auto id = m.base.index_of(a);
  if (!id)
    fail(ErrorKind::Semantic, "cannot evaluate atom '" + print_atom(a) +
                                  "': not in the Herbrand base of the program");
  return *id;
}

}  // namespace

std::vector<bool> extent_unary(const KripkeUnary& m, const Formula& f) {
  std::size_t n = m.lattice.size();
  switch (f.kind) {
    case FKind::Atom: {
      std::vector<bool> out(n, false);
      out[m.atom_world[atom_id_or_fail(m, f.atom)].i] = true;
      return out;
    }
    case FKind::MAtom: {
      // |[v]p| = {w | image of w under R_v lies inside |p|}; the image is
      // always {v}, so the extent is W or empty.
      std::vector<bool> inner(n, false);
      inner[m.atom_world[atom_id_or_fail(m, f.atom)].i] = true;
      return std::vector<bool>(n, inner[f.value->i]);
    }
    case FKind::Not: {
      std::vector<bool> a = extent_unary(m, f.kids[0]);
      for (std::size_t i = 0; i < n; ++i) a[i] = !a[i];
      return a;
    }
    case FKind::And: {
      std::vector<bool> a = extent_unary(m, f.kids[0]),
                        b = extent_unary(m, f.kids[1]);
      for (std::size_t i = 0; i < n; ++i) a[i] = a[i] && b[i];
      return a;
    }
    case FKind::Or: {
      std::vector<bool> a = extent_unary(m, f.kids[0]),
                        b = extent_unary(m, f.kids[1]);
      for (std::size_t i = 0; i < n; ++i) a[i] = a[i] || b[i];
      return a;
    }
    case FKind::Impl: {
      std::vector<bool> a = extent_unary(m, f.kids[0]),
                        b = extent_unary(m, f.kids[1]);
      for (std::size_t i = 0; i < n; ++i) a[i] = !a[i] || b[i];
      return a;
    }
    default:
      fail(ErrorKind::Semantic,
           "formula is outside the unary modal fragment (atoms, modal atoms "
           "and classical connectives)");
  }
}

bool eval_modal(const KripkeUnary& m, const Formula& f, TruthValue world) {
  switch (f.kind) {
    case FKind::Atom:
      return world == m.atom_world[atom_id_or_fail(m, f.atom)];
    case FKind::MAtom: {
      // Through the accessibility relation: every world reachable from here
      // by R_v must carry the atom.
      TruthValue target = m.atom_world[atom_id_or_fail(m, f.atom)];
      for (const auto& [from, to] : relation_unary(m, *f.value))
        if (from == world && !(to == target)) return false;
      return true;
    }
    case FKind::Not:
      return !eval_modal(m, f.kids[0], world);
    case FKind::And:
      return eval_modal(m, f.kids[0], world) && eval_modal(m, f.kids[1], world);
    case FKind::Or:
      return eval_modal(m, f.kids[0], world) || eval_modal(m, f.kids[1], world);
    case FKind::Impl:
      return !eval_modal(m, f.kids[0], world) || eval_modal(m, f.kids[1], world);
    default:
      fail(ErrorKind::Semantic,
           "formula is outside the unary modal fragment (atoms, modal atoms "
           "and classical connectives)");
  }
}

bool holds_unary(const KripkeUnary& m, const Formula& f) {
  std::vector<bool> e = extent_unary(m, f);
  return std::all_of(e.begin(), e.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------------------
// Verification.

Verdict verify_invariance(const GroundProgram& gp, const Interpretation& I,
                          const ModalProgram& mp, const KripkeUnary& m) {
  Verdict v;
  v.check = "invariance";
  v.pass = true;

  // (a) the model satisfies every transformed clause under the exact-value
  // reading of modal atoms.  The body holds only when every occurrence
  // matches: the clause's head value was computed from the full assignment,
  // so a partial match says nothing about the head.
  for (const ModalClause& c : mp.clauses) {
    bool body_true = true;
    for (const auto& conj : c.body)
      for (const ModalAtom& a : conj)
        if (!(I.val[a.atom] == a.value)) {
          body_true = false;
          break;
        }
    bool head_true = I.val[c.head.atom] == c.head.value;
    if (body_true && !head_true) {
      v.pass = false;
      v.counterexample = "clause not satisfied: ";
      v.counterexample += print_modal_atom(gp, c.head);
      if (!c.body.empty()) v.counterexample += " with a true body";
      return v;
    }
  }

  // (b) the modal atoms true in the Kripke model are exactly one per atom,
  // at the model value.
  for (std::size_t a = 0; a < gp.base.size(); ++a) {
    for (std::uint32_t w = 0; w < gp.lattice.size(); ++w) {
      Formula f;
      f.kind = FKind::MAtom;
      f.value = TruthValue{w};
      f.atom = gp.base.atom(a);
      bool want = I.val[a] == TruthValue{w};
      std::vector<bool> e = extent_unary(m, f);
      bool all = std::all_of(e.begin(), e.end(), [](bool b) { return b; });
      bool none = std::none_of(e.begin(), e.end(), [](bool b) { return b; });
      if (!(want ? all : none)) {
        v.pass = false;
        v.counterexample =
            "modal atom " + print_modal_atom(gp, {TruthValue{w}, static_cast<std::uint32_t>(a)}) +
            (want ? " should hold everywhere" : " should hold nowhere");
        return v;
      }
    }
  }
  return v;
}

std::vector<Formula> sample_matom_formulas(const GroundProgram& gp,
                                           const Interpretation& I,
                                           std::size_t count, int max_depth,
                                           std::uint64_t seed) {
  std::vector<Formula> out;
  if (gp.base.size() == 0) return out;
  Rng rng(seed);

  // Biased leaf choice: half the modal atoms are true in the model, half are
  // arbitrary, so both extents appear.
  auto leaf = [&] {
    Formula f;
    f.kind = FKind::MAtom;
    std::size_t a = rng.below(gp.base.size());
    f.atom = gp.base.atom(a);
    f.value = rng.chance(1, 2)
                  ? I.val[a]
                  : TruthValue{static_cast<std::uint32_t>(rng.below(gp.lattice.size()))};
    return f;
  };

  struct Gen {
    Rng& rng;
    const std::function<Formula()>& leaf;
    Formula operator()(int depth) {
      if (depth <= 0 || rng.chance(1, 3)) return leaf();
      Formula f;
      switch (rng.below(4)) {
        case 0:
          f.kind = FKind::Not;
          f.kids.push_back((*this)(depth - 1));
          return f;
        case 1: f.kind = FKind::And; break;
        case 2: f.kind = FKind::Or; break;
        default: f.kind = FKind::Impl; break;
      }
      f.kids.push_back((*this)(depth - 1));
      f.kids.push_back((*this)(depth - 1));
      return f;
    }
  };
  std::function<Formula()> leaf_fn = leaf;
  Gen gen{rng, leaf_fn};
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen(max_depth));
  return out;
}

Verdict verify_two_valued(const KripkeUnary& m, const std::vector<Formula>& sample) {
  Verdict v;
  v.check = "two-valued";
  v.pass = true;
  for (const Formula& f : sample) {
    // Set-algebraic extents must agree with pointwise Kripke evaluation
    // (the intersection/union/complement reading of the connectives).
    std::vector<bool> e = extent_unary(m, f);
    for (std::uint32_t w = 0; w < m.lattice.size(); ++w)
      if (eval_modal(m, f, TruthValue{w}) != e[w]) {
        v.pass = false;
        v.counterexample = "extent disagrees with pointwise evaluation at " +
                           m.lattice.id(TruthValue{w}) + ": " +
                           print_formula(m.lattice, f);
        return v;
      }
    bool all = std::all_of(e.begin(), e.end(), [](bool b) { return b; });
    bool none = std::none_of(e.begin(), e.end(), [](bool b) { return b; });
    if (!all && !none) {
      v.pass = false;
      v.counterexample =
          "extent is neither empty nor W: " + print_formula(m.lattice, f);
      return v;
    }
  }
  return v;
}

}  // namespace mvred
