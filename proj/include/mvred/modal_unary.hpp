#pragma once

#include "mvred/semantics.hpp"

namespace mvred {

// Outcome of one verification check.  counterexample stays empty on a pass.
struct Verdict {
  std::string check;
  bool pass = false;
  std::string counterexample;
};

// ---------------------------------------------------------------------------
// Two-valued multi-modal image of a many-valued program.  A modal atom
// [v]p(c) asserts "p(c) has value exactly v"; clauses keep the disjunctive
// body shape of the merged source rules.

struct ModalAtom {
  TruthValue value;
  std::uint32_t atom = 0;
  bool operator==(const ModalAtom&) const = default;
};

// The body groups mirror the disjuncts of the merged source rule; they shape
// the head value computation.  A clause is satisfied when all of its body
// modal atoms hold together: one assignment covers every occurrence, so the
// body pins the complete value profile the head value was computed from.
struct ModalClause {
  ModalAtom head;
  std::vector<std::vector<ModalAtom>> body;
};

struct ModalProgram {
  std::vector<ModalClause> clauses;
};

// Number of clauses the transformation will emit: head atoms whose clauses
// are facts only contribute one clause each; every other head atom
// contributes |W|^(body literal occurrences across its merged rules).
// Saturates at uint64 max.
std::uint64_t transform_clause_count(const GroundProgram& gp);

// All clauses with the same head atom are folded into one merged clause
// first, fact annotations joining in as a constant contribution.  A head
// whose clauses are facts only becomes the modal fact [v]p(c) with v the
// join of its annotations.  Every other merged clause is expanded once per
// assignment of carrier values to its body literal occurrences: the body
// keeps the assigned values (also on negated positions), and the head value
// is the fact contribution joined with the join over disjuncts of the meet
// of the assigned values, negated positions contributing through the
// lattice negation.  Head atoms are emitted in first-occurrence order;
// assignments in carrier order, last occurrence fastest.  Throws a budget
// error when the clause count would exceed clause_budget.
ModalProgram transform_unary(const GroundProgram& gp, std::uint64_t clause_budget);

std::string print_modal_atom(const GroundProgram& gp, const ModalAtom& a);
std::string print_modal_program(const GroundProgram& gp, const ModalProgram& mp);

// ---------------------------------------------------------------------------
// Kripke reading: worlds are the carrier, the accessibility relation for
// value v is W x {v}, and an atom holds exactly at the world named by its
// model value.  All structure is determined by the interpretation.

struct KripkeUnary {
  Lattice lattice;
  HerbrandBase base;
  std::vector<TruthValue> atom_world;  // I(atom)
};

KripkeUnary build_kripke_unary(const GroundProgram& gp, const Interpretation& I);

// Accessibility pairs (w, v) for the relation tagged by value v.
std::vector<std::pair<TruthValue, TruthValue>> relation_unary(const KripkeUnary& m,
                                                              TruthValue v);

// Worlds where the formula holds.  Formulas may use plain atoms, modal
// atoms, and the classical connectives not/and/or/->.  Plain atoms hold at
// the single world carrying their value; modal atoms are world-independent.
std::vector<bool> extent_unary(const KripkeUnary& m, const Formula& f);
bool eval_modal(const KripkeUnary& m, const Formula& f, TruthValue world);
// True in the model: holds at every world.
bool holds_unary(const KripkeUnary& m, const Formula& f);

// (a) every transformed clause is satisfied when [v]p(c) is read as
//     "v equals the model value of p(c)" and a clause body counts as true
//     only when all of its modal atoms are (see ModalClause);
// (b) the modal atoms true in the Kripke model are exactly those of the
//     model trace, one per Herbrand atom.
Verdict verify_invariance(const GroundProgram& gp, const Interpretation& I,
                          const ModalProgram& mp, const KripkeUnary& m);

// Deterministic sample of ground formulas built from modal atoms and the
// classical connectives, for the two-valuedness and extent-law checks.
std::vector<Formula> sample_matom_formulas(const GroundProgram& gp,
                                           const Interpretation& I,
                                           std::size_t count, int max_depth,
                                           std::uint64_t seed);

// Every sampled formula must have extent {} or W, and the classical
// connectives must act as intersection/union/complement on extents.
Verdict verify_two_valued(const KripkeUnary& m, const std::vector<Formula>& sample);

}  // namespace mvred
