#pragma once

#include "mvred/syntax.hpp"

namespace mvred {

// Total assignment of truth values to the Herbrand base, indexed by atom id.
struct Interpretation {
  std::vector<TruthValue> val;
  bool operator==(const Interpretation&) const = default;
};

// Homomorphic extension of an interpretation to a ground many-valued formula
// (Atom/MvConst leaves, neg/and/or/larr/rarr and extra connectives).  Built-in
// atoms get their fixed two-valued extension.  Errors on non-ground formulas,
// unknown atoms, and unknown extra connectives.
TruthValue valuation(const GroundProgram& gp, const Interpretation& I, const Formula& f);

// Value of a rule body: join over disjuncts of the meet over literals, with
// negated literals read through the lattice negation.  Empty conjunctions are
// top, an empty disjunction is bottom.
TruthValue body_value(const GroundProgram& gp, const Interpretation& I,
                      const GroundRule& r);

// A fact A <- @v is satisfied when v <= I(A); a rule when body_value <= I(head).
bool satisfies_rule(const GroundProgram& gp, const Interpretation& I,
                    const GroundRule& r);

bool is_model(const GroundProgram& gp, const Interpretation& I);

// Least model of a stratified program: atoms start at bottom and each stratum
// is iterated to its least fixpoint with negated literals frozen at the value
// computed in lower strata.  Errors when some cycle of the ground dependency
// graph passes through a negation.
Interpretation compute_model(const GroundProgram& gp);

// "p(a) = t" lines, one per Herbrand atom, in atom order.
std::string model_text(const GroundProgram& gp, const Interpretation& I);

// The rule as a many-valued formula head <- body, the body of a fact being
// its annotation as a value constant.  Conjunctions and disjunctions
// associate to the left.
Formula rule_formula(const GroundProgram& gp, const GroundRule& r);

}  // namespace mvred
