#pragma once

#include "mvred/modal_unary.hpp"

namespace mvred {

// ---------------------------------------------------------------------------
// Generalized interpretation over predicate/tuple pairs.  Well-typed user
// atoms reflect the model value, the built-ins keep their fixed two-valued
// extension, and everything else (arity mismatch in particular) maps to the
// error mark, reported here as nullopt.

struct SemanticReflection {
  Lattice lattice;
  HerbrandBase base;
  std::vector<TruthValue> value;  // model value per Herbrand atom

  std::optional<TruthValue> kappa(const std::string& pred,
                                  const std::vector<Term>& args) const;
};

SemanticReflection reflect(const GroundProgram& gp, const Interpretation& I);

// Encapsulation E: atoms p(t...) become flat atoms p_F(t..., kappa), and the
// many-valued connectives neg/and/or/larr become their flattened existential
// counterparts.  Errors on any other connective.
Formula encapsulate(const SemanticReflection& refl, const Formula& mv);

// R_impl carries (implies(x,y), x, y); the verbatim reading keeps only the
// pairs with x <= y, the full reading keeps all pairs.
enum class ImplMode { Verbatim, Full };

struct KripkeFlat {
  SemanticReflection refl;
  ImplMode mode = ImplMode::Verbatim;
};

KripkeFlat build_kripke_flat(const GroundProgram& gp, const Interpretation& I,
                             ImplMode mode);

// Named accessibility relations for dumps: "neg" (pairs), "and"/"or"/"impl"
// (triples: result, first arg, second arg), "any" (all world pairs).
std::vector<std::vector<std::uint32_t>> relation_flat(const KripkeFlat& m,
                                                      const std::string& name);

// Worlds where a flattened formula holds.  All operators are existential
// over their relation; a flat atom holds exactly at the world equal to its
// value attribute when that attribute matches kappa, and nowhere otherwise.
// Atoms carrying the error mark never hold.
std::vector<bool> extent_flat(const KripkeFlat& m, const Formula& flat);
bool eval_flat(const KripkeFlat& m, const Formula& flat, TruthValue world);

// Encapsulation of every program clause (facts become bare flat atoms, their
// annotation being subsumed by the model value inside kappa).
struct FlatProgram {
  std::vector<Formula> clauses;
};

FlatProgram transform_flatten(const GroundProgram& gp, const Interpretation& I);
std::string print_flat_program(const GroundProgram& gp, const FlatProgram& fp);

// Checks, over every ground subformula phi of the program:
//   (a) extent(E(phi)) is exactly {v(phi)}; under the verbatim reading the
//       expectation drops to {} when some implication subformula has a body
//       value not below its head value;
//   (b) extent(dia E(phi)) is W (or {} in the same verbatim corner);
//   (c) extent(dia Phi) is {} or W for sampled non-image formulas;
//   (d) reading the value attributes of the true dia p_F(c, v) atoms
//       reconstructs the interpretation exactly.
Verdict verify_flat(const GroundProgram& gp, const Interpretation& I, ImplMode mode,
                    std::uint64_t seed);

// Core of verify_flat against a caller-supplied Kripke model, normally the
// one built from I.  Callers may hand in a doctored model to exercise the
// failure paths.
Verdict verify_flat_model(const GroundProgram& gp, const Interpretation& I,
                          const KripkeFlat& m, std::uint64_t seed);

// E(p(c)) holds at world w in the flat model exactly when [w]p(c) is true in
// the unary Kripke model, for every Herbrand atom and world.
Verdict verify_corollary(const GroundProgram& gp, const Interpretation& I);
Verdict verify_corollary_models(const GroundProgram& gp, const KripkeUnary& mu,
                                const KripkeFlat& mf);

}  // namespace mvred
