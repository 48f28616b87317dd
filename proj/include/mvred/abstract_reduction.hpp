#pragma once

#include <variant>

#include "mvred/modal_unary.hpp"

namespace mvred {

// ---------------------------------------------------------------------------
// Valuation space: every assignment H -> W, enumerated in a fixed order
// (mixed radix over atom ids, carrier order per digit, last atom fastest).

struct ValuationSpace {
  Lattice lattice;
  HerbrandBase base;
  std::uint64_t count = 0;  // |W|^|H|

  Interpretation decode(std::uint64_t index) const;
};

// Errors with a budget error when |W|^|H| exceeds the budget.
ValuationSpace valuation_space(const GroundProgram& gp, std::uint64_t budget);

// Logical matrix: the carrier together with a non-empty designated subset.
struct Matrix {
  std::vector<bool> designated;  // indexed by carrier
  bool is_designated(TruthValue v) const { return designated[v.i]; }
};

Matrix matrix_from_ids(const Lattice& lat, const std::vector<std::string>& ids);

// A sentence is a ground clause, satisfied as a rule, or a bare ground
// many-valued formula, satisfied when its value is designated (which
// requires a matrix).
using Sentence = std::variant<GroundRule, Formula>;

Sentence sentence_of(const GroundRule& r);
Sentence sentence_of(const Formula& f);
std::vector<Sentence> program_sentences(const GroundProgram& gp);
std::string print_sentence(const GroundProgram& gp, const Sentence& s);

bool satisfies_sentence(const GroundProgram& gp, const Interpretation& I,
                        const Sentence& s, const Matrix* mat);

// Characteristic vector of the valuations satisfying every sentence of gamma.
std::vector<std::uint8_t> models_of(const GroundProgram& gp, const ValuationSpace& vs,
                                    const std::vector<Sentence>& gamma,
                                    const Matrix* mat);

// Semantic consequence: every model of gamma satisfies phi.  Vacuously true
// when gamma has no models.
bool consequence(const GroundProgram& gp, const ValuationSpace& vs,
                 const std::vector<Sentence>& gamma, const Sentence& phi,
                 const Matrix* mat);

// ---------------------------------------------------------------------------
// Possible-worlds reading of consequence: worlds are all valuations, the
// accessibility relation is Val x Val_gamma, and box_gamma quantifies
// universally over it.

struct SuszkoModel {
  ValuationSpace vs;
  std::vector<std::uint8_t> val_gamma;  // models of gamma among the worlds
};

SuszkoModel suszko_model(const GroundProgram& gp, const ValuationSpace& vs,
                         const std::vector<Sentence>& gamma, const Matrix* mat);

// Worlds where box_gamma phi holds.  The relation image of every world is
// Val_gamma, so the extent is all worlds or none; small spaces are evaluated
// world by world through the relation, large ones once through the image.
std::vector<std::uint8_t> extent_box(const GroundProgram& gp, const SuszkoModel& m,
                                     const Sentence& phi, const Matrix* mat);

// consequence(gamma, phi) iff box_gamma phi holds in the model, for every
// suite sentence; extents must stay two-valued.
struct LemmaVerdict {
  std::string lemma;
  std::size_t formulas_checked = 0;
  bool pass = false;
  std::string witness;          // merged text, empty on a pass
  std::string witness_formula;  // the sentence behind the witness
  std::string side_left;        // consequence / designation side of the failure
  std::string side_right;       // modal operator side of the failure
};

LemmaVerdict verify_suszko(const GroundProgram& gp, const ValuationSpace& vs,
                           const std::vector<Sentence>& gamma,
                           const std::vector<Sentence>& suite, const Matrix* mat);

// Core of verify_suszko against a caller-supplied possible-worlds model: the
// consequence side is recomputed from gamma, the box side is read off the
// model.  Callers may hand in a doctored model to exercise the failure paths.
LemmaVerdict verify_suszko_model(const GroundProgram& gp, const SuszkoModel& m,
                                 const std::vector<Sentence>& gamma,
                                 const std::vector<Sentence>& suite,
                                 const Matrix* mat);

// ---------------------------------------------------------------------------
// Matrix reading of designation: worlds are the carrier, the relation is
// W x D, a many-valued formula holds at the world carrying its value, and
// dia_D quantifies existentially.

struct MatrixModel {
  Lattice lattice;
  HerbrandBase base;
  std::vector<TruthValue> val;  // base valuation per Herbrand atom
  Matrix mat;
};

MatrixModel matrix_model(const GroundProgram& gp, const Interpretation& I,
                         const Matrix& mat);

std::vector<bool> extent_dia(const GroundProgram& gp, const MatrixModel& m,
                             const Formula& phi);

// v(phi) designated iff dia_D phi holds everywhere, for every suite formula.
LemmaVerdict verify_matrix(const GroundProgram& gp, const MatrixModel& m,
                           const std::vector<Formula>& suite);

// ---------------------------------------------------------------------------
// Deterministic exhaustive suites.

// Clause-shaped sentences over H: facts A <- @v for every atom and value;
// at depth >= 1 rules with single-literal bodies; at depth >= 2 also rules
// with two-literal conjunctions and two-disjunct bodies.
std::vector<Sentence> clause_suite(const GroundProgram& gp, int depth);

// Many-valued formulas over neg/and/or/-> up to the given connective depth.
std::vector<Formula> formula_suite(const GroundProgram& gp, int depth);

// Evaluates a ground meta formula whose leaves are box_gamma / dia_d
// sentences, combined classically.  Both reductions agree that such formulas
// are world-constant, so the result is a single truth value.
bool eval_abstract(const GroundProgram& gp, const ValuationSpace& vs,
                   const std::vector<Sentence>& gamma, const Interpretation& I,
                   const Formula& meta, const Matrix* mat);

}  // namespace mvred
