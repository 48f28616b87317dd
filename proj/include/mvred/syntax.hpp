#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvred/lattice.hpp"

namespace mvred {

// ---------------------------------------------------------------------------
// Program AST.  Variables start with an uppercase letter, constants with a
// lowercase one.  No function symbols.

struct Term {
  bool is_var = false;
  std::string name;
  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string pred;
  std::vector<Term> args;
  bool operator==(const Atom&) const = default;
};

struct Literal {
  bool negated = false;
  Atom atom;
  bool operator==(const Literal&) const = default;
};

// A body is a disjunction of conjunctions of literals.
using Conjunct = std::vector<Literal>;

struct Rule {
  Atom head;
  std::optional<TruthValue> fact_value;  // set for facts; body is then empty
  std::vector<Conjunct> body;
  bool operator==(const Rule&) const = default;
  bool is_fact() const { return fact_value.has_value(); }
};

struct Program {
  Lattice lattice;
  std::vector<Rule> rules;
  std::map<std::string, int> predicates;  // user predicates with arity
  std::vector<std::string> constants;     // sorted and deduplicated
};

// The two-valued built-in predicates: eq (constant identity) and leq
// (lexicographic order on constant names).  They may appear in rule bodies
// only and are not part of the Herbrand base.
bool builtin_pred(const std::string& pred);
bool eval_builtin(const std::string& pred, const std::vector<Term>& args);

// ---------------------------------------------------------------------------
// Herbrand base: every ground atom over the user predicates and constants,
// in a fixed order (predicates by name, argument tuples lexicographically).
// Atom ids index interpretations and stay dense.

struct HerbrandBase {
  struct PredInfo {
    std::string name;
    int arity = 0;
    std::size_t offset = 0;  // id of the first atom of this predicate
  };
  std::vector<PredInfo> preds;
  std::vector<std::string> constants;

  std::size_t size() const { return size_; }
  std::optional<std::size_t> index_of(const Atom& ground_atom) const;
  Atom atom(std::size_t id) const;
  std::string atom_text(std::size_t id) const;

  std::size_t size_ = 0;
};

HerbrandBase herbrand_base(const Program& p);

// ---------------------------------------------------------------------------
// Ground programs.  Grounding substitutes constants for every variable of a
// rule (over the full constant set), resolves built-in literals to their
// fixed truth value and simplifies them away, and indexes atoms against the
// Herbrand base.

struct GroundLiteral {
  bool negated = false;
  std::uint32_t atom = 0;
  bool operator==(const GroundLiteral&) const = default;
};

struct GroundRule {
  std::uint32_t head = 0;
  std::optional<TruthValue> fact_value;
  std::vector<std::vector<GroundLiteral>> body;
  bool operator==(const GroundRule&) const = default;
  bool is_fact() const { return fact_value.has_value(); }
};

struct GroundProgram {
  Lattice lattice;
  HerbrandBase base;
  std::vector<GroundRule> rules;
};

GroundProgram ground(const Program& p);

// Folds all non-fact rules with the same head atom into a single rule whose
// body is the disjunction of the original bodies, preserving rule order.
// Facts are kept as they are.  Applied before the modal transformation.
std::vector<GroundRule> merge_rules_by_head(const GroundProgram& gp);

// ---------------------------------------------------------------------------
// Formulas.  One node type covers three layers that share surface syntax:
//   - many-valued formulas (inside E(...), box_gamma, dia_d): MvNeg..MvOp
//   - flattened formulas over p_F atoms: FlatAtom, NotA..LarrA, Dia
//   - the classical meta layer over modal atoms: MAtom, Not..Impl
// Which layer a node belongs to is fixed by its kind; parsers and evaluators
// validate the layering per context.

struct Formula {
  enum class Kind {
    Atom,      // p(t...)
    MvConst,   // @v, an algebraic value as a formula (fact bodies)
    MvNeg, MvAnd, MvOr, MvLarr, MvRarr, MvOp,
    MAtom,     // [v] p(t...)
    FlatAtom,  // p_F(t..., v) with v a value or the error mark e
    Encap,     // E(phi)
    NotA, AndA, OrA, LarrA, Dia,
    BoxGamma, DiaD,
    Not, And, Or, Impl,
  };

  Kind kind = Kind::Atom;
  Atom atom;                        // Atom / MAtom / FlatAtom
  std::optional<TruthValue> value;  // MAtom, MvConst; FlatAtom: nullopt means e
  std::string op_name;              // MvOp: extra connective name
  std::vector<Formula> kids;

  bool operator==(const Formula&) const = default;
};

using FKind = Formula::Kind;

Formula parse_formula(const Lattice& lat, const std::string& text);
std::string print_formula(const Lattice& lat, const Formula& f);

// True when the formula tree contains only many-valued kinds (Atom, Mv*).
bool is_mv_formula(const Formula& f);
// True when it contains flattened-layer operators / abstract operators.
bool has_flat_ops(const Formula& f);
bool has_abstract_ops(const Formula& f);
bool formula_is_ground(const Formula& f);

// ---------------------------------------------------------------------------
// Surface syntax.

Program parse_program(const std::string& text);
std::string print_program(const Program& p);
std::string print_atom(const Atom& a);
std::string print_rule(const Lattice& lat, const Rule& r);

}  // namespace mvred
