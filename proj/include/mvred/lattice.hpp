#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvred/util.hpp"

namespace mvred {

// A truth value is an index into the carrier of the lattice it was resolved
// against.  Values from different lattices must never be mixed; every
// operation takes the owning Lattice explicitly.
struct TruthValue {
  std::uint32_t i = 0;
  friend bool operator==(TruthValue a, TruthValue b) { return a.i == b.i; }
  friend auto operator<=>(TruthValue a, TruthValue b) { return a.i <=> b.i; }
};

// Extra named connective beyond meet/join/neg/implies (e.g. the knowledge
// operators of the four-valued lattice).  Tables are row-major for arity 2.
struct Connective {
  int arity = 2;
  std::vector<TruthValue> table;
};

struct AxiomViolation {
  std::string axiom;   // short law name, e.g. "meet-is-glb"
  std::string detail;  // witness elements spelled out
};

enum class LatticeKind { Belnap, Fuzzy, Interval, Confidence, Custom };

// Finite bounded lattice of truth values with an antitonic negation and a
// derived residual implication.  All tables are total over the carrier and
// fixed after construction; check_lattice() re-validates them extensionally.
struct Lattice {
  std::string name;                 // display name, e.g. "fuzzy:5"
  std::string selector;             // text that reconstructs this lattice
  LatticeKind kind = LatticeKind::Custom;
  std::vector<std::string> elems;   // canonical element ids, carrier order
  std::vector<std::uint8_t> leq_tab;    // row-major |W|^2
  std::vector<TruthValue> meet_tab;     // row-major |W|^2
  std::vector<TruthValue> join_tab;
  std::vector<TruthValue> implies_tab;  // residuum, derived from leq
  std::vector<TruthValue> neg_tab;
  std::map<std::string, Connective> extras;
  TruthValue bottom{0}, top{0};

  std::size_t size() const { return elems.size(); }
  const std::string& id(TruthValue v) const { return elems[v.i]; }
  std::optional<TruthValue> find(std::string_view elem_id) const;

  bool leq(TruthValue a, TruthValue b) const {
    return leq_tab[a.i * size() + b.i] != 0;
  }
  TruthValue meet(TruthValue a, TruthValue b) const {
    return meet_tab[a.i * size() + b.i];
  }
  TruthValue join(TruthValue a, TruthValue b) const {
    return join_tab[a.i * size() + b.i];
  }
  TruthValue implies(TruthValue a, TruthValue b) const {
    return implies_tab[a.i * size() + b.i];
  }
  TruthValue neg(TruthValue a) const { return neg_tab[a.i]; }

  const Connective* extra(std::string_view op_name) const;

  // The classical sublattice {bottom, top}.
  bool is_classical(TruthValue v) const { return v == bottom || v == top; }
};

// Residual implication computed from first principles: the supremum of
// {c | c meet a <= b}.  Errors if that supremum escapes the candidate set,
// which means the lattice is not residuated.
TruthValue residuum(const Lattice& lat, TruthValue a, TruthValue b);

// Extensional re-validation of every structural law: partial order, glb/lub
// agreement of the tables, bounds, negation (involution on the bounds,
// antitonicity), residuation, and totality of the extra connectives.
// Returns an empty vector when the declared tables are sound.
std::vector<AxiomViolation> check_lattice(const Lattice& lat);

// Built-in lattices.  k is the number of grid points per unit axis and must
// be >= 2 for the graded lattices; it is ignored for belnap4.
//   belnap4            four-valued: f, bot (unknown), top (conflict), t
//   fuzzy_chain        chain 0, 1/(k-1), ..., 1 with neg x = 1-x
//   interval           closed subintervals of the k-point chain
//   confidence         (belief, doubt) pairs of intervals
Lattice builtin_lattice(const std::string& name, int k = 0);

// Lattice declaration files: elements, leq facts (closed reflexively and
// transitively), a total neg map, and optional extra connective tables.
// meet, join and implies are always derived from leq.
Lattice load_lattice_text(const std::string& text, const std::string& display_name);
Lattice load_lattice_file(const std::string& path);

// Selector grammar: belnap4 | fuzzy:k | interval:k | confidence:k | file:PATH
Lattice lattice_from_selector(const std::string& selector);

// Resolves surface value text against a lattice, canonicalizing grid values
// first so that e.g. "0.50", "1/2" and "0.5" name the same element.
std::optional<TruthValue> resolve_value_text(const Lattice& lat, std::string_view text);

}  // namespace mvred
