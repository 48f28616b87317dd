#pragma once

#include <string>

#include "mvred/semantics.hpp"
#include "mvred/util.hpp"

// Helpers shared by the test binaries.  Everything here is deterministic:
// random programs are driven by the splitmix generator only.

namespace mvred {

inline GroundProgram load(const std::string& text) {
  return ground(parse_program(text));
}

inline TruthValue val_of(const Lattice& lat, const std::string& text) {
  auto v = resolve_value_text(lat, text);
  if (!v) fail(ErrorKind::Usage, "no such value: " + text);
  return *v;
}

// Stratified program source over four unary predicates p0..p3 and constants
// a, b.  Facts carry random values; rules only call on predicates of lower
// or equal index, strictly lower under negation, so the result is always
// stratified.
inline std::string random_stratified(Rng& rng, const Lattice& lat) {
  std::string text = "lattice " + lat.selector + ".\n";
  auto random_value = [&] {
    return lat.id(TruthValue{static_cast<std::uint32_t>(rng.below(lat.size()))});
  };
  auto pred = [](std::size_t i) { return "p" + std::to_string(i); };
  auto random_arg = [&]() -> std::string {
    switch (rng.below(3)) {
      case 0: return "a";
      case 1: return "b";
      default: return "X";
    }
  };
  text += "p0(a) <- @" + random_value() + ".\n";
  for (std::size_t i = 0; i < 4; ++i)
    if (rng.chance(1, 2))
      text += pred(i) + "(" + (rng.chance(1, 2) ? "a" : "b") + ") <- @" +
              random_value() + ".\n";
  for (std::size_t i = 1; i < 4; ++i) {
    std::size_t nrules = rng.below(3);
    for (std::size_t k = 0; k < nrules; ++k) {
      std::string body;
      std::size_t ndis = 1 + rng.below(2);
      for (std::size_t d = 0; d < ndis; ++d) {
        if (d) body += "; ";
        std::size_t nlit = 1 + rng.below(2);
        for (std::size_t l = 0; l < nlit; ++l) {
          if (l) body += ", ";
          bool negate = rng.chance(1, 4);
          std::size_t j = negate ? rng.below(i) : rng.below(i + 1);
          body += (negate ? "~" : "") + pred(j) + "(" + random_arg() + ")";
        }
      }
      text += pred(i) + "(X) :- " + body + ".\n";
    }
  }
  return text;
}

}  // namespace mvred
