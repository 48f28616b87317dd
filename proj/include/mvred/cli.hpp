#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mvred::cli {

struct RunConfig {
  std::string mode;          // model | transform-unary | transform-flatten | check | verify
  std::string program_path;
  std::string lattice_override;          // selector; empty keeps the program's
  std::string formula;                   // check mode
  std::string world;                     // check mode; empty means "at every world"
  std::string suite = "all";             // verify mode
  std::vector<std::string> designated;   // matrix D; empty defaults to {top}
  bool full_implication = false;
  bool json = false;
  std::uint64_t clause_budget = 1000000;
  std::uint64_t valuation_budget = 1000000;
  std::uint64_t seed = 2026;
  std::size_t sample_count = 500;
  int sample_depth = 4;
};

// Exit codes: 0 pass, 1 verification verdict failed, 2 usage or parse error,
// 3 budget exceeded.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv (CLI11), honors MVRED_BUDGET, and dispatches to run().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvred::cli
