#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mvred {

// Error kinds map onto process exit codes in the CLI: usage/parse errors
// exit with 2, blown budgets with 3.  Everything else is a plain failure.
enum class ErrorKind { Parse, Usage, Budget, Lattice, Semantic };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

// Deterministic 64-bit generator (splitmix64).  std::uniform_int_distribution
// is implementation-defined, so sampled suites go through this to keep
// verification output byte-identical across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n).  n must be positive; modulo bias is irrelevant at
  // the sample sizes used here and keeps the stream platform-stable.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  bool chance(std::uint64_t num, std::uint64_t den) {
    return below(den) < num;
  }

private:
  std::uint64_t state_;
};

}  // namespace mvred
