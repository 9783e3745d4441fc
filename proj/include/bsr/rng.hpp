#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace bsr {

/// Derives an independent stream seed from a master seed, e.g. one per
/// replicate. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic random stream. The engine is the fully specified
/// std::mt19937_64; every distribution below is mapped from raw 64-bit
/// draws by hand so a given seed yields the same sequence everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1]
  double normal(double mean, double sd);

  /// Gamma(shape, rate) with density proportional to x^(shape-1) e^(-rate x).
  double gamma(double shape, double rate);

  /// Inverse gamma with density proportional to x^(-shape-1) e^(-rate/x);
  /// the reciprocal of a Gamma(shape, rate) draw.
  double inverse_gamma(double shape, double rate);

  std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}, n >= 1

  /// Index drawn according to `weights`; the caller supplies a vector that
  /// sums to ~1. Any residual mass falls on the last positive entry.
  std::size_t categorical(std::span<const double> weights);

  // engine state round-trip, used by checkpoints
  std::string save_state() const;
  void load_state(const std::string&);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bsr
