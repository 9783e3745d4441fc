#include "bsr/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bsr {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t x = master;
  std::uint64_t h = splitmix64(x);
  x = h ^ (index + 0x9E3779B97F4A7C15ULL);
  return splitmix64(x);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  engine_.seed(splitmix64(x));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  // top 53 bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() { return 1.0 - uniform(); }

double Rng::normal(double mean, double sd) {
  // Box-Muller; two uniforms per variate keeps the stream stateless
  double u1 = uniform_pos();
  double u2 = uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
  return mean + sd * z;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Johnk-style boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    double g = gamma(shape + 1.0, rate);
    double u = uniform_pos();
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal(0.0, 1.0);
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v))
      return d * v / rate;
  }
}

double Rng::inverse_gamma(double shape, double rate) {
  return 1.0 / gamma(shape, rate);
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw std::domain_error("uniform_index: n must be >= 1");
  // multiply-shift map of a full 64-bit draw onto {0, ..., n-1}
  unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  if (weights.empty()) throw std::domain_error("categorical: empty weights");
  double u = uniform();
  double cum = 0.0;
  std::size_t last_positive = weights.size() - 1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    cum += weights[i];
    if (u < cum) return i;
  }
  return last_positive;
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::load_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
  if (!is) throw std::runtime_error("Rng::load_state: malformed state string");
}

}  // namespace bsr
