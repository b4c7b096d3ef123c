#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace pachinko {

// Deterministic random source. Every transform on top of the mt19937_64
// stream is implemented here rather than taken from <random>, because the
// standard distributions are implementation-defined and would break the
// byte-identical-outputs contract across standard libraries.
//
// The algorithm set is versioned; bump kRngVersion if any transform changes.
inline constexpr std::string_view kRngVersion = "pachinko-rng/1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independently seeded child stream. Streams forked with
  // distinct labels from the same parent are decorrelated and stable.
  Rng fork(std::string_view label) const;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); never returns 0, safe for log().
  double uniform_positive();

  // Uniform integer in [0, n), unbiased (rejection sampling). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  double normal();  // standard normal, Marsaglia polar method
  double gamma(double shape, double scale);
  std::int64_t poisson(double mean);
  // Negative binomial with mean mu and dispersion r (gamma-Poisson mixture).
  std::int64_t negative_binomial(double mu, double r);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pachinko
