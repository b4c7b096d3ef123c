#include "pachinko/rng.hpp"

#include <cmath>

#include "pachinko/error.hpp"

namespace pachinko {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng Rng::fork(std::string_view label) const {
  Rng copy = *this;  // engine state does not advance in the parent
  const std::uint64_t base = const_cast<Rng&>(copy).next_u64();
  return Rng(splitmix64(base ^ fnv1a(label)));
}

double Rng::uniform_positive() {
  for (;;) {
    const double u = uniform();
    if (u > 0.0) return u;
  }
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ValidationError("Rng::below requires n > 0");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % n;
  }
}

double Rng::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  have_spare_normal_ = true;
  return u * factor;
}

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ValidationError("Rng::gamma requires shape > 0 and scale > 0");
  }
  if (shape < 1.0) {
    // Boost to shape+1, then scale back: G(a) = G(a+1) * U^{1/a}.
    const double u = uniform_positive();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_positive();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

std::int64_t Rng::poisson(double mean) {
  if (mean < 0.0) throw ValidationError("Rng::poisson requires mean >= 0");
  if (mean == 0.0) return 0;
  // Count exponential inter-arrival times until they exceed the mean.
  std::int64_t k = 0;
  double acc = 0.0;
  for (;;) {
    acc += -std::log(uniform_positive());
    if (acc >= mean) return k;
    ++k;
  }
}

std::int64_t Rng::negative_binomial(double mu, double r) {
  if (!(mu >= 0.0) || !(r > 0.0)) {
    throw ValidationError("Rng::negative_binomial requires mu >= 0 and r > 0");
  }
  if (mu == 0.0) return 0;
  return poisson(gamma(r, mu / r));
}

}  // namespace pachinko
