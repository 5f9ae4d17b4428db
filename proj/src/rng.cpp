#include "gdp/rng.hpp"

#include <cmath>

namespace gdp {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> RngStream::philox_block(
    std::uint64_t counter) const {
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(counter),
      static_cast<std::uint32_t>(counter >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return c;
}

RngStream RngStream::child(std::uint64_t i) const {
  return RngStream(seed_, splitmix64(stream_ + splitmix64(i)));
}

void RngStream::refill() {
  buf_ = philox_block(counter_++);
  buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ > 2) refill();
  std::uint64_t lo = buf_[buf_pos_];
  std::uint64_t hi = buf_[buf_pos_ + 1];
  buf_pos_ += 2;
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return u;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  // rejection to remove modulo bias
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RngStream::exponential() { return -std::log(uniform_pos()); }

double RngStream::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform_pos();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Marsaglia-Tsang boost for shape < 1
    double u = uniform_pos();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::gamma(double shape, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("gamma: scale must be > 0");
  return gamma(shape) * scale;
}

double RngStream::beta(double a, double b) {
  double x = gamma(a);
  double y = gamma(b);
  return x / (x + y);
}

double RngStream::beta_1_theta(double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("beta_1_theta: theta must be > 0");
  }
  // X ~ Beta(1,theta) has survival (1-x)^theta; invert a single uniform
  return 1.0 - std::pow(uniform_pos(), 1.0 / theta);
}

long long RngStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(mean);
  return poisson_ptrd(mean);
}

long long RngStream::poisson_inversion(double mean) {
  double p = std::exp(-mean);
  double cum = p;
  double u = uniform();
  long long k = 0;
  while (u > cum) {
    ++k;
    p *= mean / static_cast<double>(k);
    cum += p;
    if (k > 2000) break;  // cum has saturated numerically
  }
  return k;
}

// Hormann's PTRD transformed-rejection sampler, exact for mean >= 10.
long long RngStream::poisson_ptrd(double mean) {
  double smu = std::sqrt(mean);
  double b = 0.931 + 2.53 * smu;
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = -mean + k * std::log(mean) - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<long long>(kf);
  }
}

}  // namespace gdp
