#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace gdp {

// Counter-based generator (Philox4x32-10). A stream is identified by
// (seed, stream_id); identical identifiers reproduce the identical output
// sequence on every platform, and distinct stream ids give statistically
// independent streams. Copying a stream copies its position.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // Derived stream for replicate/worker i. Stateless: the same (parent, i)
  // always names the same child stream.
  RngStream child(std::uint64_t i) const;

  std::uint64_t next_u64();

  // Uniform on [0,1) with 53-bit resolution.
  double uniform();
  // Uniform on (0,1); rejects the (measure-zero) exact 0.
  double uniform_pos();
  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  double exponential();                    // mean 1
  double normal();                         // standard normal
  double gamma(double shape);              // unit scale
  double gamma(double shape, double scale);
  double beta(double a, double b);
  double beta_1_theta(double theta);       // Beta(1, theta) by exact inversion
  long long poisson(double mean);

 private:
  std::array<std::uint32_t, 4> philox_block(std::uint64_t counter) const;
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;  // 4 == empty
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;

  long long poisson_inversion(double mean);
  long long poisson_ptrd(double mean);
};

}  // namespace gdp
