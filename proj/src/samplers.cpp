#include "gdp/samplers.hpp"

#include <algorithm>
#include <cmath>

#include "gdp/numerics.hpp"

namespace gdp {

TruncationPolicy TruncationPolicy::fixed_count(int k) {
  if (k < 1) throw std::invalid_argument("TruncationPolicy: K must be >= 1");
  return {Mode::fixed_count, static_cast<double>(k)};
}

TruncationPolicy TruncationPolicy::tail_mass(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("TruncationPolicy: eps must lie in (0,1)");
  }
  return {Mode::tail_mass, eps};
}

namespace {

constexpr int kMaxSticks = 1 << 22;

void check_theta(double theta) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("theta must be positive");
  }
}

void check_two_param(double alpha, double theta) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  if (!(theta > -alpha)) {
    throw std::invalid_argument("theta must exceed -alpha");
  }
}

// Generic stick breaking. draw_u(i) supplies the i-th stick fraction
// (1-based). Residual is updated by subtraction so that
// sticks + residual telescope to 1 exactly in floating point.
StickSample break_sticks(int n, const std::function<double(int)>& draw_u) {
  StickSample out;
  out.sticks.reserve(static_cast<std::size_t>(n));
  double remaining = 1.0;
  for (int i = 1; i <= n; ++i) {
    double v = draw_u(i) * remaining;
    out.sticks.push_back(v);
    remaining -= v;
    if (remaining < 0.0) remaining = 0.0;
  }
  out.residual = remaining;
  return out;
}

StickSample break_sticks_until(double eps,
                               const std::function<double(int)>& draw_u) {
  StickSample out;
  double remaining = 1.0;
  int i = 1;
  while (remaining > eps) {
    double v = draw_u(i) * remaining;
    out.sticks.push_back(v);
    remaining -= v;
    if (remaining < 0.0) remaining = 0.0;
    if (++i > kMaxSticks) {
      throw NumericError("stick breaking did not reach the tail-mass target",
                         remaining, eps);
    }
  }
  out.residual = remaining;
  return out;
}

}  // namespace

StickSample sample_gem_sticks(double theta, int n, RngStream& rng) {
  check_theta(theta);
  if (n < 1) throw std::invalid_argument("sample_gem: n must be >= 1");
  return break_sticks(n, [&](int) { return rng.beta_1_theta(theta); });
}

StickSample sample_gem_two_param_sticks(double alpha, double theta, int n,
                                        RngStream& rng) {
  check_two_param(alpha, theta);
  if (n < 1) throw std::invalid_argument("sample_gem_two_param: n >= 1");
  return break_sticks(
      n, [&](int i) { return rng.beta(1.0 - alpha, theta + i * alpha); });
}

MassPartition sample_gem(double theta, int n, RngStream& rng) {
  auto s = sample_gem_sticks(theta, n, rng);
  return MassPartition(std::move(s.sticks),
                       MassPartition::Closure::sub_simplex, s.residual);
}

MassPartition sample_gem_two_param(double alpha, double theta, int n,
                                   RngStream& rng) {
  auto s = sample_gem_two_param_sticks(alpha, theta, n, rng);
  return MassPartition(std::move(s.sticks),
                       MassPartition::Closure::sub_simplex, s.residual);
}

MassPartition sample_pd(double theta, std::optional<double> alpha,
                        const TruncationPolicy& trunc, RngStream& rng) {
  std::function<double(int)> draw_u;
  if (alpha) {
    check_two_param(*alpha, theta);
    draw_u = [&rng, a = *alpha, theta](int i) {
      return rng.beta(1.0 - a, theta + i * a);
    };
  } else {
    check_theta(theta);
    draw_u = [&rng, theta](int) { return rng.beta_1_theta(theta); };
  }
  StickSample s = (trunc.mode == TruncationPolicy::Mode::fixed_count)
                      ? break_sticks(static_cast<int>(trunc.value), draw_u)
                      : break_sticks_until(trunc.value, draw_u);
  return MassPartition(std::move(s.sticks), MassPartition::Closure::simplex,
                       s.residual);
}

AtomicMeasure sample_gamma_measure_at(double theta,
                                      const LocationSampler& locations,
                                      double beta,
                                      const TruncationPolicy& trunc,
                                      RngStream& rng) {
  check_theta(theta);
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  double sigma = rng.gamma(theta);
  MassPartition p = sample_pd(theta, std::nullopt, trunc, rng);
  std::vector<AtomicMeasure::Atom> atoms;
  atoms.reserve(p.size());
  for (double w : p.weights()) {
    atoms.push_back({beta * sigma * w, locations(rng)});
  }
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure sample_gamma_measure(double theta, const BaseSpace& nu0,
                                   double beta, const TruncationPolicy& trunc,
                                   RngStream& rng) {
  return sample_gamma_measure_at(
      theta, [&nu0](RngStream& r) { return nu0.sample_location(r); }, beta,
      trunc, rng);
}

JumpSequence sample_gamma_jumps_inverse_levy(double theta, int n,
                                             RngStream& rng) {
  check_theta(theta);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<double> jumps;
  jumps.reserve(static_cast<std::size_t>(n));
  double arrival = 0.0;
  for (int i = 0; i < n; ++i) {
    arrival += rng.exponential();
    double target = arrival / theta;  // solve E1(x) = target
    // geometric expansion to a guaranteed bracket, then bisection on log x
    double lo = 1.0, hi = 1.0;
    while (exp_integral_e1(lo) < target) {
      lo *= 0.5;
      if (lo < 1e-300) {
        throw NumericError("inverse-Levy bracket underflow", lo, target);
      }
    }
    while (exp_integral_e1(hi) > target) {
      hi *= 2.0;
      if (hi > 1e300) {
        throw NumericError("inverse-Levy bracket overflow", hi, target);
      }
    }
    double lx = bisect(
        [target](double t) { return exp_integral_e1(std::exp(t)) - target; },
        std::log(lo), std::log(hi), 1e-12, 300);
    jumps.push_back(std::exp(lx));
  }
  double tail_mean_bound = theta * (1.0 - std::exp(-jumps.back()));
  return JumpSequence(std::move(jumps), tail_mean_bound);
}

JumpSequence sample_stable_jumps(double alpha, double c, int n,
                                 RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0,1)");
  }
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  double g1ma = std::tgamma(1.0 - alpha);
  std::vector<double> jumps;
  jumps.reserve(static_cast<std::size_t>(n));
  double arrival = 0.0;
  for (int i = 0; i < n; ++i) {
    arrival += rng.exponential();
    jumps.push_back(std::pow(g1ma * arrival / c, -1.0 / alpha));
  }
  double rn = jumps.back();
  double tail_mean = c * alpha / g1ma * std::pow(rn, 1.0 - alpha) / (1.0 - alpha);
  return JumpSequence(std::move(jumps), tail_mean);
}

AtomicMeasure sample_dirichlet_process_at(double theta,
                                          const LocationSampler& locations,
                                          const TruncationPolicy& trunc,
                                          RngStream& rng) {
  check_theta(theta);
  StickSample s =
      (trunc.mode == TruncationPolicy::Mode::fixed_count)
          ? sample_gem_sticks(theta, static_cast<int>(trunc.value), rng)
          : break_sticks_until(trunc.value,
                               [&](int) { return rng.beta_1_theta(theta); });
  std::vector<AtomicMeasure::Atom> atoms;
  atoms.reserve(s.sticks.size());
  for (double w : s.sticks) atoms.push_back({w, locations(rng)});
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure sample_dirichlet_process(double theta, const BaseSpace& nu0,
                                       const TruncationPolicy& trunc,
                                       RngStream& rng) {
  return sample_dirichlet_process_at(
      theta, [&nu0](RngStream& r) { return nu0.sample_location(r); }, trunc,
      rng);
}

std::vector<double> sample_dirichlet_vector(const std::vector<double>& theta,
                                            RngStream& rng) {
  if (theta.empty()) {
    throw std::invalid_argument("sample_dirichlet_vector: empty parameter");
  }
  std::vector<double> out(theta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    check_theta(theta[i]);
    out[i] = rng.gamma(theta[i]);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

AtomicMeasure sample_finite_gamma_stationary(const TestFunction& a,
                                             const TestFunction& b,
                                             const AtomicMeasure& mu0,
                                             const BaseSpace& space,
                                             RngStream& rng) {
  if (!space.is_finite()) {
    throw std::invalid_argument(
        "sample_finite_gamma_stationary: finite-discrete base space required");
  }
  auto m0 = mu0.coordinates(space);
  std::vector<double> coords(m0.size());
  for (std::size_t s = 0; s < m0.size(); ++s) {
    auto loc = static_cast<Location>(s);
    double as = a(loc), bs = b(loc);
    if (!(as > 0.0 && bs > 0.0)) {
      throw std::invalid_argument(
          "sample_finite_gamma_stationary: a, b must be positive");
    }
    coords[s] = (m0[s] > 0.0) ? rng.gamma(m0[s] / as, as / bs) : 0.0;
  }
  return AtomicMeasure::from_coordinates(coords);
}

}  // namespace gdp
