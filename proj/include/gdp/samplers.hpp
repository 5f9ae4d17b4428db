#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gdp/base_space.hpp"
#include "gdp/measures.hpp"
#include "gdp/rng.hpp"

namespace gdp {

// How an infinite weight/jump sequence is cut down to a finite
// representation: either keep exactly K terms, or stick-break until the
// residual mass drops below eps.
struct TruncationPolicy {
  enum class Mode { fixed_count, tail_mass };
  Mode mode;
  double value;

  static TruncationPolicy fixed_count(int k);
  static TruncationPolicy tail_mass(double eps);
};

// A sampler for i.i.d. locations; BaseSpace provides the canonical one.
using LocationSampler = std::function<Location(RngStream&)>;

// GEM(theta) sticks V_1..V_n in stick-breaking order plus the exact residual
// prod (1-U_i). Sticks and residual telescope to 1 bit-exactly.
struct StickSample {
  std::vector<double> sticks;
  double residual;
};

StickSample sample_gem_sticks(double theta, int n, RngStream& rng);
StickSample sample_gem_two_param_sticks(double alpha, double theta, int n,
                                        RngStream& rng);

// Sub-simplex partitions holding the first n sticks (sorted; the raw
// stick order is available from the *_sticks functions).
MassPartition sample_gem(double theta, int n, RngStream& rng);
MassPartition sample_gem_two_param(double alpha, double theta, int n,
                                   RngStream& rng);

// Poisson-Dirichlet PD(theta) / PD(alpha,theta): descending GEM sticks,
// stick-broken until the truncation policy is met.
MassPartition sample_pd(double theta, std::optional<double> alpha,
                        const TruncationPolicy& trunc, RngStream& rng);

// Gamma random measure via the Gamma-Dirichlet decomposition: an
// independent Gamma(theta,1) total mass times PD(theta) weights, atoms
// marked i.i.d. by the location sampler, all scaled by beta.
AtomicMeasure sample_gamma_measure(double theta, const BaseSpace& nu0,
                                   double beta, const TruncationPolicy& trunc,
                                   RngStream& rng);
AtomicMeasure sample_gamma_measure_at(double theta,
                                      const LocationSampler& locations,
                                      double beta,
                                      const TruncationPolicy& trunc,
                                      RngStream& rng);

// Largest n jumps of the gamma subordinator by inverting the tail of the
// Levy measure: jump i solves theta*E1(x) = Gamma_i. Cross-check oracle for
// the decomposition route.
JumpSequence sample_gamma_jumps_inverse_levy(double theta, int n,
                                             RngStream& rng);

// Largest n jumps of the stable subordinator with Levy measure
// c*alpha/Gamma(1-alpha) * s^{-alpha-1} ds.
JumpSequence sample_stable_jumps(double alpha, double c, int n,
                                 RngStream& rng);

// Dirichlet process (normalized gamma measure) with GEM weights.
AtomicMeasure sample_dirichlet_process(double theta, const BaseSpace& nu0,
                                       const TruncationPolicy& trunc,
                                       RngStream& rng);
AtomicMeasure sample_dirichlet_process_at(double theta,
                                          const LocationSampler& locations,
                                          const TruncationPolicy& trunc,
                                          RngStream& rng);

// Finite Dirichlet(theta_1..theta_m) vector.
std::vector<double> sample_dirichlet_vector(const std::vector<double>& theta,
                                            RngStream& rng);

// Stationary law of the branching-with-immigration diffusion with
// coefficients a, b and immigration measure mu0 on a finite-discrete space:
// independent Gamma(mu0(s)/a(s), scale a(s)/b(s)) coordinates.
AtomicMeasure sample_finite_gamma_stationary(const TestFunction& a,
                                             const TestFunction& b,
                                             const AtomicMeasure& mu0,
                                             const BaseSpace& space,
                                             RngStream& rng);

}  // namespace gdp
