#pragma once

#include <cmath>
#include <limits>

#include "gdp/base_space.hpp"
#include "gdp/measures.hpp"

namespace gdp {

// Nonnegative quantity kept in log space; densities are evaluated here so
// that products over many atoms never overflow.
struct LogValue {
  double log_mag;
  int sign;  // +1 or 0

  static LogValue from_log(double lm) { return {lm, +1}; }
  static LogValue zero() {
    return {-std::numeric_limits<double>::infinity(), 0};
  }
  static LogValue one() { return {0.0, +1}; }

  double value() const { return sign == 0 ? 0.0 : std::exp(log_mag); }
  LogValue operator*(const LogValue& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return {log_mag + o.log_mag, +1};
  }
};

struct QuadratureSpec {
  double rel_tol = 1e-9;
  int max_subdivisions = 4000;
};

// Evaluation of a truncated infinite product; [log_lo, log_hi] brackets the
// exact value using the truncation-tail bound of the input.
struct RnEvaluation {
  LogValue value;
  double log_lo;
  double log_hi;
};

// E1(x) = int_x^inf z^-1 e^-z dz.
double exp_integral_E1(double x);

// Closed-form Laplace functionals.
double laplace_gamma(double theta, double beta, const BaseSpace& nu0,
                     const TestFunction& g);
double laplace_stable(double alpha, double c, const BaseSpace& nu0,
                      const TestFunction& g);

// Fixed-time Laplace functional of the branching-with-immigration diffusion
// Z_t with coefficients a, b and immigration mu0, started at mu. The printed
// source drops a factor of f in the second exponent; both readings are kept
// and the diffusion oracle adjudicates (the corrected one is the default).
enum class MbiLaplaceVariant { as_printed, corrected };
double laplace_mbi_time_t(const TestFunction& a, const TestFunction& b,
                          const AtomicMeasure& mu0, const AtomicMeasure& mu,
                          double t, const TestFunction& f,
                          MbiLaplaceVariant variant = MbiLaplaceVariant::corrected);

// Radon-Nikodym derivatives of the quasi-invariance theorems.

// d T_f(Gamma) / d Gamma at mu.
LogValue rn_gamma_Tf(const AtomicMeasure& mu, const TestFunction& f,
                     double theta, double beta, const BaseSpace& nu0);

// d T-bar_f(Pi) / d Pi at nu (nu a probability measure).
LogValue rn_dirichlet_Tf(const AtomicMeasure& nu, const TestFunction& f,
                         double theta, const BaseSpace& nu0);

// d S_{f,nu0}(PD(theta)) / d PD(theta) at p.
RnEvaluation rn_pd_theta(const MassPartition& p, const TestFunction& f,
                         double theta, const BaseSpace& nu0,
                         const QuadratureSpec& quad = {});

// d J(T_f(Gamma)) / d J(Gamma) at x (ordered jump sizes).
RnEvaluation rn_jumps_Tf(const JumpSequence& x, const TestFunction& f,
                         double theta, double beta, const BaseSpace& nu0);

// d S_{f,nu0}(PD(alpha,theta)) / d PD(alpha,theta) at p; theta = 0 gives
// exactly 1 (the stable law is a fixed point).
RnEvaluation rn_pd_two_param(const MassPartition& p, const TestFunction& f,
                             double alpha, double theta, const BaseSpace& nu0,
                             const QuadratureSpec& quad = {});

// phi(x) = x log x - (x - 1), x >= 0.
double phi(double x);

// Relative entropy Ent(nu1 | nu2) on a finite-discrete space; +inf when
// nu1 is not absolutely continuous w.r.t. nu2.
double entropy(const AtomicMeasure& nu1, const AtomicMeasure& nu2,
               const BaseSpace& space);

// Formal Hamiltonians (finite-discrete spaces; infinite values are valid).
double hamiltonian_gamma(const AtomicMeasure& mu, double theta, double beta,
                         const BaseSpace& nu0);
double hamiltonian_dirichlet(const AtomicMeasure& nu, double theta,
                             const BaseSpace& nu0);

// Lambda(mu, f) = <mu0, f/a> - <mu, (e^f - 1) b/a>.
double lambda_functional(const AtomicMeasure& mu, const TestFunction& f,
                         const TestFunction& a, const TestFunction& b,
                         const AtomicMeasure& mu0);

// c_{alpha,theta} = c^{theta/alpha} Gamma(theta+1) / Gamma(theta/alpha + 1).
double tilt_constant(double alpha, double theta, double c);

}  // namespace gdp
