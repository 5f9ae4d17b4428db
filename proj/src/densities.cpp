#include "gdp/densities.hpp"

#include <algorithm>
#include <cmath>

#include "gdp/numerics.hpp"

namespace gdp {

double exp_integral_E1(double x) { return exp_integral_e1(x); }

double laplace_gamma(double theta, double beta, const BaseSpace& nu0,
                     const TestFunction& g) {
  if (!(theta > 0.0 && beta > 0.0)) {
    throw std::invalid_argument("laplace_gamma: theta, beta must be positive");
  }
  if (!(g.lower() > -1.0 / beta)) {
    throw std::domain_error("laplace_gamma: requires g > -1/beta pointwise");
  }
  double e = nu0.integrate(
      [&](Location s) { return std::log1p(beta * g(s)); });
  return std::exp(-theta * e);
}

double laplace_stable(double alpha, double c, const BaseSpace& nu0,
                      const TestFunction& g) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(c > 0.0)) {
    throw std::invalid_argument("laplace_stable: bad parameters");
  }
  if (g.lower() < 0.0) {
    throw std::domain_error("laplace_stable: requires g >= 0");
  }
  double e = nu0.integrate([&](Location s) { return std::pow(g(s), alpha); });
  return std::exp(-c * e);
}

double laplace_mbi_time_t(const TestFunction& a, const TestFunction& b,
                          const AtomicMeasure& mu0, const AtomicMeasure& mu,
                          double t, const TestFunction& f,
                          MbiLaplaceVariant variant) {
  if (!(t > 0.0)) throw std::invalid_argument("laplace_mbi_time_t: t > 0");
  if (f.lower() < 0.0) {
    throw std::domain_error("laplace_mbi_time_t: requires f >= 0");
  }
  auto denom = [&](Location s) {
    return 1.0 + a(s) / b(s) * (1.0 - std::exp(-b(s) * t)) * f(s);
  };
  double first = mu0.integrate(
      [&](Location s) { return std::log(denom(s)) / a(s); });
  double second = mu.integrate([&](Location s) {
    double numer = std::exp(-b(s) * t);
    if (variant == MbiLaplaceVariant::corrected) numer *= f(s);
    return numer / denom(s);
  });
  return std::exp(-first - second);
}

LogValue rn_gamma_Tf(const AtomicMeasure& mu, const TestFunction& f,
                     double theta, double beta, const BaseSpace& nu0) {
  f.require_b_plus("rn_gamma_Tf");
  double t1 = theta * nu0.integrate([&](Location s) { return std::log(f(s)); });
  double t2 =
      mu.integrate([&](Location s) { return (1.0 / f(s) - 1.0) / beta; });
  return LogValue::from_log(-(t1 + t2));
}

LogValue rn_dirichlet_Tf(const AtomicMeasure& nu, const TestFunction& f,
                         double theta, const BaseSpace& nu0) {
  f.require_b_plus("rn_dirichlet_Tf");
  if (std::fabs(nu.total_mass() - 1.0) > 1e-6) {
    throw std::invalid_argument("rn_dirichlet_Tf: nu must be a probability");
  }
  // scale cancellation: constant f gives density 1 identically
  if (f.lower() == f.upper()) return LogValue::one();
  double t1 = nu0.integrate([&](Location s) { return std::log(f(s)); });
  double t2 = std::log(nu.integrate([&](Location s) { return 1.0 / f(s); }));
  return LogValue::from_log(-theta * (t1 + t2));
}

namespace {

// Integral (1/Gamma(theta)) int_0^inf u^{theta-1} prod_i M_i(u) du evaluated
// with the algebraic u->w^(1/theta) substitution near 0 (keeps theta < 1
// integrable singularities smooth) and u = 1 + s/(1-s) on [1, inf).
// log_product(u) must return log prod_i M_i(u), with M_i <= 1.
double mixed_gamma_integral(double theta,
                            const std::function<double(double)>& log_product,
                            const QuadratureSpec& quad, double* rel_err) {
  double lg = std::lgamma(theta);
  auto low = [&](double w) {
    double u = std::pow(w, 1.0 / theta);
    double lp = log_product(u);
    if (!std::isfinite(lp)) return 0.0;  // product underflowed
    return std::exp(lp - lg) / theta;
  };
  auto high = [&](double s) {
    double om = 1.0 - s;
    double u = 1.0 + s / om;
    double lp = log_product(u);
    if (!std::isfinite(lp)) return 0.0;
    double logval = (theta - 1.0) * std::log(u) - lg + lp - 2.0 * std::log(om);
    return std::exp(logval);
  };
  auto q1 = integrate(low, 0.0, 1.0, quad.rel_tol, 1e-300,
                      quad.max_subdivisions);
  auto q2 = integrate(high, 0.0, 1.0, quad.rel_tol, 1e-300,
                      quad.max_subdivisions);
  double value = q1.value + q2.value;
  double err = q1.error_estimate + q2.error_estimate;
  if (!(q1.converged && q2.converged)) {
    throw NumericError("rn quadrature did not converge", value, err);
  }
  if (rel_err) *rel_err = err / std::max(std::fabs(value), 1e-300);
  return value;
}

RnEvaluation bracketed(double log_prefactor, double integral_hi,
                       double integral_lo, double rel_err) {
  double log_hi = log_prefactor + std::log(integral_hi) + rel_err;
  double log_lo = log_prefactor + std::log(integral_lo) - rel_err;
  return {LogValue::from_log(0.5 * (log_lo + log_hi)), log_lo, log_hi};
}

}  // namespace

RnEvaluation rn_pd_theta(const MassPartition& p, const TestFunction& f,
                         double theta, const BaseSpace& nu0,
                         const QuadratureSpec& quad) {
  f.require_b_plus("rn_pd_theta");
  if (!(theta > 0.0)) throw std::invalid_argument("rn_pd_theta: theta > 0");
  if (p.closure() != MassPartition::Closure::simplex) {
    throw std::invalid_argument("rn_pd_theta: partition must be a simplex point");
  }
  // constant f cancels exactly (the integrand reduces to the Gamma density)
  if (f.lower() == f.upper()) return {LogValue::one(), 0.0, 0.0};
  double pref =
      -theta * nu0.integrate([&](Location s) { return std::log(f(s)); });
  double tail_rate = p.truncation_tail() / f.lower();
  auto log_product = [&](double u) {
    KahanSum acc;
    for (double pi : p.weights()) {
      double m = nu0.integrate([&](Location s) {
        return std::exp(-u * pi / f(s));
      });
      if (m <= 0.0) return -std::numeric_limits<double>::infinity();
      acc.add(std::log(m));
    }
    return acc.value();
  };
  double rel_err_hi = 0.0, rel_err_lo = 0.0;
  double hi = mixed_gamma_integral(theta, log_product, quad, &rel_err_hi);
  double lo = hi;
  if (tail_rate > 1e-6) {
    lo = mixed_gamma_integral(
        theta, [&](double u) { return log_product(u) - u * tail_rate; }, quad,
        &rel_err_lo);
  } else {
    // a tail this small moves the log value by at most ~tail_rate
    lo = hi * std::exp(-tail_rate);
    rel_err_lo = tail_rate;
  }
  return bracketed(pref, hi, lo, std::max(rel_err_hi, rel_err_lo));
}

RnEvaluation rn_jumps_Tf(const JumpSequence& x, const TestFunction& f,
                         double theta, double beta, const BaseSpace& nu0) {
  f.require_b_plus("rn_jumps_Tf");
  if (!(theta > 0.0 && beta > 0.0)) {
    throw std::invalid_argument("rn_jumps_Tf: theta, beta must be positive");
  }
  if (f.lower() == f.upper()) {
    // constant c: exact closed form -theta log c - (1/c - 1) sum(x)/beta
    double c = f.lower();
    double lm = -theta * std::log(c) - (1.0 / c - 1.0) * x.sum() / beta;
    double slack = std::fabs(1.0 / c - 1.0) * x.tail_mass_bound() / beta;
    return {LogValue::from_log(lm), lm - slack, lm + slack};
  }
  double pref =
      -theta * nu0.integrate([&](Location s) { return std::log(f(s)); });
  KahanSum acc;
  for (double xi : x.jumps()) {
    double m = nu0.integrate([&](Location s) {
      return std::exp(-(1.0 / f(s) - 1.0) * xi / beta);
    });
    acc.add(std::log(m));
  }
  // omitted factors: each exponent -(1/f - 1) x_i / beta with sum of x_i
  // bounded by the tail bound
  double t = x.tail_mass_bound();
  double c_hi = (1.0 / f.lower() - 1.0) / beta;
  double c_lo = (1.0 / f.upper() - 1.0) / beta;
  double add_a = -c_hi * t;
  double add_b = -c_lo * t;
  double log_main = pref + acc.value();
  double log_lo = log_main + std::min({add_a, add_b, 0.0});
  double log_hi = log_main + std::max({add_a, add_b, 0.0});
  return {LogValue::from_log(0.5 * (log_lo + log_hi)), log_lo, log_hi};
}

RnEvaluation rn_pd_two_param(const MassPartition& p, const TestFunction& f,
                             double alpha, double theta, const BaseSpace& nu0,
                             const QuadratureSpec& quad) {
  f.require_b_plus("rn_pd_two_param");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("rn_pd_two_param: alpha must lie in (0,1)");
  }
  if (theta < 0.0) {
    throw std::invalid_argument("rn_pd_two_param: theta must be >= 0");
  }
  if (theta == 0.0) {
    // the stable law is a fixed point of S_{f,nu0}
    return {LogValue::one(), 0.0, 0.0};
  }
  if (p.closure() != MassPartition::Closure::simplex) {
    throw std::invalid_argument("rn_pd_two_param: simplex point required");
  }
  if (f.lower() == f.upper()) return {LogValue::one(), 0.0, 0.0};
  double a_alpha =
      nu0.integrate([&](Location s) { return std::pow(f(s), alpha); });
  double pref = -(theta / alpha) * std::log(a_alpha);
  double tail_rate = p.truncation_tail() / f.lower();
  auto log_product = [&](double u) {
    KahanSum acc;
    for (double pi : p.weights()) {
      double m = nu0.integrate([&](Location s) {
        return std::pow(f(s), alpha) * std::exp(-u * pi / f(s));
      });
      if (m <= 0.0) return -std::numeric_limits<double>::infinity();
      acc.add(std::log(m / a_alpha));
    }
    return acc.value();
  };
  double rel_err_hi = 0.0, rel_err_lo = 0.0;
  double hi = mixed_gamma_integral(theta, log_product, quad, &rel_err_hi);
  double lo = hi;
  if (tail_rate > 1e-6) {
    lo = mixed_gamma_integral(
        theta, [&](double u) { return log_product(u) - u * tail_rate; }, quad,
        &rel_err_lo);
  } else {
    lo = hi * std::exp(-tail_rate);
    rel_err_lo = tail_rate;
  }
  return bracketed(pref, hi, lo, std::max(rel_err_hi, rel_err_lo));
}

double phi(double x) {
  if (x < 0.0) throw std::domain_error("phi: requires x >= 0");
  if (x == 0.0) return 1.0;
  return x * std::log(x) - (x - 1.0);
}

double entropy(const AtomicMeasure& nu1, const AtomicMeasure& nu2,
               const BaseSpace& space) {
  if (!space.is_finite()) {
    // atomic measures are singular w.r.t. each other in general on the
    // continuum; only the finite-discrete case is evaluated exactly
    return std::numeric_limits<double>::infinity();
  }
  auto p = nu1.coordinates(space);
  auto q = nu2.coordinates(space);
  KahanSum acc;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] == 0.0) continue;
    if (q[s] == 0.0) return std::numeric_limits<double>::infinity();
    acc.add(p[s] * std::log(p[s] / q[s]));
  }
  return acc.value();
}

namespace {

AtomicMeasure base_measure_as_atoms(const BaseSpace& nu0) {
  return AtomicMeasure::from_coordinates(nu0.base_probs());
}

}  // namespace

double hamiltonian_gamma(const AtomicMeasure& mu, double theta, double beta,
                         const BaseSpace& nu0) {
  if (!(theta > 0.0 && beta > 0.0)) {
    throw std::invalid_argument("hamiltonian_gamma: theta, beta positive");
  }
  double mass = mu.total_mass();
  if (!(mass > 0.0)) return std::numeric_limits<double>::infinity();
  double angular;
  if (nu0.is_finite()) {
    angular = theta * entropy(base_measure_as_atoms(nu0),
                              normalize(mu).merged(), nu0);
  } else {
    angular = std::numeric_limits<double>::infinity();
  }
  double radial = mass / beta * phi(beta * theta / mass);
  return angular + radial;
}

double hamiltonian_dirichlet(const AtomicMeasure& nu, double theta,
                             const BaseSpace& nu0) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("hamiltonian_dirichlet: theta positive");
  }
  if (!nu0.is_finite()) return std::numeric_limits<double>::infinity();
  return theta * entropy(base_measure_as_atoms(nu0), nu.merged(), nu0);
}

double lambda_functional(const AtomicMeasure& mu, const TestFunction& f,
                         const TestFunction& a, const TestFunction& b,
                         const AtomicMeasure& mu0) {
  double t1 = mu0.integrate([&](Location s) { return f(s) / a(s); });
  double t2 = mu.integrate(
      [&](Location s) { return std::expm1(f(s)) * b(s) / a(s); });
  return t1 - t2;
}

double tilt_constant(double alpha, double theta, double c) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(c > 0.0) || theta < 0.0) {
    throw std::invalid_argument("tilt_constant: bad parameters");
  }
  double lg = (theta / alpha) * std::log(c) + std::lgamma(theta + 1.0) -
              std::lgamma(theta / alpha + 1.0);
  return std::exp(lg);
}

}  // namespace gdp
