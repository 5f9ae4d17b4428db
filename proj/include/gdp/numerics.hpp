#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace gdp {

// Raised when an iterative numerical routine cannot reach its target
// accuracy; carries the best estimate and the error bound achieved.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate(estimate), error_bound(error_bound) {}
  double estimate;
  double error_bound;
};

// Neumaier compensated accumulator.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  int intervals = 0;
};

// Adaptive Gauss-Kronrod 7/15 on a finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-10,
                           double abs_tol = 1e-14, int max_intervals = 4000);

// Adaptive quadrature on (0, inf) through the substitution u = t/(1-t).
QuadratureResult integrate_0_inf(const std::function<double(double)>& f,
                                 double rel_tol = 1e-10,
                                 double abs_tol = 1e-14,
                                 int max_intervals = 4000);

// Exponential integral E1(x) = int_x^inf z^-1 e^-z dz, relative error <= 1e-12.
double exp_integral_e1(double x);

// Regularized incomplete gamma P(a,x) (lower) and Q(a,x) (upper).
double reg_gamma_p(double a, double x);
double reg_gamma_q(double a, double x);

// Survival function of the chi-square distribution with k dof.
double chi_square_sf(double x, double k);

// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

// Two-sample Kolmogorov-Smirnov: returns (statistic, asymptotic p-value).
struct KsResult {
  double statistic;
  double p_value;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
// One-sample KS against a cdf.
KsResult ks_one_sample(std::vector<double> a,
                       const std::function<double(double)>& cdf);

// Digamma and trigamma (asymptotic expansion with upward recurrence).
double digamma(double x);
double trigamma(double x);

// Bisection for a strictly monotone function; solves f(x) = 0 on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_rel_tol = 1e-13, int max_iter = 200);

// Golden-section minimizer for a unimodal function on [lo, hi].
struct MinimizeResult {
  double argmin;
  double min_value;
};
MinimizeResult golden_section(const std::function<double(double)>& f,
                              double lo, double hi, double x_tol = 1e-10);

}  // namespace gdp
