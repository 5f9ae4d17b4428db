#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gdp/base_space.hpp"
#include "gdp/lineages.hpp"
#include "gdp/measures.hpp"
#include "gdp/samplers.hpp"

namespace gdp {

// Outer map phi: R^n -> R with analytic gradient and Hessian.
struct OuterMap {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  std::function<std::vector<std::vector<double>>(const std::vector<double>&)>
      hessian;
};

// Cylinder function F(mu) = phi(<mu,f_1>, ..., <mu,f_n>) on a
// finite-discrete base space; inner functions are value vectors over the
// labels. First and second variations reduce to coordinate partials.
class CylinderFunction {
 public:
  CylinderFunction(std::vector<std::vector<double>> inner, OuterMap outer);

  std::size_t space_dim() const { return dim_; }

  double value(const std::vector<double>& mu) const;
  // delta F / delta mu(s)
  std::vector<double> first_variation(const std::vector<double>& mu) const;
  // delta^2 F / delta mu(s1) delta mu(s2)
  std::vector<std::vector<double>> second_variation(
      const std::vector<double>& mu) const;

  static CylinderFunction constant(double c, std::size_t dim);
  static CylinderFunction linear(std::vector<double> f);
  // prod_i <mu, f_i>^{k_i}
  static CylinderFunction monomial(std::vector<std::vector<double>> fs,
                                   std::vector<int> powers);
  // exp(c <mu, f>)
  static CylinderFunction exponential(std::vector<double> f, double c);
  static CylinderFunction product(const CylinderFunction& a,
                                  const CylinderFunction& b);
  // mu -> r(mu)^p Phi(mu / r(mu)), r = <mu, 1>
  static CylinderFunction normalized_lift(const CylinderFunction& phi,
                                          int power);

 private:
  std::vector<std::vector<double>> inner_;
  OuterMap outer_;
  std::size_t dim_;

  std::vector<double> project(const std::vector<double>& mu) const;
};

// Parameters selecting one of the three generators: the MBI generator L,
// the FVP generator A, or the general branching generator L-tilde with
// coefficients a, b and immigration mu0.
class GeneratorParams {
 public:
  enum class Kind { mbi, fvp, general };

  static GeneratorParams MBI(double theta, double lambda, BaseSpace nu0);
  static GeneratorParams FVP(double theta, BaseSpace nu0);
  static GeneratorParams General(TestFunction a, TestFunction b,
                                 AtomicMeasure mu0, BaseSpace space);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  double lambda() const { return lambda_; }
  const BaseSpace& space() const { return space_; }
  const TestFunction& a() const { return *a_; }
  const TestFunction& b() const { return *b_; }
  const AtomicMeasure& mu0() const { return *mu0_; }

 private:
  GeneratorParams(Kind kind, BaseSpace space)
      : kind_(kind), space_(std::move(space)) {}

  Kind kind_;
  BaseSpace space_;
  double theta_ = 0.0;
  double lambda_ = 0.0;
  std::optional<TestFunction> a_;
  std::optional<TestFunction> b_;
  std::optional<AtomicMeasure> mu0_;
};

double apply_generator(const GeneratorParams& params,
                       const CylinderFunction& f, const AtomicMeasure& point);

// Gamma(F,G) = <mu, a dF/dmu dG/dmu> for the general generator.
double carre_du_champ(const GeneratorParams& params, const CylinderFunction& f,
                      const CylinderFunction& g, const AtomicMeasure& point);

// Relative residual of the projection identity for F = r^3 Phi(mu-hat):
//   L F(mu) = r^2 A Phi(mu-hat) + 3 r^2 ((theta - lambda r)/2 + c) Phi(mu-hat).
// Substituting the variations of the lift gives c = 1 (the <mu, f_i -
// <mu-hat,f_i>> terms vanish); the printed source carries c = 2, kept here
// as the rejected reading.
enum class ProjectionVariant { corrected, as_printed };
double check_projection_identity(
    double theta, double lambda, const BaseSpace& nu0,
    const CylinderFunction& phi, const AtomicMeasure& mu,
    ProjectionVariant variant = ProjectionVariant::corrected);

// Exact transition sampler of the MBI process: Poisson-count mixture of
// gamma measures with empirical-plus-base atom marking.
AtomicMeasure sample_Q1(double t, const AtomicMeasure& mu, double theta,
                        double lambda, const BaseSpace& nu0,
                        const TruncationPolicy& trunc, RngStream& rng);

// Exact transition sampler of the FVP process: Tavare-count mixture of
// Dirichlet processes. A precomputed pmf table may be supplied; when the
// table is not exact (tiny t), counts fall back to simulate_kingman.
AtomicMeasure sample_Q2(double t, const AtomicMeasure& nu, double theta,
                        const BaseSpace& nu0, const TruncationPolicy& trunc,
                        RngStream& rng, const TavareTable* table = nullptr);

// Fixed-time identities of the dynamical structure: the Y_t law built from
// the death-chain count at time t, and the X_t law built from the
// time-changed count with final normalization.
AtomicMeasure sample_Y_via_count(double t, const AtomicMeasure& mu,
                                 double theta, double lambda,
                                 const BaseSpace& nu0,
                                 const TruncationPolicy& trunc, RngStream& rng,
                                 double t0 = 1e-3);
AtomicMeasure sample_X_via_time_change(double t, const AtomicMeasure& mu,
                                       double theta, double lambda,
                                       const BaseSpace& nu0,
                                       const TruncationPolicy& trunc,
                                       RngStream& rng, double t0 = 1e-3,
                                       const EarlySegment* early = nullptr);

// Euler-Maruyama oracle for the general branching SDE on a finite space:
//   d mu_s = (mu0_s - b_s mu_s) dt + sqrt(2 a_s mu_s) dW_s,
// full truncation at zero; weak error O(step).
std::vector<double> sde_oracle(const TestFunction& a, const TestFunction& b,
                               const AtomicMeasure& mu0,
                               const BaseSpace& space,
                               const std::vector<double>& start, double t,
                               double step, RngStream& rng);

}  // namespace gdp
