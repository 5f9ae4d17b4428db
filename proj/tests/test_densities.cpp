#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gdp/densities.hpp"
#include "gdp/numerics.hpp"
#include "gdp/samplers.hpp"

using namespace gdp;

namespace {

const BaseSpace kTwoPoint = BaseSpace::finite_discrete({0.5, 0.5});
const TestFunction kTwoOne = TestFunction::from_values({2.0, 1.0});

}  // namespace

TEST_CASE("laplace functionals: closed forms") {
  auto u = BaseSpace::unit_interval();
  CHECK(laplace_gamma(1.0, 1.0, u, TestFunction::constant(1.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(laplace_gamma(2.0, 0.5, u, TestFunction::constant(0.0)) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(laplace_gamma(1.0, 1.0, u, TestFunction::constant(-2.0)),
                  std::domain_error);
  CHECK(laplace_stable(0.5, 2.0, u, TestFunction::constant(1.0)) ==
        doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("mbi fixed-time laplace functional") {
  auto space = BaseSpace::finite_discrete({0.6, 0.4});
  auto a = TestFunction::constant(0.5);
  double lambda = 1.25;
  auto b = TestFunction::constant(lambda / 2.0);
  double theta = 1.5;
  AtomicMeasure mu0 = AtomicMeasure::from_coordinates(
      {theta * 0.6 / 2.0, theta * 0.4 / 2.0});
  AtomicMeasure mu = AtomicMeasure::from_coordinates({0.8, 0.4});
  auto f = TestFunction::from_values({0.9, 0.3});

  // t -> infinity recovers the stationary gamma Laplace functional
  double lim = laplace_mbi_time_t(a, b, mu0, mu, 80.0, f);
  double stat = laplace_gamma(theta, 1.0 / lambda, space, f);
  CHECK(lim == doctest::Approx(stat).epsilon(1e-10));

  // t -> 0 must recover exp(-<mu, f>); only the corrected reading does
  double tiny = laplace_mbi_time_t(a, b, mu0, mu, 1e-10, f,
                                   MbiLaplaceVariant::corrected);
  CHECK(tiny == doctest::Approx(std::exp(-mu.integrate(f))).epsilon(1e-8));
  double printed = laplace_mbi_time_t(a, b, mu0, mu, 1e-10, f,
                                      MbiLaplaceVariant::as_printed);
  CHECK(printed == doctest::Approx(std::exp(-mu.total_mass())).epsilon(1e-8));
}

TEST_CASE("rn_gamma_Tf") {
  auto u = BaseSpace::unit_interval();
  AtomicMeasure mu({{0.4, 0.2}, {0.6, 0.8}});  // mass 1

  CHECK(rn_gamma_Tf(mu, TestFunction::constant(1.0), 1.0, 1.0, u).log_mag ==
        0.0);

  double v = rn_gamma_Tf(mu, TestFunction::constant(2.0), 1.0, 1.0, u).value();
  CHECK(v == doctest::Approx(std::exp(0.5) / 2.0).epsilon(1e-12));

  // specific non-invariance under f -> c f predicted by the density
  auto f = kTwoOne;
  auto space = kTwoPoint;
  AtomicMeasure nu({{0.3, 0.0}, {0.7, 1.0}});
  double c = 3.0;
  auto cf = TestFunction::from_values({2.0 * c, 1.0 * c});
  double lhs = rn_gamma_Tf(nu, cf, 1.5, 2.0, space).log_mag;
  double rhs = rn_gamma_Tf(nu, f, 1.5, 2.0, space).log_mag - 1.5 * std::log(c) -
               (1.0 / c - 1.0) *
                   nu.integrate([&](Location s) { return 1.0 / f(s); }) / 2.0;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("rn_dirichlet_Tf") {
  AtomicMeasure nu({{0.5, 0.0}, {0.5, 1.0}});
  CHECK(rn_dirichlet_Tf(nu, TestFunction::constant(1.0), 1.0, kTwoPoint)
            .log_mag == 0.0);
  CHECK(rn_dirichlet_Tf(nu, TestFunction::constant(7.5), 2.0, kTwoPoint)
            .log_mag == 0.0);

  double v = rn_dirichlet_Tf(nu, kTwoOne, 1.0, kTwoPoint).value();
  CHECK(v == doctest::Approx(std::exp(-(0.5 * std::log(2.0) +
                                        std::log(0.75)))).epsilon(1e-12));

  // scale invariance at non-constant f
  auto f3 = TestFunction::from_values({6.0, 3.0});
  CHECK(rn_dirichlet_Tf(nu, f3, 1.0, kTwoPoint).log_mag ==
        doctest::Approx(rn_dirichlet_Tf(nu, kTwoOne, 1.0, kTwoPoint).log_mag)
            .epsilon(1e-12));
}

TEST_CASE("rn_pd_theta against a brute-force quadrature oracle") {
  MassPartition p({1.0}, MassPartition::Closure::simplex, 0.0);
  double theta = 1.0;
  auto r = rn_pd_theta(p, kTwoOne, theta, kTwoPoint);
  // direct oracle: exp(-theta <nu0, log f>) int u^{theta-1}/Gamma(theta)
  //   * (0.5 e^{-u/2} + 0.5 e^{-u}) du; at theta = 1 the weight is just du
  auto oracle = integrate_0_inf(
      [](double x) { return 0.5 * std::exp(-x / 2.0) + 0.5 * std::exp(-x); },
      1e-13);
  REQUIRE(oracle.converged);
  double expect = std::exp(-0.5 * std::log(2.0)) * oracle.value;
  CHECK(r.value.value() == doctest::Approx(expect).epsilon(1e-8));

  // f constant cancels exactly
  MassPartition q({0.5, 0.3, 0.2}, MassPartition::Closure::simplex, 0.0);
  CHECK(rn_pd_theta(q, TestFunction::constant(1.0), 2.0, kTwoPoint)
            .value.log_mag == 0.0);
  CHECK(rn_pd_theta(q, TestFunction::constant(4.0), 2.0, kTwoPoint)
            .value.log_mag == 0.0);
}

TEST_CASE("rn_pd_theta quadrature stability and truncation bracket") {
  RngStream rng(201, 0);
  auto p = sample_pd(1.0, std::nullopt, TruncationPolicy::fixed_count(12), rng);

  QuadratureSpec loose{1e-7, 4000};
  QuadratureSpec tight{1e-11, 4000};
  auto a = rn_pd_theta(p, kTwoOne, 1.0, kTwoPoint, loose);
  auto b = rn_pd_theta(p, kTwoOne, 1.0, kTwoPoint, tight);
  CHECK(std::fabs(a.value.log_mag - b.value.log_mag) <=
        (a.log_hi - a.log_lo) + 1e-12);

  // enlarging the truncation keeps the value inside the reported bracket
  RngStream rng2(202, 0);
  auto sticks = sample_gem_sticks(1.0, 40, rng2);
  std::vector<double> w10(sticks.sticks.begin(), sticks.sticks.begin() + 10);
  double tail10 = 1.0;
  for (double v : w10) tail10 -= v;
  MassPartition p10(w10, MassPartition::Closure::simplex, tail10);
  std::vector<double> w30(sticks.sticks.begin(), sticks.sticks.begin() + 30);
  double tail30 = 1.0;
  for (double v : w30) tail30 -= v;
  MassPartition p30(w30, MassPartition::Closure::simplex, tail30);

  auto r10 = rn_pd_theta(p10, kTwoOne, 1.0, kTwoPoint);
  auto r30 = rn_pd_theta(p30, kTwoOne, 1.0, kTwoPoint);
  CHECK(r30.value.log_mag >= r10.log_lo - 1e-10);
  CHECK(r30.value.log_mag <= r10.log_hi + 1e-10);
}

TEST_CASE("rn_jumps_Tf") {
  auto one = TestFunction::constant(1.0);
  JumpSequence x({1.0}, 0.0);
  CHECK(rn_jumps_Tf(x, one, 1.0, 1.0, kTwoPoint).value.log_mag == 0.0);

  auto r = rn_jumps_Tf(x, kTwoOne, 1.0, 1.0, kTwoPoint);
  double expect = std::exp(-0.5 * std::log(2.0)) *
                  (0.5 * std::exp(0.5) + 0.5 * 1.0);
  CHECK(r.value.value() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rn_pd_two_param: fixed point, cancellation, alpha->0 limit") {
  MassPartition p({0.6, 0.4}, MassPartition::Closure::simplex, 0.0);
  auto r0 = rn_pd_two_param(p, kTwoOne, 0.5, 0.0, kTwoPoint);
  CHECK(r0.value.log_mag == 0.0);  // theta = 0 exactly one

  CHECK(rn_pd_two_param(p, TestFunction::constant(1.0), 0.5, 1.0, kTwoPoint)
            .value.log_mag == 0.0);

  // scale invariance in f
  auto f3 = TestFunction::from_values({6.0, 3.0});
  CHECK(rn_pd_two_param(p, f3, 0.5, 1.0, kTwoPoint).value.log_mag ==
        doctest::Approx(
            rn_pd_two_param(p, kTwoOne, 0.5, 1.0, kTwoPoint).value.log_mag)
            .epsilon(1e-9));

  // alpha -> 0 recovers the one-parameter density
  auto small = rn_pd_two_param(p, kTwoOne, 1e-3, 1.0, kTwoPoint);
  auto ref = rn_pd_theta(p, kTwoOne, 1.0, kTwoPoint);
  CHECK(std::fabs(small.value.log_mag - ref.value.log_mag) < 1e-3);
}

TEST_CASE("hamiltonians, entropy, phi") {
  CHECK(phi(1.0) == 0.0);
  CHECK(phi(0.0) == 1.0);
  CHECK(phi(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0));
  CHECK_THROWS_AS(phi(-0.1), std::domain_error);

  auto space = BaseSpace::finite_discrete({0.3, 0.7});
  auto nu = AtomicMeasure::from_coordinates({0.3, 0.7});
  CHECK(entropy(nu, nu, space) == doctest::Approx(0.0));
  auto other = AtomicMeasure::from_coordinates({0.0, 1.0});
  CHECK(std::isinf(entropy(nu, other, space)));

  // beta*theta = 1 and mu(S) = 1: H_g(mu) equals H_d(mu-hat) exactly
  double theta = 2.0, beta = 0.5;
  auto mu = AtomicMeasure::from_coordinates({0.45, 0.55});
  double hg = hamiltonian_gamma(mu, theta, beta, space);
  double hd = hamiltonian_dirichlet(normalize(mu), theta, space);
  CHECK(std::fabs(hg - hd) < 1e-12);

  // radial decomposition: H_g(c mu) - H_g(mu) depends only on c and mu(S)
  auto mu2 = AtomicMeasure::from_coordinates({0.2, 0.8});  // same mass 1
  double c = 2.5;
  auto cmu = AtomicMeasure::from_coordinates({c * 0.45, c * 0.55});
  auto cmu2 = AtomicMeasure::from_coordinates({c * 0.2, c * 0.8});
  double d1 = hamiltonian_gamma(cmu, theta, beta, space) -
              hamiltonian_gamma(mu, theta, beta, space);
  double d2 = hamiltonian_gamma(cmu2, theta, beta, space) -
              hamiltonian_gamma(mu2, theta, beta, space);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("lambda functional and tilt constant") {
  auto space = BaseSpace::finite_discrete({0.5, 0.5});
  auto a = TestFunction::from_values({0.5, 1.5});
  auto b = TestFunction::from_values({1.0, 2.0});
  AtomicMeasure mu0 = AtomicMeasure::from_coordinates({0.4, 0.6});
  AtomicMeasure mu = AtomicMeasure::from_coordinates({1.2, 0.3});

  CHECK(lambda_functional(mu, TestFunction::constant(0.0), a, b, mu0) == 0.0);

  auto f = TestFunction::from_values({0.3, -0.2});
  double direct = (0.4 * 0.3 / 0.5 + 0.6 * (-0.2) / 1.5) -
                  (1.2 * std::expm1(0.3) * 1.0 / 0.5 +
                   0.3 * std::expm1(-0.2) * 2.0 / 1.5);
  CHECK(lambda_functional(mu, f, a, b, mu0) ==
        doctest::Approx(direct).epsilon(1e-12));

  CHECK(tilt_constant(0.7, 0.7, 1.0) == doctest::Approx(std::tgamma(1.7)));
  CHECK(tilt_constant(0.5, 0.0, 2.0) == doctest::Approx(1.0));
}
