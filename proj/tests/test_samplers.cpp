#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gdp/densities.hpp"
#include "gdp/numerics.hpp"
#include "gdp/samplers.hpp"

using namespace gdp;

namespace {

struct MeanSe {
  double mean;
  double se;
};

template <typename F>
MeanSe monte_carlo(int n, F&& draw) {
  KahanSum s1, s2;
  for (int i = 0; i < n; ++i) {
    double x = draw(i);
    s1.add(x);
    s2.add(x * x);
  }
  double mean = s1.value() / n;
  double var = std::max(s2.value() / n - mean * mean, 0.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("gem sticks telescope to one exactly") {
  RngStream rng(101, 0);
  for (int trial = 0; trial < 200; ++trial) {
    double theta = 0.25 + 5.0 * rng.uniform();
    auto s = sample_gem_sticks(theta, 30, rng);
    double remaining = 1.0;
    for (double v : s.sticks) remaining -= v;
    CHECK(remaining == s.residual);  // bit-exact telescoping
  }
}

TEST_CASE("gem stick means: V1 and V2 at theta=1") {
  RngStream rng(102, 0);
  const int n = 100000;
  KahanSum v1, v2;
  for (int i = 0; i < n; ++i) {
    auto s = sample_gem_sticks(1.0, 2, rng);
    v1.add(s.sticks[0]);
    v2.add(s.sticks[1]);
  }
  // E V1 = 1/2 for Beta(1,1)
  CHECK(std::fabs(v1.value() / n - 0.5) < 3.0 * 0.29 / std::sqrt(n));
  // E V2 = E[U2] E[1-U1] for independent Beta(1,1) sticks; 1-D quadrature
  // oracle for each factor
  auto mean_u = integrate([](double u) { return u; }, 0.0, 1.0);
  auto mean_1mu = integrate([](double u) { return 1.0 - u; }, 0.0, 1.0);
  REQUIRE(mean_u.converged);
  double oracle = mean_u.value * mean_1mu.value;
  CHECK(oracle == doctest::Approx(0.25));
  CHECK(std::fabs(v2.value() / n - oracle) < 3.0 * 0.25 / std::sqrt(n));
}

TEST_CASE("two-parameter gem") {
  RngStream rng(103, 0);
  auto s = sample_gem_two_param(0.5, 0.5, 16, rng);
  CHECK(s.weight_sum() + s.truncation_tail() == doctest::Approx(1.0));

  // E V1 = (1-alpha)/(1+theta) = 1/3 at alpha=theta=0.5
  auto m = monte_carlo(100000, [&](int) {
    return sample_gem_two_param_sticks(0.5, 0.5, 1, rng).sticks[0];
  });
  CHECK(std::fabs(m.mean - 1.0 / 3) < 3 * m.se);

  CHECK_THROWS_AS(sample_gem_two_param(1.5, 1.0, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_gem_two_param(0.5, -0.6, 4, rng),
                  std::invalid_argument);

  // alpha -> 0 limit: V1 law matches the one-parameter GEM (two-sample KS)
  std::vector<double> a, b;
  for (int i = 0; i < 20000; ++i) {
    a.push_back(sample_gem_two_param_sticks(1e-3, 1.0, 1, rng).sticks[0]);
    b.push_back(sample_gem_sticks(1.0, 1, rng).sticks[0]);
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("poisson-dirichlet sampler") {
  RngStream rng(104, 0);
  auto trunc = TruncationPolicy::tail_mass(1e-6);
  auto p = sample_pd(1.0, std::nullopt, trunc, rng);
  CHECK(p.truncation_tail() <= 1e-6);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1]);

  // E[P1] under PD(1): oracle = mean of the largest stick over long GEM runs
  auto tight = TruncationPolicy::tail_mass(1e-8);
  auto m = monte_carlo(100000, [&](int) {
    return sample_pd(1.0, std::nullopt, tight, rng)[0];
  });
  CHECK(std::fabs(m.mean - 0.6243) < 3 * m.se + 5e-4);
}

TEST_CASE("gamma measure: total mass, Laplace functional, determinism") {
  auto space = BaseSpace::unit_interval();
  auto trunc = TruncationPolicy::tail_mass(1e-8);

  RngStream rng(105, 0);
  auto mass = monte_carlo(100000, [&](int) {
    return sample_gamma_measure(2.0, space, 3.0, trunc, rng).total_mass();
  });
  CHECK(std::fabs(mass.mean - 6.0) < 3 * mass.se);

  RngStream rng2(106, 0);
  auto g = TestFunction::constant(1.0);
  auto lap = monte_carlo(100000, [&](int) {
    auto mu = sample_gamma_measure(1.0, space, 1.0, trunc, rng2);
    return std::exp(-mu.integrate(g));
  });
  CHECK(laplace_gamma(1.0, 1.0, space, g) == doctest::Approx(0.5));
  CHECK(std::fabs(lap.mean - 0.5) < 3 * lap.se);

  // identical stream id -> identical draw
  RngStream s1(7, 77), s2(7, 77);
  auto m1 = sample_gamma_measure(1.5, space, 2.0, trunc, s1);
  auto m2 = sample_gamma_measure(1.5, space, 2.0, trunc, s2);
  REQUIRE(m1.size() == m2.size());
  CHECK(m1.total_mass() == m2.total_mass());
  CHECK(m1.atoms()[0].location == m2.atoms()[0].location);
}

TEST_CASE("inverse-Levy gamma jumps") {
  RngStream rng(107, 0);
  auto j = sample_gamma_jumps_inverse_levy(2.0, 12, rng);
  for (std::size_t i = 1; i < j.size(); ++i) CHECK(j[i] < j[i - 1]);

  // count of jumps exceeding 1 is Poisson with mean theta*E1(1)
  double e1 = exp_integral_e1(1.0);
  CHECK(e1 == doctest::Approx(0.219384).epsilon(1e-5));
  auto m = monte_carlo(20000, [&](int) {
    auto jj = sample_gamma_jumps_inverse_levy(2.0, 10, rng);
    int c = 0;
    for (double x : jj.jumps()) c += (x > 1.0);
    return static_cast<double>(c);
  });
  CHECK(std::fabs(m.mean - 2.0 * e1) < 3 * m.se);

  // decomposition route and inverse-Levy route give the same largest jump
  RngStream ra(108, 1), rb(108, 2);
  std::vector<double> a, b;
  auto space = BaseSpace::unit_interval();
  auto trunc = TruncationPolicy::tail_mass(1e-8);
  for (int i = 0; i < 10000; ++i) {
    a.push_back(sample_gamma_jumps_inverse_levy(1.0, 1, ra)[0]);
    auto mu = sample_gamma_measure(1.0, space, 1.0, trunc, rb);
    b.push_back(to_ordered_masses(mu)[0]);
  }
  CHECK(ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("stable jumps") {
  RngStream rng(109, 0);
  // tail inversion at unit level: Gamma_1 = c/Gamma(1-alpha) => rho_1 = 1
  double alpha = 0.5, c = 2.0;
  double g1ma = std::tgamma(1.0 - alpha);
  // direct check of the inversion formula rather than a random draw
  double rho = std::pow(g1ma * (c / g1ma) / c, -1.0 / alpha);
  CHECK(rho == doctest::Approx(1.0));

  auto j = sample_stable_jumps(alpha, c, 20, rng);
  for (std::size_t i = 1; i < j.size(); ++i) CHECK(j[i] < j[i - 1]);

  // mean count of jumps > x is c x^-alpha / Gamma(1-alpha)
  double x0 = 1.5;
  auto m = monte_carlo(20000, [&](int) {
    auto jj = sample_stable_jumps(alpha, c, 40, rng);
    int cnt = 0;
    for (double x : jj.jumps()) cnt += (x > x0);
    return static_cast<double>(cnt);
  });
  double expect = c * std::pow(x0, -alpha) / g1ma;
  CHECK(std::fabs(m.mean - expect) < 3 * m.se);

  // Laplace functional at g == 1 is exp(-c)
  auto space = BaseSpace::unit_interval();
  auto lap = monte_carlo(20000, [&](int) {
    auto jj = sample_stable_jumps(alpha, c, 60, rng);
    return std::exp(-jj.sum());
  });
  CHECK(laplace_stable(alpha, c, space, TestFunction::constant(1.0)) ==
        doctest::Approx(std::exp(-c)));
  // truncation at 60 jumps biases the sum low; allow the tail-mean slack
  CHECK(std::fabs(lap.mean - std::exp(-c)) < 3 * lap.se + 0.01);
}

TEST_CASE("dirichlet process and dirichlet vector") {
  auto space = BaseSpace::unit_interval();
  auto trunc = TruncationPolicy::tail_mass(1e-6);
  RngStream rng(110, 0);

  auto dp = sample_dirichlet_process(1.0, space, trunc, rng);
  CHECK(dp.total_mass() == doctest::Approx(1.0).epsilon(1e-5));

  auto m = monte_carlo(50000, [&](int) {
    auto v = sample_dirichlet_vector({2.0, 3.0}, rng);
    return v[0];
  });
  CHECK(std::fabs(m.mean - 0.4) < 3 * m.se);

  // <X, f> has mean <nu0, f> (stationary first moment)
  auto f = TestFunction([](Location x) { return x; }, 0.0, 1.0);
  auto mm = monte_carlo(50000, [&](int) {
    return sample_dirichlet_process(2.0, space, trunc, rng).integrate(f);
  });
  CHECK(std::fabs(mm.mean - 0.5) < 3 * mm.se + 1e-5);
}

TEST_CASE("finite gamma stationary law matches its Laplace functional") {
  auto space = BaseSpace::finite_discrete({0.5, 0.3, 0.2});
  auto a = TestFunction::from_values({0.5, 1.0, 2.0});
  auto b = TestFunction::from_values({1.0, 0.5, 1.5});
  AtomicMeasure mu0 =
      AtomicMeasure::from_coordinates({0.6, 0.3, 0.9});
  RngStream rng(111, 0);

  auto h = TestFunction::from_values({0.7, 0.2, 1.1});
  auto m = monte_carlo(100000, [&](int) {
    auto mu = sample_finite_gamma_stationary(a, b, mu0, space, rng);
    return std::exp(-mu.integrate(h));
  });
  // closed form: exp(-<mu0, a^-1 log(1 + (a/b) h)>)
  double expect = 1.0;
  {
    KahanSum acc;
    auto coords = mu0.coordinates(space);
    for (int s = 0; s < 3; ++s) {
      auto loc = static_cast<Location>(s);
      acc.add(coords[s] / a(loc) * std::log1p(a(loc) / b(loc) * h(loc)));
    }
    expect = std::exp(-acc.value());
  }
  CHECK(std::fabs(m.mean - expect) < 3 * m.se);

  // h == 0 -> Laplace functional 1 exactly
  auto one = monte_carlo(100, [&](int) {
    auto mu = sample_finite_gamma_stationary(a, b, mu0, space, rng);
    return std::exp(-mu.integrate(TestFunction::constant(0.0)));
  });
  CHECK(one.mean == doctest::Approx(1.0));

  CHECK_THROWS_AS(sample_finite_gamma_stationary(
                      a, b, mu0, BaseSpace::unit_interval(), rng),
                  std::invalid_argument);
}

TEST_CASE("determinism across all samplers") {
  auto space = BaseSpace::unit_interval();
  auto trunc = TruncationPolicy::tail_mass(1e-6);
  auto draw_all = [&](RngStream rng) {
    std::vector<double> sig;
    auto p = sample_pd(1.5, std::nullopt, trunc, rng);
    sig.push_back(p[0]);
    auto p2 = sample_pd(1.0, 0.4, TruncationPolicy::fixed_count(12), rng);
    sig.push_back(p2[0]);
    sig.push_back(sample_gamma_measure(2.0, space, 1.0, trunc, rng)
                      .total_mass());
    sig.push_back(sample_gamma_jumps_inverse_levy(1.0, 3, rng)[0]);
    sig.push_back(sample_stable_jumps(0.5, 1.0, 3, rng)[2]);
    sig.push_back(sample_dirichlet_vector({1.0, 2.0, 3.0}, rng)[1]);
    sig.push_back(
        sample_dirichlet_process(1.0, space, trunc, rng).atoms()[0].location);
    return sig;
  };
  auto a = draw_all(RngStream(99, 5));
  auto b = draw_all(RngStream(99, 5));
  CHECK(a == b);
  auto c = draw_all(RngStream(99, 6));
  CHECK(a != c);
}

TEST_CASE("gamma-dirichlet independence of radial and angular parts") {
  auto space = BaseSpace::unit_interval();
  auto trunc = TruncationPolicy::tail_mass(1e-8);
  RngStream rng(112, 0);
  auto f = TestFunction([](Location x) { return std::sin(6.28 * x); }, -1.0,
                        1.0);
  const int n = 100000;
  KahanSum sa, sb, sab, sa2, sb2;
  std::vector<double> xs, ys;
  xs.reserve(n);
  ys.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto mu = sample_gamma_measure(1.0, space, 1.0, trunc, rng);
    double radial = mu.total_mass();
    double angular = normalize(mu).integrate(f);
    xs.push_back(radial);
    ys.push_back(angular);
  }
  auto corr = [&](auto&& fx, auto&& fy) {
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
      mx += fx(xs[i]);
      my += fy(ys[i]);
    }
    mx /= n;
    my /= n;
    double cxy = 0, cxx = 0, cyy = 0;
    for (int i = 0; i < n; ++i) {
      double dx = fx(xs[i]) - mx, dy = fy(ys[i]) - my;
      cxy += dx * dy;
      cxx += dx * dx;
      cyy += dy * dy;
    }
    return cxy / std::sqrt(cxx * cyy);
  };
  auto id = [](double v) { return v; };
  auto sq = [](double v) { return v * v; };
  CHECK(std::fabs(corr(id, id)) < 3.0 / std::sqrt(n));
  CHECK(std::fabs(corr(sq, sq)) < 3.0 / std::sqrt(n));
}
