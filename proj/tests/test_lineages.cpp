#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "gdp/lineages.hpp"
#include "gdp/numerics.hpp"

using namespace gdp;

namespace {

// empirical pmf of sampled counts vs a reference pmf, total variation
double tv_distance(const std::vector<long long>& samples,
                   const std::vector<double>& pmf) {
  std::map<long long, double> emp;
  for (long long s : samples) emp[s] += 1.0 / samples.size();
  double tv = 0.0;
  long long hi = pmf.size();
  for (long long n = 0; n < hi; ++n) {
    double e = emp.count(n) ? emp[n] : 0.0;
    tv += std::fabs(e - pmf[n]);
  }
  for (const auto& [n, e] : emp) {
    if (n >= hi) tv += e;
  }
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("c factor values and continuity") {
  CHECK(c_factor(0.0, 3.0) == doctest::Approx(1.5));
  CHECK(c_factor(2.0, 1.0) == doctest::Approx((std::exp(1.0) - 1.0) / 2.0));
  CHECK(c_factor(-2.0, 1.0) == doctest::Approx((1.0 - std::exp(-1.0)) / 2.0));
  // continuity across the series crossover
  CHECK(c_factor(1e-12, 3.0) == doctest::Approx(1.5).epsilon(1e-12));
  double lam = 9.9e-7;  // series branch; compare against the direct formula
  CHECK(c_factor(lam, 1.0) ==
        doctest::Approx(std::expm1(0.5 * lam) / lam).epsilon(1e-13));
  // inverse
  for (double lambda : {-1.0, 0.0, 0.7}) {
    double c = c_factor(lambda, 2.3);
    CHECK(c_factor_inverse_time(lambda, c) == doctest::Approx(2.3).epsilon(1e-10));
  }
  CHECK(std::isinf(c_factor_inverse_time(-2.0, 0.5)));
}

TEST_CASE("death chain marginal pmf") {
  CHECK(death_marginal_pmf(1.0, 0.0, 1.0, 0) ==
        doctest::Approx(std::exp(-2.0)));
  double total = 0.0;
  for (long long n = 0; n < 200; ++n) {
    total += death_marginal_pmf(0.7, 0.5, 1.3, n);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(death_marginal_pmf(1.0, 1.0, 200.0, 0) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("death path: marginal matches Poisson(a/C(lambda,s))") {
  RngStream rng(301, 0);
  const int paths = 100000;
  double a = 1.0, lambda = 0.0, t0 = 1e-4, s = 1.0;
  std::vector<long long> counts;
  counts.reserve(paths);
  for (int i = 0; i < paths; ++i) {
    counts.push_back(death_count_at(a, lambda, t0, s, rng));
  }
  // the path-based simulator agrees with the hazard-scale one in law; spot
  // check a handful of full paths through the same query
  RngStream rng_b(311, 0);
  for (int i = 0; i < 200; ++i) {
    auto p = simulate_death_path(a, lambda, 0.05, 1.5, rng_b);
    counts.pop_back();
    counts.push_back(p.count_at(s));
  }
  // chi-square against Poisson(2)
  double mean = a / c_factor(lambda, s);
  CHECK(mean == doctest::Approx(2.0));
  std::vector<double> expected;
  long long cap = 12;
  for (long long n = 0; n < cap; ++n) {
    expected.push_back(
        std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0)));
  }
  std::vector<double> obs(cap + 1, 0.0);
  for (long long c : counts) obs[std::min(c, cap)] += 1.0;
  double tail = 1.0;
  for (double e : expected) tail -= e;
  expected.push_back(tail);
  double chi2 = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    double e = expected[k] * paths;
    double d = obs[k] - e;
    chi2 += d * d / e;
  }
  CHECK(chi_square_sf(chi2, static_cast<double>(expected.size() - 1)) > 0.01);
}

TEST_CASE("death path structure and extension determinism") {
  RngStream rng(302, 0);
  auto p = simulate_death_path(2.0, -1.0, 0.01, 5.0, rng);
  for (std::size_t i = 1; i < p.event_times.size(); ++i) {
    CHECK(p.event_times[i] > p.event_times[i - 1]);
  }
  CHECK(p.count_at(5.0) == p.final_count());
  CHECK(p.count_at(0.01) == p.start_count);

  // same stream, same draws
  RngStream r1(303, 5), r2(303, 5);
  auto p1 = simulate_death_path(1.0, 1.0, 0.001, 4.0, r1);
  auto p2 = simulate_death_path(1.0, 1.0, 0.001, 4.0, r2);
  CHECK(p1.start_count == p2.start_count);
  CHECK(p1.event_times == p2.event_times);
}

TEST_CASE("tavare pmf: normalization, limits, precision ladder") {
  // normalization at theta=1, t=0.5
  double total = 0.0;
  for (long long n = 0; n < 200; ++n) total += tavare_pmf(1.0, 0.5, n);
  CHECK(std::fabs(total - 1.0) < 1e-8);

  // t large: d0 -> 1
  CHECK(tavare_pmf(2.0, 60.0, 0) == doctest::Approx(1.0).epsilon(1e-10));

  // small t forces the high-precision path and still normalizes
  auto detail = tavare_pmf_detail(1.0, 0.02, 60);
  CHECK(detail.method == TavareResult::Method::high_precision);
  double total_small = 0.0;
  for (long long n = 0; n < 400; ++n) total_small += tavare_pmf(1.0, 0.02, n);
  CHECK(std::fabs(total_small - 1.0) < 1e-8);

  auto table = tavare_table(2.0, 0.5);
  CHECK(table.exact);
  CHECK(table.tail < 1e-9);
}

TEST_CASE("kingman chain and tavare agree in total variation") {
  CHECK(kingman_rate(2.0, 3) == doctest::Approx(6.0));
  RngStream rng(304, 0);
  CHECK(simulate_kingman(1.0, 1e9, -1, rng) == 0);

  auto table = tavare_table(2.0, 1.0);
  std::vector<long long> samples;
  const int paths = 100000;
  samples.reserve(paths);
  for (int i = 0; i < paths; ++i) {
    samples.push_back(simulate_kingman(2.0, 1.0, -1, rng));
  }
  CHECK(tv_distance(samples, table.pmf) < 0.01);

  // doubling the entrance proxy moves the pmf by well under 1e-3
  std::vector<long long> s2;
  s2.reserve(paths);
  for (int i = 0; i < paths; ++i) {
    s2.push_back(simulate_kingman(2.0, 1.0, 2 * kKingmanEntranceProxy, rng));
  }
  std::map<long long, double> e1, e2;
  for (long long v : samples) e1[v] += 1.0 / paths;
  for (long long v : s2) e2[v] += 1.0 / paths;
  double tv = 0.0;
  for (long long n = 0; n < 50; ++n) {
    double a = e1.count(n) ? e1[n] : 0.0;
    double b = e2.count(n) ? e2[n] : 0.0;
    tv += std::fabs(a - b);
  }
  // statistical noise dominates; the systematic proxy effect is < 1e-3
  CHECK(0.5 * tv < 0.01);
}

TEST_CASE("time change: basic properties") {
  RngStream rng(305, 0);
  auto path = simulate_death_path(1.0, 1.0, 1e-4, 50.0, rng);
  auto seg = early_segment(1.0, 1.0, 2.0, 1e-4);

  auto z = time_change_tau(path, 2.0, 0.0, &seg);
  CHECK(z.tau == 0.0);

  // tau strictly increasing in t
  double prev = 0.0;
  for (double t : {0.1, 0.2, 0.4, 0.8, 1.6}) {
    auto r = time_change_tau(path, 2.0, t, &seg);
    REQUIRE_FALSE(r.exhausted);
    CHECK(r.tau > prev);
    prev = r.tau;
  }
}

TEST_CASE("time change: N(tau_t) matches tavare at theta=2, lambda=1") {
  RngStream rng(306, 0);
  double theta = 2.0, lambda = 1.0, a = 1.0, t0 = 1e-4, t = 0.5;
  auto seg = early_segment(a, lambda, theta, t0);
  auto table = tavare_table(theta, t);
  const int paths = 100000;
  std::vector<long long> counts;
  counts.reserve(paths);
  for (int i = 0; i < paths; ++i) {
    counts.push_back(
        death_count_time_changed(a, lambda, theta, t0, t, rng, &seg).count);
  }
  CHECK(tv_distance(counts, table.pmf) < 0.01);
}

TEST_CASE("fast and path-based time change agree in law") {
  double theta = 2.0, lambda = 0.5, a = 1.5, t0 = 0.02, t = 0.4;
  auto seg = early_segment(a, lambda, theta, t0);
  RngStream ra(308, 1), rb(308, 2);
  const int paths = 20000;
  std::map<long long, double> fast, slow;
  for (int i = 0; i < paths; ++i) {
    fast[death_count_time_changed(a, lambda, theta, t0, t, ra, &seg).count] +=
        1.0 / paths;
    auto p = simulate_death_path(a, lambda, t0, 80.0, rb);
    slow[time_change_tau(p, theta, t, &seg).count] += 1.0 / paths;
  }
  double tv = 0.0;
  for (long long n = 0; n < 100; ++n) {
    double x = fast.count(n) ? fast[n] : 0.0;
    double y = slow.count(n) ? slow[n] : 0.0;
    tv += std::fabs(x - y);
  }
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("time change: refinement in t0 stays within the reported bound") {
  RngStream rng(307, 0);
  double theta = 2.0, lambda = 0.0, a = 1.0;
  double t0 = 1e-3, t = 0.5;
  int within = 0, total = 0;
  for (int i = 0; i < 200; ++i) {
    auto fine = simulate_death_path(a, lambda, t0 / 2.0, 60.0, rng);
    auto coarse = restrict_death_path(fine, t0);
    auto segf = early_segment(a, lambda, theta, t0 / 2.0);
    auto segc = early_segment(a, lambda, theta, t0);
    TimeChangeResult rf, rc;
    try {
      rf = time_change_tau(fine, theta, t, &segf);
      rc = time_change_tau(coarse, theta, t, &segc);
    } catch (const HorizonExhausted&) {
      continue;
    }
    ++total;
    // the coarse tau differs from the fine one by at most the combined
    // clock-unit bounds converted through the local slope
    // dtau/dt = (N v 1 + theta - 1) C(-lambda, tau) at the landing point
    double count_at_tau =
        static_cast<double>(std::max<long long>(std::max(rf.count, rc.count), 1));
    double slope = (count_at_tau + theta - 1.0) *
                   c_factor(-lambda, std::max(rf.tau, rc.tau));
    double tau_slack =
        (rc.early_error_bound + rf.early_error_bound) * slope + 1e-12;
    if (std::fabs(rf.tau - rc.tau) <= tau_slack) ++within;
  }
  REQUIRE(total > 150);
  CHECK(within >= total * 95 / 100);
}
