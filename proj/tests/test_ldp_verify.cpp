#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "gdp/ldp.hpp"
#include "gdp/lineages.hpp"
#include "gdp/samplers.hpp"
#include "gdp/suites.hpp"
#include "gdp/verify.hpp"

using namespace gdp;

TEST_CASE("rate function values") {
  CHECK(rate(RateFunction::I, RatePoint::seq({0.3, 0.2, 0.1})) ==
        doctest::Approx(0.6));
  CHECK(rate(RateFunction::I1, RatePoint::y(2.0)) ==
        doctest::Approx(1.0 - std::log(2.0)));
  CHECK(rate(RateFunction::I1, RatePoint::y(1.0)) == 0.0);
  CHECK(std::isinf(rate(RateFunction::I1, RatePoint::y(0.0))));
  CHECK(rate(RateFunction::I2, RatePoint::part({0.3, 0.2})) ==
        doctest::Approx(-std::log(0.5)));
  CHECK(std::isinf(rate(RateFunction::I2, RatePoint::part({0.6, 0.4}))));
  CHECK(rate(RateFunction::I3, RatePoint::part({0.6, 0.4})) ==
        doctest::Approx(1.0));
  CHECK(rate(RateFunction::I3, RatePoint::part({1.0})) == 0.0);
  CHECK(std::isinf(rate(RateFunction::I3, RatePoint::part({0.5, 0.3}))));
  CHECK(rate(RateFunction::I4, RatePoint::y(0.0)) == 0.0);
  CHECK(rate(RateFunction::I4, RatePoint::y(0.7)) == 1.0);
  CHECK(rate(RateFunction::I5, RatePoint::seq({0.4, 0.1, 0.0, 0.0})) ==
        doctest::Approx(2.0));
  // nonnegativity of I1 with equality only at 1
  for (double y : {0.25, 0.5, 2.0, 7.0}) {
    CHECK(rate(RateFunction::I1, RatePoint::y(y)) > 0.0);
  }
  CHECK_THROWS_AS(rate(RateFunction::I, RatePoint::y(1.0)),
                  std::invalid_argument);
}

TEST_CASE("contraction identity") {
  auto r = contraction_check({0.3, 0.2, 0.1});
  CHECK(r.infimum == doctest::Approx(0.6).epsilon(1e-8));
  CHECK(r.argmin_y == doctest::Approx(1.6).epsilon(1e-6));

  auto empty = contraction_check({});
  CHECK(empty.infimum == 0.0);
  CHECK(empty.argmin_y == 1.0);

  CHECK(contraction_check_small_theta({0.4, 0.1}) == doctest::Approx(2.0));
  CHECK(contraction_check_small_theta({}) == 0.0);

  RngStream rng(501, 0);
  for (int i = 0; i < 100; ++i) {
    int k = 1 + static_cast<int>(rng.uniform_below(6));
    std::vector<double> x(k);
    for (double& v : x) v = 2.0 * rng.uniform();
    std::sort(x.begin(), x.end(), std::greater<double>());
    double s = rate(RateFunction::I, RatePoint::seq(x));
    CHECK(contraction_check(x).infimum == doctest::Approx(s).epsilon(1e-6));
  }
}

TEST_CASE("decision policy and bonferroni threshold") {
  CHECK(bonferroni_z(1) == doctest::Approx(3.0));
  CHECK(bonferroni_z(10) > 3.0);
  CHECK(bonferroni_z(10) < 5.0);
  // the corrected threshold keeps the familywise tail level
  double z10 = bonferroni_z(10);
  CHECK(std::erfc(z10 / std::sqrt(2.0)) * 10 ==
        doctest::Approx(std::erfc(3.0 / std::sqrt(2.0))).epsilon(1e-8));

  DecisionPolicy p;
  CHECK(decide(1.0, 0.001, 0.001, 0.5, 0.5, p) == "pass");
  CHECK(decide(4.0, 0.001, 0.001, 0.5, 0.5, p) == "fail");
  CHECK(decide(0.5, 0.3, 0.001, 0.5, 0.5, p) == "inconclusive");
}

TEST_CASE("change-of-measure smoke test is exact sample-by-sample") {
  auto space = BaseSpace::finite_discrete({0.5, 0.5});
  std::function<AtomicMeasure(RngStream&)> sampler = [&](RngStream& rs) {
    return sample_gamma_measure(1.0, space, 1.0,
                                TruncationPolicy::tail_mass(1e-8), rs);
  };
  std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> identity =
      [](const AtomicMeasure& m, RngStream&) { return m; };
  std::function<double(const AtomicMeasure&)> one =
      [](const AtomicMeasure&) { return 1.0; };
  std::vector<NamedFunctional<AtomicMeasure>> fns = {
      {"mass", [](const AtomicMeasure& m) { return m.total_mass(); }}};
  auto reports = check_change_of_measure<AtomicMeasure>(
      "identity smoke", sampler, identity, one, fns, 2000, RngStream(9, 9));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].z == 0.0);
  CHECK(reports[0].left == reports[0].right);
  CHECK(reports[0].decision == "pass");
}

TEST_CASE("pmf fit: same law passes, wrong law fails") {
  RngStream rng(502, 0);
  double a = 1.0, lambda = 0.0, t = 1.0;
  std::vector<long long> samples;
  double mean = a / c_factor(lambda, t);
  for (int i = 0; i < 50000; ++i) samples.push_back(rng.poisson(mean));
  auto good = check_pmf_fit(
      "poisson vs death marginal", samples,
      [&](long long n) { return death_marginal_pmf(a, lambda, t, n); }, 15,
      RngStream(1, 1));
  CHECK(good.decision == "pass");

  auto bad = check_pmf_fit(
      "poisson vs wrong-mean marginal", samples,
      [&](long long n) { return death_marginal_pmf(2.0 * a, lambda, t, n); },
      15, RngStream(1, 1));
  CHECK(bad.decision == "fail");

  std::vector<long long> tiny(samples.begin(), samples.begin() + 3);
  auto inconclusive = check_pmf_fit(
      "insufficient samples", tiny,
      [&](long long n) { return death_marginal_pmf(a, lambda, t, n); }, 15,
      RngStream(1, 1));
  CHECK(inconclusive.decision == "inconclusive");
}

TEST_CASE("replicated runs are deterministic and thread-count independent") {
  auto run_once = [](const char* threads) {
#ifdef _WIN32
    (void)threads;
#else
    setenv("GDP_LAB_THREADS", threads, 1);
#endif
    SuiteContext ctx;
    ctx.replicates = 5000;
    ctx.seed = 777;
    return reports_to_json(run_suite("gamma-dirichlet-independence", ctx));
  };
  auto a = run_once("1");
  auto b = run_once("3");
  auto c = run_once("1");
  CHECK(a == b);
  CHECK(a == c);
#ifndef _WIN32
  unsetenv("GDP_LAB_THREADS");
#endif
}

TEST_CASE("suite registry covers every theorem-level check") {
  std::vector<std::string> required = {
      "laplace-gamma",       "gamma-dirichlet-independence",
      "algebraic-identities", "quasi-invariance",
      "theta0-fixed-point",  "hamiltonian",
      "tavare",              "theorem-5.2",
      "reversibility-5.1",   "theorem-5.3",
      "generator-identities", "sde-adjudication",
      "ldp",                 "negative-controls"};
  for (const auto& name : required) {
    CHECK(has_suite(name));
  }
  // plus the optional decay demonstration
  CHECK(has_suite("ldp-decay-demo"));
  CHECK(suite_registry().size() == required.size() + 1);
  CHECK_THROWS_AS(run_suite("no-such-suite", SuiteContext{}),
                  std::invalid_argument);
}

TEST_CASE("report serialization is stable") {
  VerificationReport r;
  r.id = "demo";
  r.left = 0.5;
  r.right = 0.25;
  r.se_left = 0.01;
  r.se_right = 0.02;
  r.z = 1.5;
  r.decision = "pass";
  r.seed = 42;
  auto j1 = reports_to_json({r});
  auto j2 = reports_to_json({r});
  CHECK(j1 == j2);
  CHECK(j1.find("\"decision\": \"pass\"") != std::string::npos);
  auto csv = reports_to_csv({r});
  CHECK(csv.find("demo") != std::string::npos);
  CHECK(csv.rfind("id,left,right", 0) == 0);
}
