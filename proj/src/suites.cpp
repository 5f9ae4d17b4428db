#include "gdp/suites.hpp"

#include <algorithm>
#include <cmath>

#include "gdp/densities.hpp"
#include "gdp/dynamics.hpp"
#include "gdp/ldp.hpp"
#include "gdp/lineages.hpp"
#include "gdp/measures.hpp"
#include "gdp/samplers.hpp"

namespace gdp {

namespace {

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

using Functional = NamedFunctional<AtomicMeasure>;

const TruncationPolicy kTrunc = TruncationPolicy::tail_mass(1e-8);

BaseSpace two_point() { return BaseSpace::finite_discrete({0.5, 0.5}); }
BaseSpace three_point() { return BaseSpace::finite_discrete({0.5, 0.3, 0.2}); }

TestFunction random_finite_f(RngStream& rng, int dim, double spread = 0.8) {
  std::vector<double> vals(dim);
  for (double& v : vals) v = std::exp(spread * (2.0 * rng.uniform() - 1.0));
  return TestFunction::from_values(vals);
}

// smooth strictly positive function on the unit interval with valid bounds
TestFunction random_unit_f(RngStream& rng, double spread = 0.8) {
  double a0 = spread * (2.0 * rng.uniform() - 1.0);
  double a1 = spread * (2.0 * rng.uniform() - 1.0);
  double a2 = spread * (2.0 * rng.uniform() - 1.0);
  double m = std::fabs(a0) + std::fabs(a1) + std::fabs(a2);
  auto fn = [a0, a1, a2](Location x) {
    return std::exp(a0 + a1 * std::sin(6.283185307179586 * x) + a2 * x);
  };
  return TestFunction(fn, std::exp(-m), std::exp(m));
}

Functional laplace_probe(const std::string& name, TestFunction g) {
  return {name, [g = std::move(g)](const AtomicMeasure& mu) {
            return std::exp(-mu.integrate(g));
          }};
}

Functional moment_probe(const std::string& name, TestFunction g, int power) {
  return {name, [g = std::move(g), power](const AtomicMeasure& mu) {
            return std::pow(mu.integrate(g), power);
          }};
}

VerificationReport scalar_report(const std::string& id,
                                 const EstimateWithError& est, double exact,
                                 const DecisionPolicy& policy) {
  VerificationReport rep;
  rep.id = id;
  rep.left = est.value;
  rep.right = exact;
  rep.se_left = est.se;
  rep.se_right = 0.0;
  rep.z = (est.se == 0.0) ? (est.value == exact ? 0.0 : 1e300)
                          : (est.value - exact) / est.se;
  rep.seed = est.seed;
  rep.decision = decide(rep.z, est.se, 0.0, est.value, exact, policy);
  return rep;
}

// deterministic criterion: a computed discrepancy against a fixed tolerance
VerificationReport tolerance_report(const std::string& id, double discrepancy,
                                    double tolerance, std::uint64_t seed) {
  VerificationReport rep;
  rep.id = id;
  rep.left = discrepancy;
  rep.right = tolerance;
  rep.z = 0.0;
  rep.seed = seed;
  rep.decision = (discrepancy <= tolerance) ? "pass" : "fail";
  return rep;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------
// suite: laplace-gamma
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_laplace_gamma(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  auto space = BaseSpace::unit_interval();
  double beta = ctx.get("beta", 1.0);
  RngStream master(ctx.seed, 100);
  DecisionPolicy policy;
  policy.z_threshold = bonferroni_z(15);
  int g_index = 0;
  RngStream fgen = master.child(999);
  for (int gi = 0; gi < 5; ++gi) {
    TestFunction g = random_unit_f(fgen);
    for (double theta : {0.5, 1.0, 2.0}) {
      RngStream base = master.child(1000 + g_index);
      auto values = run_replicates(ctx.replicates, base, [&](RngStream& rs) {
        auto mu = sample_gamma_measure(theta, space, beta, kTrunc, rs);
        return std::exp(-mu.integrate(g));
      });
      double exact = laplace_gamma(theta, beta, space, g);
      auto est = mean_with_error(values, base);
      out.push_back(scalar_report(
          fmt("gamma-measure Laplace functional, theta=%.3g, g#%g", theta,
              gi),
          est, exact, policy));
      ++g_index;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: gamma-dirichlet-independence
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_independence(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  auto space = BaseSpace::unit_interval();
  double theta = ctx.get("theta", 1.0);
  RngStream master(ctx.seed, 200);
  DecisionPolicy policy;

  std::function<AtomicMeasure(RngStream&)> sampler = [&](RngStream& rs) {
    return sample_gamma_measure(theta, space, 1.0, kTrunc, rs);
  };
  TestFunction f1([](Location x) { return std::sin(6.2832 * x); }, -1.0, 1.0);
  TestFunction f2([](Location x) { return x; }, 0.0, 1.0);

  out.push_back(check_independence<AtomicMeasure>(
      "radial mass vs angular sine statistic", sampler,
      [](const AtomicMeasure& m) { return m.total_mass(); },
      [&f1](const AtomicMeasure& m) { return normalize(m).integrate(f1); },
      ctx.replicates, master.child(1), policy));
  out.push_back(check_independence<AtomicMeasure>(
      "radial mass vs angular first moment", sampler,
      [](const AtomicMeasure& m) { return m.total_mass(); },
      [&f2](const AtomicMeasure& m) { return normalize(m).integrate(f2); },
      ctx.replicates, master.child(2), policy));

  // two independent gammas with a common scale: sum and ratio independent
  std::function<AtomicMeasure(RngStream&)> pair_sampler =
      [](RngStream& rs) {
        double y1 = rs.gamma(1.3, 2.0);
        double y2 = rs.gamma(0.9, 2.0);
        return AtomicMeasure({{y1, 0.0}, {y2, 1.0}});
      };
  out.push_back(check_independence<AtomicMeasure>(
      "gamma pair: sum vs ratio", pair_sampler,
      [](const AtomicMeasure& m) { return m.total_mass(); },
      [](const AtomicMeasure& m) {
        return m.atoms()[0].weight / m.total_mass();
      },
      ctx.replicates, master.child(3), policy));
  return out;
}

// ---------------------------------------------------------------------------
// suite: algebraic-identities (additivity, mixing, self-similarity)
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_algebraic(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 300);
  double beta = ctx.get("beta", 1.0);
  double theta1 = ctx.get("theta1", 1.0), theta2 = ctx.get("theta2", 1.0);
  auto space1 = BaseSpace::finite_discrete({0.8, 0.2});
  auto space2 = BaseSpace::finite_discrete({0.3, 0.7});
  double w1 = theta1 / (theta1 + theta2);
  std::vector<double> merged_probs = {w1 * 0.8 + (1.0 - w1) * 0.3,
                                      w1 * 0.2 + (1.0 - w1) * 0.7};
  auto merged = BaseSpace::finite_discrete(merged_probs);

  DecisionPolicy policy;
  policy.z_threshold = bonferroni_z(13);

  RngStream fgen = master.child(999);
  std::vector<Functional> probes;
  for (int i = 0; i < 5; ++i) {
    probes.push_back(
        laplace_probe(fmt("Laplace f#%g", i), random_finite_f(fgen, 2)));
  }

  // additive property: sum of independent gamma measures
  std::function<AtomicMeasure(RngStream&)> sum_sampler = [&](RngStream& rs) {
    auto m1 = sample_gamma_measure(theta1, space1, beta, kTrunc, rs);
    auto m2 = sample_gamma_measure(theta2, space2, beta, kTrunc, rs);
    std::vector<AtomicMeasure::Atom> atoms = m1.atoms();
    atoms.insert(atoms.end(), m2.atoms().begin(), m2.atoms().end());
    return AtomicMeasure(std::move(atoms));
  };
  std::function<AtomicMeasure(RngStream&)> one_sampler = [&](RngStream& rs) {
    return sample_gamma_measure(theta1 + theta2, merged, beta, kTrunc, rs);
  };
  for (auto& r : check_distribution_equality<AtomicMeasure>(
           "additive property of gamma measures", sum_sampler, one_sampler,
           probes, ctx.replicates, master.child(1), policy)) {
    out.push_back(std::move(r));
  }

  // mixing identity: Dirichlet mixture of Dirichlet processes
  std::vector<Functional> moment_probes;
  RngStream fgen2 = master.child(998);
  for (int i = 0; i < 3; ++i) {
    TestFunction f = random_finite_f(fgen2, 2);
    moment_probes.push_back(moment_probe(fmt("moment f#%g", i), f, 1));
    if (i == 0) {
      moment_probes.push_back(moment_probe("second moment f#0", f, 2));
    }
  }
  std::function<AtomicMeasure(RngStream&)> mixture_sampler =
      [&](RngStream& rs) {
        auto eta = sample_dirichlet_vector({theta1, theta2}, rs);
        auto x1 = sample_dirichlet_process(theta1, space1, kTrunc, rs);
        auto x2 = sample_dirichlet_process(theta2, space2, kTrunc, rs);
        std::vector<AtomicMeasure::Atom> atoms;
        for (const auto& a : x1.atoms()) {
          atoms.push_back({eta[0] * a.weight, a.location});
        }
        for (const auto& a : x2.atoms()) {
          atoms.push_back({eta[1] * a.weight, a.location});
        }
        return AtomicMeasure(std::move(atoms));
      };
  std::function<AtomicMeasure(RngStream&)> merged_dp = [&](RngStream& rs) {
    return sample_dirichlet_process(theta1 + theta2, merged, kTrunc, rs);
  };
  for (auto& r : check_distribution_equality<AtomicMeasure>(
           "mixing identity for Dirichlet processes", mixture_sampler,
           merged_dp, moment_probes, ctx.replicates, master.child(2), policy)) {
    out.push_back(std::move(r));
  }

  // self-similarity of the stick-breaking representation
  double theta = ctx.get("theta", 1.0);
  std::function<AtomicMeasure(RngStream&)> decomposed = [&](RngStream& rs) {
    double v1 = rs.beta_1_theta(theta);
    Location xi = space1.sample_location(rs);
    auto rest = sample_dirichlet_process(theta, space1, kTrunc, rs);
    std::vector<AtomicMeasure::Atom> atoms = {{v1, xi}};
    for (const auto& a : rest.atoms()) {
      atoms.push_back({(1.0 - v1) * a.weight, a.location});
    }
    return AtomicMeasure(std::move(atoms));
  };
  std::function<AtomicMeasure(RngStream&)> direct = [&](RngStream& rs) {
    return sample_dirichlet_process(theta, space1, kTrunc, rs);
  };
  for (auto& r : check_distribution_equality<AtomicMeasure>(
           "self-similarity of the stick-breaking representation", decomposed,
           direct, moment_probes, ctx.replicates, master.child(3), policy)) {
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: quasi-invariance (change-of-measure certification)
// ---------------------------------------------------------------------------

// S_{f,nu0} on truncated partitions: mark atoms i.i.d., rescale, renormalize;
// the unrepresented tail is marked with the mean of f.
MassPartition scale_partition(const MassPartition& p, const TestFunction& f,
                              const BaseSpace& nu0, RngStream& rng) {
  if (f.lower() == f.upper()) return p;  // constant f acts as the identity
  std::vector<double> q(p.size());
  KahanSum total;
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = f(nu0.sample_location(rng)) * p[i];
    total.add(q[i]);
  }
  double tail_mark =
      p.truncation_tail() * nu0.integrate([&](Location s) { return f(s); });
  double denom = total.value() + tail_mark;
  for (double& v : q) v /= denom;
  return MassPartition(std::move(q), MassPartition::Closure::simplex,
                       tail_mark / denom);
}

JumpSequence scale_jumps(const JumpSequence& x, const TestFunction& f,
                         const BaseSpace& nu0, RngStream& rng) {
  if (f.lower() == f.upper()) {
    double c = f.lower();
    if (c == 1.0) return x;
    std::vector<double> y(x.jumps());
    for (double& v : y) v *= c;
    return JumpSequence(std::move(y), c * x.tail_mass_bound());
  }
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = f(nu0.sample_location(rng)) * x[i];
  }
  return JumpSequence(std::move(y), f.upper() * x.tail_mass_bound());
}

std::vector<VerificationReport> suite_quasi_invariance(
    const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 400);
  double theta = ctx.get("theta", 1.0);
  double beta = ctx.get("beta", 1.0);
  double alpha = ctx.get("alpha", 0.35);
  auto space = two_point();
  long long n_cheap = ctx.replicates;
  // the partition densities integrate per replicate; a smaller budget keeps
  // the suite at desk scale without losing power against broken wirings
  long long n_quad = std::max<long long>(ctx.replicates / 25, 2000);
  const TruncationPolicy part_trunc = TruncationPolicy::tail_mass(1e-6);

  DecisionPolicy policy;
  policy.z_threshold = bonferroni_z(48);

  // multiplicative scalings stay below 2 so that the gamma-density second
  // moments exist (the Laplace transform blows up at -1/beta)
  std::vector<TestFunction> fs = {
      TestFunction::from_values({1.4, 0.8}),
      TestFunction::from_values({0.7, 1.2}),
      TestFunction::from_values({1.25, 0.9}),
      TestFunction::constant(1.0),  // exact smoke: identity transform
  };

  std::vector<Functional> measure_fns = {
      laplace_probe("exp(-<mu,g1>)", TestFunction::from_values({1.0, 0.4})),
      laplace_probe("exp(-<mu,g2>)", TestFunction::from_values({0.3, 0.9})),
  };
  std::vector<NamedFunctional<MassPartition>> partition_fns = {
      {"p1", [](const MassPartition& p) { return p.size() ? p[0] : 0.0; }},
      {"exp(-3 sum p^2)",
       [](const MassPartition& p) {
         double s = 0.0;
         for (double w : p.weights()) s += w * w;
         return std::exp(-3.0 * s);
       }},
  };
  std::vector<NamedFunctional<JumpSequence>> jump_fns = {
      {"exp(-x1)",
       [](const JumpSequence& x) {
         return std::exp(-(x.size() ? x[0] : 0.0));
       }},
      {"exp(-0.7 sum x)",
       [](const JumpSequence& x) { return std::exp(-0.7 * x.sum()); }},
  };

  // gamma process under multiplicative scaling
  std::function<AtomicMeasure(RngStream&)> gamma_sampler =
      [&](RngStream& rs) {
        return sample_gamma_measure(theta, space, beta, kTrunc, rs);
      };
  for (const auto& f : fs) {
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> tf =
        [&f](const AtomicMeasure& m, RngStream&) {
          return scale_by_function(m, f, ScaleMode::multiplicative);
        };
    std::function<double(const AtomicMeasure&)> rho =
        [&](const AtomicMeasure& m) {
          return rn_gamma_Tf(m, f, theta, beta, space).value();
        };
    for (auto& r : check_change_of_measure<AtomicMeasure>(
             fmt("gamma quasi-invariance under T_f, f=(%.3g,%.3g)", f(0.0),
                 f(1.0)),
             gamma_sampler, tf, rho, measure_fns, n_cheap, master.child(10),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // Dirichlet process under normalized multiplicative scaling
  std::function<AtomicMeasure(RngStream&)> dp_sampler = [&](RngStream& rs) {
    return sample_dirichlet_process(theta, space, kTrunc, rs);
  };
  for (const auto& f : fs) {
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> tf =
        [&f](const AtomicMeasure& m, RngStream&) {
          if (f.lower() == f.upper()) return m;  // T-bar of a constant
          return scale_by_function(m, f, ScaleMode::normalized);
        };
    std::function<double(const AtomicMeasure&)> rho =
        [&](const AtomicMeasure& m) {
          return rn_dirichlet_Tf(m, f, theta, space).value();
        };
    for (auto& r : check_change_of_measure<AtomicMeasure>(
             fmt("Dirichlet-process quasi-invariance, f=(%.3g,%.3g)", f(0.0),
                 f(1.0)),
             dp_sampler, tf, rho, measure_fns, n_cheap, master.child(11),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // Poisson-Dirichlet distribution under the marked scaling map
  std::function<MassPartition(RngStream&)> pd_sampler = [&](RngStream& rs) {
    return sample_pd(theta, std::nullopt, part_trunc, rs);
  };
  for (const auto& f : fs) {
    std::function<MassPartition(const MassPartition&, RngStream&)> tf =
        [&](const MassPartition& p, RngStream& rs) {
          return scale_partition(p, f, space, rs);
        };
    std::function<double(const MassPartition&)> rho =
        [&](const MassPartition& p) {
          return rn_pd_theta(p, f, theta, space).value.value();
        };
    for (auto& r : check_change_of_measure<MassPartition>(
             fmt("PD(theta) quasi-invariance, f=(%.3g,%.3g)", f(0.0), f(1.0)),
             pd_sampler, tf, rho, partition_fns, n_quad, master.child(12),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // gamma jump sizes under the marked scaling map
  std::function<JumpSequence(RngStream&)> jumps_sampler =
      [&](RngStream& rs) {
        return to_ordered_masses(
            sample_gamma_measure(theta, space, beta, kTrunc, rs));
      };
  for (const auto& f : fs) {
    std::function<JumpSequence(const JumpSequence&, RngStream&)> tf =
        [&](const JumpSequence& x, RngStream& rs) {
          return scale_jumps(x, f, space, rs);
        };
    std::function<double(const JumpSequence&)> rho =
        [&](const JumpSequence& x) {
          return rn_jumps_Tf(x, f, theta, beta, space).value.value();
        };
    for (auto& r : check_change_of_measure<JumpSequence>(
             fmt("gamma-jump quasi-invariance, f=(%.3g,%.3g)", f(0.0), f(1.0)),
             jumps_sampler, tf, rho, jump_fns, n_cheap, master.child(13),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // two-parameter Poisson-Dirichlet under the marked scaling map. The
  // residual of GEM(alpha,theta) decays like n^{-(1-alpha)/alpha}, so a
  // tail-mass policy is impractical; a fixed stick count keeps the tail
  // near 1e-5 at alpha = 0.35.
  std::function<MassPartition(RngStream&)> pd2_sampler = [&](RngStream& rs) {
    return sample_pd(theta, alpha, TruncationPolicy::fixed_count(400), rs);
  };
  for (const auto& f : fs) {
    std::function<MassPartition(const MassPartition&, RngStream&)> tf =
        [&](const MassPartition& p, RngStream& rs) {
          return scale_partition(p, f, space, rs);
        };
    std::function<double(const MassPartition&)> rho =
        [&](const MassPartition& p) {
          return rn_pd_two_param(p, f, alpha, theta, space).value.value();
        };
    for (auto& r : check_change_of_measure<MassPartition>(
             fmt("PD(alpha,theta) quasi-invariance, f=(%.3g,%.3g)", f(0.0),
                 f(1.0)),
             pd2_sampler, tf, rho, partition_fns, n_quad, master.child(14),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // stationary branching law under exponential tilting (Lambda form)
  {
    auto space3 = three_point();
    auto a = TestFunction::from_values({0.5, 1.0, 1.5});
    auto b = TestFunction::from_values({1.0, 0.7, 1.3});
    AtomicMeasure mu0 = AtomicMeasure::from_coordinates({0.4, 0.3, 0.6});
    std::function<AtomicMeasure(RngStream&)> stat_sampler =
        [&](RngStream& rs) {
          return sample_finite_gamma_stationary(a, b, mu0, space3, rs);
        };
    std::vector<Functional> fns3 = {
        laplace_probe("exp(-<mu,h1>)",
                      TestFunction::from_values({0.8, 0.2, 0.5})),
        laplace_probe("exp(-<mu,h2>)",
                      TestFunction::from_values({0.1, 0.9, 0.4})),
    };
    std::vector<TestFunction> tilts = {
        TestFunction::from_values({0.3, -0.2, 0.1}),
        TestFunction::from_values({-0.4, 0.25, 0.05}),
        TestFunction::from_values({0.15, 0.1, -0.3}),
        TestFunction::constant(0.0),  // identity of the exponential family
    };
    for (const auto& f : tilts) {
      std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> tf =
          [&f](const AtomicMeasure& m, RngStream&) {
            return scale_by_function(m, f, ScaleMode::exponential);
          };
      std::function<double(const AtomicMeasure&)> rho =
          [&](const AtomicMeasure& m) {
            TestFunction neg([&f](Location s) { return -f(s); }, -f.upper(),
                             -f.lower());
            return std::exp(lambda_functional(m, neg, a, b, mu0));
          };
      for (auto& r : check_change_of_measure<AtomicMeasure>(
               fmt("stationary-law Lambda quasi-invariance, f0=%.3g", f(0.0)),
               stat_sampler, tf, rho, fns3, n_cheap, master.child(15),
               policy)) {
        out.push_back(std::move(r));
      }
    }
  }

  // negative control: density deliberately off by a factor of two
  {
    const TestFunction f = TestFunction::from_values({2.0, 1.0});
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> tf =
        [&f](const AtomicMeasure& m, RngStream&) {
          return scale_by_function(m, f, ScaleMode::multiplicative);
        };
    std::function<double(const AtomicMeasure&)> bad_rho =
        [&](const AtomicMeasure& m) {
          return 2.0 * rn_gamma_Tf(m, f, theta, beta, space).value();
        };
    auto reports = check_change_of_measure<AtomicMeasure>(
        "negative control: density off by factor two", gamma_sampler, tf,
        bad_rho, {measure_fns[0]}, n_cheap, master.child(16), policy);
    for (auto& r : reports) {
      r.expect_fail = true;
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: theta0-fixed-point
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_theta0(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 500);
  auto space = two_point();
  auto f = TestFunction::from_values({2.0, 1.0});
  double alpha_small = ctx.get("alpha_limit", 1e-3);

  RngStream rs = master.child(1);
  for (int i = 0; i < 5; ++i) {
    auto p = sample_pd(1.0, 0.4, TruncationPolicy::fixed_count(15), rs);
    auto v = rn_pd_two_param(p, f, 0.5, 0.0, space);
    out.push_back(tolerance_report(
        fmt("stable fixed point: density is one at theta=0 (draw %g)",
            i),
        std::fabs(v.value.value() - 1.0), 0.0, ctx.seed));
  }

  for (int i = 0; i < 5; ++i) {
    auto p = sample_pd(1.0, std::nullopt, TruncationPolicy::fixed_count(18), rs);
    auto two = rn_pd_two_param(p, f, alpha_small, 1.0, space);
    auto one = rn_pd_theta(p, f, 1.0, space);
    double rel = std::fabs(two.value.value() / one.value.value() - 1.0);
    out.push_back(tolerance_report(
        fmt("alpha->0 limit of the two-parameter density (draw %g)", i), rel,
        1e-3, ctx.seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: hamiltonian
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_hamiltonian(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream rs(ctx.seed, 600);
  auto space = three_point();
  for (double theta : {0.5, 2.0, 4.0}) {
    double beta = 1.0 / theta;  // beta * theta = 1
    for (int i = 0; i < 4; ++i) {
      std::vector<double> coords(3);
      double total = 0.0;
      for (double& c : coords) {
        c = 0.05 + rs.uniform();
        total += c;
      }
      for (double& c : coords) c /= total;  // mu(S) = 1
      auto mu = AtomicMeasure::from_coordinates(coords);
      double hg = hamiltonian_gamma(mu, theta, beta, space);
      double hd = hamiltonian_dirichlet(normalize(mu), theta, space);
      out.push_back(tolerance_report(
          fmt("radial-angular identity at unit mass, theta=%.3g draw %g",
              theta, i),
          std::fabs(hg - hd), 1e-12, ctx.seed));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: tavare (normalization + Kingman cross-validation)
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_tavare(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 700);
  for (double theta : {0.5, 1.0, 2.0, 5.0}) {
    for (double t : {0.25, 0.5, 1.0, 2.0}) {
      auto table = tavare_table(theta, t, 1e-10);
      double total = table.tail;
      for (double p : table.pmf) total += p;
      out.push_back(tolerance_report(
          fmt("series normalization theta=%.3g t=%.3g", theta, t),
          std::fabs(1.0 - total), 1e-8, ctx.seed));

      RngStream base = master.child(
          static_cast<std::uint64_t>(theta * 100) * 1000 +
          static_cast<std::uint64_t>(t * 100));
      auto counts = run_replicates(ctx.replicates, base, [&](RngStream& r) {
        return static_cast<double>(simulate_kingman(theta, t, -1, r));
      });
      std::vector<long long> samples(counts.begin(), counts.end());
      auto cap = static_cast<long long>(table.pmf.size());
      auto rep = check_pmf_fit(
          fmt("lines-of-descent pmf vs simulated chain, theta=%.3g t=%.3g",
              theta, t),
          samples, [&table](long long n) { return table.pmf[n]; }, cap, base);
      out.push_back(std::move(rep));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: theorem-5.2 (random time change)
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_time_change(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 800);
  double theta = ctx.get("theta", 2.0);
  double t = ctx.get("t", 0.5);
  double t0 = ctx.get("t0", 1e-3);
  auto table = tavare_table(theta, t, 1e-10);
  auto cap = static_cast<long long>(table.pmf.size());

  int cell = 0;
  for (double a : {0.5, 1.0, 4.0}) {
    for (double lambda : {-1.0, 0.0, 1.0}) {
      auto seg = early_segment(a, lambda, theta, t0);
      RngStream base = master.child(10 + cell);
      long long exhausted = 0;
      auto counts =
          run_replicates(ctx.replicates, base, [&](RngStream& rs) {
            auto r = death_count_time_changed(a, lambda, theta, t0, t, rs,
                                              &seg);
            return static_cast<double>(r.count) + (r.exhausted ? 1e6 : 0.0);
          });
      std::vector<long long> samples;
      samples.reserve(counts.size());
      for (double c : counts) {
        if (c >= 1e6) {
          ++exhausted;
          samples.push_back(static_cast<long long>(c - 1e6));
        } else {
          samples.push_back(static_cast<long long>(c));
        }
      }
      auto rep = check_pmf_fit(
          fmt("time-changed count vs lines-of-descent pmf, a=%.3g "
              "lambda=%.3g (exhausted %g)",
              a, lambda, static_cast<double>(exhausted)),
          samples, [&table](long long n) { return table.pmf[n]; }, cap, base);
      out.push_back(std::move(rep));
      ++cell;
    }
  }

  // refinement: halving t0 moves tau by less than the reported bound
  {
    double a = 1.0, lambda = 0.0;
    RngStream rng = master.child(99);
    auto segf = early_segment(a, lambda, theta, t0 / 2.0);
    auto segc = early_segment(a, lambda, theta, t0);
    int within = 0, total = 0;
    for (int i = 0; i < 300; ++i) {
      auto fine = simulate_death_path(a, lambda, t0 / 2.0, 64.0, rng);
      auto coarse = restrict_death_path(fine, t0);
      TimeChangeResult rf, rc;
      try {
        rf = time_change_tau(fine, theta, t, &segf);
        rc = time_change_tau(coarse, theta, t, &segc);
      } catch (const HorizonExhausted&) {
        continue;
      }
      ++total;
      double count_at_tau = static_cast<double>(
          std::max<long long>(std::max(rf.count, rc.count), 1));
      double slope = (count_at_tau + theta - 1.0) *
                     c_factor(-lambda, std::max(rf.tau, rc.tau));
      if (std::fabs(rf.tau - rc.tau) <=
          (rf.early_error_bound + rc.early_error_bound) * slope + 1e-12) {
        ++within;
      }
    }
    VerificationReport rep;
    rep.id = "refinement: tau shift within the reported early-segment bound";
    rep.left = total > 0 ? static_cast<double>(within) / total : 0.0;
    rep.right = 0.95;  // 3-sigma band: expect at least 95% within
    rep.z = 0.0;
    rep.seed = ctx.seed;
    rep.decision = (total > 200 && rep.left >= rep.right) ? "pass" : "fail";
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: reversibility-5.1 (detailed balance + Chapman-Kolmogorov)
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_reversibility(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 900);
  double theta = ctx.get("theta", 1.0);
  double lambda = ctx.get("lambda", 1.0);
  double beta = 1.0 / lambda;
  auto space = two_point();
  long long n = ctx.replicates;

  DecisionPolicy policy;
  policy.z_threshold = bonferroni_z(24);

  std::vector<std::pair<Functional, Functional>> pairs;
  RngStream fgen = master.child(999);
  for (int i = 0; i < 5; ++i) {
    pairs.push_back({laplace_probe(fmt("F%g", i), random_finite_f(fgen, 2)),
                     laplace_probe(fmt("G%g", i), random_finite_f(fgen, 2))});
  }

  std::function<AtomicMeasure(RngStream&)> gamma_stat = [&](RngStream& rs) {
    return sample_gamma_measure(theta, space, beta, kTrunc, rs);
  };
  std::function<AtomicMeasure(RngStream&)> dp_stat = [&](RngStream& rs) {
    return sample_dirichlet_process(theta, space, kTrunc, rs);
  };

  for (double t : {0.25, 1.0}) {
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> q1 =
        [&, t](const AtomicMeasure& mu, RngStream& rs) {
          return sample_Q1(t, mu, theta, lambda, space, kTrunc, rs);
        };
    for (auto& r : check_detailed_balance<AtomicMeasure>(
             fmt("branching transition reversibility, t=%.3g", t), gamma_stat,
             q1, pairs, n, master.child(static_cast<std::uint64_t>(t * 100)),
             policy)) {
      out.push_back(std::move(r));
    }

    auto table = tavare_table(theta, t, 1e-10);
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> q2 =
        [&, t, table](const AtomicMeasure& nu, RngStream& rs) {
          return sample_Q2(t, nu, theta, space, kTrunc, rs, &table);
        };
    for (auto& r : check_detailed_balance<AtomicMeasure>(
             fmt("sampling-mutation transition reversibility, t=%.3g", t),
             dp_stat, q2, pairs, n,
             master.child(100 + static_cast<std::uint64_t>(t * 100)),
             policy)) {
      out.push_back(std::move(r));
    }
  }

  // Chapman-Kolmogorov: two half steps match one full step from a fixed mu
  {
    double t = ctx.get("t", 1.0);
    AtomicMeasure mu0({{0.7, 0.0}, {0.5, 1.0}});
    auto half_table = tavare_table(theta, t / 2.0, 1e-10);
    auto full_table = tavare_table(theta, t, 1e-10);
    std::vector<Functional> probes;
    RngStream fgen2 = master.child(998);
    for (int i = 0; i < 3; ++i) {
      probes.push_back(
          laplace_probe(fmt("Laplace f#%g", i), random_finite_f(fgen2, 2)));
    }
    std::function<AtomicMeasure(RngStream&)> two_step = [&](RngStream& rs) {
      auto mid = sample_Q1(t / 2.0, mu0, theta, lambda, space, kTrunc, rs);
      return sample_Q1(t / 2.0, mid, theta, lambda, space, kTrunc, rs);
    };
    std::function<AtomicMeasure(RngStream&)> one_step = [&](RngStream& rs) {
      return sample_Q1(t, mu0, theta, lambda, space, kTrunc, rs);
    };
    for (auto& r : check_distribution_equality<AtomicMeasure>(
             "Chapman-Kolmogorov for the branching transition", two_step,
             one_step, probes, n, master.child(300), policy)) {
      out.push_back(std::move(r));
    }

    auto nu0m = normalize(mu0);
    std::function<AtomicMeasure(RngStream&)> two_step_fv =
        [&](RngStream& rs) {
          auto mid =
              sample_Q2(t / 2.0, nu0m, theta, space, kTrunc, rs, &half_table);
          return sample_Q2(t / 2.0, mid, theta, space, kTrunc, rs,
                           &half_table);
        };
    std::function<AtomicMeasure(RngStream&)> one_step_fv =
        [&](RngStream& rs) {
          return sample_Q2(t, nu0m, theta, space, kTrunc, rs, &full_table);
        };
    for (auto& r : check_distribution_equality<AtomicMeasure>(
             "Chapman-Kolmogorov for the sampling-mutation transition",
             two_step_fv, one_step_fv, probes, n, master.child(301), policy)) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: theorem-5.3 (fixed-time identities and lambda independence)
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_fixed_time(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 1000);
  double theta = ctx.get("theta", 2.0);
  double lambda = ctx.get("lambda", 1.0);
  double t = ctx.get("t", 0.3);
  double t0 = ctx.get("t0", 1e-3);
  auto space = two_point();
  AtomicMeasure mu({{0.6, 0.0}, {0.4, 1.0}});
  long long n = ctx.replicates;

  DecisionPolicy policy;
  policy.z_threshold = bonferroni_z(15);

  std::vector<Functional> probes;
  RngStream fgen = master.child(999);
  for (int i = 0; i < 3; ++i) {
    probes.push_back(
        laplace_probe(fmt("Laplace f#%g", i), random_finite_f(fgen, 2)));
  }
  std::vector<Functional> moment_probes;
  RngStream fgen2 = master.child(998);
  for (int i = 0; i < 3; ++i) {
    moment_probes.push_back(
        moment_probe(fmt("moment f#%g", i), random_finite_f(fgen2, 2), 1));
  }

  // route (a): death-chain count at t, then a gamma measure
  std::function<AtomicMeasure(RngStream&)> via_count = [&](RngStream& rs) {
    return sample_Y_via_count(t, mu, theta, lambda, space, kTrunc, rs, t0);
  };
  std::function<AtomicMeasure(RngStream&)> via_q1 = [&](RngStream& rs) {
    return sample_Q1(t, mu, theta, lambda, space, kTrunc, rs);
  };
  for (auto& r : check_distribution_equality<AtomicMeasure>(
           "fixed-time branching law: count route vs transition sampler",
           via_count, via_q1, probes, n, master.child(1), policy)) {
    out.push_back(std::move(r));
  }

  // route (b): time-changed count, normalized gamma measure, vs Q2
  auto seg = early_segment(mu.total_mass(), lambda, theta, t0);
  std::function<AtomicMeasure(RngStream&)> via_tc = [&](RngStream& rs) {
    return sample_X_via_time_change(t, mu, theta, lambda, space, kTrunc, rs,
                                    t0, &seg);
  };
  auto table = tavare_table(theta, t, 1e-10);
  auto nu_start = normalize(mu);
  std::function<AtomicMeasure(RngStream&)> via_q2 = [&](RngStream& rs) {
    return sample_Q2(t, nu_start, theta, space, kTrunc, rs, &table);
  };
  for (auto& r : check_distribution_equality<AtomicMeasure>(
           "fixed-time sampling-mutation law: time-change route vs "
           "transition sampler",
           via_tc, via_q2, moment_probes, n, master.child(2), policy)) {
    out.push_back(std::move(r));
  }

  // lambda independence of the time-change route
  std::vector<double> lambdas = {-1.0, 0.0, 1.0};
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    double la = lambdas[i], lb = lambdas[i + 1];
    auto sega = early_segment(mu.total_mass(), la, theta, t0);
    auto segb = early_segment(mu.total_mass(), lb, theta, t0);
    std::function<AtomicMeasure(RngStream&)> ra = [&, la](RngStream& rs) {
      return sample_X_via_time_change(t, mu, theta, la, space, kTrunc, rs, t0,
                                      &sega);
    };
    std::function<AtomicMeasure(RngStream&)> rb = [&, lb](RngStream& rs) {
      return sample_X_via_time_change(t, mu, theta, lb, space, kTrunc, rs, t0,
                                      &segb);
    };
    for (auto& r : check_distribution_equality<AtomicMeasure>(
             fmt("lambda independence of the normalized route: %.3g vs %.3g",
                 la, lb),
             ra, rb, moment_probes, n, master.child(10 + i), policy)) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: generator-identities
// ---------------------------------------------------------------------------

CylinderFunction random_cylinder(RngStream& rng, int dim) {
  auto rand_vec = [&](double lo, double hi) {
    std::vector<double> v(dim);
    for (double& x : v) x = lo + (hi - lo) * rng.uniform();
    return v;
  };
  switch (rng.uniform_below(3)) {
    case 0:
      return CylinderFunction::linear(rand_vec(-1.0, 1.0));
    case 1:
      return CylinderFunction::monomial(
          {rand_vec(0.2, 1.0), rand_vec(0.2, 1.0)},
          {1 + static_cast<int>(rng.uniform_below(2)), 1});
    default:
      return CylinderFunction::exponential(rand_vec(-0.5, 0.5), -1.0);
  }
}

std::vector<VerificationReport> suite_generators(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream rng(ctx.seed, 1100);
  auto space = three_point();
  double theta = ctx.get("theta", 1.5);
  double lambda = ctx.get("lambda", 1.0);

  auto a = TestFunction::from_values({0.5, 1.1, 0.8});
  auto b = TestFunction::from_values({1.0, 0.6, 1.4});
  AtomicMeasure mu0 = AtomicMeasure::from_coordinates({0.4, 0.2, 0.5});
  auto params = GeneratorParams::General(a, b, mu0, space);

  // Leibniz identity of the carre du champ at random points
  double worst_gg = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto F = random_cylinder(rng, 3);
    auto G = random_cylinder(rng, 3);
    auto H = random_cylinder(rng, 3);
    std::vector<double> coords = {0.1 + rng.uniform(), 0.1 + rng.uniform(),
                                  0.1 + rng.uniform()};
    auto mu = AtomicMeasure::from_coordinates(coords);
    double lhs = carre_du_champ(params, CylinderFunction::product(F, H), G,
                                mu) +
                 carre_du_champ(params, CylinderFunction::product(H, G), F,
                                mu) -
                 carre_du_champ(params, H, CylinderFunction::product(F, G),
                                mu);
    double rhs = 2.0 * H.value(coords) * carre_du_champ(params, F, G, mu);
    double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    worst_gg = std::max(worst_gg, std::fabs(lhs - rhs) / scale);
  }
  out.push_back(tolerance_report(
      "carre-du-champ Leibniz identity at 100 random points", worst_gg, 1e-10,
      ctx.seed));

  // projection identity for the cubic-mass lift; the as-printed correction
  // term (+2 instead of +1) is kept as an expected-fail control
  double worst_proj = 0.0, best_printed = 1e300;
  for (int i = 0; i < 100; ++i) {
    auto phi = random_cylinder(rng, 3);
    std::vector<double> coords = {0.1 + rng.uniform(), 0.1 + rng.uniform(),
                                  0.1 + rng.uniform()};
    auto mu = AtomicMeasure::from_coordinates(coords);
    worst_proj = std::max(
        worst_proj, check_projection_identity(theta, lambda, space, phi, mu));
    best_printed = std::min(
        best_printed,
        check_projection_identity(theta, lambda, space, phi, mu,
                                  ProjectionVariant::as_printed));
  }
  out.push_back(tolerance_report(
      "projection of the lifted generator at 100 random points", worst_proj,
      1e-8, ctx.seed));
  auto printed = tolerance_report(
      "projection identity with the as-printed correction term", best_printed,
      1e-8, ctx.seed);
  printed.expect_fail = true;
  out.push_back(std::move(printed));

  // generator-level reversibility: int F LG dXi = int G LF dXi under the
  // sampled stationary law, panel of cylinder pairs
  {
    DecisionPolicy policy;
    policy.z_threshold = bonferroni_z(4);
    RngStream pair_gen(ctx.seed, 1150);
    RngStream base = RngStream(ctx.seed, 1151);
    long long n = ctx.replicates;
    for (int pair = 0; pair < 4; ++pair) {
      auto F = random_cylinder(pair_gen, 3);
      auto G = random_cylinder(pair_gen, 3);
      auto vals = run_replicates(n, base.child(pair), [&](RngStream& rs) {
        auto mu = sample_finite_gamma_stationary(a, b, mu0, space, rs);
        auto coords = mu.coordinates(space);
        return F.value(coords) * apply_generator(params, G, mu) -
               G.value(coords) * apply_generator(params, F, mu);
      });
      auto est = mean_with_error(vals, base.child(pair));
      VerificationReport rep;
      rep.id = fmt("generator-level reversibility, pair %g", pair);
      rep.left = est.value;
      rep.right = 0.0;
      rep.se_left = est.se;
      rep.z = (est.se == 0.0) ? 0.0 : est.value / est.se;
      rep.seed = ctx.seed;
      DecisionPolicy pol = policy;
      pol.scale_floor = 1.0;  // the estimand is an O(1)-scale difference
      rep.decision = decide(rep.z, est.se, 0.0, est.value, 0.0, pol);
      out.push_back(std::move(rep));
    }
  }

  // weak generator consistency with Richardson extrapolation
  {
    auto nu = AtomicMeasure::from_coordinates({0.5, 0.3, 0.2});
    auto nu_coords = nu.coordinates(space);
    auto F = CylinderFunction::exponential({0.9, 0.3, 0.6}, -1.0);
    auto fvp = GeneratorParams::FVP(theta, space);
    double exact = apply_generator(fvp, F, nu);
    double f_at = F.value(nu_coords);

    std::vector<double> deltas = {0.02, 0.01, 0.005};
    std::vector<double> r(3), se(3);
    for (int k = 0; k < 3; ++k) {
      double d = deltas[k];
      auto table = tavare_table(theta, d, 1e-10);
      RngStream base = RngStream(ctx.seed, 1100).child(50 + k);
      auto vals = run_replicates(ctx.replicates, base, [&](RngStream& rs) {
        auto x = sample_Q2(d, nu, theta, space, kTrunc, rs, &table);
        return (F.value(x.merged().coordinates(space)) - f_at) / d;
      });
      auto est = mean_with_error(vals, base);
      r[k] = est.value;
      se[k] = est.se;
    }
    double r23 = 2.0 * r[2] - r[1];  // cancels the O(delta) term
    double r12 = 2.0 * r[1] - r[0];
    double se23 = std::sqrt(4.0 * se[2] * se[2] + se[1] * se[1]);
    double budget = 3.0 * se23 + std::fabs(r23 - r12);
    out.push_back(tolerance_report(
        fmt("weak generator consistency (extrapolated %.5g vs exact %.5g)",
            r23, exact),
        std::fabs(r23 - exact), budget, ctx.seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: sde-adjudication
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_sde(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 1200);
  auto space = two_point();
  auto a = TestFunction::from_values({0.5, 0.8});
  auto b = TestFunction::from_values({1.0, 0.6});
  AtomicMeasure mu0 = AtomicMeasure::from_coordinates({0.3, 0.5});
  std::vector<double> start = {0.4, 0.9};
  AtomicMeasure mu_start = AtomicMeasure::from_coordinates(start);
  auto f = TestFunction::from_values({0.7, 0.4});
  double t = ctx.get("t", 0.5);
  long long n = std::max<long long>(ctx.replicates / 10, 2000);

  double step = 1e-3;
  RngStream base = master.child(1);
  auto vals = run_replicates(n, base, [&](RngStream& rs) {
    auto x = sde_oracle(a, b, mu0, space, start, t, step, rs);
    return std::exp(-(x[0] * f(0.0) + x[1] * f(1.0)));
  });
  auto est = mean_with_error(vals, base);
  RngStream base2 = master.child(2);
  auto vals_half = run_replicates(n, base2, [&](RngStream& rs) {
    auto x = sde_oracle(a, b, mu0, space, start, t, step / 2.0, rs);
    return std::exp(-(x[0] * f(0.0) + x[1] * f(1.0)));
  });
  auto est_half = mean_with_error(vals_half, base2);
  double bias_budget = 2.0 * std::fabs(est.value - est_half.value);

  double corrected = laplace_mbi_time_t(a, b, mu0, mu_start, t, f,
                                        MbiLaplaceVariant::corrected);
  double printed = laplace_mbi_time_t(a, b, mu0, mu_start, t, f,
                                      MbiLaplaceVariant::as_printed);
  {
    VerificationReport rep;
    rep.id = "fixed-time Laplace functional (corrected reading) vs "
             "Euler-Maruyama";
    rep.left = est.value;
    rep.right = corrected;
    rep.se_left = est.se;
    rep.z = (est.value - corrected) / est.se;
    rep.seed = ctx.seed;
    rep.decision = (std::fabs(est.value - corrected) <=
                    3.0 * est.se + bias_budget)
                       ? "pass"
                       : "fail";
    out.push_back(std::move(rep));
  }
  {
    VerificationReport rep;
    rep.id = "fixed-time Laplace functional (as-printed reading) vs "
             "Euler-Maruyama";
    rep.left = est.value;
    rep.right = printed;
    rep.se_left = est.se;
    rep.z = (est.value - printed) / est.se;
    rep.seed = ctx.seed;
    rep.decision = (std::fabs(est.value - printed) <=
                    3.0 * est.se + bias_budget)
                       ? "pass"
                       : "fail";
    rep.expect_fail = true;  // the printed formula drops a factor of f
    out.push_back(std::move(rep));
  }

  // long-run marginal against the stationary gamma coordinates
  {
    double t_long = 12.0;
    double step_long = 2e-3;
    RngStream base3 = master.child(3);
    auto coords = run_replicates(n, base3, [&](RngStream& rs) {
      auto x = sde_oracle(a, b, mu0, space, start, t_long, step_long, rs);
      return x[0];
    });
    // coordinate 0 is Gamma(mu0/a, scale a/b)
    double shape = 0.3 / 0.5, scale = 0.5 / 1.0;
    auto ks = ks_one_sample(coords, [&](double x) {
      return x <= 0.0 ? 0.0 : reg_gamma_p(shape, x / scale);
    });
    VerificationReport rep;
    rep.id = "long-run marginal vs stationary gamma coordinate";
    rep.left = ks.statistic;
    rep.right = ks.p_value;
    rep.seed = ctx.seed;
    // Euler bias at this step size inflates the KS statistic slightly;
    // p > 0.01 is the acceptance bar
    rep.decision = (ks.p_value > 0.01) ? "pass" : "fail";
    out.push_back(std::move(rep));
  }

  // zero-noise degenerate check: the deterministic linear system
  {
    auto a0 = TestFunction::constant(0.0);
    // a = 0 is outside the generator contract but valid for the scheme
    RngStream rs = master.child(4);
    auto x = sde_oracle(a0, b, mu0, space, start, 1.0, 1e-5, rs);
    double worst = 0.0;
    for (int s = 0; s < 2; ++s) {
      double bs = b(static_cast<Location>(s));
      double m0 = (s == 0) ? 0.3 : 0.5;
      double exact = start[s] * std::exp(-bs) + m0 / bs * (1.0 - std::exp(-bs));
      worst = std::max(worst, std::fabs(x[s] - exact));
    }
    out.push_back(tolerance_report("zero-noise ODE limit", worst, 1e-4,
                                   ctx.seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: ldp
// ---------------------------------------------------------------------------

std::vector<VerificationReport> suite_ldp(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream rng(ctx.seed, 1300);

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    int k = 1 + static_cast<int>(rng.uniform_below(8));
    std::vector<double> x(k);
    double scale = 10.0 * rng.uniform();
    for (double& v : x) v = scale * rng.uniform();
    std::sort(x.begin(), x.end(), std::greater<double>());
    auto res = contraction_check(x);
    double expect = rate(RateFunction::I, RatePoint::seq(x));
    worst = std::max(worst, std::fabs(res.infimum - expect));
  }
  out.push_back(tolerance_report(
      "contraction infimum equals the summed rate on 100 random points",
      worst, 1e-6, ctx.seed));

  // closed form of the minimizer: y* = 1 + sum x
  {
    std::vector<double> x = {0.3, 0.2, 0.1};
    auto res = contraction_check(x);
    out.push_back(tolerance_report("contraction minimizer at 1 + sum x",
                                   std::fabs(res.argmin_y - 1.6), 1e-6,
                                   ctx.seed));
  }

  // discrete contraction for the small-theta rates on enumerated instances
  {
    double worst_i5 = 0.0;
    std::vector<std::vector<double>> instances = {
        {0.4, 0.1}, {1.0}, {0.5, 0.5, 0.25}, {}, {2.0, 1.0, 0.5, 0.25}};
    for (const auto& x : instances) {
      double direct = rate(RateFunction::I5, RatePoint::seq(x));
      double through = contraction_check_small_theta(x);
      worst_i5 = std::max(worst_i5, std::fabs(direct - through));
    }
    out.push_back(tolerance_report(
        "discrete contraction matches the integer-level rate", worst_i5, 0.0,
        ctx.seed));
  }

  // zero cases and monotonicity
  {
    bool ok = rate(RateFunction::I, RatePoint::seq({})) == 0.0 &&
              rate(RateFunction::I1, RatePoint::y(1.0)) == 0.0 &&
              rate(RateFunction::I2, RatePoint::part({})) == 0.0 &&
              rate(RateFunction::I3, RatePoint::part({1.0})) == 0.0 &&
              rate(RateFunction::I4, RatePoint::y(0.0)) == 0.0 &&
              rate(RateFunction::I5, RatePoint::seq({0.0, 0.0})) == 0.0;
    double before = rate(RateFunction::I, RatePoint::seq({0.5, 0.25}));
    double after = rate(RateFunction::I, RatePoint::seq({0.5, 0.25, 0.1}));
    ok = ok && (after > before);
    out.push_back(tolerance_report("zero cases and monotonicity",
                                   ok ? 0.0 : 1.0, 0.0, ctx.seed));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: ldp-decay-demo (optional, crude Monte Carlo at wide tolerances)
// ---------------------------------------------------------------------------

// Demonstrates the exponential decay P(sigma(theta)/theta > y) ~
// exp(-theta I1(y)) at moderate theta. Rare-event estimation at large theta
// is out of reach at desk scale, so tolerances are wide by design.
std::vector<VerificationReport> suite_ldp_demo(const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 1500);
  double y = ctx.get("y", 1.5);
  long long n = std::max<long long>(ctx.replicates * 10, 200000);
  for (double theta : {20.0, 50.0}) {
    auto vals = run_replicates(
        n, master.child(static_cast<std::uint64_t>(theta)),
        [&](RngStream& rs) {
          return rs.gamma(theta) / theta > y ? 1.0 : 0.0;
        });
    KahanSum s;
    for (double v : vals) s.add(v);
    double p_hat = s.value() / static_cast<double>(n);
    double rate_hat = -std::log(std::max(p_hat, 1e-300)) / theta;
    double rate_exact = rate(RateFunction::I1, RatePoint::y(y));
    VerificationReport rep;
    rep.id = fmt("decay exponent at theta=%.3g, y=%.3g (crude)", theta, y);
    rep.left = rate_hat;
    rep.right = rate_exact;
    rep.seed = ctx.seed;
    // wide band: the prefactor contributes O(log(theta)/theta)
    double slack = 0.35 * rate_exact + 3.0 / theta;
    rep.decision = (p_hat > 0.0 && std::fabs(rate_hat - rate_exact) <= slack)
                       ? "pass"
                       : "fail";
    out.push_back(std::move(rep));
  }
  return out;
}

// ---------------------------------------------------------------------------
// suite: negative-controls
// ---------------------------------------------------------------------------

// Deliberately broken configurations. expect_fail is left unset here so the
// raw failures surface as exit code 2.
std::vector<VerificationReport> suite_negative_controls(
    const SuiteContext& ctx) {
  std::vector<VerificationReport> out;
  RngStream master(ctx.seed, 1400);
  auto space = two_point();
  long long n = std::max<long long>(ctx.replicates / 5, 20000);
  DecisionPolicy policy;

  // wrong density: off by a factor of two
  {
    const TestFunction f = TestFunction::from_values({2.0, 1.0});
    std::function<AtomicMeasure(RngStream&)> sampler = [&](RngStream& rs) {
      return sample_gamma_measure(1.0, space, 1.0, kTrunc, rs);
    };
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> tf =
        [&f](const AtomicMeasure& m, RngStream&) {
          return scale_by_function(m, f, ScaleMode::multiplicative);
        };
    std::function<double(const AtomicMeasure&)> bad_rho =
        [&](const AtomicMeasure& m) {
          return 2.0 * rn_gamma_Tf(m, f, 1.0, 1.0, space).value();
        };
    auto reports = check_change_of_measure<AtomicMeasure>(
        "control: change-of-measure density off by factor two", sampler, tf,
        bad_rho,
        {laplace_probe("exp(-<mu,g>)", TestFunction::from_values({1.0, 0.4}))},
        n, master.child(1), policy);
    for (auto& r : reports) {
      out.push_back(std::move(r));
    }
  }

  // distribution equality with mismatched parameters
  {
    std::function<AtomicMeasure(RngStream&)> s1 = [&](RngStream& rs) {
      return sample_gamma_measure(1.0, space, 1.0, kTrunc, rs);
    };
    std::function<AtomicMeasure(RngStream&)> s2 = [&](RngStream& rs) {
      return sample_gamma_measure(2.0, space, 1.0, kTrunc, rs);
    };
    auto reports = check_distribution_equality<AtomicMeasure>(
        "control: gamma measures with different shape parameters", s1, s2,
        {laplace_probe("exp(-<mu,1>)", TestFunction::constant(1.0))}, n,
        master.child(2), policy);
    for (auto& r : reports) {
      out.push_back(std::move(r));
    }
  }

  // independence check with a duplicated statistic
  {
    std::function<AtomicMeasure(RngStream&)> sampler = [&](RngStream& rs) {
      return sample_gamma_measure(1.0, space, 1.0, kTrunc, rs);
    };
    auto rep = check_independence<AtomicMeasure>(
        "control: a statistic against itself", sampler,
        [](const AtomicMeasure& m) { return m.total_mass(); },
        [](const AtomicMeasure& m) { return m.total_mass(); }, n,
        master.child(3), policy);
    out.push_back(std::move(rep));
  }

  // detailed balance on a non-reversible chain. Two-state chains satisfy
  // detailed balance automatically, so the hand-built counterexample is a
  // three-state rotation: s -> s+1 mod 3 w.p. 0.7, stay otherwise; the
  // stationary law is uniform and the cycle breaks reversibility.
  {
    std::function<AtomicMeasure(RngStream&)> stat = [](RngStream& rs) {
      return AtomicMeasure(
          {{1.0, static_cast<Location>(rs.uniform_below(3))}});
    };
    std::function<AtomicMeasure(const AtomicMeasure&, RngStream&)> kernel =
        [](const AtomicMeasure& x, RngStream& rs) {
          auto state = static_cast<int>(x.atoms()[0].location);
          int next = (rs.uniform() < 0.7) ? (state + 1) % 3 : state;
          return AtomicMeasure({{1.0, static_cast<Location>(next)}});
        };
    std::vector<std::pair<Functional, Functional>> pairs = {
        {{"1{state=0}",
          [](const AtomicMeasure& m) {
            return m.atoms()[0].location == 0.0 ? 1.0 : 0.0;
          }},
         {"1{state=1}", [](const AtomicMeasure& m) {
            return m.atoms()[0].location == 1.0 ? 1.0 : 0.0;
          }}}};
    auto reports = check_detailed_balance<AtomicMeasure>(
        "control: rotating three-state chain", stat, kernel, pairs, n,
        master.child(4), policy);
    for (auto& r : reports) {
      out.push_back(std::move(r));
    }
  }

  // counts without the time change against the lines-of-descent pmf
  {
    double theta = 2.0, lambda = 1.0, a = 1.0, t = 0.5, t0 = 1e-3;
    auto table = tavare_table(theta, t, 1e-10);
    RngStream base = master.child(5);
    auto counts = run_replicates(n, base, [&](RngStream& rs) {
      return static_cast<double>(death_count_at(a, lambda, t0, t, rs));
    });
    std::vector<long long> samples(counts.begin(), counts.end());
    auto rep = check_pmf_fit(
        "control: raw death-chain count without the time change", samples,
        [&table](long long k) { return table.pmf[k]; },
        static_cast<long long>(table.pmf.size()), base);
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

const std::vector<Suite>& suite_registry() {
  static const std::vector<Suite> registry = {
      {"laplace-gamma",
       "Laplace functional of the gamma random measure",
       &suite_laplace_gamma},
      {"gamma-dirichlet-independence",
       "independence of radial and angular parts (Lukacs character)",
       &suite_independence},
      {"algebraic-identities",
       "additivity, Dirichlet mixing, stick-breaking self-similarity",
       &suite_algebraic},
      {"quasi-invariance",
       "change-of-measure densities for scaled gamma/Dirichlet/PD laws and "
       "the tilted stationary branching law",
       &suite_quasi_invariance},
      {"theta0-fixed-point",
       "stable law as the fixed point and the alpha->0 degeneration",
       &suite_theta0},
      {"hamiltonian",
       "radial-angular decomposition of the formal Hamiltonians",
       &suite_hamiltonian},
      {"tavare",
       "lines-of-descent pmf: normalization and chain cross-validation",
       &suite_tavare},
      {"theorem-5.2",
       "random time change carries the death chain to the coalescent counts",
       &suite_time_change},
      {"reversibility-5.1",
       "detailed balance of both transition samplers and Chapman-Kolmogorov",
       &suite_reversibility},
      {"theorem-5.3",
       "fixed-time identities linking the two processes; lambda independence",
       &suite_fixed_time},
      {"generator-identities",
       "carre-du-champ Leibniz rule, generator projection, weak consistency",
       &suite_generators},
      {"sde-adjudication",
       "Euler-Maruyama oracle adjudicates the fixed-time Laplace formula and "
       "the stationary law",
       &suite_sde},
      {"ldp",
       "rate functions and the contraction principle",
       &suite_ldp},
      {"ldp-decay-demo",
       "optional crude demonstration of the exponential decay rate",
       &suite_ldp_demo},
      {"negative-controls",
       "deliberately broken configurations that must fail",
       &suite_negative_controls},
  };
  return registry;
}

bool has_suite(const std::string& name) {
  for (const auto& s : suite_registry()) {
    if (s.name == name) return true;
  }
  return false;
}

std::vector<VerificationReport> run_suite(const std::string& name,
                                          const SuiteContext& ctx) {
  for (const auto& s : suite_registry()) {
    if (s.name == name) return s.run(ctx);
  }
  throw std::invalid_argument("unknown suite: " + name);
}

int exit_code_for(const std::vector<VerificationReport>& reports) {
  // expected-fail controls embedded in a healthy suite count as satisfied
  // when they fail; the negative-controls suite leaves expect_fail unset so
  // its raw failures surface as exit 2
  bool any_fail = false, any_inconclusive = false;
  for (const auto& r : reports) {
    if (r.expect_fail) {
      if (r.decision != "fail") any_fail = true;
      continue;
    }
    if (r.decision == "fail") any_fail = true;
    if (r.decision == "inconclusive") any_inconclusive = true;
  }
  if (any_fail) return 2;
  if (any_inconclusive) return 3;
  return 0;
}

}  // namespace gdp
