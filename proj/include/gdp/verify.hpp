#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gdp/numerics.hpp"
#include "gdp/rng.hpp"

namespace gdp {

struct EstimateWithError {
  double value = 0.0;
  double se = 0.0;
  long long replicates = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct VerificationReport {
  std::string id;  // identity anchor
  double left = 0.0;
  double right = 0.0;
  double se_left = 0.0;
  double se_right = 0.0;
  double z = 0.0;
  std::string decision;  // pass | fail | inconclusive
  std::uint64_t seed = 0;
  std::string config;
  // negative controls are expected to fail; a suite counts them as
  // satisfied exactly when they do
  bool expect_fail = false;

  bool satisfied() const {
    return expect_fail ? decision == "fail" : decision == "pass";
  }
};

struct DecisionPolicy {
  double z_threshold = 3.0;
  double max_rel_se = 0.2;
  // scale used for the relative-s.e. rule when both estimates are near zero
  double scale_floor = 1.0;
};

// z threshold preserving the familywise level of |z| <= 3 across k tests.
double bonferroni_z(int k);

// Upper-tail standard normal quantile.
double normal_quantile_upper(double p);

std::string decide(double z, double se_left, double se_right, double left,
                   double right, const DecisionPolicy& policy);

// Number of worker threads: GDP_LAB_THREADS when set, else hardware.
int worker_threads();

// Deterministic replicated evaluation: replicate i consumes the child
// stream base.child(i); results are reduced in index order so the output
// is byte-identical however the pool schedules the work.
std::vector<double> run_replicates(
    long long n, const RngStream& base,
    const std::function<double(RngStream&)>& fn);
std::vector<std::vector<double>> run_replicates_multi(
    long long n, const RngStream& base, int width,
    const std::function<void(RngStream&, double*)>& fn);

EstimateWithError mean_with_error(const std::vector<double>& values,
                                  const RngStream& base);

template <typename Value>
struct NamedFunctional {
  std::string name;
  std::function<double(const Value&)> fn;
};

// E[F(T(X))] = E[F(X) rho(X)] for every functional F, with paired samples
// (both sides drawn from the same replicate stream).
template <typename Value>
std::vector<VerificationReport> check_change_of_measure(
    const std::string& id,
    const std::function<Value(RngStream&)>& sampler,
    const std::function<Value(const Value&, RngStream&)>& transform,
    const std::function<double(const Value&)>& density,
    const std::vector<NamedFunctional<Value>>& functionals, long long n,
    const RngStream& base, const DecisionPolicy& policy = {});

// Distribution equality through probe functionals.
template <typename Value>
std::vector<VerificationReport> check_distribution_equality(
    const std::string& id,
    const std::function<Value(RngStream&)>& sampler_a,
    const std::function<Value(RngStream&)>& sampler_b,
    const std::vector<NamedFunctional<Value>>& probes, long long n,
    const RngStream& base, const DecisionPolicy& policy = {});

// Correlation of two statistics (and of their squares) is zero.
template <typename Value>
VerificationReport check_independence(
    const std::string& id, const std::function<Value(RngStream&)>& sampler,
    const std::function<double(const Value&)>& stat_a,
    const std::function<double(const Value&)>& stat_b, long long n,
    const RngStream& base, const DecisionPolicy& policy = {});

// E[F(X0) G(X1)] = E[G(X0) F(X1)] under the stationary law.
template <typename Value>
std::vector<VerificationReport> check_detailed_balance(
    const std::string& id,
    const std::function<Value(RngStream&)>& stationary_sampler,
    const std::function<Value(const Value&, RngStream&)>& transition_sampler,
    const std::vector<std::pair<NamedFunctional<Value>, NamedFunctional<Value>>>&
        functional_pairs,
    long long n, const RngStream& base, const DecisionPolicy& policy = {});

// Goodness of fit of sampled counts against a pmf: chi-square (with small
// bins pooled) and total variation; pass iff p > 0.01 and TV < 0.01.
VerificationReport check_pmf_fit(const std::string& id,
                                 const std::vector<long long>& samples,
                                 const std::function<double(long long)>& pmf,
                                 long long support_cap, const RngStream& base);

// Serialization.
std::string reports_to_json(const std::vector<VerificationReport>& reports);
std::string reports_to_csv(const std::vector<VerificationReport>& reports);

}  // namespace gdp
