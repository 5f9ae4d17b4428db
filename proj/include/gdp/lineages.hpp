#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "gdp/rng.hpp"

namespace gdp {

// C(lambda, t) = lambda^-1 (e^{lambda t/2} - 1), with the t/2 limit at
// lambda = 0; continuous in lambda (series evaluation near 0).
double c_factor(double lambda, double t);

// Inverse in t: the time v with C(lambda, v) = c. For lambda < 0 the range
// of C is (0, -1/lambda); values at or beyond the sup return +infinity.
double c_factor_inverse_time(double lambda, double c);

// Marginal of the death chain at time t: Poisson(a / C(lambda, t)) pmf.
double death_marginal_pmf(double a, double lambda, double t, long long n);

// Time-inhomogeneous pure death chain N_a(t) with death rate
// N(t) / (2 C(-lambda, t)) and entrance boundary infinity, represented from
// a start time t0 at which the count is drawn from the exact marginal.
struct DeathPath {
  double a = 0.0;
  double lambda = 0.0;
  double start_time = 0.0;
  long long start_count = 0;
  double horizon = 0.0;
  std::vector<double> event_times;  // strictly increasing death times
  // true when no further event can ever occur (count hit 0, or the
  // remaining individuals survive forever, which has positive probability
  // for lambda < 0)
  bool complete = false;

  long long count_at(double t) const;
  long long final_count() const {
    return start_count - static_cast<long long>(event_times.size());
  }
  double last_event_or_start() const {
    return event_times.empty() ? start_time : event_times.back();
  }
};

DeathPath simulate_death_path(double a, double lambda, double t0,
                              double horizon, RngStream& rng);

// Continue an existing path to a later horizon, consuming the same stream.
void extend_death_path(DeathPath& path, double new_horizon, RngStream& rng);

// Restriction of a path to a later start time: events before t0 are
// forgotten and the count at t0 becomes the start count (used by the
// refinement tests of the early-segment approximation).
DeathPath restrict_death_path(const DeathPath& path, double t0);

// Embedded chain of Kingman's coalescent: pure death with rates
// lambda_n = n(n+theta-1)/2.
double kingman_rate(double theta, long long n);

// Count at time t. start < 0 enters from infinity through a finite proxy:
// the chain starts at the proxy level with the clock advanced by the mean
// entrance time, which cancels the first-order truncation bias; doubling
// the proxy moves the pmf by well under 1e-3 in total variation.
long long simulate_kingman(double theta, double t, long long start,
                           RngStream& rng);
constexpr long long kKingmanEntranceProxy = 800;
double kingman_entrance_offset(double theta, long long m);

// Tavare's series for d_n^theta(t), the probability of n surviving lines of
// descent at time t.
struct TavareResult {
  double value = 0.0;
  enum class Method { plain, high_precision, monte_carlo } method = Method::plain;
  double error_bound = 0.0;
};

TavareResult tavare_pmf_detail(double theta, double t, long long n);
double tavare_pmf(double theta, double t, long long n);

// Full pmf table for fixed (theta, t), computed until the cumulative mass
// reaches 1 - tail_eps. `exact` is false when any entry needed the
// Monte Carlo fallback.
struct TavareTable {
  std::vector<double> pmf;
  bool exact = true;
  double tail = 0.0;

  long long sample(RngStream& rng) const;
};
TavareTable tavare_table(double theta, double t, double tail_eps = 1e-10);

// Random time change of Theorem-5.2 type:
//   t = int_0^tau du / ((N(u) v 1 + theta - 1) C(-lambda, u)).
// The (0, t0] segment uses the conditional-mean proxy a / C(lambda, u) for
// N(u); `early_error_bound` brackets that approximation with a 3-sigma
// Poisson band. When the clock budget of the whole path is below the target
// (possible only for lambda < 0), `exhausted` is set, tau is +infinity and
// `count` is the terminal count.
struct TimeChangeResult {
  double tau = 0.0;
  long long count = 0;
  double early_error_bound = 0.0;
  bool exhausted = false;
};

class HorizonExhausted : public std::runtime_error {
 public:
  explicit HorizonExhausted(const std::string& w) : std::runtime_error(w) {}
};

// Early-segment contribution and its error band, reusable across replicates
// that share (a, lambda, theta, t0).
struct EarlySegment {
  double t_early = 0.0;
  double bound = 0.0;
};
EarlySegment early_segment(double a, double lambda, double theta, double t0);

TimeChangeResult time_change_tau(const DeathPath& path, double theta,
                                 double t_target,
                                 const EarlySegment* early = nullptr);

// Count of the death chain at time s (no path retained); law-identical to
// simulate_death_path(...).count_at(s) but works in the hazard scale with
// O(1) cost per event.
long long death_count_at(double a, double lambda, double t0, double s,
                         RngStream& rng);

// Draw (tau_t, N(tau_t)) directly; same law as building a path and applying
// time_change_tau, at O(1) cost per event.
TimeChangeResult death_count_time_changed(double a, double lambda,
                                          double theta, double t0,
                                          double t_target, RngStream& rng,
                                          const EarlySegment* early = nullptr);

}  // namespace gdp
