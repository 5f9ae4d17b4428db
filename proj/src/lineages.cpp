#include "gdp/lineages.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

#include "gdp/numerics.hpp"

namespace gdp {

double c_factor(double lambda, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("c_factor: t must be positive");
  double x = lambda * t;
  if (lambda == 0.0) return 0.5 * t;
  if (std::fabs(x) < 1e-6) {
    // series keeps full accuracy through the lambda -> 0 crossover
    return 0.5 * t * (1.0 + x / 4.0 + x * x / 24.0);
  }
  return std::expm1(0.5 * x) / lambda;
}

double c_factor_inverse_time(double lambda, double c) {
  if (!(c > 0.0)) {
    throw std::invalid_argument("c_factor_inverse_time: c must be positive");
  }
  if (lambda == 0.0) return 2.0 * c;
  double arg = lambda * c;
  if (arg <= -1.0) return std::numeric_limits<double>::infinity();
  if (std::fabs(arg) < 1e-9) {
    // C(lambda, v) ~ v/2 (1 + lambda v / 4)
    double v0 = 2.0 * c;
    return v0 * (1.0 - lambda * v0 / 4.0);
  }
  return 2.0 / lambda * std::log1p(arg);
}

double death_marginal_pmf(double a, double lambda, double t, long long n) {
  if (!(a > 0.0)) throw std::invalid_argument("death_marginal_pmf: a > 0");
  if (n < 0) return 0.0;
  double mean = a / c_factor(lambda, t);
  double k = static_cast<double>(n);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

long long DeathPath::count_at(double t) const {
  if (t < start_time) {
    throw std::invalid_argument("DeathPath::count_at: before start time");
  }
  auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
  return start_count - static_cast<long long>(it - event_times.begin());
}

namespace {

// One death-waiting step from state (s, n): returns the event time, or
// +infinity when no further death ever occurs (lambda < 0 only).
double next_death_time(double a_lambda, double s, long long n,
                       RngStream& rng) {
  double e = rng.exponential();
  // hazard to v equals n log(C(lambda, v)/C(lambda, s))
  double target = c_factor(a_lambda, s) *
                  std::exp(e / static_cast<double>(n));
  return c_factor_inverse_time(a_lambda, target);
}

void run_death_chain(DeathPath& path, double horizon, RngStream& rng) {
  // resume from the time already resolved; by memorylessness in the hazard
  // scale a fresh exponential from there is the exact conditional law
  double s = std::max(path.last_event_or_start(), path.horizon);
  long long n = path.final_count();
  while (n > 0) {
    double v = next_death_time(path.lambda, s, n, rng);
    if (std::isinf(v)) {
      path.complete = true;  // remaining individuals survive forever
      break;
    }
    if (v > horizon) break;  // no event in (s, horizon]
    path.event_times.push_back(v);
    --n;
    s = v;
  }
  if (n == 0) path.complete = true;
  path.horizon = std::max(path.horizon, horizon);
}

}  // namespace

DeathPath simulate_death_path(double a, double lambda, double t0,
                              double horizon, RngStream& rng) {
  if (!(a > 0.0)) throw std::invalid_argument("simulate_death_path: a > 0");
  if (!(t0 > 0.0) || !(horizon > t0)) {
    throw std::invalid_argument("simulate_death_path: need 0 < t0 < horizon");
  }
  DeathPath path;
  path.a = a;
  path.lambda = lambda;
  path.start_time = t0;
  path.start_count = rng.poisson(a / c_factor(lambda, t0));
  path.horizon = t0;
  run_death_chain(path, horizon, rng);
  return path;
}

void extend_death_path(DeathPath& path, double new_horizon, RngStream& rng) {
  if (path.complete || new_horizon <= path.horizon) return;
  run_death_chain(path, new_horizon, rng);
}

DeathPath restrict_death_path(const DeathPath& path, double t0) {
  if (t0 < path.start_time) {
    throw std::invalid_argument("restrict_death_path: t0 before path start");
  }
  DeathPath out;
  out.a = path.a;
  out.lambda = path.lambda;
  out.start_time = t0;
  out.start_count = path.count_at(t0);
  out.horizon = path.horizon;
  out.complete = path.complete;
  for (double e : path.event_times) {
    if (e > t0) out.event_times.push_back(e);
  }
  return out;
}

double kingman_rate(double theta, long long n) {
  if (!(theta > 0.0)) throw std::invalid_argument("kingman_rate: theta > 0");
  double k = static_cast<double>(n);
  return 0.5 * k * (k + theta - 1.0);
}

// Mean time for the coalescent count to come down from infinity to m:
// sum_{k>m} 2/(k(k+theta-1)) = 2 (psi(m+theta) - psi(m+1)) / (theta-1),
// with the trigamma limit at theta = 1. Starting the entrance proxy at this
// offset cancels the first-order truncation bias (the residual is the
// sd of the entrance time, O(m^-1.5)).
double kingman_entrance_offset(double theta, long long m) {
  double md = static_cast<double>(m);
  if (std::fabs(theta - 1.0) < 1e-8) return 2.0 * trigamma(md + 1.0);
  return 2.0 * (digamma(md + theta) - digamma(md + 1.0)) / (theta - 1.0);
}

long long simulate_kingman(double theta, double t, long long start,
                           RngStream& rng) {
  if (!(theta > 0.0)) throw std::invalid_argument("simulate_kingman: theta > 0");
  if (!(t > 0.0)) throw std::invalid_argument("simulate_kingman: t > 0");
  long long n = start;
  double elapsed = 0.0;
  if (start < 0) {
    // the count at time t concentrates near 2/t; keep the proxy well above
    n = std::max(kKingmanEntranceProxy,
                 static_cast<long long>(std::ceil(8.0 / t)));
    elapsed = kingman_entrance_offset(theta, n);
  }
  while (n > 0) {
    double hold = rng.exponential() / kingman_rate(theta, n);
    if (elapsed + hold > t) return n;
    elapsed += hold;
    --n;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Tavare series
// ---------------------------------------------------------------------------

namespace {

struct PlainSum {
  double value = 0.0;
  double max_abs = 0.0;
  int terms = 0;
};

// sum_{m >= max(n,1)} (-1)^{m-n} (2m-1+theta)/(n!(m-n)!) (n+theta)_{(m-1)}
//   e^{-lambda_m t},  computed in doubles with compensation.
PlainSum tavare_core_plain(double theta, double t, long long n) {
  PlainSum out;
  KahanSum sum;
  long long m0 = std::max<long long>(n, 1);
  double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  double lg_ntheta = std::lgamma(static_cast<double>(n) + theta);
  int decreasing = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (long long m = m0; m < 200000; ++m) {
    double md = static_cast<double>(m);
    double nd = static_cast<double>(n);
    double log_term = std::log(2.0 * md - 1.0 + theta) - lg_n1 -
                      std::lgamma(md - nd + 1.0) +
                      std::lgamma(nd + theta + md - 1.0) - lg_ntheta -
                      0.5 * md * (md + theta - 1.0) * t;
    double mag = std::exp(log_term);
    double term = (((m - n) & 1LL) != 0) ? -mag : mag;
    sum.add(term);
    ++out.terms;
    out.max_abs = std::max(out.max_abs, mag);
    if (mag < prev) {
      if (++decreasing >= 2 && mag < 1e-22) break;
    } else {
      decreasing = 0;
    }
    prev = mag;
  }
  out.value = sum.value();
  return out;
}

class Big {
 public:
  explicit Big(mpfr_prec_t p) { mpfr_init2(v_, p); }
  ~Big() { mpfr_clear(v_); }
  Big(const Big&) = delete;
  Big& operator=(const Big&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

struct PreciseSum {
  double value = 0.0;
  double lost_bits = 0.0;
  bool resolved = false;
};

PreciseSum tavare_core_mpfr(double theta, double t, long long n,
                            mpfr_prec_t prec) {
  PreciseSum out;
  long long m0 = std::max<long long>(n, 1);

  Big sum(prec), term(prec), w(prec), q2(prec), tmp(prec), tmp2(prec),
      max_abs(prec);
  mpfr_set_zero(sum.get(), 1);
  mpfr_set_zero(max_abs.get(), 1);

  // q2 = e^{-t}
  mpfr_set_d(q2.get(), -t, MPFR_RNDN);
  mpfr_exp(q2.get(), q2.get(), MPFR_RNDN);

  // first term at m = m0:
  //   (2 m0 - 1 + theta) Gamma(n+theta+m0-1) / (Gamma(n+theta) n! (m0-n)!)
  //   * e^{-m0 (m0+theta-1) t / 2}
  mpfr_set_d(term.get(), 2.0 * static_cast<double>(m0) - 1.0, MPFR_RNDN);
  mpfr_add_d(term.get(), term.get(), theta, MPFR_RNDN);
  mpfr_set_d(tmp.get(), static_cast<double>(n + m0 - 1), MPFR_RNDN);
  mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
  mpfr_gamma(tmp.get(), tmp.get(), MPFR_RNDN);
  mpfr_mul(term.get(), term.get(), tmp.get(), MPFR_RNDN);
  mpfr_set_d(tmp.get(), static_cast<double>(n), MPFR_RNDN);
  mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
  mpfr_gamma(tmp.get(), tmp.get(), MPFR_RNDN);
  mpfr_div(term.get(), term.get(), tmp.get(), MPFR_RNDN);
  mpfr_fac_ui(tmp.get(), static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_div(term.get(), term.get(), tmp.get(), MPFR_RNDN);
  mpfr_fac_ui(tmp.get(), static_cast<unsigned long>(m0 - n), MPFR_RNDN);
  mpfr_div(term.get(), term.get(), tmp.get(), MPFR_RNDN);
  // exponential factor
  mpfr_set_d(tmp.get(), static_cast<double>(m0) - 1.0, MPFR_RNDN);
  mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
  mpfr_mul_d(tmp.get(), tmp.get(), -0.5 * static_cast<double>(m0) * t,
             MPFR_RNDN);
  mpfr_exp(tmp.get(), tmp.get(), MPFR_RNDN);
  mpfr_mul(term.get(), term.get(), tmp.get(), MPFR_RNDN);

  // w = q^{2 m0 + theta} = e^{-(2 m0 + theta) t / 2}
  mpfr_set_d(w.get(), 2.0 * static_cast<double>(m0), MPFR_RNDN);
  mpfr_add_d(w.get(), w.get(), theta, MPFR_RNDN);
  mpfr_mul_d(w.get(), w.get(), -0.5 * t, MPFR_RNDN);
  mpfr_exp(w.get(), w.get(), MPFR_RNDN);

  int decreasing = 0;
  for (long long m = m0; m < 400000; ++m) {
    if (((m - n) & 1LL) != 0) {
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    } else {
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    mpfr_abs(tmp.get(), term.get(), MPFR_RNDN);
    if (mpfr_cmp(tmp.get(), max_abs.get()) > 0) {
      mpfr_set(max_abs.get(), tmp.get(), MPFR_RNDN);
    }
    // stop once terms are negligible at working precision and past the peak
    mpfr_mul_2si(tmp2.get(), max_abs.get(), -(prec + 24), MPFR_RNDN);
    if (mpfr_cmp(tmp.get(), tmp2.get()) < 0) {
      if (++decreasing >= 2) break;
    }

    // term *= (2m+1+theta)/(2m-1+theta) * (n+theta+m-1)/(m+1-n) * w
    double md = static_cast<double>(m);
    mpfr_set_d(tmp.get(), 2.0 * md + 1.0, MPFR_RNDN);
    mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), tmp.get(), MPFR_RNDN);
    mpfr_set_d(tmp.get(), 2.0 * md - 1.0, MPFR_RNDN);
    mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
    mpfr_div(term.get(), term.get(), tmp.get(), MPFR_RNDN);
    mpfr_set_d(tmp.get(), static_cast<double>(n) + md - 1.0, MPFR_RNDN);
    mpfr_add_d(tmp.get(), tmp.get(), theta, MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), tmp.get(), MPFR_RNDN);
    mpfr_div_ui(term.get(), term.get(),
                static_cast<unsigned long>(m + 1 - n), MPFR_RNDN);
    mpfr_mul(term.get(), term.get(), w.get(), MPFR_RNDN);
    mpfr_mul(w.get(), w.get(), q2.get(), MPFR_RNDN);
  }

  if (n == 0) mpfr_add_ui(sum.get(), sum.get(), 1, MPFR_RNDN);

  double result = mpfr_get_d(sum.get(), MPFR_RNDN);
  double max_term = mpfr_get_d(max_abs.get(), MPFR_RNDN);
  double lost = 0.0;
  if (std::isinf(max_term)) {
    lost = std::numeric_limits<double>::infinity();
  } else if (max_term > 0.0 && result != 0.0) {
    lost = std::log2(max_term / std::fabs(result));
  } else if (max_term > 0.0) {
    lost = std::numeric_limits<double>::infinity();
  }
  out.value = result;
  out.lost_bits = lost;
  // resolved when 60 bits of the result survive the cancellation, or when
  // the absolute error is far below pmf resolution (value genuinely ~ 0)
  double abs_err = max_term * std::pow(2.0, 32.0 - static_cast<double>(prec));
  out.resolved =
      (static_cast<double>(prec) - lost) > 60.0 || abs_err < 1e-16;
  return out;
}

}  // namespace

TavareResult tavare_pmf_detail(double theta, double t, long long n) {
  if (!(theta > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("tavare_pmf: requires theta > 0 and t > 0");
  }
  if (n < 0) return {0.0, TavareResult::Method::plain, 0.0};

  PlainSum plain = tavare_core_plain(theta, t, n);
  double value = (n == 0) ? 1.0 + plain.value : plain.value;
  double cancellation =
      plain.max_abs / std::max(std::fabs(value), 1e-300);
  if (plain.max_abs == 0.0) cancellation = 0.0;
  if ((cancellation < 1e3 || plain.max_abs < 1e-12) && value >= -1e-12) {
    TavareResult out;
    out.value = std::clamp(value, 0.0, 1.0);
    out.method = TavareResult::Method::plain;
    out.error_bound = plain.max_abs * 1e-15 * plain.terms + 1e-20;
    return out;
  }

  for (mpfr_prec_t prec : {256, 512, 1024, 2048, 4096}) {
    PreciseSum ps = tavare_core_mpfr(theta, t, n, prec);
    if (ps.resolved) {
      TavareResult out;
      out.value = std::clamp(ps.value, 0.0, 1.0);
      out.method = TavareResult::Method::high_precision;
      out.error_bound = std::max(std::fabs(ps.value), 1e-300) *
                        std::pow(2.0, ps.lost_bits + 32.0 - prec);
      return out;
    }
  }
  throw NumericError(
      "tavare_pmf: alternating series unresolved at 4096 bits; "
      "use the Monte Carlo fallback (simulate_kingman)",
      0.0, 1.0);
}

double tavare_pmf(double theta, double t, long long n) {
  return tavare_pmf_detail(theta, t, n).value;
}

long long TavareTable::sample(RngStream& rng) const {
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t n = 0; n < pmf.size(); ++n) {
    cum += pmf[n];
    if (u < cum) return static_cast<long long>(n);
  }
  return static_cast<long long>(pmf.size());
}

TavareTable tavare_table(double theta, double t, double tail_eps) {
  TavareTable table;
  double cum = 0.0;
  for (long long n = 0; n < 100000; ++n) {
    TavareResult r;
    try {
      r = tavare_pmf_detail(theta, t, n);
    } catch (const NumericError&) {
      table.exact = false;
      break;
    }
    if (r.method == TavareResult::Method::monte_carlo) table.exact = false;
    table.pmf.push_back(r.value);
    cum += r.value;
    if (cum >= 1.0 - tail_eps && n >= 2) break;
  }
  table.tail = std::max(0.0, 1.0 - cum);
  return table;
}

// ---------------------------------------------------------------------------
// Random time change
// ---------------------------------------------------------------------------

namespace {

// integral over (0, t0] of 1 / ((N v 1 + theta - 1) C(-lambda, u)) with N(u)
// replaced by the conditional mean a / C(lambda, u) shifted by `band` times
// its 3-sigma Poisson width.
double early_segment_integral(double a, double lambda, double theta,
                              double t0, double band) {
  auto integrand = [&](double u) {
    double m = a / c_factor(lambda, u);
    double n = m + band * 3.0 * std::sqrt(m);
    n = std::max(n, 0.0);
    double denom = (std::max(n, 1.0) + theta - 1.0) * c_factor(-lambda, u);
    return 1.0 / denom;
  };
  auto q = integrate(integrand, 0.0, t0, 1e-10, 1e-16, 4000);
  if (!q.converged) {
    throw NumericError("early segment quadrature failed", q.value,
                       q.error_estimate);
  }
  return q.value;
}

}  // namespace

EarlySegment early_segment(double a, double lambda, double theta, double t0) {
  EarlySegment e;
  e.t_early = early_segment_integral(a, lambda, theta, t0, 0.0);
  double lo = early_segment_integral(a, lambda, theta, t0, +1.0);
  double hi = early_segment_integral(a, lambda, theta, t0, -1.0);
  e.bound = std::max(hi - e.t_early, e.t_early - lo);
  return e;
}

TimeChangeResult time_change_tau(const DeathPath& path, double theta,
                                 double t_target, const EarlySegment* early) {
  if (!(theta > 0.0)) throw std::invalid_argument("time_change_tau: theta > 0");
  if (t_target < 0.0) {
    throw std::invalid_argument("time_change_tau: t must be >= 0");
  }
  double a = path.a, lambda = path.lambda, t0 = path.start_time;

  TimeChangeResult out;
  if (t_target == 0.0) {
    out.tau = 0.0;
    out.count = path.start_count;
    return out;
  }

  EarlySegment seg =
      early ? *early : early_segment(a, lambda, theta, t0);
  double t_early = seg.t_early;
  out.early_error_bound = seg.bound;

  if (t_target <= t_early) {
    throw std::domain_error(
        "time_change_tau: target falls inside the (0, t0] approximation "
        "zone; use a smaller t0");
  }

  double t_rem = t_target - t_early;
  double s = t0;
  long long n = path.start_count;
  double log_c_s = std::log(c_factor(lambda, s));

  auto piece_rate = [&](long long count) {
    return static_cast<double>(std::max<long long>(count, 1)) + theta - 1.0;
  };
  auto invert_within = [&](long long count) {
    double target_log_c = log_c_s + 0.5 * piece_rate(count) * t_rem;
    // C(lambda, tau) = exp(target_log_c)
    out.tau = c_factor_inverse_time(lambda, std::exp(target_log_c));
    out.count = count;
  };

  for (double e : path.event_times) {
    double log_c_e = std::log(c_factor(lambda, e));
    double piece = 2.0 * (log_c_e - log_c_s) / piece_rate(n);
    if (t_rem <= piece) {
      invert_within(n);
      return out;
    }
    t_rem -= piece;
    s = e;
    log_c_s = log_c_e;
    --n;
  }

  if (path.complete) {
    if (lambda < 0.0) {
      double log_c_inf = std::log(-1.0 / lambda);
      double budget = 2.0 * (log_c_inf - log_c_s) / piece_rate(n);
      if (t_rem >= budget) {
        out.tau = std::numeric_limits<double>::infinity();
        out.count = n;
        out.exhausted = true;
        return out;
      }
    }
    invert_within(n);
    return out;
  }

  // path only known up to its horizon
  double log_c_h = std::log(c_factor(lambda, path.horizon));
  double piece = 2.0 * (log_c_h - log_c_s) / piece_rate(n);
  if (t_rem <= piece) {
    invert_within(n);
    return out;
  }
  throw HorizonExhausted("time_change_tau: path horizon too short");
}

long long death_count_at(double a, double lambda, double t0, double s,
                         RngStream& rng) {
  if (!(t0 > 0.0) || !(s >= t0)) {
    throw std::invalid_argument("death_count_at: need 0 < t0 <= s");
  }
  long long n = rng.poisson(a / c_factor(lambda, t0));
  // work in the hazard scale g = log C(lambda, .), where waiting gaps from
  // count n are Exp(1)/n
  double g = std::log(c_factor(lambda, t0));
  double g_target = std::log(c_factor(lambda, s));
  while (n > 0) {
    g += rng.exponential() / static_cast<double>(n);
    if (g > g_target) break;
    --n;
  }
  return n;
}

// Exact sampler of (tau_t, N(tau_t)) working entirely in the hazard scale:
// the clock piece entered with count n and hazard gap dg consumes
// 2 dg / (n v 1 + theta - 1), so no per-event transcendentals are needed.
TimeChangeResult death_count_time_changed(double a, double lambda,
                                          double theta, double t0,
                                          double t_target, RngStream& rng,
                                          const EarlySegment* early) {
  if (!(theta > 0.0)) {
    throw std::invalid_argument("death_count_time_changed: theta > 0");
  }
  EarlySegment seg = early ? *early : early_segment(a, lambda, theta, t0);

  TimeChangeResult out;
  out.early_error_bound = seg.bound;
  long long n = rng.poisson(a / c_factor(lambda, t0));
  if (t_target == 0.0) {
    out.tau = 0.0;
    out.count = n;
    return out;
  }
  if (t_target <= seg.t_early) {
    throw std::domain_error(
        "death_count_time_changed: target falls inside the (0, t0] "
        "approximation zone; use a smaller t0");
  }
  double t_rem = t_target - seg.t_early;
  double g = std::log(c_factor(lambda, t0));
  bool bounded = lambda < 0.0;
  double g_sup = bounded ? std::log(-1.0 / lambda)
                         : std::numeric_limits<double>::infinity();

  for (;;) {
    double rate = static_cast<double>(std::max<long long>(n, 1)) + theta - 1.0;
    double dg_event = (n > 0)
                          ? rng.exponential() / static_cast<double>(n)
                          : std::numeric_limits<double>::infinity();
    bool frozen = bounded && g + dg_event >= g_sup;
    double dg_piece = frozen ? (g_sup - g) : dg_event;
    double capacity = 2.0 * dg_piece / rate;
    if (!frozen && t_rem <= capacity) {
      out.tau = c_factor_inverse_time(lambda, std::exp(g + 0.5 * rate * t_rem));
      out.count = n;
      return out;
    }
    if (frozen) {
      if (t_rem < capacity) {
        out.tau =
            c_factor_inverse_time(lambda, std::exp(g + 0.5 * rate * t_rem));
        out.count = n;
        return out;
      }
      out.tau = std::numeric_limits<double>::infinity();
      out.count = n;
      out.exhausted = true;
      return out;
    }
    t_rem -= capacity;
    g += dg_event;
    --n;
  }
}

}  // namespace gdp
