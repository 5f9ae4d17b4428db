#include "gdp/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <atomic>
#include <mutex>
#include <thread>

#include "gdp/measures.hpp"

namespace gdp {

double normal_quantile_upper(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("normal_quantile_upper: p in (0, 0.5)");
  }
  return bisect(
      [p](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)) - p; }, 0.0,
      40.0, 1e-13, 300);
}

double bonferroni_z(int k) {
  if (k <= 1) return 3.0;
  double alpha_one_sided = 0.5 * std::erfc(3.0 / std::sqrt(2.0));
  return normal_quantile_upper(alpha_one_sided / k);
}

std::string decide(double z, double se_left, double se_right, double left,
                   double right, const DecisionPolicy& policy) {
  double scale_l = std::max(std::fabs(left), policy.scale_floor);
  double scale_r = std::max(std::fabs(right), policy.scale_floor);
  if (se_left > policy.max_rel_se * scale_l ||
      se_right > policy.max_rel_se * scale_r) {
    return "inconclusive";
  }
  return (std::fabs(z) <= policy.z_threshold) ? "pass" : "fail";
}

int worker_threads() {
  if (const char* env = std::getenv("GDP_LAB_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::vector<double>> run_replicates_multi(
    long long n, const RngStream& base, int width,
    const std::function<void(RngStream&, double*)>& fn) {
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(n), std::vector<double>(width, 0.0));
  int threads = std::min<long long>(worker_threads(), std::max<long long>(n, 1));
  if (threads <= 1) {
    for (long long i = 0; i < n; ++i) {
      RngStream rs = base.child(static_cast<std::uint64_t>(i));
      fn(rs, out[static_cast<std::size_t>(i)].data());
    }
    return out;
  }
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  std::atomic<long long> next{0};
  std::mutex err_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        long long i = next.fetch_add(256);
        if (i >= n) return;
        long long hi = std::min(n, i + 256);
        try {
          for (long long j = i; j < hi; ++j) {
            RngStream rs = base.child(static_cast<std::uint64_t>(j));
            fn(rs, out[static_cast<std::size_t>(j)].data());
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::vector<double> run_replicates(
    long long n, const RngStream& base,
    const std::function<double(RngStream&)>& fn) {
  auto rows = run_replicates_multi(
      n, base, 1, [&fn](RngStream& rs, double* out) { *out = fn(rs); });
  std::vector<double> flat(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) flat[i] = rows[i][0];
  return flat;
}

EstimateWithError mean_with_error(const std::vector<double>& values,
                                  const RngStream& base) {
  EstimateWithError e;
  e.replicates = static_cast<long long>(values.size());
  e.seed = base.seed();
  e.stream = base.stream_id();
  if (values.empty()) return e;
  KahanSum s;
  for (double v : values) s.add(v);
  e.value = s.value() / static_cast<double>(values.size());
  if (values.size() >= 2) {
    KahanSum q;
    for (double v : values) q.add((v - e.value) * (v - e.value));
    double var = q.value() / static_cast<double>(values.size() - 1);
    e.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return e;
}

namespace {

struct ColumnStats {
  double mean = 0.0;
  double se = 0.0;
};

ColumnStats column_stats(const std::vector<std::vector<double>>& rows,
                         int col) {
  ColumnStats c;
  auto n = rows.size();
  if (n == 0) return c;
  KahanSum s;
  for (const auto& r : rows) s.add(r[col]);
  c.mean = s.value() / static_cast<double>(n);
  if (n >= 2) {
    KahanSum q;
    for (const auto& r : rows) q.add((r[col] - c.mean) * (r[col] - c.mean));
    c.se = std::sqrt(q.value() / static_cast<double>(n - 1) /
                     static_cast<double>(n));
  }
  return c;
}

double paired_z(const std::vector<std::vector<double>>& rows, int col_l,
                int col_r) {
  auto n = rows.size();
  KahanSum s;
  for (const auto& r : rows) s.add(r[col_l] - r[col_r]);
  double mean = s.value() / static_cast<double>(n);
  KahanSum q;
  for (const auto& r : rows) {
    double d = r[col_l] - r[col_r] - mean;
    q.add(d * d);
  }
  double se = std::sqrt(q.value() / static_cast<double>(n - 1) /
                        static_cast<double>(n));
  if (se == 0.0) return mean == 0.0 ? 0.0 : 1e300;
  return mean / se;
}

}  // namespace

template <typename Value>
std::vector<VerificationReport> check_change_of_measure(
    const std::string& id, const std::function<Value(RngStream&)>& sampler,
    const std::function<Value(const Value&, RngStream&)>& transform,
    const std::function<double(const Value&)>& density,
    const std::vector<NamedFunctional<Value>>& functionals, long long n,
    const RngStream& base, const DecisionPolicy& policy) {
  int k = static_cast<int>(functionals.size());
  auto rows = run_replicates_multi(
      n, base, 2 * k, [&](RngStream& rs, double* out) {
        Value x = sampler(rs);
        Value y = transform(x, rs);
        double rho = density(x);
        for (int j = 0; j < k; ++j) {
          out[j] = functionals[j].fn(y);
          out[k + j] = functionals[j].fn(x) * rho;
        }
      });
  std::vector<VerificationReport> reports;
  for (int j = 0; j < k; ++j) {
    auto l = column_stats(rows, j);
    auto r = column_stats(rows, k + j);
    VerificationReport rep;
    rep.id = id + " [" + functionals[j].name + "]";
    rep.left = l.mean;
    rep.right = r.mean;
    rep.se_left = l.se;
    rep.se_right = r.se;
    rep.z = paired_z(rows, j, k + j);
    rep.seed = base.seed();
    rep.decision = decide(rep.z, l.se, r.se, l.mean, r.mean, policy);
    reports.push_back(std::move(rep));
  }
  return reports;
}

template <typename Value>
std::vector<VerificationReport> check_distribution_equality(
    const std::string& id, const std::function<Value(RngStream&)>& sampler_a,
    const std::function<Value(RngStream&)>& sampler_b,
    const std::vector<NamedFunctional<Value>>& probes, long long n,
    const RngStream& base, const DecisionPolicy& policy) {
  int k = static_cast<int>(probes.size());
  auto rows = run_replicates_multi(
      n, base, 2 * k, [&](RngStream& rs, double* out) {
        RngStream ra = rs.child(1);
        RngStream rb = rs.child(2);
        Value a = sampler_a(ra);
        Value b = sampler_b(rb);
        for (int j = 0; j < k; ++j) {
          out[j] = probes[j].fn(a);
          out[k + j] = probes[j].fn(b);
        }
      });
  std::vector<VerificationReport> reports;
  for (int j = 0; j < k; ++j) {
    auto l = column_stats(rows, j);
    auto r = column_stats(rows, k + j);
    VerificationReport rep;
    rep.id = id + " [" + probes[j].name + "]";
    rep.left = l.mean;
    rep.right = r.mean;
    rep.se_left = l.se;
    rep.se_right = r.se;
    double denom = std::sqrt(l.se * l.se + r.se * r.se);
    rep.z = (denom == 0.0) ? (l.mean == r.mean ? 0.0 : 1e300)
                           : (l.mean - r.mean) / denom;
    rep.seed = base.seed();
    rep.decision = decide(rep.z, l.se, r.se, l.mean, r.mean, policy);
    reports.push_back(std::move(rep));
  }
  return reports;
}

template <typename Value>
VerificationReport check_independence(
    const std::string& id, const std::function<Value(RngStream&)>& sampler,
    const std::function<double(const Value&)>& stat_a,
    const std::function<double(const Value&)>& stat_b, long long n,
    const RngStream& base, const DecisionPolicy& policy) {
  auto rows = run_replicates_multi(
      n, base, 2, [&](RngStream& rs, double* out) {
        Value x = sampler(rs);
        out[0] = stat_a(x);
        out[1] = stat_b(x);
      });
  auto corr = [&rows](bool squared) {
    auto n_rows = static_cast<double>(rows.size());
    double ma = 0.0, mb = 0.0;
    for (const auto& r : rows) {
      ma += squared ? r[0] * r[0] : r[0];
      mb += squared ? r[1] * r[1] : r[1];
    }
    ma /= n_rows;
    mb /= n_rows;
    double cab = 0.0, caa = 0.0, cbb = 0.0;
    for (const auto& r : rows) {
      double da = (squared ? r[0] * r[0] : r[0]) - ma;
      double db = (squared ? r[1] * r[1] : r[1]) - mb;
      cab += da * db;
      caa += da * da;
      cbb += db * db;
    }
    if (caa == 0.0 || cbb == 0.0) return 1.0;  // degenerate: flag as failure
    return cab / std::sqrt(caa * cbb);
  };
  double r1 = corr(false);
  double r2 = corr(true);
  double se = 1.0 / std::sqrt(static_cast<double>(n));
  VerificationReport rep;
  rep.id = id;
  rep.left = r1;
  rep.right = r2;
  rep.se_left = se;
  rep.se_right = se;
  rep.z = std::max(std::fabs(r1), std::fabs(r2)) / se;
  rep.seed = base.seed();
  DecisionPolicy p = policy;
  p.scale_floor = std::max(p.scale_floor, 1.0);  // correlations live on [-1,1]
  rep.decision = decide(rep.z, se, se, r1, r2, p);
  return rep;
}

template <typename Value>
std::vector<VerificationReport> check_detailed_balance(
    const std::string& id,
    const std::function<Value(RngStream&)>& stationary_sampler,
    const std::function<Value(const Value&, RngStream&)>& transition_sampler,
    const std::vector<std::pair<NamedFunctional<Value>, NamedFunctional<Value>>>&
        functional_pairs,
    long long n, const RngStream& base, const DecisionPolicy& policy) {
  int k = static_cast<int>(functional_pairs.size());
  auto rows = run_replicates_multi(
      n, base, 2 * k, [&](RngStream& rs, double* out) {
        Value x0 = stationary_sampler(rs);
        Value x1 = transition_sampler(x0, rs);
        for (int j = 0; j < k; ++j) {
          const auto& [f, g] = functional_pairs[j];
          out[j] = f.fn(x0) * g.fn(x1);
          out[k + j] = g.fn(x0) * f.fn(x1);
        }
      });
  std::vector<VerificationReport> reports;
  for (int j = 0; j < k; ++j) {
    auto l = column_stats(rows, j);
    auto r = column_stats(rows, k + j);
    VerificationReport rep;
    rep.id = id + " [" + functional_pairs[j].first.name + "," +
             functional_pairs[j].second.name + "]";
    rep.left = l.mean;
    rep.right = r.mean;
    rep.se_left = l.se;
    rep.se_right = r.se;
    rep.z = paired_z(rows, j, k + j);
    rep.seed = base.seed();
    rep.decision = decide(rep.z, l.se, r.se, l.mean, r.mean, policy);
    reports.push_back(std::move(rep));
  }
  return reports;
}

VerificationReport check_pmf_fit(const std::string& id,
                                 const std::vector<long long>& samples,
                                 const std::function<double(long long)>& pmf,
                                 long long support_cap, const RngStream& base) {
  auto n = static_cast<double>(samples.size());
  std::vector<double> expected;
  double tail = 1.0;
  for (long long k = 0; k < support_cap; ++k) {
    double p = pmf(k);
    expected.push_back(p);
    tail -= p;
  }
  tail = std::max(tail, 0.0);
  expected.push_back(tail);  // pooled tail bin

  std::vector<double> observed(expected.size(), 0.0);
  for (long long s : samples) {
    auto bin = static_cast<std::size_t>(
        std::clamp<long long>(s, 0, support_cap));
    observed[bin] += 1.0;
  }

  // total variation over the unpooled support
  double tv = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    tv += std::fabs(observed[k] / n - expected[k]);
  }
  tv *= 0.5;

  // pool adjacent bins (from the right) until every expected count >= 5;
  // an undersized leftmost pool merges into its neighbor
  std::vector<double> exp_pooled, obs_pooled;
  double acc_e = 0.0, acc_o = 0.0;
  for (std::size_t k = expected.size(); k-- > 0;) {
    acc_e += expected[k] * n;
    acc_o += observed[k];
    if (acc_e >= 5.0 || k == 0) {
      exp_pooled.push_back(acc_e);
      obs_pooled.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  if (exp_pooled.size() >= 2 && exp_pooled.back() < 5.0) {
    exp_pooled[exp_pooled.size() - 2] += exp_pooled.back();
    obs_pooled[obs_pooled.size() - 2] += obs_pooled.back();
    exp_pooled.pop_back();
    obs_pooled.pop_back();
  }
  VerificationReport rep;
  rep.id = id;
  rep.seed = base.seed();
  if (exp_pooled.size() < 2) {
    rep.decision = "inconclusive";
    rep.left = tv;
    return rep;
  }
  double chi2 = 0.0;
  for (std::size_t k = 0; k < exp_pooled.size(); ++k) {
    if (exp_pooled[k] <= 0.0) continue;
    double d = obs_pooled[k] - exp_pooled[k];
    chi2 += d * d / exp_pooled[k];
  }
  double p_value =
      chi_square_sf(chi2, static_cast<double>(exp_pooled.size() - 1));
  rep.left = tv;
  rep.right = p_value;
  rep.se_left = 0.5 / std::sqrt(n);  // rough TV noise scale, informational
  rep.se_right = 0.0;
  rep.z = chi2;
  if (rep.decision.empty()) {
    rep.decision = (p_value > 0.01 && tv < 0.01) ? "pass" : "fail";
  }
  return rep;
}

std::string reports_to_json(const std::vector<VerificationReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json o;
    o["id"] = r.id;
    o["left"] = r.left;
    o["right"] = r.right;
    o["se_left"] = r.se_left;
    o["se_right"] = r.se_right;
    o["z"] = r.z;
    o["decision"] = r.decision;
    o["seed"] = r.seed;
    o["config"] = r.config;
    o["expect_fail"] = r.expect_fail;
    arr.push_back(std::move(o));
  }
  return arr.dump(2);
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  std::string out =
      "id,left,right,se_left,se_right,z,decision,seed,expect_fail,config\n";
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g", r.left,
                  r.right, r.se_left, r.se_right, r.z);
    std::string esc_id = r.id;
    std::replace(esc_id.begin(), esc_id.end(), ',', ';');
    std::string esc_cfg = r.config;
    std::replace(esc_cfg.begin(), esc_cfg.end(), ',', ';');
    out += "\"" + esc_id + "\"," + buf + "," + r.decision + "," +
           std::to_string(r.seed) + "," + (r.expect_fail ? "1" : "0") + ",\"" +
           esc_cfg + "\"\n";
  }
  return out;
}

// explicit instantiations for the value kinds the suites use
#define GDP_INSTANTIATE_CHECKS(T)                                           \
  template std::vector<VerificationReport> check_change_of_measure<T>(      \
      const std::string&, const std::function<T(RngStream&)>&,              \
      const std::function<T(const T&, RngStream&)>&,                        \
      const std::function<double(const T&)>&,                               \
      const std::vector<NamedFunctional<T>>&, long long, const RngStream&,  \
      const DecisionPolicy&);                                               \
  template std::vector<VerificationReport> check_distribution_equality<T>(  \
      const std::string&, const std::function<T(RngStream&)>&,              \
      const std::function<T(RngStream&)>&,                                  \
      const std::vector<NamedFunctional<T>>&, long long, const RngStream&,  \
      const DecisionPolicy&);                                               \
  template VerificationReport check_independence<T>(                        \
      const std::string&, const std::function<T(RngStream&)>&,              \
      const std::function<double(const T&)>&,                               \
      const std::function<double(const T&)>&, long long, const RngStream&,  \
      const DecisionPolicy&);                                               \
  template std::vector<VerificationReport> check_detailed_balance<T>(       \
      const std::string&, const std::function<T(RngStream&)>&,              \
      const std::function<T(const T&, RngStream&)>&,                        \
      const std::vector<                                                    \
          std::pair<NamedFunctional<T>, NamedFunctional<T>>>&,              \
      long long, const RngStream&, const DecisionPolicy&);

GDP_INSTANTIATE_CHECKS(double)
GDP_INSTANTIATE_CHECKS(AtomicMeasure)
GDP_INSTANTIATE_CHECKS(MassPartition)
GDP_INSTANTIATE_CHECKS(JumpSequence)

#undef GDP_INSTANTIATE_CHECKS

}  // namespace gdp
