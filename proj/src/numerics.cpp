#include "gdp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace gdp {

namespace {

// QUADPACK dqk15 nodes and weights on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double kronrod;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  double fc = f(c);
  double result_g = fc * kWg[3];
  double result_k = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    double x = h * kXgk[j];
    double f1 = f(c - x);
    double f2 = f(c + x);
    result_k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) result_g += kWg[j / 2] * (f1 + f2);
  }
  result_k *= h;
  result_g *= h;
  return {result_k, std::fabs(result_k - result_g)};
}

struct Interval {
  double a, b, value, error;
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, double abs_tol,
                           int max_intervals) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto first = gk15(f, a, b);
  std::deque<Interval> heap = {{a, b, first.kronrod, first.error}};
  for (int iter = 0; iter < max_intervals; ++iter) {
    double total = 0.0, err = 0.0;
    for (const auto& iv : heap) {
      total += iv.value;
      err += iv.error;
    }
    if (err <= std::max(abs_tol, rel_tol * std::fabs(total))) {
      KahanSum acc;
      for (const auto& iv : heap) acc.add(iv.value);
      out.value = acc.value();
      out.error_estimate = err;
      out.converged = true;
      out.intervals = static_cast<int>(heap.size());
      return out;
    }
    // split the interval with the largest error
    auto worst = std::max_element(
        heap.begin(), heap.end(),
        [](const Interval& x, const Interval& y) { return x.error < y.error; });
    Interval iv = *worst;
    heap.erase(worst);
    double mid = 0.5 * (iv.a + iv.b);
    auto left = gk15(f, iv.a, mid);
    auto right = gk15(f, mid, iv.b);
    heap.push_back({iv.a, mid, left.kronrod, left.error});
    heap.push_back({mid, iv.b, right.kronrod, right.error});
  }
  KahanSum acc;
  double err = 0.0;
  for (const auto& iv : heap) {
    acc.add(iv.value);
    err += iv.error;
  }
  out.value = acc.value();
  out.error_estimate = err;
  out.converged = false;
  out.intervals = static_cast<int>(heap.size());
  return out;
}

QuadratureResult integrate_0_inf(const std::function<double(double)>& f,
                                 double rel_tol, double abs_tol,
                                 int max_intervals) {
  auto g = [&f](double t) {
    double om = 1.0 - t;
    double u = t / om;
    return f(u) / (om * om);
  };
  // open endpoints: gk15 never evaluates at interval ends
  return integrate(g, 0.0, 1.0, rel_tol, abs_tol, max_intervals);
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: requires x > 0");
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x + sum (-1)^{k+1} x^k / (k k!)
    constexpr double kEulerGamma = 0.57721566490153286060651209008240;
    double sum = 0.0, term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -x / k;
      double add = -term / k;
      sum += add;
      if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  // continued fraction, modified Lentz
  double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x);
}

namespace {

// series for P(a,x), x < a+1
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), x >= a+1
double gamma_q_cf(double a, double x) {
  double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_p: bad args");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double reg_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_q: bad args");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double k) { return reg_gamma_q(0.5 * k, 0.5 * x); }

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-16 * std::max(std::fabs(sum), 1e-12)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double xa = a[i], xb = b[j];
    if (xa <= xb) ++i;
    if (xb <= xa) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  double ne = na * nb / (na + nb);
  double sr = std::sqrt(ne);
  double lambda = (sr + 0.12 + 0.11 / sr) * d;
  return {d, kolmogorov_sf(lambda)};
}

KsResult ks_one_sample(std::vector<double> a,
                       const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double c = cdf(a[i]);
    d = std::max(d, std::fabs((i + 1) / n - c));
    d = std::max(d, std::fabs(c - i / n));
  }
  double sr = std::sqrt(n);
  double lambda = (sr + 0.12 + 0.11 / sr) * d;
  return {d, kolmogorov_sf(lambda)};
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: requires x > 0");
  double acc = 0.0;
  while (x < 12.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  return acc + inv * (1.0 + 0.5 * inv +
                      inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 / 42.0)));
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double x_rel_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect: endpoints do not bracket a root", lo, hi - lo);
  }
  for (int it = 0; it < max_iter; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= x_rel_tol * std::max(1.0, std::fabs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

MinimizeResult golden_section(const std::function<double(double)>& f,
                              double lo, double hi, double x_tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace gdp
