#include "gdp/ldp.hpp"

#include <cmath>
#include <limits>

#include "gdp/numerics.hpp"

namespace gdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool descending_nonnegative(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) return false;
    if (i > 0 && v[i] > v[i - 1]) return false;
  }
  return true;
}

}  // namespace

RatePoint RatePoint::seq(std::vector<double> x) {
  RatePoint p;
  p.which = Which::sequence;
  p.sequence = std::move(x);
  return p;
}

RatePoint RatePoint::y(double v) {
  RatePoint p;
  p.which = Which::scalar;
  p.scalar = v;
  return p;
}

RatePoint RatePoint::part(std::vector<double> x) {
  RatePoint p;
  p.which = Which::partition;
  p.partition = std::move(x);
  return p;
}

double rate(RateFunction which, const RatePoint& point) {
  switch (which) {
    case RateFunction::I: {
      if (point.which != RatePoint::Which::sequence) {
        throw std::invalid_argument("rate I: expects a sequence point");
      }
      if (!descending_nonnegative(point.sequence)) return kInf;
      KahanSum s;
      for (double x : point.sequence) s.add(x);
      return s.value();
    }
    case RateFunction::I1: {
      if (point.which != RatePoint::Which::scalar) {
        throw std::invalid_argument("rate I1: expects a scalar point");
      }
      double y = point.scalar;
      if (!(y > 0.0)) return kInf;
      return y - 1.0 - std::log(y);
    }
    case RateFunction::I2: {
      if (point.which != RatePoint::Which::partition) {
        throw std::invalid_argument("rate I2: expects a partition point");
      }
      if (!descending_nonnegative(point.partition)) return kInf;
      KahanSum s;
      for (double p : point.partition) s.add(p);
      double total = s.value();
      if (total >= 1.0) return kInf;
      return -std::log1p(-total);
    }
    case RateFunction::I3: {
      if (point.which != RatePoint::Which::partition) {
        throw std::invalid_argument("rate I3: expects a partition point");
      }
      if (!descending_nonnegative(point.partition)) return kInf;
      // finite level n-1 when exactly n leading entries carry all mass 1
      KahanSum s;
      std::size_t positive = 0;
      for (double p : point.partition) {
        if (p > 0.0) ++positive;
        s.add(p);
      }
      if (std::fabs(s.value() - 1.0) > 1e-12 || positive == 0) return kInf;
      return static_cast<double>(positive - 1);
    }
    case RateFunction::I4: {
      if (point.which != RatePoint::Which::scalar) {
        throw std::invalid_argument("rate I4: expects a scalar point");
      }
      if (point.scalar < 0.0) return kInf;
      return point.scalar == 0.0 ? 0.0 : 1.0;
    }
    case RateFunction::I5: {
      // integer-level rate for the raw jump sizes as theta -> 0; it comes
      // out of the joint density of the r largest jumps,
      //   theta^r / (x_1...x_r) * exp(-sum x_i - theta E1(x_r)),
      // whose theta^r prefactor contributes r nats per positive entry
      if (point.which != RatePoint::Which::sequence) {
        throw std::invalid_argument("rate I5: expects a sequence point");
      }
      if (!descending_nonnegative(point.sequence)) return kInf;
      std::size_t positive = 0;
      for (double x : point.sequence) {
        if (x > 0.0) ++positive;
      }
      return static_cast<double>(positive);
    }
  }
  throw std::logic_error("rate: unreachable");
}

ContractionResult contraction_check(const std::vector<double>& x,
                                    double grid_resolution) {
  if (x.empty()) return {0.0, 1.0};
  if (!descending_nonnegative(x)) {
    throw std::invalid_argument("contraction_check: x must be descending >= 0");
  }
  KahanSum s;
  for (double v : x) s.add(v);
  double total = s.value();
  if (total == 0.0) return {0.0, 1.0};
  // g(y) = I1(y) + I2(x/y) = y - 1 - log(y - total), minimized over
  // y > total; unimodal with a unique interior minimum
  auto g = [total](double y) { return y - 1.0 - std::log(y - total); };
  double lo = total * (1.0 + 1e-12) + 1e-300;
  double hi = total + 10.0 + 10.0 * total;
  auto m = golden_section(g, lo, hi, grid_resolution);
  return {m.min_value, m.argmin};
}

double contraction_check_small_theta(const std::vector<double>& x) {
  if (!descending_nonnegative(x)) {
    throw std::invalid_argument("contraction: x must be descending >= 0");
  }
  std::size_t positive = 0;
  KahanSum s;
  for (double v : x) {
    if (v > 0.0) ++positive;
    s.add(v);
  }
  if (positive == 0) return 0.0;  // y = 0 and I3 irrelevant: I4(0) = 0
  // x != 0 forces y = sum x (so that p sums to one over its support) and
  // I4(y) = 1; enumeration over candidate supports larger than `positive`
  // only adds zero-weight entries and cannot change I3
  double y = s.value();
  std::vector<double> p;
  p.reserve(x.size());
  for (double v : x) p.push_back(v / y);
  double best = rate(RateFunction::I3, RatePoint::part(p)) +
                rate(RateFunction::I4, RatePoint::y(y));
  return best;
}

}  // namespace gdp
