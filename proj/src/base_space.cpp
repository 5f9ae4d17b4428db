#include "gdp/base_space.hpp"

#include <cmath>
#include <numeric>

namespace gdp {

BaseSpace BaseSpace::unit_interval() {
  return BaseSpace(Kind::unit_interval_uniform, {});
}

BaseSpace BaseSpace::finite_discrete(std::vector<double> base_probs) {
  if (base_probs.empty()) {
    throw std::invalid_argument("finite_discrete: needs at least one location");
  }
  double sum = 0.0;
  for (double p : base_probs) {
    if (p < 0.0) throw std::invalid_argument("finite_discrete: negative mass");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("finite_discrete: probabilities must sum to 1");
  }
  return BaseSpace(Kind::finite_discrete, std::move(base_probs));
}

int BaseSpace::size() const {
  if (!is_finite()) {
    throw std::logic_error("size: only finite-discrete spaces have a size");
  }
  return static_cast<int>(probs_.size());
}

double BaseSpace::base_prob(int i) const {
  if (!is_finite()) throw std::logic_error("base_prob: finite-discrete only");
  return probs_.at(static_cast<std::size_t>(i));
}

const std::vector<double>& BaseSpace::base_probs() const {
  if (!is_finite()) throw std::logic_error("base_probs: finite-discrete only");
  return probs_;
}

Location BaseSpace::sample_location(RngStream& rng) const {
  if (kind_ == Kind::unit_interval_uniform) return rng.uniform();
  double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs_.size(); ++i) {
    cum += probs_[i];
    if (u < cum) return static_cast<Location>(i);
  }
  return static_cast<Location>(probs_.size() - 1);
}

double BaseSpace::integrate(const std::function<double(Location)>& g,
                            double rel_tol) const {
  if (kind_ == Kind::finite_discrete) {
    KahanSum acc;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      acc.add(probs_[i] * g(static_cast<Location>(i)));
    }
    return acc.value();
  }
  auto q = gdp::integrate(g, 0.0, 1.0, rel_tol, 1e-15, 4000);
  if (!q.converged) {
    throw NumericError("BaseSpace::integrate: quadrature did not converge",
                       q.value, q.error_estimate);
  }
  return q.value;
}

TestFunction::TestFunction(std::function<double(Location)> fn, double lower,
                           double upper)
    : fn_(std::move(fn)), lower_(lower), upper_(upper) {
  if (!(lower <= upper)) {
    throw std::invalid_argument("TestFunction: lower bound exceeds upper");
  }
}

TestFunction TestFunction::constant(double c) {
  return TestFunction([c](Location) { return c; }, c, c);
}

TestFunction TestFunction::from_values(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("TestFunction::from_values: empty");
  }
  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto fn = [vals = std::move(values)](Location s) {
    auto i = static_cast<std::size_t>(s);
    if (i >= vals.size()) {
      throw std::out_of_range("TestFunction: location outside label set");
    }
    return vals[i];
  };
  return TestFunction(std::move(fn), lo, hi);
}

}  // namespace gdp
