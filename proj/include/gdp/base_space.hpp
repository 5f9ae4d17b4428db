#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gdp/numerics.hpp"
#include "gdp/rng.hpp"

namespace gdp {

// A point of the base space S. For the unit interval this is the point
// itself; for a finite-discrete space it is the index of the label.
using Location = double;

// Compact base space S with reference probability nu0. Two concrete kinds:
// the unit interval with uniform nu0, and a finite label set with an
// explicit probability vector. Provides the location-sampler and
// integrator contracts that samplers and densities rely on.
class BaseSpace {
 public:
  enum class Kind { unit_interval_uniform, finite_discrete };

  static BaseSpace unit_interval();
  static BaseSpace finite_discrete(std::vector<double> base_probs);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite_discrete; }
  int size() const;  // finite-discrete only
  double base_prob(int i) const;
  const std::vector<double>& base_probs() const;

  Location sample_location(RngStream& rng) const;

  // <nu0, g>; exact sum for finite-discrete, adaptive quadrature otherwise.
  double integrate(const std::function<double(Location)>& g,
                   double rel_tol = 1e-12) const;

 private:
  BaseSpace(Kind kind, std::vector<double> probs)
      : kind_(kind), probs_(std::move(probs)) {}

  Kind kind_;
  std::vector<double> probs_;  // empty for unit interval
};

// Measurable handle on S with declared bounds. The strictly-positive flag
// marks membership in B+(S) (positive with strictly positive lower bound),
// which the multiplicative transforms require.
class TestFunction {
 public:
  TestFunction(std::function<double(Location)> fn, double lower, double upper);

  static TestFunction constant(double c);
  // values[i] is the value at location i of a finite-discrete space
  static TestFunction from_values(std::vector<double> values);

  double operator()(Location s) const { return fn_(s); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool strictly_positive() const { return lower_ > 0.0; }

  void require_b_plus(const char* where) const {
    if (!strictly_positive()) {
      throw std::invalid_argument(std::string(where) +
                                  ": test function must lie in B+(S) "
                                  "(strictly positive lower bound)");
    }
  }

 private:
  std::function<double(Location)> fn_;
  double lower_;
  double upper_;
};

}  // namespace gdp
