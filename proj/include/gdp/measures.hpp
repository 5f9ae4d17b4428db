#pragma once

#include <utility>
#include <vector>

#include "gdp/base_space.hpp"

namespace gdp {

// Point of the (truncated) infinite simplex. `weights` are descending and
// nonnegative; `truncation_tail` is the unrepresented residual mass. For
// simplex closure, weights + tail account for total mass 1; for sub-simplex
// closure the weights sum to at most 1.
class MassPartition {
 public:
  enum class Closure { simplex, sub_simplex };

  MassPartition(std::vector<double> weights, Closure closure,
                double truncation_tail, bool already_sorted = false);

  const std::vector<double>& weights() const { return weights_; }
  Closure closure() const { return closure_; }
  double truncation_tail() const { return truncation_tail_; }
  double weight_sum() const { return weight_sum_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
  Closure closure_;
  double truncation_tail_;
  double weight_sum_;
};

// Descending positive reals with finite sum; the jump sizes of a subordinator
// truncated to finitely many atoms. `tail_mass_bound` bounds the total mass
// of the omitted jumps.
class JumpSequence {
 public:
  JumpSequence(std::vector<double> jumps, double tail_mass_bound,
               bool already_sorted = false);

  const std::vector<double>& jumps() const { return jumps_; }
  double tail_mass_bound() const { return tail_mass_bound_; }
  double sum() const { return sum_; }
  std::size_t size() const { return jumps_.size(); }
  double operator[](std::size_t i) const { return jumps_[i]; }

 private:
  std::vector<double> jumps_;
  double tail_mass_bound_;
  double sum_;
};

// Finite atomic measure on a base space: a list of (weight, location) atoms.
class AtomicMeasure {
 public:
  struct Atom {
    double weight;
    Location location;
  };

  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_mass() const { return total_mass_; }
  std::size_t size() const { return atoms_.size(); }

  // <mu, g>
  double integrate(const std::function<double(Location)>& g) const;
  double integrate(const TestFunction& g) const;

  // Atoms at exactly equal locations combined (used on finite-discrete
  // spaces, where distinct draws collide by construction).
  AtomicMeasure merged() const;

  // Coordinate vector (mass per label) on a finite-discrete space.
  std::vector<double> coordinates(const BaseSpace& space) const;
  static AtomicMeasure from_coordinates(const std::vector<double>& coords);

 private:
  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
};

// mu / mu(S); rejects the null measure.
AtomicMeasure normalize(const AtomicMeasure& m);

// The map J: forget locations, keep descending weights.
JumpSequence to_ordered_masses(const AtomicMeasure& m);

// The map T: normalize and sort; a point of the simplex with zero tail.
MassPartition to_partition(const AtomicMeasure& m);

enum class ScaleMode {
  multiplicative,  // T_f:  mu(ds) -> f(s) mu(ds)
  exponential,     // S_f:  mu(ds) -> e^{f(s)} mu(ds)
  normalized       // T-bar_f: nu(ds) -> f(s) nu(ds) / <nu, f>
};

AtomicMeasure scale_by_function(const AtomicMeasure& m, const TestFunction& f,
                                ScaleMode mode);

}  // namespace gdp
