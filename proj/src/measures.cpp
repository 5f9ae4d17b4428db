#include "gdp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace gdp {

namespace {

void require_descending(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) {
      throw std::invalid_argument(std::string(what) +
                                  ": entries must be descending");
    }
  }
}

}  // namespace

MassPartition::MassPartition(std::vector<double> weights, Closure closure,
                             double truncation_tail, bool already_sorted)
    : weights_(std::move(weights)),
      closure_(closure),
      truncation_tail_(truncation_tail) {
  if (truncation_tail_ < 0.0) {
    throw std::invalid_argument("MassPartition: negative truncation tail");
  }
  if (!already_sorted) {
    std::sort(weights_.begin(), weights_.end(), std::greater<double>());
  } else {
    require_descending(weights_, "MassPartition");
  }
  KahanSum acc;
  for (double w : weights_) {
    if (w < 0.0) throw std::invalid_argument("MassPartition: negative weight");
    acc.add(w);
  }
  weight_sum_ = acc.value();
  double budget = weight_sum_ + truncation_tail_;
  if (closure_ == Closure::simplex) {
    if (std::fabs(budget - 1.0) > 1e-9) {
      throw std::invalid_argument(
          "MassPartition: simplex closure requires weights + tail == 1");
    }
  } else if (budget > 1.0 + 1e-9) {
    throw std::invalid_argument(
        "MassPartition: sub-simplex closure requires weights + tail <= 1");
  }
}

JumpSequence::JumpSequence(std::vector<double> jumps, double tail_mass_bound,
                           bool already_sorted)
    : jumps_(std::move(jumps)), tail_mass_bound_(tail_mass_bound) {
  if (tail_mass_bound_ < 0.0) {
    throw std::invalid_argument("JumpSequence: negative tail bound");
  }
  if (!already_sorted) {
    std::sort(jumps_.begin(), jumps_.end(), std::greater<double>());
  } else {
    require_descending(jumps_, "JumpSequence");
  }
  KahanSum acc;
  for (double x : jumps_) {
    if (!(x > 0.0)) {
      throw std::invalid_argument("JumpSequence: jumps must be positive");
    }
    acc.add(x);
  }
  sum_ = acc.value();
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
  KahanSum acc;
  for (const auto& a : atoms_) {
    if (a.weight < 0.0) {
      throw std::invalid_argument("AtomicMeasure: negative atom weight");
    }
    acc.add(a.weight);
  }
  total_mass_ = acc.value();
}

double AtomicMeasure::integrate(
    const std::function<double(Location)>& g) const {
  KahanSum acc;
  for (const auto& a : atoms_) acc.add(a.weight * g(a.location));
  return acc.value();
}

double AtomicMeasure::integrate(const TestFunction& g) const {
  KahanSum acc;
  for (const auto& a : atoms_) acc.add(a.weight * g(a.location));
  return acc.value();
}

AtomicMeasure AtomicMeasure::merged() const {
  std::map<Location, double> sums;
  for (const auto& a : atoms_) sums[a.location] += a.weight;
  std::vector<Atom> merged;
  merged.reserve(sums.size());
  for (const auto& [loc, w] : sums) merged.push_back({w, loc});
  return AtomicMeasure(std::move(merged));
}

std::vector<double> AtomicMeasure::coordinates(const BaseSpace& space) const {
  std::vector<double> coords(static_cast<std::size_t>(space.size()), 0.0);
  for (const auto& a : atoms_) {
    auto i = static_cast<std::size_t>(a.location);
    if (i >= coords.size() || a.location != std::floor(a.location)) {
      throw std::invalid_argument(
          "coordinates: atom location is not a label of this space");
    }
    coords[i] += a.weight;
  }
  return coords;
}

AtomicMeasure AtomicMeasure::from_coordinates(
    const std::vector<double>& coords) {
  std::vector<Atom> atoms;
  atoms.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    atoms.push_back({coords[i], static_cast<Location>(i)});
  }
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure normalize(const AtomicMeasure& m) {
  if (!(m.total_mass() > 0.0)) {
    throw std::domain_error("cannot normalize null measure");
  }
  std::vector<AtomicMeasure::Atom> atoms = m.atoms();
  double inv = 1.0 / m.total_mass();
  for (auto& a : atoms) a.weight *= inv;
  return AtomicMeasure(std::move(atoms));
}

JumpSequence to_ordered_masses(const AtomicMeasure& m) {
  std::vector<double> jumps;
  jumps.reserve(m.size());
  for (const auto& a : m.atoms()) {
    if (a.weight > 0.0) jumps.push_back(a.weight);
  }
  return JumpSequence(std::move(jumps), 0.0);
}

MassPartition to_partition(const AtomicMeasure& m) {
  if (!(m.total_mass() > 0.0)) {
    throw std::domain_error("to_partition: null measure has no partition");
  }
  std::vector<double> w;
  w.reserve(m.size());
  double inv = 1.0 / m.total_mass();
  for (const auto& a : m.atoms()) {
    if (a.weight > 0.0) w.push_back(a.weight * inv);
  }
  // guard the simplex invariant against rounding in the normalization
  std::sort(w.begin(), w.end(), std::greater<double>());
  KahanSum acc;
  for (double x : w) acc.add(x);
  double correction = acc.value() - 1.0;
  if (w.size() > 0 && std::fabs(correction) > 0.0 &&
      std::fabs(correction) < 1e-12) {
    w[0] -= correction;
  }
  return MassPartition(std::move(w), MassPartition::Closure::simplex, 0.0,
                       /*already_sorted=*/true);
}

AtomicMeasure scale_by_function(const AtomicMeasure& m, const TestFunction& f,
                                ScaleMode mode) {
  if (mode == ScaleMode::multiplicative || mode == ScaleMode::normalized) {
    f.require_b_plus("scale_by_function");
  }
  std::vector<AtomicMeasure::Atom> atoms = m.atoms();
  for (auto& a : atoms) {
    double v = f(a.location);
    a.weight *= (mode == ScaleMode::exponential) ? std::exp(v) : v;
  }
  AtomicMeasure scaled(std::move(atoms));
  if (mode != ScaleMode::normalized) return scaled;
  if (!(m.total_mass() > 0.0)) {
    throw std::domain_error("scale_by_function: cannot normalize null measure");
  }
  return normalize(scaled);
}

}  // namespace gdp
