#pragma once

#include <vector>

#include "gdp/measures.hpp"

namespace gdp {

// Point in the domain of one of the rate functions: a descending summable
// sequence, a nonnegative scalar, or a sub-simplex partition.
struct RatePoint {
  enum class Which { sequence, scalar, partition };
  Which which;
  std::vector<double> sequence;  // descending, nonnegative
  double scalar = 0.0;
  std::vector<double> partition;  // descending, sum <= 1

  static RatePoint seq(std::vector<double> x);
  static RatePoint y(double v);
  static RatePoint part(std::vector<double> p);
};

enum class RateFunction { I, I1, I2, I3, I4, I5 };

// Rate-function evaluation; values in [0, +inf].
double rate(RateFunction which, const RatePoint& point);

// Verifies the contraction identity inf{I1(y) + I2(p) : x_i = y p_i} = I(x)
// by 1-D minimization of g(y) = y - 1 - log(y - sum x).
struct ContractionResult {
  double infimum;
  double argmin_y;
};
ContractionResult contraction_check(const std::vector<double>& x,
                                    double grid_resolution = 1e-10);

// Discrete contraction for the theta -> 0 rates: inf{I3(p) + I4(y)} over
// y p_i = x_i, by finite enumeration.
double contraction_check_small_theta(const std::vector<double>& x);

}  // namespace gdp
