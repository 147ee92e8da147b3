#pragma once

#include <utility>
#include <vector>

namespace rsrl::harness {

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
};

/// Least-squares slope of log(regret) against log(M). Needs >= 3 points, all positive.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace rsrl::harness
