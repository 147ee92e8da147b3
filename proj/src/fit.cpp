#include "rsrl/harness/fit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace rsrl::harness {

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [m, regret] = points[static_cast<std::size_t>(i)];
    if (!(m > 0.0) || !(regret > 0.0)) throw std::invalid_argument("fit_exponent: points must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = std::log(m);
    y(i) = std::log(regret);
  }
  const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - X * coef;
  const double sigma2 = resid.squaredNorm() / static_cast<double>(n - 2);
  const double sxx = (X.col(1).array() - X.col(1).mean()).square().sum();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_exponent: M values must not all be equal");
  return {coef(1), coef(0), std::sqrt(sigma2 / sxx)};
}

}  // namespace rsrl::harness
