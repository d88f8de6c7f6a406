#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace pu {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Predictions are kept strictly inside (0,1) so that logarithmic terms
/// stay finite. Everything downstream assumes this clamp has been applied.
inline constexpr double kEpsClamp = 1e-7;

inline double clamp_unit(double p) {
    return std::min(1.0 - kEpsClamp, std::max(kEpsClamp, p));
}

/// Logistic squashing of a raw score into a posterior estimate.
inline double sigmoid(double t) {
    return 1.0 / (1.0 + std::exp(-t));
}

/// Natural log with the argument floored at the clamp epsilon.
inline double log_clamped(double x) {
    return std::log(std::max(x, kEpsClamp));
}

} // namespace pu
