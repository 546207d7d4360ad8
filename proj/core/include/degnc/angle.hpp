#ifndef DEGNC_ANGLE_HPP
#define DEGNC_ANGLE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace degnc {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into the half-open interval (-pi, +pi].
/// The result differs from the input by an exact integer multiple of 2*pi.
inline double canonicalize_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("canonicalize_angle: non-finite input");
    }
    double r = std::fmod(a + kPi, kTwoPi);
    if (r <= 0.0) {
        r += kTwoPi;
    }
    return r - kPi;
}

/// Planar rotation matrix [[cos, -sin], [sin, cos]] from a heading angle.
inline Eigen::Matrix2d rotation_from_angle(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("rotation_from_angle: non-finite input");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d R;
    R << c, -s, s, c;
    return R;
}

inline double degrees(double radians) { return radians * 180.0 / kPi; }

}  // namespace degnc

#endif
