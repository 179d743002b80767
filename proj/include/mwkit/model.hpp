#pragma once

// Parameters, coordinate charts and vector fields of the rotating-medium
// focus-seeking model
//
//   x' = -w y + v (R - x) / |F - p|,   y' = w x - v y / |F - p|,   F = (R, 0).
//
// Everything past the API boundary works in normalized units (v = R = 1)
// where the family depends on the single parameter omega = w R / v.

#include <array>
#include <cmath>
#include <numbers>

#include "mwkit/errors.hpp"

namespace mwkit {

/// Distance to F below which the cartesian field is treated as undefined.
inline constexpr double kSingularThreshold = 1e-13;

struct Scale {
  double length = 1.0;  ///< original length per normalized length (R)
  double time = 1.0;    ///< original time per normalized time (R / v)
};

/// Parameters in original units. Construction validates the ranges.
class Params {
public:
  Params(double omega, double v, double R) : omega_(omega), v_(v), R_(R) {
    if (!(std::isfinite(omega) && omega >= 0.0))
      throw InvalidParameters("omega must be finite and >= 0");
    if (!(std::isfinite(v) && v > 0.0))
      throw InvalidParameters("v must be finite and > 0");
    if (!(std::isfinite(R) && R > 0.0))
      throw InvalidParameters("R must be finite and > 0");
  }

  double omega() const noexcept { return omega_; }
  double v() const noexcept { return v_; }
  double R() const noexcept { return R_; }

private:
  double omega_;
  double v_;
  double R_;
};

class NormalizedParams {
public:
  explicit NormalizedParams(double omega) : omega_(omega) {
    if (!(std::isfinite(omega) && omega >= 0.0))
      throw InvalidParameters("normalized omega must be finite and >= 0");
  }
  double omega() const noexcept { return omega_; }

private:
  double omega_;
};

struct Normalized {
  NormalizedParams params;
  Scale scale;
};

inline Normalized normalize(const Params& p) {
  return {NormalizedParams(p.omega() * p.R() / p.v()), Scale{p.R(), p.R() / p.v()}};
}

/// Inverse of normalize for a given normalized omega and the original (v, R).
inline Params denormalize(const NormalizedParams& np, double v, double R) {
  return Params(np.omega() * v / R, v, R);
}

struct CartesianState {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const CartesianState&, const CartesianState&) = default;
};

/// Polar chart centered at F: x = 1 - r cos(theta), y = r sin(theta).
/// Negative r is admitted as a formal extension of the chart.
struct PolarState {
  double theta = 0.0;
  double r = 0.0;
  friend bool operator==(const PolarState&, const PolarState&) = default;
};

struct CartesianVelocity {
  double dx = 0.0;
  double dy = 0.0;
};

struct PolarVelocity {
  double dtheta = 0.0;
  double dr = 0.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline constexpr CartesianState kFocus{1.0, 0.0};

inline double distance_to_focus(const CartesianState& s) {
  return std::hypot(1.0 - s.x, s.y);
}

inline CartesianState to_original(const CartesianState& s, const Scale& sc) {
  return {s.x * sc.length, s.y * sc.length};
}

inline CartesianState to_normalized(const CartesianState& s, const Scale& sc) {
  return {s.x / sc.length, s.y / sc.length};
}

inline CartesianVelocity vector_field_cartesian(const NormalizedParams& np,
                                                const CartesianState& s) {
  const double d = distance_to_focus(s);
  if (!(d >= kSingularThreshold)) throw SingularAtFocus();
  const double w = np.omega();
  return {-w * s.y + (1.0 - s.x) / d, w * s.x - s.y / d};
}

/// Field of the polar chart with time rescaled by r (dt = r dtau). Polynomial
/// in r, defined everywhere including r <= 0.
inline PolarVelocity vector_field_polar(const NormalizedParams& np,
                                        const PolarState& s) noexcept {
  const double w = np.omega();
  return {-w * (s.r - std::cos(s.theta)), s.r * (w * std::sin(s.theta) - 1.0)};
}

/// Jacobian of vector_field_polar with rows (theta', r') and columns (theta, r).
inline Mat2 polar_jacobian(const NormalizedParams& np, const PolarState& s) noexcept {
  const double w = np.omega();
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  return {{{-w * sn, -w}, {w * s.r * c, w * sn - 1.0}}};
}

/// Jacobian of vector_field_cartesian: w*K - (I - u u^T)/d with u the unit
/// vector toward F.
inline Mat2 cartesian_jacobian(const NormalizedParams& np, const CartesianState& s) {
  const double d = distance_to_focus(s);
  if (!(d >= kSingularThreshold)) throw SingularAtFocus();
  const double ux = (1.0 - s.x) / d;
  const double uy = -s.y / d;
  const double w = np.omega();
  return {{{-(1.0 - ux * ux) / d, -w + ux * uy / d},
           {w + ux * uy / d, -(1.0 - uy * uy) / d}}};
}

inline PolarState to_polar(const CartesianState& s) {
  const double dx = 1.0 - s.x;
  const double r = std::hypot(dx, s.y);
  if (!(r >= kSingularThreshold)) throw SingularAtFocus();
  return {std::atan2(s.y, dx), r};
}

inline CartesianState to_cartesian(const PolarState& s) noexcept {
  return {1.0 - s.r * std::cos(s.theta), s.r * std::sin(s.theta)};
}

/// Derivative of z = x^2 + y^2 along the polar field (rescaled time). Does not
/// depend on omega.
inline double radial_derivative(const PolarState& s) noexcept {
  return -2.0 * s.r * (s.r - std::cos(s.theta));
}

/// Borders of the vessel G (unit disk) and of the disk C of center (1/2, 0)
/// and radius 1/2, in normalized units.
namespace geometry {

inline double border_G_r(double theta) noexcept { return 2.0 * std::cos(theta); }
inline double border_C_r(double theta) noexcept { return std::cos(theta); }

inline double z(const CartesianState& s) noexcept { return s.x * s.x + s.y * s.y; }

inline bool in_G(const CartesianState& s) noexcept { return z(s) <= 1.0; }

inline bool in_C(const CartesianState& s) noexcept {
  const double dx = s.x - 0.5;
  return dx * dx + s.y * s.y <= 0.25;
}

/// dr/dtheta of the border curves.
inline double border_G_slope(double theta) noexcept { return -2.0 * std::sin(theta); }
inline double border_C_slope(double theta) noexcept { return -std::sin(theta); }

}  // namespace geometry

}  // namespace mwkit
