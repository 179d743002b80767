#pragma once

// Equilibria of the polar field, their linearization and classification, and
// the one-parameter bifurcation scan.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "mwkit/errors.hpp"
#include "mwkit/model.hpp"

namespace mwkit {

inline constexpr double kTolBif = 1e-9;
inline constexpr double kPitchforkOmega = 1.0;
/// Node/focus boundary of P: zero of the discriminant 5 - 4 w^2.
inline const double kNodeFocusOmega = std::sqrt(5.0) / 2.0;

enum class EquilibriumClass {
  AttractingNode,
  AttractingFocus,
  Saddle,
  HyperbolicNodeOfChart,
  DegeneratePitchfork,
  DegenerateNodeFocus,
};

inline bool is_degenerate(EquilibriumClass c) noexcept {
  return c == EquilibriumClass::DegeneratePitchfork ||
         c == EquilibriumClass::DegenerateNodeFocus;
}

inline std::string_view to_string(EquilibriumClass c) noexcept {
  switch (c) {
    case EquilibriumClass::AttractingNode: return "AttractingNode";
    case EquilibriumClass::AttractingFocus: return "AttractingFocus";
    case EquilibriumClass::Saddle: return "Saddle";
    case EquilibriumClass::HyperbolicNodeOfChart: return "HyperbolicNodeOfChart";
    case EquilibriumClass::DegeneratePitchfork: return "DegenerateTransition(PitchforkAtOmega1)";
    case EquilibriumClass::DegenerateNodeFocus: return "DegenerateTransition(NodeFocusBoundary)";
  }
  return "?";
}

/// Unit direction in the (theta, r) chart.
struct ChartDirection {
  double dtheta = 0.0;
  double dr = 0.0;
  double slope() const noexcept { return dr / dtheta; }
};

struct Linearization {
  double sigma = 0.0;         ///< divergence (closed form)
  double delta = 0.0;         ///< Jacobian determinant (closed form)
  double discriminant = 0.0;  ///< sigma^2 - 4 delta
  /// Eigenvalues of the numerically assembled Jacobian, ascending real part.
  std::array<std::complex<double>, 2> eigenvalues{};
  /// Matching unit eigenvectors; present only for a real spectrum.
  std::optional<std::array<ChartDirection, 2>> eigenvectors;
};

struct EquilibriumInfo {
  PolarState position_polar;
  std::optional<CartesianState> position_cartesian;  ///< absent for r < 0
  Linearization lin;
  EquilibriumClass cls = EquilibriumClass::Saddle;
};

namespace detail {

inline std::array<std::complex<double>, 2> eigenvalues_2x2(const Mat2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = tr * tr - 4.0 * det;
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {{{0.5 * tr, -im}, {0.5 * tr, im}}};
  }
  // Cancellation-free root pair of l^2 - tr l + det.
  const double q = 0.5 * (tr + std::copysign(std::sqrt(disc), tr));
  double a = q;
  double b = q != 0.0 ? det / q : 0.0;
  if (a > b) std::swap(a, b);
  return {{{a, 0.0}, {b, 0.0}}};
}

inline ChartDirection eigenvector_2x2(const Mat2& m, double lambda) {
  // Rows of (m - lambda I) are orthogonal to the eigenvector; use the larger one.
  const double a0 = m[0][0] - lambda, b0 = m[0][1];
  const double a1 = m[1][0], b1 = m[1][1] - lambda;
  double vx, vy;
  if (std::hypot(a0, b0) >= std::hypot(a1, b1)) {
    vx = -b0;
    vy = a0;
  } else {
    vx = -b1;
    vy = a1;
  }
  const double n = std::hypot(vx, vy);
  if (n == 0.0) return {1.0, 0.0};  // m == lambda I: every direction works
  if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
    vx = -vx;
    vy = -vy;
  }
  return {vx / n, vy / n};
}

inline double wrap_angle(double theta) noexcept {
  double t = std::remainder(theta, 2.0 * std::numbers::pi);
  if (t <= -std::numbers::pi) t += 2.0 * std::numbers::pi;
  return t;
}

inline EquilibriumClass classify_spectrum(const Linearization& lin) {
  if (lin.delta < 0.0) return EquilibriumClass::Saddle;
  if (lin.sigma < 0.0 && lin.delta > 0.0)
    return lin.discriminant >= 0.0 ? EquilibriumClass::AttractingNode
                                   : EquilibriumClass::AttractingFocus;
  throw DegenerateTransition("non-hyperbolic or repelling spectrum");
}

}  // namespace detail

inline Linearization linearize_polar(const NormalizedParams& np, const PolarState& s) {
  const double w = np.omega();
  const double sn = std::sin(s.theta);
  const double c = std::cos(s.theta);
  Linearization lin;
  lin.sigma = -1.0;
  lin.delta = -w * w + w * sn + w * w * s.r * c + w * w * c * c;
  lin.discriminant = lin.sigma * lin.sigma - 4.0 * lin.delta;
  const Mat2 jac = polar_jacobian(np, s);
  lin.eigenvalues = detail::eigenvalues_2x2(jac);
  if (lin.eigenvalues[0].imag() == 0.0) {
    lin.eigenvectors = std::array<ChartDirection, 2>{
        detail::eigenvector_2x2(jac, lin.eigenvalues[0].real()),
        detail::eigenvector_2x2(jac, lin.eigenvalues[1].real())};
  }
  return lin;
}

/// Polar position of P: sin(theta_P) = 1/w, r_P = cos(theta_P). Requires w > 1.
inline PolarState interior_equilibrium_polar(double omega) {
  return {std::asin(1.0 / omega), std::sqrt((omega - 1.0) * (omega + 1.0)) / omega};
}

/// Attracting equilibrium P, present only for w > 1.
inline std::optional<EquilibriumInfo> interior_equilibrium(const NormalizedParams& np) {
  const double w = np.omega();
  if (!(w > 1.0)) return std::nullopt;
  EquilibriumInfo info;
  info.position_polar = interior_equilibrium_polar(w);
  info.position_cartesian = CartesianState{1.0 / (w * w), info.position_polar.r / w};
  info.lin = linearize_polar(np, info.position_polar);
  if (std::abs(w - kPitchforkOmega) <= kTolBif)
    info.cls = EquilibriumClass::DegeneratePitchfork;
  else if (std::abs(w - kNodeFocusOmega) <= kTolBif)
    info.cls = EquilibriumClass::DegenerateNodeFocus;
  else
    info.cls = detail::classify_spectrum(info.lin);
  return info;
}

/// The r < 0 partner of P born in the pitchfork; invisible in the plane.
inline std::optional<EquilibriumInfo> mirror_equilibrium(const NormalizedParams& np) {
  auto p = interior_equilibrium(np);
  if (!p) return std::nullopt;
  EquilibriumInfo info;
  info.position_polar = {std::numbers::pi - p->position_polar.theta, -p->position_polar.r};
  info.lin = linearize_polar(np, info.position_polar);
  info.cls = p->cls;
  return info;
}

inline EquilibriumClass classify_P(const NormalizedParams& np) {
  auto p = interior_equilibrium(np);
  if (!p) throw NoInteriorEquilibrium(np.omega());
  return p->cls;
}

/// S- = (-pi/2, 0) and S+ = (pi/2, 0), in that order. At w within kTolBif of
/// 1 the S+ entry carries DegeneratePitchfork.
inline std::vector<EquilibriumInfo> saddle_points(const NormalizedParams& np) {
  const double w = np.omega();
  if (!(w > 0.0)) throw InvalidParameters("saddle_points requires omega > 0");
  std::vector<EquilibriumInfo> out(2);
  out[0].position_polar = {-std::numbers::pi / 2.0, 0.0};
  out[1].position_polar = {std::numbers::pi / 2.0, 0.0};
  for (auto& e : out) {
    e.position_cartesian = kFocus;
    e.lin = linearize_polar(np, e.position_polar);
  }
  out[0].cls = EquilibriumClass::Saddle;
  if (std::abs(w - kPitchforkOmega) <= kTolBif)
    out[1].cls = EquilibriumClass::DegeneratePitchfork;
  else
    out[1].cls = w < 1.0 ? EquilibriumClass::HyperbolicNodeOfChart : EquilibriumClass::Saddle;
  return out;
}

/// Eigendirection of a saddle's eigenvalue with the given sign.
inline ChartDirection saddle_direction(const EquilibriumInfo& s, bool unstable) {
  if (!s.lin.eigenvectors) throw DegenerateTransition("complex spectrum at chart saddle");
  return unstable ? (*s.lin.eigenvectors)[1] : (*s.lin.eigenvectors)[0];
}

struct SlopeData {
  double unstable_at_s_plus;  ///< W^u(F) branch leaving S+
  double stable_at_s_minus;   ///< W^s(F) branch entering S-
  double border_G_at_s_minus;
  double border_G_at_s_plus;
  double border_C_at_s_minus;
  double border_C_at_s_plus;
};

inline SlopeData separatrix_and_border_slopes(const NormalizedParams& np) {
  const double w = np.omega();
  if (!(w > 1.0)) throw NoSaddle(w);
  const auto saddles = saddle_points(np);
  constexpr double half_pi = std::numbers::pi / 2.0;
  return {saddle_direction(saddles[1], true).slope(),
          saddle_direction(saddles[0], false).slope(),
          geometry::border_G_slope(-half_pi),
          geometry::border_G_slope(half_pi),
          geometry::border_C_slope(-half_pi),
          geometry::border_C_slope(half_pi)};
}

/// Closed-form equilibria of the polar field in theta in (-pi, pi]: S-, S+ and,
/// for w > 1, P and its r < 0 mirror.
inline std::vector<PolarState> closed_form_census(const NormalizedParams& np) {
  std::vector<PolarState> out{{-std::numbers::pi / 2.0, 0.0}, {std::numbers::pi / 2.0, 0.0}};
  if (auto p = interior_equilibrium(np)) {
    out.push_back(p->position_polar);
    out.push_back(mirror_equilibrium(np)->position_polar);
  }
  return out;
}

/// Newton iteration on the polar field. Returns nullopt when it fails to
/// converge or the Jacobian is singular along the way.
inline std::optional<PolarState> newton_refine_polar(const NormalizedParams& np,
                                                     PolarState s, int max_iter = 60,
                                                     double tol = 1e-14) {
  for (int i = 0; i < max_iter; ++i) {
    const PolarVelocity f = vector_field_polar(np, s);
    const Mat2 j = polar_jacobian(np, s);
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dth = (j[1][1] * f.dtheta - j[0][1] * f.dr) / det;
    const double dr = (-j[1][0] * f.dtheta + j[0][0] * f.dr) / det;
    s.theta -= dth;
    s.r -= dr;
    if (!std::isfinite(s.theta) || !std::isfinite(s.r)) return std::nullopt;
    if (std::hypot(dth, dr) <= tol * (1.0 + std::abs(s.theta) + std::abs(s.r))) {
      const PolarVelocity res = vector_field_polar(np, s);
      if (std::hypot(res.dtheta, res.dr) <= 1e-12) return s;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

/// Brute-force equilibrium search: Newton from every node of an n_theta x n_r
/// grid over theta in (-pi, pi], r in [-r_max, r_max]; roots are deduplicated.
inline std::vector<PolarState> numeric_census(const NormalizedParams& np, int n_theta = 64,
                                              int n_r = 32, double r_max = 2.0,
                                              double dedup_tol = 1e-7) {
  std::vector<PolarState> roots;
  for (int i = 0; i < n_theta; ++i) {
    for (int k = 0; k < n_r; ++k) {
      const double th = -std::numbers::pi + (i + 0.5) * 2.0 * std::numbers::pi / n_theta;
      const double r = -r_max + (k + 0.5) * 2.0 * r_max / n_r;
      auto root = newton_refine_polar(np, {th, r});
      if (!root || std::abs(root->r) > r_max) continue;
      root->theta = detail::wrap_angle(root->theta);
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](const PolarState& q) {
        return std::abs(detail::wrap_angle(q.theta - root->theta)) <= dedup_tol &&
               std::abs(q.r - root->r) <= dedup_tol;
      });
      if (!seen) roots.push_back(*root);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const PolarState& a, const PolarState& b) {
    return a.theta < b.theta || (a.theta == b.theta && a.r < b.r);
  });
  return roots;
}

enum class BifurcationKind { Pitchfork, NodeFocusTransition };

inline std::string_view to_string(BifurcationKind k) noexcept {
  return k == BifurcationKind::Pitchfork ? "Pitchfork" : "NodeFocusTransition";
}

struct BifurcationEvent {
  double omega;
  BifurcationKind kind;
  /// Bracket [lo, hi] with detector values of opposite sign at its ends.
  double lo, hi;
  double detector_lo, detector_hi;
};

/// Pitchfork detector: the eigenvalue of S+ transverse to the theta-axis. The
/// Jacobian at S+ is upper triangular, so it is the (r, r) entry.
inline double pitchfork_detector(double omega) {
  return polar_jacobian(NormalizedParams(omega), {std::numbers::pi / 2.0, 0.0})[1][1];
}

/// Node/focus detector: discriminant of the linearization at P (w > 1).
inline double node_focus_detector(double omega) {
  const NormalizedParams np(omega);
  return linearize_polar(np, interior_equilibrium_polar(omega)).discriminant;
}

namespace detail {

template <class F>
BifurcationEvent bisect_event(F&& f, double a, double b, BifurcationKind kind,
                              double width = 1e-10) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0 || fb == 0.0) {
    // Root sits on a grid node: re-bracket it symmetrically.
    const double root = fa == 0.0 ? a : b;
    a = root - 0.5 * width;
    b = root + 0.5 * width;
    fa = f(a);
    fb = f(b);
  }
  while (b - a > width) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) {
      a = m - 0.25 * width;
      b = m + 0.25 * width;
      fa = f(a);
      fb = f(b);
      break;
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return {0.5 * (a + b), kind, a, b, fa, fb};
}

template <class F>
void scan_detector(F&& f, double lo, double hi, double step, BifurcationKind kind,
                   std::vector<BifurcationEvent>& out) {
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  double a = lo, fa = f(a);
  for (int i = 1; i <= n; ++i) {
    const double b = i == n ? hi : lo + i * (hi - lo) / n;
    const double fb = f(b);
    const bool root_at_a = fa == 0.0;
    const bool root_at_end = fb == 0.0 && i == n;
    if (root_at_a || root_at_end || (fb != 0.0 && ((fa < 0.0) != (fb < 0.0))))
      out.push_back(bisect_event(f, a, b, kind));
    a = b;
    fa = fb;
  }
}

}  // namespace detail

/// Locates the pitchfork of S+ and the node/focus transition of P inside
/// [omega_lo, omega_hi] by sign changes on a grid of the given step, each
/// bisected to a bracket of width <= 1e-10.
inline std::vector<BifurcationEvent> bifurcation_scan(double omega_lo, double omega_hi,
                                                      double step = 1e-2) {
  if (!(omega_lo >= 0.0 && omega_lo < omega_hi && step > 0.0))
    throw InvalidParameters("bifurcation_scan requires 0 <= lo < hi and step > 0");
  std::vector<BifurcationEvent> events;
  detail::scan_detector(pitchfork_detector, omega_lo, omega_hi, step,
                        BifurcationKind::Pitchfork, events);
  // P only exists for w > 1; keep the node/focus scan strictly above it.
  const double lo2 = std::max(omega_lo, 1.0 + 1e-6);
  if (lo2 < omega_hi)
    detail::scan_detector(node_focus_detector, lo2, omega_hi, step,
                          BifurcationKind::NodeFocusTransition, events);
  std::erase_if(events, [&](const BifurcationEvent& e) {
    return e.omega < omega_lo || e.omega > omega_hi;
  });
  std::sort(events.begin(), events.end(),
            [](const auto& x, const auto& y) { return x.omega < y.omega; });
  return events;
}

}  // namespace mwkit
