#pragma once

// Trajectories of the normalized system. Away from F the cartesian field is
// integrated in physical time; inside chart_switch_radius the integrator moves
// to the polar chart, whose field is polynomial, and carries physical time as
// an extra component (dt/dtau = r) so it is integrated at the stepper's order.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "mwkit/analysis.hpp"
#include "mwkit/dopri5.hpp"
#include "mwkit/errors.hpp"
#include "mwkit/model.hpp"

namespace mwkit {

struct IntegrationConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.1;
  double max_time = 1e3;
  double eps_F = 1e-8;
  double eps_P = 1e-6;
  double chart_switch_radius = 1e-2;
  /// Distance from the origin beyond which an orbit counts as LeftWindow.
  double escape_radius = 1e3;
  /// Physical-time stride of recorded samples; 0 records every accepted step.
  double sample_stride = 0.0;

  void validate() const {
    const double pos[] = {rel_tol, abs_tol, max_step, max_time,
                          eps_F,   eps_P,   chart_switch_radius, escape_radius};
    for (double v : pos)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParameters("integration tolerances must be finite and > 0");
    if (!(eps_F < chart_switch_radius))
      throw InvalidParameters("eps_F must be smaller than chart_switch_radius");
    if (!(sample_stride >= 0.0) || !std::isfinite(sample_stride))
      throw InvalidParameters("sample_stride must be finite and >= 0");
  }
};

enum class Direction { Forward, Backward };

inline double sign_of(Direction d) noexcept { return d == Direction::Forward ? 1.0 : -1.0; }

struct Termination {
  enum class Kind { ReachedF, ConvergedToP, LeftWindow, MaxTimeExceeded };
  Kind kind = Kind::MaxTimeExceeded;
  double t = 0.0;  ///< physical time of the verdict
};

inline std::string_view to_string(Termination::Kind k) noexcept {
  switch (k) {
    case Termination::Kind::ReachedF: return "ReachedF";
    case Termination::Kind::ConvergedToP: return "ConvergedToP";
    case Termination::Kind::LeftWindow: return "LeftWindow";
    case Termination::Kind::MaxTimeExceeded: return "MaxTimeExceeded";
  }
  return "?";
}

struct TimedState {
  double t;
  CartesianState state;
};

struct Trajectory {
  std::vector<TimedState> samples;
  Termination termination;
};

struct PolarSample {
  double tau;  ///< rescaled time, dt = r dtau
  double t;    ///< physical time
  PolarState state;
};

struct PolarTrajectory {
  std::vector<PolarSample> samples;
  /// Continuous extension of step k, between samples k and k + 1, in the
  /// integration variable v = |tau|. Optional; physical_time_of falls back to
  /// Hermite interpolation of the samples without it.
  std::vector<DenseSegment<3>> segments;
  Termination termination;
};

namespace detail {

/// Cartesian position of P when it exists and its linearization in the
/// cartesian chart is attracting (trace < 0, determinant > 0).
inline std::optional<CartesianState> attracting_P(const NormalizedParams& np) {
  auto p = interior_equilibrium(np);
  if (!p || p->cls == EquilibriumClass::DegeneratePitchfork) return std::nullopt;
  const Mat2 j = cartesian_jacobian(np, *p->position_cartesian);
  const double tr = j[0][0] + j[1][1];
  const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
  if (tr < 0.0 && det > 0.0) return p->position_cartesian;
  return std::nullopt;
}

inline double dist(const CartesianState& a, const CartesianState& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Physical time needed to cover the last |r| to F, from the local radial
/// speed |w sin(theta) - 1|; falls back to unit speed where that vanishes.
inline double residual_time(double omega, const PolarState& s) {
  const double rate = std::abs(omega * std::sin(s.theta) - 1.0);
  return std::abs(s.r) / (rate > 1e-6 ? rate : 1.0);
}

inline StepperOptions stepper_options(const IntegrationConfig& cfg) {
  return {cfg.rel_tol, cfg.abs_tol, cfg.max_step, 0.0};
}

struct PolarField {
  double omega;
  double dir;
  std::array<double, 3> operator()(double, const std::array<double, 3>& y) const noexcept {
    const double th = -omega * (y[1] - std::cos(y[0]));
    const double r = y[1] * (omega * std::sin(y[0]) - 1.0);
    return {dir * th, dir * r, dir * y[1]};
  }
};

struct CartesianField {
  double omega;
  double dir;
  std::array<double, 2> operator()(double, const std::array<double, 2>& y) const noexcept {
    const double d = std::hypot(1.0 - y[0], y[1]);
    if (d < kSingularThreshold) {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan};
    }
    return {dir * (-omega * y[1] + (1.0 - y[0]) / d), dir * (omega * y[0] - y[1] / d)};
  }
};

/// Emits samples either at each accepted step or on a physical-time grid.
class Sampler {
public:
  Sampler(std::vector<TimedState>& out, double stride, double dir)
      : out_(out), stride_(stride), dir_(dir) {}

  /// `at(t)` evaluates the state at physical time t inside (t_prev, t_end].
  template <class Eval>
  void add(double t_end, const CartesianState& end, Eval&& at) {
    if (stride_ <= 0.0) {
      out_.push_back({t_end, end});
      return;
    }
    for (;;) {
      const double target = dir_ * (next_ * stride_);
      if (dir_ * (t_end - target) < 0.0) break;
      out_.push_back({target, target == t_end ? end : at(target)});
      ++next_;
    }
  }

  void finish(double t_end, const CartesianState& end) {
    if (out_.empty() || dir_ * (t_end - out_.back().t) > 0.0) out_.push_back({t_end, end});
  }

private:
  std::vector<TimedState>& out_;
  double stride_;
  double dir_;
  long next_ = 1;
};

/// Runs the polar stepper from `start`, calling on_step(segment, v_end, state,
/// t) after every accepted step; on_step returns a Termination to stop.
/// v is the progress in rescaled time (tau = dir * v).
template <class OnStep>
Termination drive_polar(const NormalizedParams& np, const PolarState& start, double t0,
                        Direction dir, const IntegrationConfig& cfg, OnStep&& on_step) {
  const double s = sign_of(dir);
  DormandPrince<3, PolarField> st(PolarField{np.omega(), s}, 0.0, {start.theta, start.r, t0},
                                  stepper_options(cfg));
  for (;;) {
    const auto& seg = st.step();
    const auto& y = st.y();
    if (auto term = on_step(seg, st.t(), PolarState{y[0], y[1]}, y[2])) return *term;
  }
}

}  // namespace detail

/// Integrates the normalized system from `start` until one of the
/// terminations in Termination::Kind fires.
inline Trajectory integrate(const NormalizedParams& np, const CartesianState& start,
                            Direction dir, const IntegrationConfig& cfg = {}) {
  cfg.validate();
  if (!std::isfinite(start.x) || !std::isfinite(start.y)) throw NonFiniteState();
  if (!(distance_to_focus(start) >= kSingularThreshold)) throw StartAtFocus();

  using Kind = Termination::Kind;
  const double s = sign_of(dir);
  const double w = np.omega();
  const auto target = dir == Direction::Forward ? detail::attracting_P(np) : std::nullopt;

  Trajectory traj;
  traj.samples.push_back({0.0, start});
  detail::Sampler sampler(traj.samples, cfg.sample_stride, s);

  double t = 0.0;
  CartesianState p = start;
  bool polar = distance_to_focus(p) < cfg.chart_switch_radius;

  auto done = [&](Kind kind, double t_term, CartesianState where) {
    sampler.finish(t_term, where);
    traj.termination = {kind, t_term};
    return traj;
  };

  if (distance_to_focus(p) <= cfg.eps_F)
    return done(Kind::ReachedF, s * detail::residual_time(w, to_polar(p)), kFocus);

  for (;;) {
    if (!polar) {
      DormandPrince<2, detail::CartesianField> st(detail::CartesianField{w, s}, s * t,
                                                  {p.x, p.y}, detail::stepper_options(cfg));
      for (;;) {
        // No stage may jump across F, and the last step lands on max_time.
        const double cap = std::min(0.5 * distance_to_focus(p) / (1.0 + w * std::hypot(p.x, p.y)),
                                    cfg.max_time - std::abs(t));
        const auto& seg = st.step(cap);
        t = s * st.t();
        p = {st.y()[0], st.y()[1]};
        sampler.add(t, p, [&](double tq) {
          const auto y = seg(s * tq);
          return CartesianState{y[0], y[1]};
        });
        if (target && detail::dist(p, *target) <= cfg.eps_P) return done(Kind::ConvergedToP, t, p);
        if (std::hypot(p.x, p.y) > cfg.escape_radius) return done(Kind::LeftWindow, t, p);
        if (std::abs(t) >= cfg.max_time * (1.0 - 1e-12))
          return done(Kind::MaxTimeExceeded, t, p);
        if (distance_to_focus(p) < cfg.chart_switch_radius) {
          polar = true;
          break;
        }
      }
    } else {
      std::optional<Trajectory> result;
      detail::drive_polar(
          np, to_polar(p), t, dir, cfg,
          [&](const DenseSegment<3>& seg, double v, const PolarState& ps,
              double tp) -> std::optional<Termination> {
            auto at_time = [&](double tq) {
              // Physical time is monotone inside the step; invert it by bisection.
              double a = seg.t0, b = seg.t1();
              for (int i = 0; i < 60; ++i) {
                const double m = 0.5 * (a + b);
                if (s * (seg(m)[2] - tq) < 0.0) a = m; else b = m;
              }
              const auto y = seg(0.5 * (a + b));
              return to_cartesian({y[0], y[1]});
            };
            if (std::abs(tp) >= cfg.max_time * (1.0 - 1e-12)) {
              t = s * cfg.max_time;
              p = std::abs(tp) == cfg.max_time ? to_cartesian(ps) : at_time(t);
              sampler.add(t, p, at_time);
              result = done(Kind::MaxTimeExceeded, t, p);
              return result->termination;
            }
            t = tp;
            p = to_cartesian(ps);
            sampler.add(t, p, at_time);
            if (std::abs(ps.r) <= cfg.eps_F) {
              result = done(Kind::ReachedF, t + s * detail::residual_time(w, ps), kFocus);
              return result->termination;
            }
            if (target && detail::dist(p, *target) <= cfg.eps_P) {
              result = done(Kind::ConvergedToP, t, p);
              return result->termination;
            }
            // Backstop: r stays above eps_F here, so tau cannot legitimately run this long.
            if (v > cfg.max_time / cfg.eps_F) {
              result = done(Kind::MaxTimeExceeded, t, p);
              return result->termination;
            }
            if (ps.r > 2.0 * cfg.chart_switch_radius) return Termination{};
            return std::nullopt;
          });
      if (result) return *result;
      polar = false;
    }
  }
}

/// Integrates the polar field directly. Samples carry both rescaled and
/// physical time; MaxTimeExceeded refers to the rescaled-time span.
inline PolarTrajectory integrate_polar(const NormalizedParams& np, const PolarState& start,
                                       Direction dir, const IntegrationConfig& cfg = {}) {
  cfg.validate();
  if (!std::isfinite(start.theta) || !std::isfinite(start.r)) throw NonFiniteState();

  using Kind = Termination::Kind;
  const double s = sign_of(dir);
  const double w = np.omega();
  const auto target = dir == Direction::Forward ? detail::attracting_P(np) : std::nullopt;

  PolarTrajectory traj;
  traj.samples.push_back({0.0, 0.0, start});
  bool was_outside = std::abs(start.r) > cfg.eps_F;

  traj.termination = detail::drive_polar(
      np, start, 0.0, dir, cfg,
      [&](const DenseSegment<3>& seg, double v, const PolarState& ps,
          double t) -> std::optional<Termination> {
        traj.samples.push_back({s * v, t, ps});
        traj.segments.push_back(seg);
        if (was_outside && std::abs(ps.r) <= cfg.eps_F)
          return Termination{Kind::ReachedF, t + s * detail::residual_time(w, ps)};
        was_outside = was_outside || std::abs(ps.r) > cfg.eps_F;
        const CartesianState p = to_cartesian(ps);
        if (target && ps.r > 0.0 && detail::dist(p, *target) <= cfg.eps_P)
          return Termination{Kind::ConvergedToP, t};
        if (std::hypot(p.x, p.y) > cfg.escape_radius) return Termination{Kind::LeftWindow, t};
        if (v > cfg.max_time) return Termination{Kind::MaxTimeExceeded, t};
        return std::nullopt;
      });
  return traj;
}

/// Physical time at rescaled time tau, from the stepper's dense output, or by
/// cubic Hermite interpolation of the samples using dt/dtau = r.
inline double physical_time_of(const PolarTrajectory& traj, double tau) {
  const auto& smp = traj.samples;
  if (smp.empty()) throw OutOfSpan();
  const bool ascending = smp.size() < 2 || smp.back().tau >= smp.front().tau;
  const double lo = ascending ? smp.front().tau : smp.back().tau;
  const double hi = ascending ? smp.back().tau : smp.front().tau;
  if (!(tau >= lo && tau <= hi)) throw OutOfSpan();
  if (smp.size() == 1) return smp.front().t;

  auto it = ascending
                ? std::lower_bound(smp.begin(), smp.end(), tau,
                                   [](const PolarSample& a, double v) { return a.tau < v; })
                : std::lower_bound(smp.begin(), smp.end(), tau,
                                   [](const PolarSample& a, double v) { return a.tau > v; });
  if (it == smp.begin()) return it->t;
  if (traj.segments.size() + 1 == smp.size()) {
    const auto& seg = traj.segments[static_cast<std::size_t>(it - smp.begin()) - 1];
    return seg(ascending ? tau : -tau)[2];
  }
  const PolarSample& b = *it;
  const PolarSample& a = *(it - 1);
  const double h = b.tau - a.tau;
  if (h == 0.0) return b.t;
  const double u = (tau - a.tau) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * a.t + h10 * h * a.state.r + h01 * b.t + h11 * h * b.state.r;
}

}  // namespace mwkit
