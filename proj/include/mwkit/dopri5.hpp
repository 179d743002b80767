#pragma once

// Dormand-Prince 5(4) embedded pair with FSAL, PI step-size control and the
// usual fourth-order continuous extension. Fixed-size state, forward in the
// independent variable only; callers integrate backward by negating the field.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "mwkit/errors.hpp"

namespace mwkit {

struct StepperOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.1;
  double initial_step = 0.0;  ///< 0 selects the step automatically
};

/// Continuous extension of one accepted step.
template <std::size_t N>
struct DenseSegment {
  using State = std::array<double, N>;
  double t0 = 0.0;
  double h = 0.0;
  State y0{}, y1{};
  std::array<State, 5> rc{};

  double t1() const noexcept { return t0 + h; }

  State operator()(double t) const noexcept {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    State out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = rc[0][i] + s * (rc[1][i] + s1 * (rc[2][i] + s * (rc[3][i] + s1 * rc[4][i])));
    return out;
  }
};

template <std::size_t N, class Field>
class DormandPrince {
public:
  using State = std::array<double, N>;

  DormandPrince(Field f, double t0, const State& y0, const StepperOptions& opt)
      : f_(std::move(f)), opt_(opt), t_(t0), y_(y0) {
    k1_ = f_(t_, y_);
    h_ = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step();
    h_ = std::min(h_, opt_.max_step);
  }

  double t() const noexcept { return t_; }
  const State& y() const noexcept { return y_; }
  double step_size() const noexcept { return h_; }
  const DenseSegment<N>& last_segment() const noexcept { return seg_; }
  long rejected_steps() const noexcept { return rejected_; }

  /// Advances by one accepted step no longer than min(max_step, h_cap).
  const DenseSegment<N>& step(double h_cap = std::numeric_limits<double>::infinity()) {
    bool last_rejected = false;
    for (;;) {
      double h = std::min({h_, opt_.max_step, h_cap});
      if (!(h > 1e-15 * std::max(1.0, std::abs(t_)))) throw NonFiniteState();

      State k2, k3, k4, k5, k6, k7, yt, y1;
      for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * a21 * k1_[i];
      k2 = f_(t_ + c2 * h, yt);
      for (std::size_t i = 0; i < N; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      k3 = f_(t_ + c3 * h, yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f_(t_ + c4 * h, yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f_(t_ + c5 * h, yt);
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f_(t_ + h, yt);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      k7 = f_(t_ + h, y1);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / N);

      if (!std::isfinite(err)) {
        // A stage left the field's domain; retry with a much shorter step.
        h_ = 0.1 * h;
        last_rejected = true;
        ++rejected_;
        continue;
      }

      if (err <= 1.0) {
        const double fac = std::pow(err, expo1) / std::pow(err_old_, beta);
        double factor = std::clamp(safe / std::max(fac, 1e-10), facmin, facmax);
        if (last_rejected) factor = std::min(factor, 1.0);
        err_old_ = std::max(err, 1e-4);

        seg_.t0 = t_;
        seg_.h = h;
        seg_.y0 = y_;
        seg_.y1 = y1;
        for (std::size_t i = 0; i < N; ++i) {
          const double ydiff = y1[i] - y_[i];
          const double bspl = h * k1_[i] - ydiff;
          seg_.rc[0][i] = y_[i];
          seg_.rc[1][i] = ydiff;
          seg_.rc[2][i] = bspl;
          seg_.rc[3][i] = ydiff - h * k7[i] - bspl;
          seg_.rc[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                               d6 * k6[i] + d7 * k7[i]);
        }
        for (double v : y1)
          if (!std::isfinite(v)) throw NonFiniteState();
        t_ += h;
        y_ = y1;
        k1_ = k7;
        h_ = h * factor;
        return seg_;
      }
      h_ = h * std::max(facmin, safe / std::pow(err, expo1));
      last_rejected = true;
      ++rejected_;
    }
  }

private:
  double norm_scaled(const State& v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / N);
  }

  double initial_step() {
    const double d0 = norm_scaled(y_);
    const double d1n = norm_scaled(k1_);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, opt_.max_step);
    State y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + h0 * k1_[i];
    const State f1 = f_(t_ + h0, y1);
    State df;
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1_[i];
    const double d2 = norm_scaled(df) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = (dm <= 1e-15 || !std::isfinite(dm)) ? std::max(1e-6, h0 * 1e-3)
                                                          : std::pow(0.01 / dm, 0.2);
    // A state component barely above abs_tol can drive h0 to ~1e-16; the
    // error control rejects anything too long, so a floor is safe.
    return std::max(std::min(100.0 * h0, h1), 1e-8);
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
  static constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9, facmin = 0.2,
                          facmax = 10.0;

  Field f_;
  StepperOptions opt_;
  double t_;
  State y_;
  State k1_{};
  double h_ = 0.0;
  double err_old_ = 1e-4;
  long rejected_ = 0;
  DenseSegment<N> seg_{};
};

}  // namespace mwkit
