#pragma once

// Global objects of the phase portrait: separatrices of F traced from the
// chart saddles, basin-of-attraction grids, the invariance check for the
// complement of C, and the per-clause certification report.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mwkit/analysis.hpp"
#include "mwkit/integrate.hpp"
#include "mwkit/model.hpp"
#include "mwkit/parallel.hpp"

namespace mwkit {

// ---------------------------------------------------------------------------
// Separatrices

enum class SeparatrixKind { StableOfF, UnstableOfF };

inline std::string_view to_string(SeparatrixKind k) noexcept {
  return k == SeparatrixKind::StableOfF ? "StableOfF" : "UnstableOfF";
}

struct TraceOptions {
  double seed_offset = 1e-6;
  double window_radius = 10.0;
  double max_arc_length = 50.0;
  /// Target spacing of the polyline; the guaranteed bound is twice this.
  double sample_spacing = 5e-3;
};

enum class TraceEnd { LeftWindow, ArcLengthLimit, ConvergedToP, MaxTimeExceeded };

inline std::string_view to_string(TraceEnd e) noexcept {
  switch (e) {
    case TraceEnd::LeftWindow: return "LeftWindow";
    case TraceEnd::ArcLengthLimit: return "ArcLengthLimit";
    case TraceEnd::ConvergedToP: return "ConvergedToP";
    case TraceEnd::MaxTimeExceeded: return "MaxTimeExceeded";
  }
  return "?";
}

/// Position of one trace point relative to the borders of C and G.
struct Containment {
  double r_minus_C;  ///< r - cos(theta); >= 0 outside C
  double G_minus_r;  ///< 2 cos(theta) - r; >= 0 inside G
  double z_minus_1;  ///< x^2 + y^2 - 1; >= 0 outside G
};

struct SeparatrixSeed {
  PolarState saddle;
  ChartDirection direction;
  double offset;
};

struct SeparatrixTrace {
  SeparatrixKind which;
  SeparatrixSeed seed;
  std::vector<CartesianState> polyline;
  std::vector<PolarState> polar;
  std::vector<double> arc_length;  ///< cumulative cartesian arc length
  std::vector<Containment> containment;
  TraceEnd end = TraceEnd::MaxTimeExceeded;
};

/// Seeds at saddle + offset * eigenvector (r > 0 side) in the polar chart:
/// the repelling direction of S+ forward for W^u(F), the attracting direction
/// of S- backward for W^s(F).
inline SeparatrixTrace trace_separatrix(const NormalizedParams& np, SeparatrixKind which,
                                        const IntegrationConfig& cfg = {},
                                        const TraceOptions& opt = {}) {
  const double w = np.omega();
  if (!(w > 1.0) || std::abs(w - kPitchforkOmega) <= kTolBif) throw NoSaddle(w);
  cfg.validate();

  const auto saddles = saddle_points(np);
  const bool unstable = which == SeparatrixKind::UnstableOfF;
  const EquilibriumInfo& saddle = unstable ? saddles[1] : saddles[0];
  ChartDirection dir = saddle_direction(saddle, unstable);
  if (dir.dr < 0.0) dir = {-dir.dtheta, -dir.dr};

  SeparatrixTrace tr;
  tr.which = which;
  tr.seed = {saddle.position_polar, dir, opt.seed_offset};
  const PolarState start{saddle.position_polar.theta + opt.seed_offset * dir.dtheta,
                         saddle.position_polar.r + opt.seed_offset * dir.dr};

  auto push = [&](const PolarState& ps) {
    const CartesianState p = to_cartesian(ps);
    const double arc = tr.polyline.empty()
                           ? 0.0
                           : tr.arc_length.back() + std::hypot(p.x - tr.polyline.back().x,
                                                               p.y - tr.polyline.back().y);
    tr.polyline.push_back(p);
    tr.polar.push_back(ps);
    tr.arc_length.push_back(arc);
    tr.containment.push_back({ps.r - geometry::border_C_r(ps.theta),
                              geometry::border_G_r(ps.theta) - ps.r, geometry::z(p) - 1.0});
  };
  push(start);

  const auto target = unstable ? detail::attracting_P(np) : std::nullopt;
  const Direction direction = unstable ? Direction::Forward : Direction::Backward;
  detail::drive_polar(
      np, start, 0.0, direction, cfg,
      [&](const DenseSegment<3>& seg, double v, const PolarState& ps,
          double) -> std::optional<Termination> {
        // Subdivide the step so consecutive polyline points stay close.
        double est = 0.0;
        CartesianState prev = tr.polyline.back();
        for (int k = 1; k <= 4; ++k) {
          const auto y = seg(seg.t0 + seg.h * k / 4.0);
          const CartesianState q = to_cartesian({y[0], y[1]});
          est += std::hypot(q.x - prev.x, q.y - prev.y);
          prev = q;
        }
        const int pieces = std::max(1, static_cast<int>(std::ceil(est / opt.sample_spacing)));
        for (int k = 1; k < pieces; ++k) {
          const auto y = seg(seg.t0 + seg.h * k / pieces);
          push({y[0], y[1]});
        }
        push(ps);
        const CartesianState& p = tr.polyline.back();
        Termination stop;
        if (std::hypot(p.x, p.y) > opt.window_radius) {
          tr.end = TraceEnd::LeftWindow;
          return stop;
        }
        if (tr.arc_length.back() > opt.max_arc_length) {
          tr.end = TraceEnd::ArcLengthLimit;
          return stop;
        }
        if (target && detail::dist(p, *target) <= cfg.eps_P) {
          tr.end = TraceEnd::ConvergedToP;
          return stop;
        }
        if (v > cfg.max_time) {
          tr.end = TraceEnd::MaxTimeExceeded;
          return stop;
        }
        return std::nullopt;
      });
  return tr;
}

/// Least-squares slope dr/dtheta of the trace over its first `chart_arc`
/// of arc length measured in the (theta, r) chart.
inline double initial_chart_slope(const SeparatrixTrace& tr, double chart_arc = 1e-3) {
  const PolarState o = tr.polar.front();
  double arc = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 1; i < tr.polar.size(); ++i) {
    arc += std::hypot(tr.polar[i].theta - tr.polar[i - 1].theta,
                      tr.polar[i].r - tr.polar[i - 1].r);
    if (arc > chart_arc) break;
    const double dx = tr.polar[i].theta - o.theta;
    const double dy = tr.polar[i].r - o.r;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

/// Euclidean distance from p to the polyline through `pts`.
inline double distance_to_polyline(const CartesianState& p, std::span<const CartesianState> pts) {
  double best = std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return std::hypot(p.x - pts[0].x, p.y - pts[0].y);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double ax = pts[i - 1].x, ay = pts[i - 1].y;
    const double bx = pts[i].x - ax, by = pts[i].y - ay;
    const double len2 = bx * bx + by * by;
    double u = len2 > 0.0 ? ((p.x - ax) * bx + (p.y - ay) * by) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - ax - u * bx, p.y - ay - u * by));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Basin grids

struct Window {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

  void validate() const {
    if (!(std::isfinite(xmin) && std::isfinite(xmax) && std::isfinite(ymin) &&
          std::isfinite(ymax) && xmin < xmax && ymin < ymax))
      throw InvalidParameters("window must satisfy xmin < xmax and ymin < ymax");
  }
  /// Bounding box of G scaled about the origin.
  static Window g_box(double scale = 1.0) { return {-scale, scale, -scale, scale}; }
};

enum class CellClass { ReachedF, ConvergedToP, LeftWindow, MaxTimeExceeded, Excluded };

inline std::string_view to_string(CellClass c) noexcept {
  switch (c) {
    case CellClass::ReachedF: return "ReachedF";
    case CellClass::ConvergedToP: return "ConvergedToP";
    case CellClass::LeftWindow: return "LeftWindow";
    case CellClass::MaxTimeExceeded: return "MaxTimeExceeded";
    case CellClass::Excluded: return "Excluded";
  }
  return "?";
}

inline CellClass cell_class_of(Termination::Kind k) noexcept {
  switch (k) {
    case Termination::Kind::ReachedF: return CellClass::ReachedF;
    case Termination::Kind::ConvergedToP: return CellClass::ConvergedToP;
    case Termination::Kind::LeftWindow: return CellClass::LeftWindow;
    case Termination::Kind::MaxTimeExceeded: return CellClass::MaxTimeExceeded;
  }
  return CellClass::MaxTimeExceeded;
}

struct BasinGrid {
  Window window;
  int nx = 0, ny = 0;
  double omega = 0.0;
  std::vector<CellClass> cells;  ///< row-major, index j * nx + i, y ascending

  CartesianState center(int i, int j) const noexcept {
    return {window.xmin + (i + 0.5) * (window.xmax - window.xmin) / nx,
            window.ymin + (j + 0.5) * (window.ymax - window.ymin) / ny};
  }
  CellClass at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i]; }
  std::size_t count(CellClass c) const {
    return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), c));
  }
  std::size_t non_excluded() const { return cells.size() - count(CellClass::Excluded); }
  double cell_diagonal() const {
    return std::hypot((window.xmax - window.xmin) / nx, (window.ymax - window.ymin) / ny);
  }
};

inline bool operator==(const BasinGrid& a, const BasinGrid& b) {
  return a.nx == b.nx && a.ny == b.ny && a.omega == b.omega && a.cells == b.cells &&
         a.window.xmin == b.window.xmin && a.window.xmax == b.window.xmax &&
         a.window.ymin == b.window.ymin && a.window.ymax == b.window.ymax;
}

/// Classifies the forward fate of every cell center. Cells are evaluated in
/// parallel, in `order` when given; the result does not depend on the order.
inline BasinGrid classify_basin_grid(const NormalizedParams& np, const Window& window, int nx,
                                     int ny, const IntegrationConfig& cfg = {},
                                     std::span<const std::size_t> order = {}) {
  window.validate();
  cfg.validate();
  if (nx < 2 || ny < 2) throw InvalidParameters("basin grid resolution must be at least 2x2");
  BasinGrid g{window, nx, ny, np.omega(), {}};
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  if (!order.empty() && order.size() != n)
    throw InvalidParameters("evaluation order must be a permutation of the cells");
  g.cells.assign(n, CellClass::MaxTimeExceeded);
  parallel_for(n, [&](std::size_t k) {
    const std::size_t idx = order.empty() ? k : order[k];
    const CartesianState c = g.center(static_cast<int>(idx % nx), static_cast<int>(idx / nx));
    if (distance_to_focus(c) <= cfg.eps_F) {
      g.cells[idx] = CellClass::Excluded;
      return;
    }
    try {
      g.cells[idx] = cell_class_of(integrate(np, c, Direction::Forward, cfg).termination.kind);
    } catch (const Error&) {
      g.cells[idx] = CellClass::MaxTimeExceeded;
    }
  });
  return g;
}

// ---------------------------------------------------------------------------
// Invariance of G \ F

struct InvarianceReport {
  long interior_samples = 0;
  long border_samples = 0;
  /// Largest z' found in the region r > cos(theta), r > 0 (must be < 0).
  double worst_interior = -std::numeric_limits<double>::infinity();
  /// Largest p . f(p) on the border of G (must be < 0 for inward flow).
  double worst_border = -std::numeric_limits<double>::infinity();
  std::vector<PolarState> witnesses;
  bool pass() const noexcept { return witnesses.empty(); }
};

namespace detail {

inline double radical_inverse(unsigned long n, unsigned base) noexcept {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (n > 0) {
    out += static_cast<double>(n % base) * f;
    n /= base;
    f *= inv;
  }
  return out;
}

}  // namespace detail

/// Samples z' on Halton points of {r > cos(theta), r > 0} (r up to r_span
/// above the border) and the cartesian flow across the border of G.
inline InvarianceReport verify_invariance(const NormalizedParams& np, long n_samples,
                                          double r_span = 10.0) {
  if (n_samples < 1) throw InvalidParameters("verify_invariance needs at least one sample");
  InvarianceReport rep;
  constexpr double pi = std::numbers::pi;
  for (long k = 1; k <= n_samples; ++k) {
    const double theta = -pi + 2.0 * pi * detail::radical_inverse(k, 2);
    const double lo = std::max(std::cos(theta), 0.0);
    const double r = lo + r_span * detail::radical_inverse(k, 3);
    if (!(r > lo)) continue;
    ++rep.interior_samples;
    const double zp = radial_derivative({theta, r});
    rep.worst_interior = std::max(rep.worst_interior, zp);
    if (!(zp < 0.0)) rep.witnesses.push_back({theta, r});
  }
  const long n_border = std::max(1L, n_samples / 4);
  for (long k = 1; k <= n_border; ++k) {
    const double theta = -pi / 2.0 + pi * detail::radical_inverse(k, 5);
    const PolarState ps{theta, geometry::border_G_r(theta)};
    const CartesianState p = to_cartesian(ps);
    const CartesianVelocity v = vector_field_cartesian(np, p);
    const double flux = p.x * v.dx + p.y * v.dy;
    ++rep.border_samples;
    rep.worst_border = std::max(rep.worst_border, flux);
    if (!(flux < 0.0)) rep.witnesses.push_back(ps);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Certification

enum class Verdict { Pass, Fail, NotApplicable, NotAsserted };

inline std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::NotApplicable: return "NotApplicable";
    case Verdict::NotAsserted: return "NotAsserted";
  }
  return "?";
}

struct ClauseResult {
  ClauseResult() = default;
  explicit ClauseResult(std::string name) : clause(std::move(name)) {}

  std::string clause;
  Verdict verdict = Verdict::NotAsserted;
  long samples = 0;
  double worst_margin = 0.0;
  long failures = 0;                    ///< total count; witnesses holds the first few
  std::vector<std::string> witnesses;
  std::vector<std::string> notes;
};

struct OmegaReport {
  OmegaReport() = default;
  explicit OmegaReport(double w) : omega(w) {}

  double omega = 0.0;
  bool degenerate = false;
  std::string notice;
  std::vector<ClauseResult> clauses;
};

struct TheoremReport {
  std::vector<OmegaReport> per_omega;

  bool all_applicable_pass() const noexcept {
    for (const auto& o : per_omega)
      for (const auto& c : o.clauses)
        if (c.verdict == Verdict::Fail) return false;
    return true;
  }
};

struct CertifyConfig {
  IntegrationConfig integration;
  TraceOptions trace;
  int grid_resolution = 100;
  long invariance_samples = 10000;
  /// Item 1 is checked on G's bounding box and on this multiple of it.
  double far_window_scale = 5.0;
  /// Containment tolerance and the saddle-adjacent arc excluded from it.
  double containment_tol = 1e-6;
  double saddle_guard_arc = 1e-3;
  /// Arc of W^u(F) next to S+ on which the annulus between C and G is checked.
  double annulus_local_arc = 0.1;
  std::size_t max_witnesses = 20;
};

namespace detail {

inline std::string fmt_point(const CartesianState& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

inline void add_witness(ClauseResult& c, std::string w, std::size_t cap) {
  ++c.failures;
  if (c.witnesses.size() < cap) c.witnesses.push_back(std::move(w));
}

inline void finalize(ClauseResult& c) {
  c.verdict = c.failures == 0 ? Verdict::Pass : Verdict::Fail;
}

inline ClauseResult check_invariance(const NormalizedParams& np, const CertifyConfig& cfg) {
  ClauseResult c{"invariance"};
  const auto rep = verify_invariance(np, cfg.invariance_samples);
  c.samples = rep.interior_samples + rep.border_samples;
  c.worst_margin = std::max(rep.worst_interior, rep.worst_border);
  for (const auto& w : rep.witnesses)
    add_witness(c, "theta=" + std::to_string(w.theta) + " r=" + std::to_string(w.r),
                cfg.max_witnesses);
  finalize(c);
  return c;
}

inline void check_grid_all(ClauseResult& c, const BasinGrid& g, CellClass expected,
                           const CertifyConfig& cfg) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const CellClass k = g.at(i, j);
      if (k == CellClass::Excluded) continue;
      ++c.samples;
      if (k != expected)
        add_witness(c, fmt_point(g.center(i, j)) + " -> " + std::string(to_string(k)),
                    cfg.max_witnesses);
    }
}

inline ClauseResult check_item1(const NormalizedParams& np, const CertifyConfig& cfg) {
  ClauseResult c{"item1_global_attractor"};
  double worst = 1.0;
  for (double scale : {1.0, cfg.far_window_scale}) {
    const auto g = classify_basin_grid(np, Window::g_box(scale), cfg.grid_resolution,
                                       cfg.grid_resolution, cfg.integration);
    check_grid_all(c, g, CellClass::ReachedF, cfg);
    worst = std::min(worst, static_cast<double>(g.count(CellClass::ReachedF)) /
                                static_cast<double>(g.non_excluded()));
    c.notes.push_back("window [-" + std::to_string(scale) + ", " + std::to_string(scale) +
                      "]^2");
  }
  c.worst_margin = worst;
  finalize(c);
  return c;
}

inline ClauseResult check_item2(const NormalizedParams& np, const CertifyConfig& cfg) {
  ClauseResult c{"item2_attractor_P_and_Wu"};
  const auto p = interior_equilibrium(np);
  const double tol = cfg.containment_tol;
  if (!p || !(p->lin.sigma < 0.0 && p->lin.delta > 0.0)) {
    add_witness(c, "P missing or not hyperbolic attracting", cfg.max_witnesses);
    finalize(c);
    return c;
  }
  // Uniqueness in the physical half r > 0 of the chart.
  int interior_roots = 0;
  for (const auto& q : numeric_census(np)) {
    if (q.r <= 1e-9) continue;
    ++interior_roots;
    if (std::hypot(q.theta - p->position_polar.theta, q.r - p->position_polar.r) > 1e-9)
      add_witness(c, "extra equilibrium at theta=" + std::to_string(q.theta) +
                         " r=" + std::to_string(q.r), cfg.max_witnesses);
  }
  if (interior_roots != 1)
    add_witness(c, "interior equilibria found: " + std::to_string(interior_roots),
                cfg.max_witnesses);

  const auto tr = trace_separatrix(np, SeparatrixKind::UnstableOfF, cfg.integration, cfg.trace);
  double worst = std::numeric_limits<double>::infinity();
  double worst_global_annulus = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tr.polyline.size(); ++i) {
    if (tr.arc_length[i] < cfg.saddle_guard_arc) continue;
    const Containment& k = tr.containment[i];
    ++c.samples;
    worst = std::min(worst, k.G_minus_r);
    if (k.G_minus_r < -tol)
      add_witness(c, "W^u(F) outside G at " + fmt_point(tr.polyline[i]), cfg.max_witnesses);
    worst_global_annulus = std::min(worst_global_annulus, k.r_minus_C);
    if (tr.arc_length[i] <= cfg.annulus_local_arc) {
      worst = std::min(worst, k.r_minus_C);
      if (k.r_minus_C < -tol)
        add_witness(c, "W^u(F) inside C next to S+ at " + fmt_point(tr.polyline[i]),
                    cfg.max_witnesses);
    }
  }
  if (tr.end != TraceEnd::ConvergedToP)
    add_witness(c, "W^u(F) trace ended with " + std::string(to_string(tr.end)),
                cfg.max_witnesses);

  // Basin inclusion: every trace point is attracted by P.
  std::vector<CellClass> fate(tr.polyline.size(), CellClass::MaxTimeExceeded);
  parallel_for(tr.polyline.size(), [&](std::size_t i) {
    try {
      fate[i] = cell_class_of(
          integrate(np, tr.polyline[i], Direction::Forward, cfg.integration).termination.kind);
    } catch (const Error&) {
    }
  });
  for (std::size_t i = 0; i < fate.size(); ++i) {
    ++c.samples;
    if (fate[i] != CellClass::ConvergedToP)
      add_witness(c, "W^u(F) point " + fmt_point(tr.polyline[i]) + " -> " +
                         std::string(to_string(fate[i])), cfg.max_witnesses);
  }
  c.worst_margin = worst;
  c.notes.push_back("W^u(F) trace points: " + std::to_string(tr.polyline.size()));
  c.notes.push_back("min r - cos(theta) along the whole W^u(F) trace: " +
                    std::to_string(worst_global_annulus) +
                    (worst_global_annulus < -tol ? " (the trace enters C while winding onto P)"
                                                 : ""));
  finalize(c);
  return c;
}

inline ClauseResult check_item3(const NormalizedParams& np, const CertifyConfig& cfg) {
  ClauseResult c{"item3_Ws_outside_G_and_basin_of_P"};
  const auto tr = trace_separatrix(np, SeparatrixKind::StableOfF, cfg.integration, cfg.trace);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tr.polyline.size(); ++i) {
    ++c.samples;
    worst = std::min(worst, tr.containment[i].z_minus_1);
    if (tr.containment[i].z_minus_1 < -cfg.containment_tol)
      add_witness(c, "W^s(F) inside G at " + fmt_point(tr.polyline[i]), cfg.max_witnesses);
  }
  if (tr.end != TraceEnd::LeftWindow)
    c.notes.push_back("W^s(F) trace ended with " + std::string(to_string(tr.end)));

  // Inside G every cell must be attracted by P. Outside G (box corners) a
  // cell may also reach F when it lies next to the traced W^s(F).
  const auto g = classify_basin_grid(np, Window::g_box(), cfg.grid_resolution,
                                     cfg.grid_resolution, cfg.integration);
  const double near = 2.0 * g.cell_diagonal();
  long near_separatrix = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const CellClass k = g.at(i, j);
      if (k == CellClass::Excluded) continue;
      ++c.samples;
      if (k == CellClass::ConvergedToP) continue;
      const CartesianState q = g.center(i, j);
      if (!geometry::in_G(q) && k == CellClass::ReachedF &&
          distance_to_polyline(q, tr.polyline) <= near) {
        ++near_separatrix;
        continue;
      }
      add_witness(c, fmt_point(q) + " -> " + std::string(to_string(k)), cfg.max_witnesses);
    }
  if (near_separatrix > 0)
    c.notes.push_back("cells outside G reaching F next to W^s(F): " +
                      std::to_string(near_separatrix));
  c.worst_margin = worst;
  finalize(c);
  return c;
}

}  // namespace detail

/// Numerical certification of every clause for each parameter value.
inline TheoremReport certify_theorem1(std::span<const double> omegas,
                                      const CertifyConfig& cfg = {}) {
  TheoremReport report;
  for (double w : omegas) {
    const NormalizedParams np(w);
    OmegaReport o{w};
    auto not_applicable = [](std::string name) {
      ClauseResult c{std::move(name)};
      c.verdict = Verdict::NotApplicable;
      return c;
    };
    if (std::abs(w - kPitchforkOmega) <= kTolBif) {
      o.degenerate = true;
      o.notice = "DegenerateTransition(PitchforkAtOmega1): no clause asserted at the bifurcation value";
      for (const char* name : {"invariance", "item1_global_attractor", "item2_attractor_P_and_Wu",
                               "item3_Ws_outside_G_and_basin_of_P"}) {
        ClauseResult c{name};
        c.verdict = Verdict::NotAsserted;
        o.clauses.push_back(std::move(c));
      }
      report.per_omega.push_back(std::move(o));
      continue;
    }
    if (std::abs(w - kNodeFocusOmega) <= kTolBif)
      o.notice = "DegenerateTransition(NodeFocusBoundary): P is on the node/focus boundary";
    o.clauses.push_back(detail::check_invariance(np, cfg));
    if (w <= 1.0) {
      o.clauses.push_back(detail::check_item1(np, cfg));
      o.clauses.push_back(not_applicable("item2_attractor_P_and_Wu"));
      o.clauses.push_back(not_applicable("item3_Ws_outside_G_and_basin_of_P"));
    } else {
      o.clauses.push_back(not_applicable("item1_global_attractor"));
      o.clauses.push_back(detail::check_item2(np, cfg));
      o.clauses.push_back(detail::check_item3(np, cfg));
    }
    report.per_omega.push_back(std::move(o));
  }
  return report;
}

}  // namespace mwkit
