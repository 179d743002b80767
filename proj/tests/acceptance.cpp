// Acceptance suite. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [N ...]   (no arguments runs all ten)

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwkit/analysis.hpp"
#include "mwkit/integrate.hpp"
#include "mwkit/model.hpp"
#include "mwkit/portrait.hpp"

using namespace mwkit;
using Kind = Termination::Kind;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Oracles, written from the closed forms.
double theta_P(double w) { return std::asin(1.0 / w); }
double r_P(double w) { return std::sqrt((w - 1.0) * (w + 1.0)) / w; }

// z' from the cartesian field and the chain rule, rescaled by r.
double zdot_oracle(double w, double theta, double r) {
  const double x = 1 - r * std::cos(theta), y = r * std::sin(theta);
  const double d = std::hypot(1 - x, y);
  const double fx = -w * y + (1 - x) / d, fy = w * x - y / d;
  return 2 * (x * fx + y * fy) * r;
}

Outcome c1_equilibrium_closed_form() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (double w : {1.2, 2.0, 5.0, 10.0}) {
    const NormalizedParams np(w);
    double worst = 0;
    int converged = 0;
    for (int k = 0; k < 20; ++k) {
      const auto s = newton_refine_polar(np, {theta_P(w) + jitter(rng), r_P(w) + jitter(rng)});
      if (!s) continue;
      ++converged;
      worst = std::max({worst, std::abs(s->theta - theta_P(w)), std::abs(s->r - r_P(w))});
    }
    o.check(converged == 20 && worst <= 1e-9,
            fmt("omega=%g: %d/20 Newton runs converged, max |delta| = %.2e", w, converged, worst));
    const auto p = interior_equilibrium(np);
    const double ex = 1 / (w * w), ey = r_P(w) / w;
    const double err = p && p->position_cartesian
                           ? std::hypot(p->position_cartesian->x - ex, p->position_cartesian->y - ey)
                           : INFINITY;
    o.check(err <= 1e-12, fmt("omega=%g: cartesian P matches (1/w^2, r_P/w), error %.2e", w, err));
  }
  const auto p2 = interior_equilibrium(NormalizedParams(2));
  o.check(p2 && std::abs(p2->position_cartesian->x - 0.25) <= 1e-15 &&
              std::abs(p2->position_cartesian->y - std::sqrt(3.0) / 4) <= 1e-15,
          "omega=2: P = (0.25, sqrt(3)/4)");
  return o;
}

Outcome c2_linearization_identities() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(-pi, pi), rr(-3, 3), ww(0, 20);
  int exact = 0;
  double trace_err = 0;
  for (int k = 0; k < 1000; ++k) {
    const NormalizedParams np(ww(rng));
    const PolarState s{th(rng), rr(rng)};
    const auto lin = linearize_polar(np, s);
    exact += lin.sigma == -1.0;
    const auto j = polar_jacobian(np, s);
    trace_err = std::max(trace_err, std::abs(j[0][0] + j[1][1] + 1.0));
  }
  o.check(exact == 1000, fmt("sigma == -1 exactly at %d/1000 random states", exact));
  o.check(trace_err <= 1e-12, fmt("Jacobian trace agrees with sigma, max error %.2e", trace_err));

  std::uniform_real_distribution<double> wp(std::nextafter(1.0, 2.0), 20.0);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const double w = wp(rng);
    const auto p = interior_equilibrium(NormalizedParams(w));
    const double d = p ? p->lin.delta : NAN;
    worst = std::isfinite(d) ? std::max(worst, std::abs(d - (w * w - 1))) : INFINITY;
  }
  o.check(worst <= 1e-12, fmt("delta(P) = w^2 - 1 for 100 random w in (1, 20], max error %.2e", worst));
  return o;
}

Outcome c3_bifurcation_values() {
  Outcome o;
  const auto ev = bifurcation_scan(0.5, 3.0);
  o.check(ev.size() == 2, fmt("scan over [0.5, 3] finds %zu events", ev.size()));
  const double targets[2] = {1.0, std::sqrt(5.0) / 2};
  const BifurcationKind kinds[2] = {BifurcationKind::Pitchfork, BifurcationKind::NodeFocusTransition};
  for (std::size_t i = 0; i < 2 && i < ev.size(); ++i) {
    const auto& e = ev[i];
    o.check(e.kind == kinds[i] && std::abs(e.omega - targets[i]) <= 1e-9 && e.hi - e.lo <= 1e-9 &&
                e.lo <= targets[i] && targets[i] <= e.hi,
            fmt("%s at %.12f (expected %.12f), bracket width %.1e",
                std::string(to_string(e.kind)).c_str(), e.omega, targets[i], e.hi - e.lo));
  }
  o.check(classify_P(NormalizedParams(1.05)) == EquilibriumClass::AttractingNode,
          "classify_P(1.05) = AttractingNode");
  o.check(classify_P(NormalizedParams(3)) == EquilibriumClass::AttractingFocus,
          "classify_P(3) = AttractingFocus");
  return o;
}

Outcome c4_saddle_data() {
  Outcome o;
  const NormalizedParams np(2);
  const auto s = saddle_points(np);
  const double lu = s[1].lin.eigenvalues[1].real();
  o.check(std::abs(lu - 1.0) <= 1e-12 && s[1].lin.eigenvalues[1].imag() == 0.0,
          fmt("S+ unstable eigenvalue %.15f (expected 1)", lu));
  const auto u = trace_separatrix(np, SeparatrixKind::UnstableOfF);
  const auto st = trace_separatrix(np, SeparatrixKind::StableOfF);
  const double su = initial_chart_slope(u), ss = initial_chart_slope(st);
  o.check(std::abs(su - (-2 + 0.5)) <= 1e-3, fmt("traced W^u(F) initial slope %.6f (expected -1.5)", su));
  o.check(std::abs(ss - (2 + 0.5)) <= 1e-3, fmt("traced W^s(F) initial slope %.6f (expected 2.5)", ss));
  return o;
}

Outcome c5_invariance() {
  Outcome o;
  for (double w : {0.5, 2.0, 5.0}) {
    const auto rep = verify_invariance(NormalizedParams(w), 10000);
    o.check(rep.pass() && rep.interior_samples == 10000 && rep.worst_interior < 0 &&
                rep.worst_border < 0,
            fmt("omega=%g: library sampler, %ld interior + %ld border samples, %zu witnesses",
                w, rep.interior_samples, rep.border_samples, rep.witnesses.size()));
  }
  // Independent sampler: golden-ratio sequence in theta, sqrt(2) in a radial coordinate.
  const double g1 = 0.6180339887498949, g2 = 0.4142135623730950;
  for (double w : {0.5, 2.0, 5.0}) {
    int bad = 0, n = 0;
    double worst = -INFINITY;
    for (int k = 1; n < 10000; ++k) {
      const double a = std::fmod(k * g1, 1.0), b = std::fmod(k * g2, 1.0);
      const double theta = -pi + 2 * pi * a;
      const double lo = std::max(0.0, std::cos(theta));
      const double r = lo + 1e-9 + 10.0 * b;
      if (!(r > std::cos(theta) && r > 0)) continue;
      ++n;
      const double z = zdot_oracle(w, theta, r);
      worst = std::max(worst, z);
      bad += !(z < 0);
    }
    o.check(bad == 0, fmt("omega=%g: chain-rule oracle, %d points, %d with z' >= 0", w, n, bad));
    int inward = 0;
    for (int k = 1; k <= 2500; ++k) {
      const double phi = 2 * pi * std::fmod(k * g1, 1.0);
      const CartesianState p{std::cos(phi), std::sin(phi)};
      if (distance_to_focus(p) < 1e-9) {
        ++inward;
        continue;
      }
      const auto f = vector_field_cartesian(NormalizedParams(w), p);
      inward += p.x * f.dx + p.y * f.dy < 0;
    }
    o.check(inward == 2500, fmt("omega=%g: %d/2500 border-of-G samples flow inward", w, inward));
  }
  return o;
}

Outcome c6_item1() {
  Outcome o;
  for (double w : {0.3, 0.8}) {
    const auto g = classify_basin_grid(NormalizedParams(w), Window::g_box(5.0), 100, 100);
    const std::size_t ok = g.count(CellClass::ReachedF), n = g.non_excluded();
    const double frac = static_cast<double>(ok) / n;
    o.check(frac >= 0.999 && ok == n,
            fmt("omega=%g: %zu/%zu non-excluded cells ReachedF (%.4f%%), %zu failures", w, ok, n,
                100 * frac, n - ok));
    for (int j = 0, shown = 0; j < g.ny && shown < 10; ++j)
      for (int i = 0; i < g.nx && shown < 10; ++i)
        if (g.at(i, j) != CellClass::ReachedF && g.at(i, j) != CellClass::Excluded) {
          o.lines.push_back(fmt("     failure at (%g, %g): %s", g.center(i, j).x, g.center(i, j).y,
                                std::string(to_string(g.at(i, j))).c_str()));
          ++shown;
        }
  }
  return o;
}

Outcome c7_item3() {
  Outcome o;
  const NormalizedParams np(2);
  const auto g = classify_basin_grid(np, Window::g_box(), 100, 100);
  o.check(g.count(CellClass::ConvergedToP) == g.non_excluded(),
          fmt("G box grid: %zu/%zu non-excluded cells ConvergedToP",
              g.count(CellClass::ConvergedToP), g.non_excluded()));

  const auto ws = trace_separatrix(np, SeparatrixKind::StableOfF);
  double zmin = INFINITY;
  for (const auto& p : ws.polyline) zmin = std::min(zmin, p.x * p.x + p.y * p.y);
  o.check(zmin >= 1 - 1e-6, fmt("W^s(F): min x^2+y^2 = %.9f over %zu points", zmin, ws.polyline.size()));

  const auto wu = trace_separatrix(np, SeparatrixKind::UnstableOfF);
  double lower = INFINITY, upper = INFINITY;
  std::size_t lower_bad = 0, upper_bad = 0, checked = 0;
  double arc = 0;
  for (std::size_t i = 0; i < wu.polar.size(); ++i) {
    if (i > 0)
      arc += std::hypot(wu.polyline[i].x - wu.polyline[i - 1].x, wu.polyline[i].y - wu.polyline[i - 1].y);
    if (arc < 1e-3) continue;
    ++checked;
    const double th = wu.polar[i].theta, r = wu.polar[i].r;
    lower = std::min(lower, r - std::cos(th));
    upper = std::min(upper, 2 * std::cos(th) - r);
    lower_bad += r < std::cos(th) - 1e-6;
    upper_bad += r > 2 * std::cos(th) + 1e-6;
  }
  o.check(upper_bad == 0, fmt("W^u(F): r <= 2cos(theta) + 1e-6 at all %zu points (min margin %.3e)",
                              checked, upper));
  o.check(lower_bad == 0, fmt("W^u(F): r >= cos(theta) - 1e-6 violated at %zu/%zu points "
                              "(min r - cos(theta) = %.6f)", lower_bad, checked, lower));

  std::vector<Kind> fate(wu.polyline.size());
  parallel_for(fate.size(), [&](std::size_t i) {
    fate[i] = integrate(np, wu.polyline[i], Direction::Forward, {}).termination.kind;
  });
  std::size_t toP = 0;
  for (auto k : fate) toP += k == Kind::ConvergedToP;
  o.check(toP == fate.size(), fmt("W^u(F): %zu/%zu trace points forward-integrate to ConvergedToP",
                                  toP, fate.size()));
  return o;
}

Outcome c8_arrival_time() {
  Outcome o;
  for (double d : {0.5, 1.0, 2.0}) {
    double worst = 0;
    for (double a : {0.0, 0.7, pi / 2, 2.5, pi, -1.1}) {
      const CartesianState s{1 + d * std::cos(a), d * std::sin(a)};
      const auto tr = integrate(NormalizedParams(0), s, Direction::Forward, {});
      const double err = tr.termination.kind == Kind::ReachedF ? std::abs(tr.termination.t - d) : INFINITY;
      worst = std::max(worst, err);
    }
    o.check(worst <= 1e-4, fmt("d=%g: max |t_arrival - d| = %.2e over 6 directions", d, worst));
  }
  return o;
}

Outcome c9_order() {
  Outcome o;
  const NormalizedParams np(2);
  const CartesianState start{-0.5, 0.5};
  auto end_state = [&](double rtol, double atol) {
    IntegrationConfig c;
    c.rel_tol = rtol;
    c.abs_tol = atol;
    c.max_time = 10.0;
    c.eps_P = 1e-300;
    const auto tr = integrate(np, start, Direction::Forward, c);
    if (tr.termination.kind != Kind::MaxTimeExceeded) throw std::runtime_error("orbit ended early");
    return tr.samples.back().state;
  };
  const auto ref = end_state(1e-14, 1e-16);
  for (double rtol : {1e-9, 1e-10, 1e-11}) {
    const auto a = end_state(rtol, rtol * 1e-3);
    const auto b = end_state(rtol / 2, rtol / 2 * 1e-3);
    const double ea = std::hypot(a.x - ref.x, a.y - ref.y);
    const double eb = std::hypot(b.x - ref.x, b.y - ref.y);
    o.check(ea / eb >= 4.0,
            fmt("rel_tol %.0e -> %.1e: error %.3e -> %.3e, ratio %.2f (required >= 4)", rtol,
                rtol / 2, ea, eb, ea / eb));
  }
  return o;
}

struct Exec {
  int code;
  std::string out;
};

Exec exec(const std::string& args) {
  const std::string cmd = std::string(MWKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::array<char, 4096> buf;
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), p)) > 0;) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome c10_cli() {
  Outcome o;
  for (const std::string args :
       {"equilibria --omega 2", "equilibria --omega 2 --format csv",
        "bifurcations --omega-range 0.5:3", "bifurcations --omega-range 0.5:3 --format csv",
        "basin --omega 2 --res 20", "basin --omega 2 --res 20 --format csv",
        "trajectory --omega 2 --start 0.1,0.1", "trajectory --omega 2 --start 0.1,0.1 --format csv",
        "verify --omega-list 0.3,2 --res 20 --samples 1000"}) {
    const auto a = exec(args), b = exec(args);
    o.check(a.code == 0 && !a.out.empty() && a.out == b.out,
            fmt("byte-identical repeated output: %s", args.c_str()));
  }
  const std::vector<std::pair<std::string, int>> matrix{
      {"equilibria --omega 0.5", 0},
      {"verify --omega-list 0.3 --res 20 --samples 1000", 0},
      {"verify --omega-list 0.5 --res 6 --samples 100 --tol max_time=0.05", 1},
      {"equilibria --omega -2", 2},
      {"equilibria", 2},
      {"basin --omega 2 --res 1", 2},
      {"bifurcations --omega-range 3:2", 2},
      {"portrait --omega 1", 2},
      {"unknown-command", 2},
  };
  for (const auto& [args, code] : matrix) {
    const int got = exec(args).code;
    o.check(got == code, fmt("exit %d (expected %d): %s", got, code, args.c_str()));
  }
  const auto v = exec("verify --omega-list 1.2,2,5");
  bool all_pass = v.code == 0;
  std::string summary;
  try {
    const auto j = nlohmann::json::parse(v.out);
    for (const auto& w : j["result"]["per_omega"])
      for (const auto& c : w["clauses"]) {
        const std::string verdict = c["verdict"];
        summary += fmt(" %g:%s=%s", w["omega_normalized"].get<double>(),
                       c["clause"].get<std::string>().substr(0, 5).c_str(), verdict.c_str());
        // Item 1 only speaks about w <= 1.
        if (c["clause"] == "item1_global_attractor") all_pass = all_pass && verdict == "NotApplicable";
        else all_pass = all_pass && verdict == "Pass";
      }
  } catch (const std::exception&) {
    all_pass = false;
  }
  o.check(all_pass, fmt("verify --omega-list 1.2,2,5 exits %d;%s", v.code, summary.c_str()));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"equilibrium closed form", c1_equilibrium_closed_form},
      {"linearization identities", c2_linearization_identities},
      {"bifurcation values", c3_bifurcation_values},
      {"saddle data and separatrix slopes", c4_saddle_data},
      {"invariance clause", c5_invariance},
      {"item 1: global attraction for omega <= 1", c6_item1},
      {"item 3: basin dichotomy and separatrix containment at omega = 2", c7_item3},
      {"finite-time arrival", c8_arrival_time},
      {"integrator order under tolerance halving", c9_order},
      {"CLI contract", c10_cli},
  };
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [1-10 ...]\n";
      return 2;
    }
    which.push_back(n);
  }
  if (which.empty())
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) which.push_back(n);

  int failed = 0;
  for (int n : which) {
    const auto& [name, fn] = criteria[n - 1];
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << n << ": " << name << "\n";
    for (const auto& l : o.lines) std::cout << "        " << l << "\n";
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
