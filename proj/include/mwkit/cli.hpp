#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// that tests can drive it in-process; tools/mwkit.cpp only forwards argv.
//
// Exit codes: 0 success, 1 certification failure, 2 usage error.

#include <chrono>
#include <complex>
#include <numbers>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwkit/analysis.hpp"
#include "mwkit/integrate.hpp"
#include "mwkit/model.hpp"
#include "mwkit/parallel.hpp"
#include "mwkit/portrait.hpp"

namespace mwkit::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1";

enum ExitCode { kOk = 0, kCertificationFailure = 1, kUsage = 2 };

using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

struct Common {
  double omega = std::nan("");
  double v = 1.0;
  double R = 1.0;
  std::string format;
  std::string out;
  std::vector<std::string> tol;
  bool no_timestamp = false;
  bool timing = false;
};

namespace detail {

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string num3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return std::string(buf) == "-0.000" ? "0.000" : buf;
}

inline std::vector<double> parse_list(const std::string& text, char sep, std::size_t expect = 0) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("malformed number '" + item + "' in '" + text + "'");
    }
    if (pos != item.size() || !std::isfinite(v))
      throw UsageError("malformed number '" + item + "' in '" + text + "'");
    out.push_back(v);
  }
  if (!text.empty() && text.back() == sep) throw UsageError("trailing separator in '" + text + "'");
  if (expect != 0 && out.size() != expect)
    throw UsageError("expected " + std::to_string(expect) + " values in '" + text + "'");
  return out;
}

inline Window parse_window(const std::string& text) {
  const auto v = parse_list(text, ',', 4);
  Window w{v[0], v[1], v[2], v[3]};
  try {
    w.validate();
  } catch (const InvalidParameters& e) {
    throw UsageError(e.what());
  }
  return w;
}

inline IntegrationConfig apply_tol(IntegrationConfig cfg, const std::vector<std::string>& kv) {
  static const std::map<std::string, double IntegrationConfig::*> fields{
      {"rel_tol", &IntegrationConfig::rel_tol},
      {"abs_tol", &IntegrationConfig::abs_tol},
      {"max_step", &IntegrationConfig::max_step},
      {"max_time", &IntegrationConfig::max_time},
      {"eps_F", &IntegrationConfig::eps_F},
      {"eps_P", &IntegrationConfig::eps_P},
      {"chart_switch_radius", &IntegrationConfig::chart_switch_radius},
      {"escape_radius", &IntegrationConfig::escape_radius},
  };
  for (const auto& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects key=value, got '" + item + "'");
    const auto it = fields.find(item.substr(0, eq));
    if (it == fields.end()) throw UsageError("unknown tolerance '" + item.substr(0, eq) + "'");
    cfg.*(it->second) = parse_list(item.substr(eq + 1), ',', 1)[0];
  }
  try {
    cfg.validate();
  } catch (const InvalidParameters& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

inline json config_json(const IntegrationConfig& c) {
  return {{"rel_tol", c.rel_tol},   {"abs_tol", c.abs_tol},
          {"max_step", c.max_step}, {"max_time", c.max_time},
          {"eps_F", c.eps_F},       {"eps_P", c.eps_P},
          {"chart_switch_radius", c.chart_switch_radius},
          {"escape_radius", c.escape_radius}};
}

inline json point_json(const CartesianState& p) { return {{"x", p.x}, {"y", p.y}}; }

inline json complex_json(const std::complex<double>& z) {
  return {{"re", z.real()}, {"im", z.imag()}};
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Everything needed to replay a run.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  Common common;
  IntegrationConfig cfg;
  double omega_normalized = std::nan("");

  json to_json() const {
    json params = {{"v", common.v}, {"R", common.R}};
    if (std::isfinite(common.omega)) {
      params["omega"] = common.omega;
      params["omega_normalized"] = omega_normalized;
    }
    return {{"tool", "mwkit"},           {"version", kToolVersion},
            {"command", command},        {"args", args},
            {"params", params},          {"config", config_json(cfg)}};
  }

  /// Manifest as text lines with the given prefix.
  std::string as_comments(const std::string& prefix) const {
    std::string s;
    s += prefix + "tool: mwkit " + kToolVersion + "\n";
    s += prefix + "command: " + command + "\n";
    std::string joined;
    for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
    s += prefix + "args: " + joined + "\n";
    s += prefix + "config: " + config_json(cfg).dump() + "\n";
    return s;
  }
};

/// Drops `--out X` / `--out=X` so a manifest replays to any destination.
inline std::vector<std::string> canonical_args(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

struct Output {
  std::string body;
  int exit_code = kOk;
};

inline std::string envelope(const Manifest& m, json result) {
  json j = {{"schema_version", kSchemaVersion}, {"command", m.command},
            {"manifest", m.to_json()}, {"result", std::move(result)}};
  return j.dump(2) + "\n";
}


// --------------------------------------------------------------------------
// SVG

class Svg {
public:
  Svg(const Window& w, const Manifest& m, bool timestamp) : w_(w) {
    const double span = std::max(w.xmax - w.xmin, w.ymax - w.ymin);
    scale_ = 1000.0 / span;
    cx_ = 0.5 * (w.xmin + w.xmax);
    cy_ = 0.5 * (w.ymin + w.ymax);
    body_ << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
             "width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n"
          << "<metadata>\n" << escape(m.as_comments("  ")) << "</metadata>\n";
    if (timestamp) body_ << "<!-- generated " << utc_timestamp() << " -->\n";
    body_ << "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"1000\" "
             "height=\"1000\"/></clipPath></defs>\n"
          << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n"
          << "<g clip-path=\"url(#frame)\">\n";
  }

  std::string X(double x) const { return num3(500.0 + (x - cx_) * scale_); }
  std::string Y(double y) const { return num3(500.0 - (y - cy_) * scale_); }
  double scale() const { return scale_; }

  void circle(double x, double y, double radius, const std::string& style,
              const std::string& id) {
    body_ << "<circle id=\"" << id << "\" cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\""
          << num3(radius * scale_) << "\" " << style << "/>\n";
  }

  void marker(double x, double y, const std::string& fill, const std::string& id) {
    body_ << "<circle id=\"" << id << "\" class=\"marker\" cx=\"" << X(x) << "\" cy=\"" << Y(y)
          << "\" r=\"6\" fill=\"" << fill << "\"/>\n";
  }

  void polyline(const std::vector<CartesianState>& pts, const std::string& style,
                const std::string& cls) {
    if (pts.size() < 2) return;
    body_ << "<polyline class=\"" << cls << "\" " << style << " fill=\"none\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      body_ << (i ? " " : "") << X(pts[i].x) << "," << Y(pts[i].y);
    body_ << "\"/>\n";
  }

  void rect_cell(double x0, double y0, double x1, double y1, const std::string& fill) {
    body_ << "<rect x=\"" << X(x0) << "\" y=\"" << Y(y1) << "\" width=\""
          << num3((x1 - x0) * scale_) << "\" height=\"" << num3((y1 - y0) * scale_)
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    body_ << "</g>\n<g id=\"legend\" font-family=\"sans-serif\" font-size=\"18\">\n";
    double y = 30;
    for (const auto& [color, label] : entries) {
      body_ << "<rect x=\"20\" y=\"" << num3(y - 12) << "\" width=\"14\" height=\"14\" fill=\""
            << color << "\"/><text x=\"42\" y=\"" << num3(y) << "\">" << escape(label)
            << "</text>\n";
      y += 24;
    }
  }

  std::string finish() {
    body_ << "</g>\n";
    body_ << "</svg>\n";
    return body_.str();
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
      }
    }
    return out;
  }

private:
  Window w_;
  double scale_, cx_, cy_;
  std::ostringstream body_;
};

// --------------------------------------------------------------------------
// Commands

inline json equilibrium_json(const EquilibriumInfo& e, const Scale& sc, const std::string& name) {
  json j = {{"name", name},
            {"class", std::string(to_string(e.cls))},
            {"polar", {{"theta", e.position_polar.theta}, {"r", e.position_polar.r}}},
            {"sigma", e.lin.sigma},
            {"delta", e.lin.delta},
            {"discriminant", e.lin.discriminant},
            {"eigenvalues", {complex_json(e.lin.eigenvalues[0]), complex_json(e.lin.eigenvalues[1])}}};
  if (e.position_cartesian) {
    j["cartesian_normalized"] = point_json(*e.position_cartesian);
    j["cartesian_original"] = point_json(to_original(*e.position_cartesian, sc));
  } else {
    j["cartesian_normalized"] = nullptr;
    j["cartesian_original"] = nullptr;
  }
  if (e.lin.eigenvectors) {
    json ev = json::array();
    for (const auto& d : *e.lin.eigenvectors)
      ev.push_back({{"dtheta", d.dtheta}, {"dr", d.dr}});
    j["eigenvectors_polar"] = ev;
  } else {
    j["eigenvectors_polar"] = nullptr;
  }
  return j;
}

inline Output cmd_equilibria(const Manifest& m, const Normalized& nz) {
  const NormalizedParams& np = nz.params;
  const double w = np.omega();
  std::vector<std::pair<std::string, EquilibriumInfo>> list;
  json notes = json::array();
  auto p = interior_equilibrium(np);
  if (p) {
    list.emplace_back("P", *p);
  } else {
    if (w == 1.0) notes.push_back("omega_normalized = 1: P would coincide with F");
    notes.push_back("no interior equilibrium; F is a global attractor");
  }
  if (w > 0.0) {
    const auto s = saddle_points(np);
    list.emplace_back("S-", s[0]);
    list.emplace_back("S+", s[1]);
  } else {
    notes.push_back("omega_normalized = 0: every point of r = 0 is a chart equilibrium");
  }
  if (auto mirror = mirror_equilibrium(np)) list.emplace_back("P_mirror_r_negative", *mirror);

  const std::string fmt = m.common.format.empty() ? "json" : m.common.format;
  if (fmt == "json") {
    json eq = json::array();
    for (const auto& [name, e] : list) eq.push_back(equilibrium_json(e, nz.scale, name));
    json result = {
        {"omega_normalized", w},
        {"scale", {{"length", nz.scale.length}, {"time", nz.scale.time}}},
        {"focus", {{"cartesian_original", point_json(to_original(kFocus, nz.scale))},
                   {"global_attractor", w <= 1.0}}},
        {"interior_equilibrium_present", p.has_value()},
        {"equilibria", eq},
        {"notes", notes}};
    return {envelope(m, result)};
  }
  if (fmt == "csv") {
    std::string s = "name,class,theta,r,x_normalized,y_normalized,x,y,sigma,delta,discriminant,"
         "eig1_re,eig1_im,eig2_re,eig2_im\n";
    for (const auto& [name, e] : list) {
      std::string xn, yn, xo, yo;
      if (e.position_cartesian) {
        const auto o = to_original(*e.position_cartesian, nz.scale);
        xn = num17(e.position_cartesian->x);
        yn = num17(e.position_cartesian->y);
        xo = num17(o.x);
        yo = num17(o.y);
      }
      s += name + "," + std::string(to_string(e.cls)) + "," + num17(e.position_polar.theta) +
           "," + num17(e.position_polar.r) + "," + xn + "," + yn + "," + xo + "," + yo + "," +
           num17(e.lin.sigma) + "," + num17(e.lin.delta) + "," + num17(e.lin.discriminant) +
           "," + num17(e.lin.eigenvalues[0].real()) + "," + num17(e.lin.eigenvalues[0].imag()) +
           "," + num17(e.lin.eigenvalues[1].real()) + "," + num17(e.lin.eigenvalues[1].imag()) +
           "\n";
    }
    return {s};
  }
  throw UsageError("equilibria supports --format json|csv");
}

inline std::vector<CartesianState> scaled(const std::vector<CartesianState>& pts, const Scale& sc) {
  std::vector<CartesianState> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(to_original(p, sc));
  return out;
}

inline Output cmd_portrait(const Manifest& m, const Normalized& nz, const Window& win, int orbits) {
  const NormalizedParams& np = nz.params;
  const double w = np.omega();
  if (std::abs(w - kPitchforkOmega) <= kTolBif)
    throw UsageError("portrait is undefined at the pitchfork value omega_normalized = 1");
  if (orbits < 0) throw UsageError("--orbits must be >= 0");
  const double R = nz.scale.length;

  std::vector<std::pair<SeparatrixKind, SeparatrixTrace>> traces;
  if (w > 1.0)
    for (auto k : {SeparatrixKind::UnstableOfF, SeparatrixKind::StableOfF})
      traces.emplace_back(k, trace_separatrix(np, k, m.cfg));

  // Orbit seeds on a ring inside the window.
  IntegrationConfig ocfg = m.cfg;
  ocfg.max_time = std::min(ocfg.max_time, 100.0);
  const double cx = 0.5 * (win.xmin + win.xmax), cy = 0.5 * (win.ymin + win.ymax);
  const double rad = 0.45 * std::min(win.xmax - win.xmin, win.ymax - win.ymin);
  std::vector<Trajectory> orbit_list(static_cast<std::size_t>(orbits));
  parallel_for(orbit_list.size(), [&](std::size_t k) {
    const double a = 2.0 * std::numbers::pi * (k + 0.25) / orbits;
    const CartesianState start =
        to_normalized({cx + rad * std::cos(a), cy + rad * std::sin(a)}, nz.scale);
    if (distance_to_focus(start) < 1e-6) return;
    orbit_list[k] = integrate(np, start, Direction::Forward, ocfg);
  });

  const std::string fmt = m.common.format.empty() ? "svg" : m.common.format;
  const auto p = interior_equilibrium(np);
  if (fmt == "json") {
    json seps = json::array();
    for (const auto& [k, tr] : traces) {
      json pts = json::array();
      for (const auto& q : scaled(tr.polyline, nz.scale)) pts.push_back({q.x, q.y});
      seps.push_back({{"which", std::string(to_string(k))},
                      {"end", std::string(to_string(tr.end))}, {"polyline", pts}});
    }
    json orb = json::array();
    for (const auto& o : orbit_list) {
      json pts = json::array();
      for (const auto& q : o.samples) {
        const auto qo = to_original(q.state, nz.scale);
        pts.push_back({q.t * nz.scale.time, qo.x, qo.y});
      }
      orb.push_back({{"termination", std::string(to_string(o.termination.kind))},
                     {"samples", pts}});
    }
    json result = {{"window", {win.xmin, win.xmax, win.ymin, win.ymax}},
                   {"border_G", {{"center", {0.0, 0.0}}, {"radius", R}}},
                   {"border_C", {{"center", {R / 2, 0.0}}, {"radius", R / 2}}},
                   {"focus", {R, 0.0}},
                   {"P", p ? json{p->position_cartesian->x * R, p->position_cartesian->y * R}
                           : json(nullptr)},
                   {"separatrices", seps},
                   {"orbits", orb}};
    return {envelope(m, result)};
  }
  if (fmt != "svg") throw UsageError("portrait supports --format svg|json");

  Svg svg(win, m, !m.common.no_timestamp);
  for (const auto& o : orbit_list) {
    std::vector<CartesianState> pts;
    for (const auto& q : o.samples) pts.push_back(to_original(q.state, nz.scale));
    svg.polyline(pts, "stroke=\"#9a9a9a\" stroke-width=\"1\"", "orbit");
  }
  svg.circle(0.0, 0.0, R, "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"", "border-G");
  svg.circle(R / 2, 0.0, R / 2, "fill=\"none\" stroke=\"#2e8b57\" stroke-width=\"2\" "
             "stroke-dasharray=\"8 5\"", "border-C");
  for (const auto& [k, tr] : traces)
    svg.polyline(scaled(tr.polyline, nz.scale),
                 k == SeparatrixKind::UnstableOfF ? "stroke=\"#d2691e\" stroke-width=\"2.5\""
                                                  : "stroke=\"#b22222\" stroke-width=\"2.5\"",
                 k == SeparatrixKind::UnstableOfF ? "separatrix unstable" : "separatrix stable");
  svg.marker(R, 0.0, "black", "focus-F");
  if (p) svg.marker(p->position_cartesian->x * R, p->position_cartesian->y * R, "#6a0dad", "P");

  std::vector<std::pair<std::string, std::string>> legend{
      {"#1f4e9c", "Border of G"}, {"#2e8b57", "Border of C"}, {"black", "Focus (R,0)"}};
  if (p) legend.push_back({"#6a0dad", "Equilibrium Point P"});
  if (!traces.empty()) {
    legend.push_back({"#d2691e", "Separatrix W^u(F)"});
    legend.push_back({"#b22222", "Separatrix W^s(F)"});
  }
  if (orbits > 0) legend.push_back({"#9a9a9a", "Sampled orbits"});
  svg.legend(legend);
  return {svg.finish()};
}

inline const char* cell_color(CellClass c) {
  switch (c) {
    case CellClass::ReachedF: return "#f4a261";
    case CellClass::ConvergedToP: return "#2a9d8f";
    case CellClass::LeftWindow: return "#264653";
    case CellClass::MaxTimeExceeded: return "#e63946";
    case CellClass::Excluded: return "#ffffff";
  }
  return "#000000";
}

inline Output cmd_basin(const Manifest& m, const Normalized& nz, const Window& win, int res) {
  if (res < 2) throw UsageError("--res must be at least 2");
  const double L = nz.scale.length;
  const Window nwin{win.xmin / L, win.xmax / L, win.ymin / L, win.ymax / L};
  const BasinGrid g = classify_basin_grid(nz.params, nwin, res, res, m.cfg);
  const std::string fmt = m.common.format.empty() ? "json" : m.common.format;
  if (fmt == "csv") {
    std::string s = "x,y,class\n";
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const auto c = to_original(g.center(i, j), nz.scale);
        s += num17(c.x) + "," + num17(c.y) + "," + std::string(to_string(g.at(i, j))) + "\n";
      }
    return {s};
  }
  if (fmt == "json") {
    json cells = json::array();
    for (auto c : g.cells) cells.push_back(std::string(to_string(c)));
    json counts = json::object();
    for (auto c : {CellClass::ReachedF, CellClass::ConvergedToP, CellClass::LeftWindow,
                   CellClass::MaxTimeExceeded, CellClass::Excluded})
      counts[std::string(to_string(c))] = g.count(c);
    json result = {{"window", {win.xmin, win.xmax, win.ymin, win.ymax}},
                   {"nx", g.nx}, {"ny", g.ny}, {"omega_normalized", g.omega},
                   {"layout", "row-major, y ascending"}, {"counts", counts}, {"cells", cells}};
    return {envelope(m, result)};
  }
  if (fmt == "svg") {
    Svg svg(win, m, !m.common.no_timestamp);
    const double dx = (win.xmax - win.xmin) / res, dy = (win.ymax - win.ymin) / res;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x0 = win.xmin + i * dx, y0 = win.ymin + j * dy;
        svg.rect_cell(x0, y0, x0 + dx, y0 + dy, cell_color(g.at(i, j)));
      }
    const double R = nz.scale.length;
    svg.circle(0.0, 0.0, R, "fill=\"none\" stroke=\"black\" stroke-width=\"2\"", "border-G");
    svg.legend({{cell_color(CellClass::ReachedF), "ReachedF"},
                {cell_color(CellClass::ConvergedToP), "ConvergedToP"},
                {cell_color(CellClass::LeftWindow), "LeftWindow"},
                {cell_color(CellClass::MaxTimeExceeded), "MaxTimeExceeded"}});
    return {svg.finish()};
  }
  throw UsageError("basin supports --format json|csv|svg");
}

inline Output cmd_bifurcations(const Manifest& m, double lo, double hi, double step) {
  if (!(lo < hi)) throw UsageError("--omega-range a:b requires a < b");
  if (lo < 0.0) throw UsageError("--omega-range must be non-negative");
  if (!(step > 0.0)) throw UsageError("--step must be > 0");
  const double to_norm = m.common.R / m.common.v;
  const auto events = bifurcation_scan(lo * to_norm, hi * to_norm, step);
  const std::string fmt = m.common.format.empty() ? "json" : m.common.format;
  if (fmt == "json") {
    json ev = json::array();
    for (const auto& e : events)
      ev.push_back({{"kind", std::string(to_string(e.kind))},
                    {"omega_normalized", e.omega},
                    {"omega_original", e.omega / to_norm},
                    {"bracket_normalized", {e.lo, e.hi}},
                    {"detector", {e.detector_lo, e.detector_hi}}});
    json result = {{"range_original", {lo, hi}},
                   {"range_normalized", {lo * to_norm, hi * to_norm}},
                   {"step_normalized", step},
                   {"events", ev}};
    return {envelope(m, result)};
  }
  if (fmt == "csv") {
    std::string s =
                    "kind,omega_normalized,omega_original,bracket_lo,bracket_hi\n";
    for (const auto& e : events)
      s += std::string(to_string(e.kind)) + "," + num17(e.omega) + "," +
           num17(e.omega / to_norm) + "," + num17(e.lo) + "," + num17(e.hi) + "\n";
    return {s};
  }
  throw UsageError("bifurcations supports --format json|csv");
}

inline Output cmd_verify(const Manifest& m, const std::vector<double>& omegas, int res,
                         long samples) {
  if (omegas.empty()) throw UsageError("--omega-list must not be empty");
  if (res < 2) throw UsageError("--res must be at least 2");
  if (samples < 1) throw UsageError("--samples must be at least 1");
  std::vector<double> normalized;
  for (double w : omegas) {
    if (!(w >= 0.0)) throw UsageError("omega values must be >= 0");
    normalized.push_back(normalize(Params(w, m.common.v, m.common.R)).params.omega());
  }
  CertifyConfig cc;
  cc.integration = m.cfg;
  cc.grid_resolution = res;
  cc.invariance_samples = samples;
  const TheoremReport rep = certify_theorem1(normalized, cc);
  const int code = rep.all_applicable_pass() ? kOk : kCertificationFailure;

  const std::string fmt = m.common.format.empty() ? "json" : m.common.format;
  if (fmt == "json") {
    json per = json::array();
    for (std::size_t i = 0; i < rep.per_omega.size(); ++i) {
      const auto& o = rep.per_omega[i];
      json clauses = json::array();
      for (const auto& c : o.clauses)
        clauses.push_back({{"clause", c.clause},
                           {"verdict", std::string(to_string(c.verdict))},
                           {"samples", c.samples},
                           {"worst_margin", c.worst_margin},
                           {"failures", c.failures},
                           {"witnesses", c.witnesses},
                           {"notes", c.notes}});
      per.push_back({{"omega_original", omegas[i]},
                     {"omega_normalized", o.omega},
                     {"degenerate", o.degenerate},
                     {"notice", o.notice},
                     {"clauses", clauses}});
    }
    json result = {{"all_applicable_pass", rep.all_applicable_pass()},
                   {"grid_resolution", res},
                   {"invariance_samples", samples},
                   {"per_omega", per}};
    return {envelope(m, result), code};
  }
  if (fmt == "csv") {
    std::string s =
                    "omega_original,omega_normalized,clause,verdict,samples,worst_margin,failures\n";
    for (std::size_t i = 0; i < rep.per_omega.size(); ++i)
      for (const auto& c : rep.per_omega[i].clauses)
        s += num17(omegas[i]) + "," + num17(rep.per_omega[i].omega) + "," + c.clause + "," +
             std::string(to_string(c.verdict)) + "," + std::to_string(c.samples) + "," +
             num17(c.worst_margin) + "," + std::to_string(c.failures) + "\n";
    return {s, code};
  }
  throw UsageError("verify supports --format json|csv");
}

inline Output cmd_trajectory(const Manifest& m, const Normalized& nz, const CartesianState& start,
                             const std::string& direction, double stride) {
  Direction dir;
  if (direction == "forward") dir = Direction::Forward;
  else if (direction == "backward") dir = Direction::Backward;
  else throw UsageError("--direction must be forward or backward");
  if (!(stride >= 0.0)) throw UsageError("--stride must be >= 0");
  IntegrationConfig cfg = m.cfg;
  cfg.sample_stride = stride / nz.scale.time;
  const CartesianState s0 = to_normalized(start, nz.scale);
  if (!(distance_to_focus(s0) >= kSingularThreshold))
    throw UsageError("--start coincides with the focus F");
  const Trajectory tr = integrate(nz.params, s0, dir, cfg);

  const std::string fmt = m.common.format.empty() ? "json" : m.common.format;
  const std::string term = std::string(to_string(tr.termination.kind));
  if (fmt == "json") {
    json pts = json::array();
    for (const auto& q : tr.samples) {
      const auto o = to_original(q.state, nz.scale);
      pts.push_back({q.t * nz.scale.time, o.x, o.y});
    }
    json result = {{"start", point_json(start)},
                   {"direction", direction},
                   {"termination", {{"kind", term}, {"t", tr.termination.t * nz.scale.time}}},
                   {"columns", {"t", "x", "y"}},
                   {"samples", pts}};
    return {envelope(m, result)};
  }
  if (fmt == "csv") {
    std::string s = "t,x,y,event\n";
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
      const auto& q = tr.samples[i];
      const auto o = to_original(q.state, nz.scale);
      s += num17(q.t * nz.scale.time) + "," + num17(o.x) + "," + num17(o.y) + "," +
           (i + 1 == tr.samples.size() ? term : "") + "\n";
    }
    return {s};
  }
  if (fmt == "svg") {
    const double R = nz.scale.length;
    Svg svg(Window{-2 * R, 2 * R, -2 * R, 2 * R}, m, !m.common.no_timestamp);
    std::vector<CartesianState> pts;
    for (const auto& q : tr.samples) pts.push_back(to_original(q.state, nz.scale));
    svg.circle(0.0, 0.0, R, "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\"", "border-G");
    svg.polyline(pts, "stroke=\"#d2691e\" stroke-width=\"2\"", "orbit");
    svg.marker(R, 0.0, "black", "focus-F");
    svg.legend({{"#1f4e9c", "Border of G"}, {"#d2691e", "Orbit (" + term + ")"}});
    return {svg.finish()};
  }
  throw UsageError("trajectory supports --format json|csv|svg");
}

inline void add_common(CLI::App* sub, Common& c, bool needs_omega) {
  auto* o = sub->add_option("--omega", c.omega, "angular velocity of the medium (original units)");
  if (needs_omega) o->required();
  sub->add_option("--v", c.v, "speed toward the focus")->capture_default_str();
  sub->add_option("--R", c.R, "focal distance")->capture_default_str();
  sub->add_option("--format", c.format, "json | csv | svg");
  sub->add_option("--out", c.out, "output file (default: standard output)");
  sub->add_option("--tol", c.tol, "integration override key=value (normalized units)");
  sub->add_flag("--no-timestamp", c.no_timestamp, "omit the generation timestamp from svg");
  sub->add_flag("--timing", c.timing, "embed wall-clock duration in json/csv");
}

}  // namespace detail

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

namespace detail {

inline int replay(const std::string& path, const std::vector<std::string>& extra,
                  std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "mwkit: cannot open manifest " << path << "\n";
    return kUsage;
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    err << "mwkit: malformed manifest: " << e.what() << "\n";
    return kUsage;
  }
  const json* man = j.contains("manifest") ? &j["manifest"] : &j;
  if (!man->contains("args") || !(*man)["args"].is_array()) {
    err << "mwkit: manifest has no args array\n";
    return kUsage;
  }
  auto args = (*man)["args"].get<std::vector<std::string>>();
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args, out, err);
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  const auto t_start = std::chrono::steady_clock::now();

  CLI::App app{"mwkit: phase portraits of the rotating-medium focus-seeking model"};
  app.set_version_flag("--version", kToolVersion);
  std::string replay_path;
  app.add_option("--replay", replay_path, "re-run the command recorded in a json output");

  Common c;
  std::string window_text, range_text, list_text, start_text, direction = "forward";
  int orbits = 8, res = 50, verify_res = 100;
  long samples = 10000;
  double step = 1e-2, stride = 0.0;

  auto* eq = app.add_subcommand("equilibria", "equilibrium listing and classification");
  add_common(eq, c, true);

  auto* portrait = app.add_subcommand("portrait", "static SVG phase portrait");
  add_common(portrait, c, true);
  portrait->add_option("--window", window_text, "xmin,xmax,ymin,ymax (default: 1.5x G box)");
  portrait->add_option("--orbits", orbits, "number of sampled orbits")->capture_default_str();

  auto* basin = app.add_subcommand("basin", "basin-of-attraction grid");
  add_common(basin, c, true);
  basin->add_option("--window", window_text, "xmin,xmax,ymin,ymax (default: G box)");
  basin->add_option("--res", res, "cells per axis")->capture_default_str();

  auto* bif = app.add_subcommand("bifurcations", "pitchfork and node/focus values in a range");
  add_common(bif, c, false);
  bif->add_option("--omega-range", range_text, "a:b in original units")->required();
  bif->add_option("--step", step, "scan step (normalized omega)")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "numerical certification of the theorem clauses");
  add_common(verify, c, false);
  verify->add_option("--omega-list", list_text, "comma separated omegas")->required();
  verify->add_option("--res", verify_res, "basin grid cells per axis")->capture_default_str();
  verify->add_option("--samples", samples, "invariance samples")->capture_default_str();

  auto* traj = app.add_subcommand("trajectory", "single orbit dump");
  add_common(traj, c, true);
  traj->add_option("--start", start_text, "x,y in original units")->required();
  traj->add_option("--direction", direction, "forward | backward")->capture_default_str();
  traj->add_option("--stride", stride, "sample stride in original time units (0 = every step)");

  app.require_subcommand(0, 1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mwkit: " << e.what() << "\n";
    return kUsage;
  }

  if (!replay_path.empty()) {
    if (!app.get_subcommands().empty()) {
      err << "mwkit: --replay cannot be combined with a subcommand\n";
      return kUsage;
    }
    std::vector<std::string> extra;
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i] == "--out" && i + 1 < args.size()) extra = {"--out", args[i + 1]};
    return replay(replay_path, extra, out, err);
  }
  if (app.get_subcommands().empty()) {
    err << "mwkit: a subcommand is required\n" << app.help();
    return kUsage;
  }
  CLI::App* sub = app.get_subcommands().front();

  Output result;
  try {
    Manifest m;
    m.command = sub->get_name();
    m.args = canonical_args(args);
    m.common = c;
    m.cfg = apply_tol({}, c.tol);
    const bool has_omega = std::isfinite(c.omega);
    std::optional<Normalized> nz;
    try {
      const Params p(has_omega ? c.omega : 0.0, c.v, c.R);
      nz = normalize(p);
    } catch (const InvalidParameters& e) {
      throw UsageError(e.what());
    }
    m.omega_normalized = nz->params.omega();

    auto produce = [&]() -> Output {
      if (sub == eq) return cmd_equilibria(m, *nz);
      if (sub == portrait) {
        const Window w = window_text.empty() ? Window::g_box(1.5 * c.R) : parse_window(window_text);
        return cmd_portrait(m, *nz, w, orbits);
      }
      if (sub == basin) {
        const Window w = window_text.empty() ? Window::g_box(c.R) : parse_window(window_text);
        return cmd_basin(m, *nz, w, res);
      }
      if (sub == bif) {
        const auto r = parse_list(range_text, ':', 2);
        return cmd_bifurcations(m, r[0], r[1], step);
      }
      if (sub == verify)
        return cmd_verify(m, parse_list(list_text, ','), verify_res, samples);
      const auto st = parse_list(start_text, ',', 2);
      return cmd_trajectory(m, *nz, {st[0], st[1]}, direction, stride);
    };
    result = produce();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (c.timing && !result.body.empty()) {
      if (result.body.front() == '{') {
        json j = json::parse(result.body);
        j["manifest"]["wall_clock_seconds"] = elapsed;
        result.body = j.dump(2) + "\n";
      }
    }
    err << "mwkit: " << m.command << " finished in " << elapsed << " s\n";
  } catch (const UsageError& e) {
    err << "mwkit: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidParameters& e) {
    err << "mwkit: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "mwkit: error: " << e.what() << "\n";
    return kCertificationFailure;
  }

  if (c.out.empty()) {
    out << result.body;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "mwkit: cannot write " << c.out << "\n";
      return kUsage;
    }
    f << result.body;
  }
  return result.exit_code;
}

}  // namespace mwkit::cli
