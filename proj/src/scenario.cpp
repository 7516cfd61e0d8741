#include "wavecore/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "wavecore/errors.hpp"
#include "wavecore/field_io.hpp"

namespace wavecore {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// Locates the line of a key path in the raw text by scanning for each quoted
// segment in turn; falls back to line 1.
int line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const std::string& seg : path) {
    const std::size_t p = text.find("\"" + seg + "\"", pos);
    if (p == std::string::npos) break;
    pos = p;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    throw ConfigError(source_ + ":" + std::to_string(line_of(text_, path)) + ": " + dotted + ": " + msg);
  }

  const json& child(const json& j, const std::vector<std::string>& path) const {
    if (!j.contains(path.back())) fail(path, "missing required key");
    return j.at(path.back());
  }

  double number(const json& j, const std::vector<std::string>& path) const {
    const json& v = child(j, path);
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }
  double number_or(const json& j, const std::vector<std::string>& path, double dflt) const {
    return j.contains(path.back()) ? number(j, path) : dflt;
  }
  double positive(const json& j, const std::vector<std::string>& path) const {
    const double d = number(j, path);
    if (!(d > 0.0)) fail(path, "must be positive");
    return d;
  }
  std::vector<double> numbers(const json& j, const std::vector<std::string>& path, std::size_t count) const {
    const json& v = child(j, path);
    std::vector<double> out;
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const json& e : v) {
        if (!e.is_number()) fail(path, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    } else {
      fail(path, "expected a number or an array of numbers");
    }
    if (count && out.size() != count) fail(path, "expected " + std::to_string(count) + " entries");
    return out;
  }
  std::string string(const json& j, const std::vector<std::string>& path) const {
    const json& v = child(j, path);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }
  const std::string& text() const { return text_; }

 private:
  const std::string& text_;
  std::string source_;
};

const std::vector<std::string> kModels = {"exact", "action", "schrodinger", "rays", "wigner"};

void check_keys(const Reader& r, const json& j, const std::vector<std::string>& path,
                const std::vector<std::string>& allowed) {
  if (!j.is_object()) r.fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      auto p = path;
      p.push_back(it.key());
      r.fail(p, "unknown key");
    }
  }
}

void validate_bumps(const Reader& r, const json& spec, const std::vector<std::string>& path, int dims) {
  auto p = path;
  p.push_back("base");
  r.number(spec, p);
  p.back() = "bumps";
  const json& bumps = r.child(spec, p);
  if (!bumps.is_array()) r.fail(p, "expected an array");
  for (const json& b : bumps) {
    check_keys(r, b, p, {"amplitude", "center", "width"});
    auto q = p;
    q.push_back("amplitude");
    r.number(b, q);
    q.back() = "center";
    const json& c = r.child(b, q);
    q.back() = "width";
    const json& w = r.child(b, q);
    if (!c.is_array() || !w.is_array() || static_cast<int>(c.size()) != dims || static_cast<int>(w.size()) != dims)
      r.fail(q, "center and width need one entry per axis");
    for (std::size_t a = 0; a < c.size(); ++a) {
      if (!c[a].is_number()) r.fail(q, "center entries must be numbers");
      if (!(w[a].is_null() || (w[a].is_number() && w[a].get<double>() > 0.0)))
        r.fail(q, "width entries must be positive or null (no variation along that axis)");
    }
  }
}

void validate_family(const Reader& r, const json& spec, const std::string& key, int dims) {
  const std::vector<std::string> path{key};
  if (!spec.is_object()) r.fail(path, "expected an object");
  const std::string fam = r.string(spec, {key, "family"});
  auto need = [&](const std::string& k) { return r.number(spec, {key, k}); };
  if (fam == "constant") {
    check_keys(r, spec, path, {"family", "value"});
    r.numbers(spec, {key, "value"}, key == "current" ? static_cast<std::size_t>(dims) : 1);
  } else if (fam == "gaussian_bumps") {
    check_keys(r, spec, path, {"family", "base", "bumps"});
    validate_bumps(r, spec, path, dims);
  } else if (fam == "file") {
    check_keys(r, spec, path, {"family", "path", "path_y"});
    r.string(spec, {key, "path"});
  } else if (key == "current" && fam == "tanh_jet") {
    check_keys(r, spec, path, {"family", "base", "amplitude", "center", "width", "depth_profile"});
    if (dims != 1) r.fail({key, "family"}, "tanh_jet is 1D");
    need("base");
    need("amplitude");
    need("center");
    r.positive(spec, {key, "width"});
    if (spec.contains("depth_profile")) {
      const std::string dp = r.string(spec, {key, "depth_profile"});
      if (dp != "cosine" && dp != "uniform") r.fail({key, "depth_profile"}, "expected \"cosine\" or \"uniform\"");
    }
  } else if (key == "current" && fam == "parabolic_opposing") {
    check_keys(r, spec, path, {"family", "amplitude", "scale"});
    if (dims != 1) r.fail({key, "family"}, "parabolic_opposing is 1D");
    need("amplitude");
    r.positive(spec, {key, "scale"});
  } else if (key == "current" && fam == "meandering_jet") {
    check_keys(r, spec, path, {"family", "amplitude", "width", "meander", "wavenumber", "cross_gradient"});
    if (dims != 2) r.fail({key, "family"}, "meandering_jet is 2D");
    need("amplitude");
    r.positive(spec, {key, "width"});
    need("meander");
    need("wavenumber");
    need("cross_gradient");
  } else {
    r.fail({key, "family"}, "unknown family \"" + fam + "\"");
  }
}

// Blend weight 1/2 erfc((d - W/2)/(W/8)) with d the distance to the nearest
// end of the axis, and its first two x-derivatives.
struct AxisBlend {
  RField s, sx, sxx;
};

AxisBlend axis_blend(std::size_t n, double L, double W) {
  AxisBlend b{RField(n), RField(n), RField(n)};
  const double h = L / static_cast<double>(n), w8 = W / 8.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = h * static_cast<double>(i);
    const double d = std::min(x, L - x), dd = x <= L - x ? 1.0 : -1.0;
    const double u = (d - 0.5 * W) / w8;
    const double e = std::exp(-u * u) / std::sqrt(kPi);
    b.s[i] = 0.5 * std::erfc(u);
    b.sx[i] = -e / w8 * dd;
    b.sxx[i] = 2.0 * u * e / (w8 * w8);
  }
  return b;
}

RField blend_weight(const Grid& g, double W) {
  const AxisBlend bx = axis_blend(g.n(0), g.length(0), W);
  RField s(g.size());
  if (g.dims() == 1) return bx.s;
  const AxisBlend by = axis_blend(g.n(1), g.length(1), W);
  for (std::size_t ix = 0; ix < g.n(0); ++ix)
    for (std::size_t iy = 0; iy < g.n(1); ++iy) s[g.index(ix, iy)] = 1.0 - (1.0 - bx.s[ix]) * (1.0 - by.s[iy]);
  return s;
}

double edge_mean(const RField& f, const RField& s) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = s[i] * (1.0 - s[i]);
    num += w * f[i];
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

// f <- (1 - s) f + s p, with x-derivatives carried along in 1D.
void close_field(const Grid& g, double W, FamilyField& f) {
  const RField s = blend_weight(g, W);
  const double p = edge_mean(f.value, s);
  if (g.dims() == 1 && !f.dx.empty()) {
    const AxisBlend b = axis_blend(g.n(0), g.length(0), W);
    for (std::size_t i = 0; i < f.value.size(); ++i) {
      const double r = f.value[i] - p;
      f.dxx[i] = (1.0 - b.s[i]) * f.dxx[i] - 2.0 * b.sx[i] * f.dx[i] - b.sxx[i] * r;
      f.dx[i] = (1.0 - b.s[i]) * f.dx[i] - b.sx[i] * r;
    }
  }
  for (std::size_t i = 0; i < f.value.size(); ++i) f.value[i] = (1.0 - s[i]) * f.value[i] + s[i] * p;
}

// Periodic image sum of a Gaussian along one axis, with its first two derivatives.
void periodic_gauss(double x, double xc, double s, double L, double& v, double& d1, double& d2) {
  v = d1 = d2 = 0.0;
  const int images = static_cast<int>(std::ceil(8.0 * s / L)) + 1;
  for (int m = -images; m <= images; ++m) {
    const double r = x - xc - m * L;
    const double e = std::exp(-r * r / (2.0 * s * s));
    v += e;
    d1 += -r / (s * s) * e;
    d2 += (r * r / (s * s) - 1.0) / (s * s) * e;
  }
}

FamilyField gaussian_bumps(const json& spec, const Grid& g) {
  FamilyField f{RField(g.size(), spec.at("base").get<double>()), RField(g.size(), 0.0), RField(g.size(), 0.0)};
  for (const json& b : spec.at("bumps")) {
    const double A = b.at("amplitude").get<double>();
    const json& c = b.at("center");
    const json& w = b.at("width");
    for (std::size_t ix = 0; ix < g.n(0); ++ix) {
      double vx = 1.0, dx = 0.0, dxx = 0.0;
      if (!w[0].is_null())
        periodic_gauss(g.coord(0, ix), c[0].get<double>(), w[0].get<double>(), g.length(0), vx, dx, dxx);
      for (std::size_t iy = 0; iy < g.n(1); ++iy) {
        double vy = 1.0, dy = 0.0, dyy = 0.0;
        if (g.dims() == 2 && !w[1].is_null())
          periodic_gauss(g.coord(1, iy), c[1].get<double>(), w[1].get<double>(), g.length(1), vy, dy, dyy);
        const std::size_t i = g.index(ix, iy);
        f.value[i] += A * vx * vy;
        f.dx[i] += A * dx * vy;
        f.dxx[i] += A * dxx * vy;
      }
    }
  }
  return f;
}

RField load_file_field(const std::string& path, const Grid& g) {
  GridHeader h;
  RField f = read_field_binary(path, &h);
  if (f.size() != g.size() || static_cast<int>(h.n.size()) < g.dims() || h.n[0] != g.n(0))
    throw ConfigError("field file " + path + " does not match the scenario grid");
  return f;
}

json packet_json(const PacketSpec& p) {
  return {{"amplitude", p.amplitude}, {"center", p.center}, {"width", p.width}, {"k0", p.k0}, {"potential", p.potential}};
}

}  // namespace

double gauss_bump(double x, double xc, double s) { return std::exp(-(x - xc) * (x - xc) / (2.0 * s * s)); }

Grid Scenario::grid() const {
  return dims() == 1 ? Grid(length[0], n[0]) : Grid(length[0], length[1], n[0], n[1]);
}

json Scenario::resolved() const {
  return {{"name", name},
          {"grid", {{"length", length}, {"n", n}}},
          {"gravity", gravity},
          {"bathymetry", bathymetry},
          {"current", current},
          {"initial", packet_json(packet)},
          {"run", {{"duration", duration}, {"steps_per_period", steps_per_period}, {"output_every", output_every}}},
          {"sponge", {{"width", sponge_width}, {"rate", sponge_rate}}},
          {"closure_width", closure_width},
          {"models", models},
          {"window", window},
          {"dn", {{"mu", mu}, {"rank", rank}}},
          {"wigner", {{"y_max", wigner_y_max}, {"k_min", wigner_k_min}}},
          {"rays", {{"dt", ray_dt}}}};
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const long byte = static_cast<long>(std::min<std::size_t>(e.byte, text.size()));
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON");
  }
  const Reader r(text, source);
  check_keys(r, j, {}, {"name", "grid", "gravity", "bathymetry", "current", "initial", "run", "sponge",
                        "closure_width", "models", "window", "dn", "wigner", "rays"});
  Scenario s;
  s.name = r.string(j, {"name"});

  const json& gj = r.child(j, {"grid"});
  check_keys(r, gj, {"grid"}, {"length", "n"});
  s.length = r.numbers(gj, {"grid", "length"}, 0);
  const std::vector<double> nn = r.numbers(gj, {"grid", "n"}, s.length.size());
  if (s.length.empty() || s.length.size() > 2) r.fail({"grid", "length"}, "one or two axes expected");
  for (double L : s.length)
    if (!(L > 0.0)) r.fail({"grid", "length"}, "lengths must be positive");
  for (double v : nn) {
    if (v < 8 || v != std::floor(v) || static_cast<long>(v) % 2) r.fail({"grid", "n"}, "counts must be even integers >= 8");
    s.n.push_back(static_cast<std::size_t>(v));
  }
  const int dims = s.dims();
  s.gravity = j.contains("gravity") ? r.positive(j, {"gravity"}) : kGravity;

  s.bathymetry = r.child(j, {"bathymetry"});
  validate_family(r, s.bathymetry, "bathymetry", dims);
  s.current = j.contains("current") ? j.at("current") : json{{"family", "constant"}, {"value", std::vector<double>(dims, 0.0)}};
  validate_family(r, s.current, "current", dims);

  const json& ic = r.child(j, {"initial"});
  check_keys(r, ic, {"initial"}, {"amplitude", "center", "width", "k0", "potential"});
  s.packet.amplitude = r.number(ic, {"initial", "amplitude"});
  s.packet.center = r.numbers(ic, {"initial", "center"}, dims);
  s.packet.width = r.numbers(ic, {"initial", "width"}, dims);
  for (double w : s.packet.width)
    if (!(w > 0.0)) r.fail({"initial", "width"}, "widths must be positive");
  s.packet.k0 = r.positive(ic, {"initial", "k0"});
  if (ic.contains("potential")) {
    s.packet.potential = r.string(ic, {"initial", "potential"});
    if (s.packet.potential != "zero" && s.packet.potential != "right")
      r.fail({"initial", "potential"}, "expected \"zero\" or \"right\"");
  }

  const json& run = r.child(j, {"run"});
  check_keys(r, run, {"run"}, {"duration", "steps_per_period", "output_every"});
  s.duration = r.positive(run, {"run", "duration"});
  s.output_every = r.positive(run, {"run", "output_every"});
  if (run.contains("steps_per_period")) {
    const double spp = r.positive(run, {"run", "steps_per_period"});
    if (spp != std::floor(spp)) r.fail({"run", "steps_per_period"}, "must be an integer");
    s.steps_per_period = static_cast<int>(spp);
  }

  if (j.contains("sponge")) {
    const json& sp = j.at("sponge");
    check_keys(r, sp, {"sponge"}, {"width", "rate"});
    s.sponge_width = r.number_or(sp, {"sponge", "width"}, s.sponge_width);
    if (!(s.sponge_width >= 0.0 && s.sponge_width < 0.5)) r.fail({"sponge", "width"}, "must lie in [0, 0.5)");
    s.sponge_rate = r.number_or(sp, {"sponge", "rate"}, s.sponge_rate);
  }
  s.closure_width = r.number_or(j, {"closure_width"}, -1.0);

  if (j.contains("models")) {
    const json& m = j.at("models");
    if (!m.is_array()) r.fail({"models"}, "expected an array of model names");
    for (const json& e : m) {
      if (!e.is_string() || std::find(kModels.begin(), kModels.end(), e.get<std::string>()) == kModels.end())
        r.fail({"models"}, "unknown model; expected exact, action, schrodinger, rays or wigner");
      s.models.push_back(e.get<std::string>());
    }
  } else {
    s.models = {"exact"};
  }
  if (dims == 2 && std::find(s.models.begin(), s.models.end(), "wigner") != s.models.end())
    r.fail({"models"}, "the wigner model is 1D only");

  if (j.contains("window")) {
    s.window = r.numbers(j, {"window"}, 2 * static_cast<std::size_t>(dims));
    for (int a = 0; a < dims; ++a) {
      const double lo = s.window[2 * a], hi = s.window[2 * a + 1];
      if (!(lo >= 0.0 && hi <= s.length[a] && lo < hi)) r.fail({"window"}, "window must be an ordered range inside the domain");
    }
  } else {
    for (int a = 0; a < dims; ++a) {
      s.window.push_back(0.0);
      s.window.push_back(s.length[a]);
    }
  }

  if (j.contains("dn")) {
    const json& d = j.at("dn");
    check_keys(r, d, {"dn"}, {"mu", "rank"});
    s.mu = d.contains("mu") ? r.positive(d, {"dn", "mu"}) : 1.0;
    s.rank = static_cast<int>(r.number_or(d, {"dn", "rank"}, 8));
    if (s.rank < 1 || s.rank > kMaxSeparableRank) r.fail({"dn", "rank"}, "rank must lie in [1, 32]");
  }
  if (j.contains("wigner")) {
    const json& w = j.at("wigner");
    check_keys(r, w, {"wigner"}, {"y_max", "k_min"});
    s.wigner_y_max = r.number_or(w, {"wigner", "y_max"}, -1.0);
    if (s.wigner_y_max > 0.5 * s.length[0]) r.fail({"wigner", "y_max"}, "window exceeds half the domain");
    s.wigner_k_min = r.number_or(w, {"wigner", "k_min"}, -1.0);
  }
  if (j.contains("rays")) {
    const json& rj = j.at("rays");
    check_keys(r, rj, {"rays"}, {"dt"});
    s.ray_dt = r.number_or(rj, {"rays", "dt"}, -1.0);
  }

  // Packet feasibility on this grid.
  const Grid g = s.grid();
  if (s.packet.k0 >= 0.5 * g.kmax(0)) r.fail({"initial", "k0"}, "carrier must lie below half the Nyquist wavenumber");
  for (int a = 0; a < dims; ++a)
    if (s.packet.width[a] < 4.0 * g.dx(a)) r.fail({"initial", "width"}, "packet narrower than four cells");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

namespace {

json bump(double amp, std::vector<json> c, std::vector<json> w) {
  return {{"amplitude", amp}, {"center", c}, {"width", w}};
}

std::string builtin_text(const std::string& name) {
  const double L = 2000.0;
  json j;
  if (name == "total_energy_1d") {
    j = {{"name", name},
         {"grid", {{"length", {L}}, {"n", {1024}}}},
         {"bathymetry", {{"family", "constant"}, {"value", 9.0}}},
         {"current",
          {{"family", "tanh_jet"}, {"base", 1.0}, {"amplitude", 0.5}, {"center", 2.0 * L / 3.0}, {"width", 300.0},
           {"depth_profile", "cosine"}}},
         {"initial", {{"amplitude", 0.5}, {"center", {L / 2.0}}, {"width", {0.04 * L}}, {"k0", 2.0 * kPi / (L / 50.0)}}},
         {"run", {{"duration", 100.0}, {"steps_per_period", 32}, {"output_every", 1.0}}},
         {"sponge", {{"width", 0.1}, {"rate", 0.0}}},
         {"models", {"exact"}},
         {"window", {0.0, L}}};
  } else if (name == "bumpy_1d") {
    j = {{"name", name},
         {"grid", {{"length", {L}}, {"n", {1024}}}},
         {"bathymetry",
          {{"family", "gaussian_bumps"},
           {"base", 24.0},
           {"bumps",
            {bump(-18.0, {2.0 * L / 3.0}, {0.08 * L}), bump(-14.5, {L / 2.0}, {0.02 * L}),
             bump(-3.6, {2.2 * L / 3.0}, {0.01 * L})}}}},
         {"current",
          {{"family", "gaussian_bumps"},
           {"base", 1.2},
           {"bumps",
            {bump(0.5, {2.0 * L / 3.0}, {0.12 * L}), bump(0.4, {L / 2.0}, {0.02 * L}),
             bump(0.01, {2.2 * L / 3.0}, {0.01 * L})}}}},
         {"initial", {{"amplitude", 0.5}, {"center", {0.3 * L}}, {"width", {0.04 * L}}, {"k0", 2.0 * kPi / (L / 60.0)}}},
         {"run", {{"duration", 300.0}, {"steps_per_period", 32}, {"output_every", 2.0}}},
         {"models", {"exact", "action", "schrodinger", "rays"}},
         {"window", {0.4 * L, 0.85 * L}}};
  } else if (name == "blocking_1d") {
    j = {{"name", name},
         {"grid", {{"length", {L}}, {"n", {1024}}}},
         {"bathymetry", {{"family", "constant"}, {"value", 20.0}}},
         {"current", {{"family", "parabolic_opposing"}, {"amplitude", 5.0}, {"scale", L}}},
         {"initial", {{"amplitude", 0.5}, {"center", {0.3 * L}}, {"width", {0.04 * L}}, {"k0", 2.0 * kPi / (L / 60.0)}}},
         {"run", {{"duration", 700.0}, {"steps_per_period", 32}, {"output_every", 4.0}}},
         {"models", {"exact", "rays", "wigner"}},
         {"window", {0.0, L}}};
  } else if (name == "jet_2d") {
    const double Lx = 1500.0, Ly = 800.0, sU = 0.7 * Ly;
    j = {{"name", name},
         {"grid", {{"length", {Lx, Ly}}, {"n", {256, 128}}}},
         {"bathymetry",
          {{"family", "gaussian_bumps"},
           {"base", 24.0},
           {"bumps", {bump(-18.0, {Lx, Ly}, {Lx / 4.0, Ly / 4.0}), bump(-10.0, {Lx / 2.0, 0.0}, {0.06 * Lx, nullptr})}}}},
         {"current",
          {{"family", "meandering_jet"},
           {"amplitude", 1.0},
           {"width", sU},
           {"meander", 0.3},
           {"wavenumber", 3.0 * kPi / Ly},
           {"cross_gradient", 1.0 / (2.0 * Ly)}}},
         {"initial",
          {{"amplitude", 0.5}, {"center", {Lx / 5.0, Ly / 2.0}}, {"width", {0.04 * Lx, 0.04 * Lx}}, {"k0", 2.0 * kPi / (Lx / 36.0)}}},
         {"run", {{"duration", 200.0}, {"steps_per_period", 32}, {"output_every", 5.0}}},
         {"models", {"exact", "action", "schrodinger", "rays"}},
         {"window", {0.35 * Lx, 0.9 * Lx, 0.1 * Ly, 0.9 * Ly}}};
  } else {
    throw ConfigError("unknown built-in scenario \"" + name + "\"");
  }
  return j.dump(2);
}

const std::map<std::string, std::uint64_t>& stored_hashes() {
  static const std::map<std::string, std::uint64_t> h = {
      {"total_energy_1d", 0x2379fc93799fff82ULL},
      {"bumpy_1d", 0x1f7d13e662093e7eULL},
      {"blocking_1d", 0x59d41dc8295a739bULL},
      {"jet_2d", 0x222605189c3ff22bULL}};
  return h;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"total_energy_1d", "bumpy_1d", "blocking_1d", "jet_2d"}; }

Scenario builtin_scenario(const std::string& name) { return parse_scenario(builtin_text(name), "builtin:" + name); }

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a64(s.resolved().dump()); }

std::uint64_t stored_builtin_hash(const std::string& name) {
  const auto& h = stored_hashes();
  const auto it = h.find(name);
  if (it == h.end()) throw ConfigError("unknown built-in scenario \"" + name + "\"");
  return it->second;
}

Scenario quick_variant(const Scenario& s) {
  Scenario q = s;
  for (auto& n : q.n) n = std::max<std::size_t>(64, n / 2);
  q.duration = s.duration / 4.0;
  q.name = s.name + "_quick";
  return q;
}

FamilyField evaluate_depth(const json& spec, const Grid& g, double) {
  const std::string fam = spec.at("family").get<std::string>();
  if (fam == "constant") {
    const json& v = spec.at("value");
    const double b = v.is_array() ? v.at(0).get<double>() : v.get<double>();
    return {RField(g.size(), b), RField(g.size(), 0.0), RField(g.size(), 0.0)};
  }
  if (fam == "gaussian_bumps") return gaussian_bumps(spec, g);
  if (fam == "file") return {load_file_field(spec.at("path").get<std::string>(), g), {}, {}};
  throw ConfigError("unknown depth family \"" + fam + "\"");
}

CurrentField evaluate_current(const json& spec, const Grid& g, double closure, const RField& depth) {
  const std::string fam = spec.at("family").get<std::string>();
  const std::size_t N = g.size();
  CurrentField c{RField(N, 0.0), RField(N, 0.0), std::nullopt};
  if (fam == "constant") {
    const json& v = spec.at("value");
    std::vector<double> u = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
    c.Ux.assign(N, u[0]);
    if (g.dims() == 2 && u.size() > 1) c.Uy.assign(N, u[1]);
  } else if (fam == "gaussian_bumps") {
    c.Ux = gaussian_bumps(spec, g).value;
  } else if (fam == "file") {
    c.Ux = load_file_field(spec.at("path").get<std::string>(), g);
    if (spec.contains("path_y")) c.Uy = load_file_field(spec.at("path_y").get<std::string>(), g);
  } else if (fam == "tanh_jet") {
    const double U0 = spec.at("base").get<double>(), A = spec.at("amplitude").get<double>();
    const double xc = spec.at("center").get<double>(), w = spec.at("width").get<double>();
    FamilyField T{RField(N), RField(N), RField(N)};
    for (std::size_t i = 0; i < N; ++i) {
      const double th = std::tanh((g.coord(0, i) - xc) / w), s2 = 1.0 - th * th;
      T.value[i] = th;
      T.dx[i] = s2 / w;
      T.dxx[i] = -2.0 * th * s2 / (w * w);
    }
    close_field(g, closure, T);
    for (std::size_t i = 0; i < N; ++i) c.Ux[i] = U0 + A * T.value[i];
    const bool cosine = !spec.contains("depth_profile") || spec.at("depth_profile") == "cosine";
    if (cosine) {
      const auto [lo, hi] = std::minmax_element(depth.begin(), depth.end());
      if (*hi - *lo > 1e-12 * *hi) throw ConfigError("tanh_jet with a cosine depth profile needs a constant depth");
      BulkCurrent bc;
      bc.U0 = U0;
      bc.amplitude = A;
      bc.depth = depth[0];
      bc.profile = std::move(T.value);
      bc.profile_dx = std::move(T.dx);
      bc.profile_dxx = std::move(T.dxx);
      c.bulk = std::move(bc);
    }
  } else if (fam == "parabolic_opposing") {
    const double a = spec.at("amplitude").get<double>(), sc = spec.at("scale").get<double>();
    FamilyField f{RField(N), {}, {}};
    for (std::size_t i = 0; i < N; ++i) {
      const double x = g.coord(0, i) / sc;
      f.value[i] = -a * x * x;
    }
    close_field(g, closure, f);
    c.Ux = std::move(f.value);
  } else if (fam == "meandering_jet") {
    const double A = spec.at("amplitude").get<double>(), w = spec.at("width").get<double>();
    const double m = spec.at("meander").get<double>(), q = spec.at("wavenumber").get<double>();
    const double cg = spec.at("cross_gradient").get<double>();
    FamilyField fx{RField(N), {}, {}}, fy{RField(N), {}, {}};
    for (std::size_t ix = 0; ix < g.n(0); ++ix)
      for (std::size_t iy = 0; iy < g.n(1); ++iy) {
        const double x = g.coord(0, ix), y = g.coord(1, iy);
        const double ch = std::cosh((y - m * w * std::sin(q * x)) / w);
        const std::size_t i = g.index(ix, iy);
        fx.value[i] = A / (ch * ch);
        fy.value[i] = cg * x;
      }
    close_field(g, closure, fx);
    close_field(g, closure, fy);
    c.Ux = std::move(fx.value);
    c.Uy = std::move(fy.value);
  } else {
    throw ConfigError("unknown current family \"" + fam + "\"");
  }
  return c;
}

double resolved_closure(const Scenario& s, const Grid& g) {
  if (s.closure_width > 0.0) return s.closure_width;
  double dxmax = g.dx(0);
  double Lmin = g.length(0);
  if (g.dims() == 2) {
    dxmax = std::max(dxmax, g.dx(1));
    Lmin = std::min(Lmin, g.length(1));
  }
  return std::max(s.sponge_width * Lmin, 24.0 * dxmax);
}

double resolved_sponge_rate(const Scenario& s, double bmax) {
  return s.sponge_rate >= 0.0 ? s.sponge_rate : 4.0 * sigma(s.packet.k0, bmax, s.gravity);
}

Environment build_environment(const Scenario& s) {
  const Grid g = s.grid();
  const double W = resolved_closure(s, g);
  FamilyField b = evaluate_depth(s.bathymetry, g, W);
  CurrentField c = evaluate_current(s.current, g, W, b.value);
  const double bmax = *std::max_element(b.value.begin(), b.value.end());
  const SpongeProfile sp{s.sponge_width, resolved_sponge_rate(s, bmax)};
  return make_environment(g, std::move(b.value), std::move(c.Ux), std::move(c.Uy), sp, std::move(c.bulk), s.gravity);
}

WaveState build_initial(const Scenario& s, const Environment& env) {
  const Grid& g = env.grid;
  const PacketSpec& p = s.packet;
  WaveState w = g.dims() == 1 ? packet_ic(g, p.center[0], p.width[0], p.k0, p.amplitude)
                              : packet_ic(g, p.center[0], p.center[1], p.width[0], p.width[1], p.k0, p.amplitude);
  if (p.potential == "right") {
    const double bc = interpolate(g, env.b, p.center[0], g.dims() == 2 ? p.center[1] : 0.0);
    w.phi = directional_potential(g, w.eta, bc, +1, s.gravity);
  }
  return w;
}

double carrier_omega(const Scenario& s, const Environment& env) {
  const Grid& g = env.grid;
  const double y = g.dims() == 2 ? s.packet.center[1] : 0.0;
  const double b = interpolate(g, env.b, s.packet.center[0], y);
  const double U = interpolate(g, env.Ux, s.packet.center[0], y);
  return U * s.packet.k0 + sigma(s.packet.k0, b, s.gravity);
}

}  // namespace wavecore
