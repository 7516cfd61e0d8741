#include "wavecore/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wavecore/errors.hpp"
#include "wavecore/field_io.hpp"

namespace wavecore {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

bool in_window(const Grid& g, std::size_t i, const std::vector<double>& w) {
  const std::size_t ix = i / g.n(1), iy = i % g.n(1);
  const double x = g.coord(0, ix);
  if (x < w[0] || x > w[1]) return false;
  if (g.dims() == 2) {
    const double y = g.coord(1, iy);
    if (y < w[2] || y > w[3]) return false;
  }
  return true;
}

double l1(const Grid& g, const RField& f) {
  double s = 0.0;
  for (double v : f) s += std::abs(v);
  return s * g.cell_area();
}

RField half_norm(const CField& p) {
  RField out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = 0.5 * std::norm(p[i]);
  return out;
}

// Aligns a step to the output cadence: the largest dt <= dt_max dividing `every`.
int substeps(double every, double dt_max) { return std::max(1, static_cast<int>(std::ceil(every / dt_max - 1e-9))); }

// Frames stacked as one table: rows are samples, columns grid points.
void write_frames(const std::string& path, const Grid& g, const std::vector<RField>& frames, double T) {
  GridHeader h;
  h.dims = 2;
  h.n = {frames.size(), g.size()};
  h.len = {T, g.length(0) * (g.dims() == 2 ? g.length(1) : 1.0)};
  RField flat;
  flat.reserve(frames.size() * g.size());
  for (const RField& f : frames) flat.insert(flat.end(), f.begin(), f.end());
  write_table_binary(path, h, flat);
}

std::vector<RField> read_frames(const std::string& path, std::size_t expect_cols) {
  GridHeader h;
  const RField flat = read_field_binary(path, &h);
  if (h.n.size() != 2 || h.n[1] != expect_cols) throw ConfigError(path + ": frame table does not match the run grid");
  std::vector<RField> frames(h.n[0]);
  for (std::size_t r = 0; r < h.n[0]; ++r)
    frames[r].assign(flat.begin() + static_cast<long>(r * h.n[1]), flat.begin() + static_cast<long>((r + 1) * h.n[1]));
  return frames;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

double lerp_at(const std::vector<double>& t, const std::vector<double>& v, double x) {
  if (x <= t.front()) return v.front();
  if (x >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const double a = (x - t[j - 1]) / (t[j] - t[j - 1]);
  return (1.0 - a) * v[j - 1] + a * v[j];
}

}  // namespace

CField right_going(const Grid& g, const CField& psi) {
  CField h = g.forward(psi);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double k = g.kx()[i];
    if (k < 0.0) h[i] = 0.0;
    if (k == 0.0) h[i] *= 0.5;
  }
  // The Nyquist column carries no direction.
  const std::size_t nyq = g.n(0) / 2;
  for (std::size_t iy = 0; iy < g.n(1); ++iy) h[g.index(nyq, iy)] = 0.0;
  return g.inverse(h);
}

void ModelComparison::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << "\n";
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << columns.at(names[c])[r];
    out << "\n";
  }
}

ModelComparison compare_models(const Grid& g, const std::vector<double>& t,
                               const std::map<std::string, std::vector<RField>>& density,
                               const std::vector<double>& window, double e0_l1) {
  if (window.size() != 2 * static_cast<std::size_t>(g.dims())) throw ConfigError("window needs two bounds per axis");
  for (int a = 0; a < g.dims(); ++a)
    if (!(window[2 * a] >= 0.0 && window[2 * a + 1] <= g.length(a) && window[2 * a] < window[2 * a + 1]))
      throw ConfigError("comparison window lies outside the domain");
  const auto ex = density.find("exact");
  if (ex == density.end()) throw ConfigError("comparison needs the exact density");
  if (!(e0_l1 > 0.0)) throw ConfigError("comparison needs a nonzero initial energy");
  std::vector<std::string> models;
  for (const auto& [name, frames] : density) {
    if (frames.size() != t.size()) throw ConfigError("model " + name + " is not on the common time axis");
    if (name != "exact" && name != "exact_full") models.push_back(name);
  }
  ModelComparison c;
  c.names = {"t", "max_exact", "total_exact"};
  for (const auto& m : models)
    for (const char* p : {"max_", "diff_", "total_"}) c.names.push_back(p + m);
  for (const auto& n : c.names) c.columns[n].reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) {
    const RField& e = ex->second[r];
    double mx = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (in_window(g, i, window)) mx = std::max(mx, e[i]);
    c.columns["t"].push_back(t[r]);
    c.columns["max_exact"].push_back(mx);
    c.columns["total_exact"].push_back(integrate(g, e) / e0_l1);
    for (const auto& m : models) {
      const RField& f = density.at(m)[r];
      double fm = 0.0, d = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (!in_window(g, i, window)) continue;
        fm = std::max(fm, f[i]);
        d = std::max(d, std::abs(e[i] - f[i]));
      }
      c.columns["max_" + m].push_back(fm);
      c.columns["diff_" + m].push_back(d);
      c.columns["total_" + m].push_back(integrate(g, f) / e0_l1);
    }
  }
  return c;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& opts) {
  const Scenario s = opts.quick ? quick_variant(scenario) : scenario;
  const std::vector<std::string> models = opts.models.empty() ? s.models : opts.models;
  for (const auto& m : models)
    if (!has({"exact", "action", "schrodinger", "rays", "wigner"}, m)) throw ConfigError("unknown model \"" + m + "\"");
  const bool want_exact = has(models, "exact") || has(models, "wigner");
  const bool want_action = has(models, "action");
  const bool want_schr = has(models, "schrodinger");
  if (has(models, "wigner") && s.dims() != 1) throw ConfigError("the wigner model is 1D only");

  RunResult res;
  res.scenario = s;
  res.out_dir = opts.out_dir;
  const bool write = !opts.out_dir.empty();
  if (write) fs::create_directories(opts.out_dir);

  const Environment env = build_environment(s);
  const Grid& g = env.grid;
  res.omega = carrier_omega(s, env);
  const double every = s.output_every;
  const long samples = static_cast<long>(std::floor(s.duration / every + 1e-9));
  for (long r = 0; r <= samples; ++r) res.t.push_back(every * static_cast<double>(r));

  const SeparableSymbol dn = build_separable(g, env.b, 1.0, s.mu, s.rank);
  const SeparableSymbol dn_sqrt = build_separable(g, env.b, 0.5, s.mu, s.rank);
  const WaveState s0 = build_initial(s, env);
  res.E0 = half_norm(right_going(g, energy_variable(s0, dn_sqrt, s.gravity)));
  const double e0_l1 = l1(g, res.E0);

  json manifest;
  manifest["scenario"] = s.resolved();
  manifest["scenario_hash"] = hex64(scenario_hash(s));
  manifest["quick"] = opts.quick;
  manifest["models"] = models;
  manifest["seeds"] = json::array();
  manifest["resolved"] = {{"carrier_omega", res.omega},
                          {"closure_width", resolved_closure(s, g)},
                          {"sponge_rate", env.sponge.s0},
                          {"sponge_width", env.sponge.width},
                          {"dn_rank", dn.rank()},
                          {"dn_sqrt_rank", dn_sqrt.rank()},
                          {"dn_fit_error", dn.fit_error()},
                          {"output_times", res.t.size()},
                          {"right_going_projection", "k_x > 0, half weight at k_x = 0"},
                          {"initial_model_energy", "right-going part of the exact initial state"}};

  // ------------------------------------------------------------- exact
  CField first_psi;
  std::vector<WaveState> exact_states;  // kept only for the Wigner pass
  if (want_exact) {
    const double dt0 = resolved_dt(env, res.omega, s.steps_per_period);
    const int sub = substeps(every, dt0);
    const double dt = every / sub;
    res.dt = dt;
    manifest["resolved"]["exact_dt"] = dt;
    manifest["resolved"]["exact_substeps"] = sub;
    manifest["resolved"]["steps_per_period"] = s.steps_per_period;
    const bool budget = env.bulk.has_value();
    if (budget) {
      res.budget = EnergyReport{};
      manifest["resolved"]["budget"] = {{"surface_source", "half"}, {"production_nz", 32}, {"integration", "trapezoid per step"}};
    }
    auto account = [&](const WaveState& w) {
      if (budget)
        res.budget->append(w.t, total_energy(w, dn, s.gravity), surface_divergence_source(w, env),
                           production_integral(w, env, 32));
    };
    WaveState w = s0;
    auto record = [&](const WaveState& st) {
      const CField psi = energy_variable(st, dn_sqrt, s.gravity);
      res.density["exact"].push_back(half_norm(right_going(g, psi)));
      RField full = energy_density(st, dn, s.gravity);
      res.total_energy.push_back(integrate(g, full));
      res.density["exact_full"].push_back(std::move(full));
      if (has(models, "wigner")) exact_states.push_back(st);
    };
    record(w);
    account(w);
    for (long r = 1; r <= samples; ++r) {
      for (int k = 0; k < sub; ++k) {
        WaveState next;
        try {
          next = step_rk4(w, env, dn, dt);
        } catch (const NumericalAbort&) {
          if (write) write_checkpoint((fs::path(opts.out_dir) / "checkpoint_last_good.bin").string(), g,
                                      make_checkpoint(w, dt, scenario_hash(s)));
          throw;
        }
        next.t = res.t[r - 1] + dt * (k + 1);
        w = std::move(next);
        account(w);
      }
      w.t = res.t[r];
      record(w);
    }
  }

  // ------------------------------------------------------ carrier models
  if (want_action || want_schr) {
    DirectionField dir;
    if (g.dims() == 2) {
      const RayMedium rm(env);
      RayState seed;
      seed.X = {s.packet.center[0], s.packet.center[1]};
      seed.k = {s.packet.k0, 0.0};
      dir = ray_direction_field(rm, seed, s.duration, s.ray_dt);
      manifest["resolved"]["carrier_direction"] = {{"source", "ray fan from the packet centre line"},
                                                   {"coverage", dir.coverage},
                                                   {"smoothing_cells", 3.0}};
    } else {
      manifest["resolved"]["carrier_direction"] = {{"source", "+x"}};
    }
    const RField kmag = steady_wavenumber_field(env, res.omega, Branch::Plus, dir.x, dir.y);
    const CarrierField carrier = carrier_field(env, kmag, dir.x, dir.y);
    if (want_action) {
      const ActionTransport tr(env, carrier);
      const int sub = substeps(every, tr.max_dt());
      manifest["resolved"]["action_dt"] = every / sub;
      ActionField a{res.E0, 0.0, 0.0};
      res.density["action"].push_back(a.E);
      for (long r = 1; r <= samples; ++r) {
        for (int k = 0; k < sub; ++k) a = tr.step(a, every / sub);
        res.density["action"].push_back(a.E);
      }
      manifest["resolved"]["action_clipped_mass"] = a.clipped;
    }
    if (want_schr) {
      const SchrodingerMedium med = schrodinger_medium(env, carrier, 1.0);
      const int sub = substeps(every, schrodinger_max_dt(g, med));
      manifest["resolved"]["schrodinger_dt"] = every / sub;
      manifest["resolved"]["schrodinger_energy"] = "sigma^2 |A|^2 with A0 = sqrt(E0)/sigma";
      SchrodingerState st{CField(g.size()), 0.0};
      for (std::size_t i = 0; i < g.size(); ++i) st.A[i] = std::sqrt(res.E0[i]) / med.sigma[i];
      auto energy = [&](const CField& A) {
        RField e(A.size());
        for (std::size_t i = 0; i < A.size(); ++i) e[i] = med.sigma[i] * med.sigma[i] * std::norm(A[i]);
        return e;
      };
      res.density["schrodinger"].push_back(energy(st.A));
      for (long r = 1; r <= samples; ++r) {
        for (int k = 0; k < sub; ++k) st = schrodinger_step(st, g, med, every / sub);
        res.density["schrodinger"].push_back(energy(st.A));
      }
    }
  }

  // --------------------------------------------------------------- rays
  if (has(models, "rays") || has(models, "wigner")) {
    const RayMedium rm(env);
    RayState r0;
    r0.X = {s.packet.center[0], s.dims() == 2 ? s.packet.center[1] : 0.0};
    r0.k = {s.packet.k0, 0.0};
    const double dt = s.ray_dt > 0.0 ? s.ray_dt : ray_default_dt(r0, rm);
    manifest["resolved"]["ray_dt"] = dt;
    res.ray = ray_trace(r0, rm, s.duration, dt, 1);
    res.turning_x = turning_point(*res.ray, rm);
    const char* stop[] = {"completed", "exited_domain", "k_collapse"};
    manifest["resolved"]["ray_stop"] = stop[static_cast<int>(res.ray->stop)];
  }

  // ------------------------------------------------------------- wigner
  if (has(models, "wigner")) {
    WignerTrack wt;
    const double kmin = s.wigner_k_min >= 0.0 ? s.wigner_k_min : 0.5 * s.packet.k0;
    manifest["resolved"]["wigner_k_min"] = kmin;
    manifest["resolved"]["wigner_input"] = "right-going part of the energy variable";
    std::vector<double> rt, rx, rk;
    for (const RayState& r : res.ray->samples) {
      rt.push_back(r.t);
      rx.push_back(r.X[0]);
      rk.push_back(r.k[0]);
    }
    const std::size_t nf = exact_states.size();
    std::vector<std::size_t> export_at;
    const int ntab = std::max(0, opts.wigner_tables);
    for (int q = 0; q < ntab && nf > 0; ++q)
      export_at.push_back(ntab == 1 ? 0 : static_cast<std::size_t>(std::llround(double(q) * double(nf - 1) / (ntab - 1))));
    std::size_t tracked = 0, compared = 0;
    double ymax_used = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const CField psi = right_going(g, energy_variable(exact_states[f], dn_sqrt, s.gravity));
      WignerGrid W = wigner_transform(g, psi, s.wigner_y_max > 0.0 ? s.wigner_y_max : 0.5 * s.length[0]);
      W.t = exact_states[f].t;
      W.mu = s.mu;
      ymax_used = W.y_max;
      const PhasePeak pk = wigner_peak_track({W}, kmin).front();
      wt.peaks.push_back(pk);
      RField dens(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) dens[i] = std::norm(psi[i]);
      auto rel = [](const RField& a, const RField& b) {
        double n = 0.0, d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          n += std::abs(a[i] - b[i]);
          d += std::abs(b[i]);
        }
        return n / d;
      };
      wt.x_marginal_error.push_back(rel(wigner_x_marginal(W), dens));
      wt.k_marginal_error.push_back(rel(wigner_k_marginal(W), spectral_density(g, psi, W.k)));
      wt.imag_residue.push_back(W.imag_residue);
      const bool on_ray = W.t <= rt.back() + 1e-9;
      const double x = lerp_at(rt, rx, W.t), k = lerp_at(rt, rk, W.t);
      wt.ray_x.push_back(on_ray ? x : std::nan(""));
      wt.ray_k.push_back(on_ray ? k : std::nan(""));
      if (on_ray) {
        ++compared;
        if (std::abs(pk.x - x) <= W.dx() && std::abs(pk.k - k) <= W.dk()) ++tracked;
      }
      if (write && std::find(export_at.begin(), export_at.end(), f) != export_at.end()) {
        std::ostringstream name;
        name << "wigner_" << std::setw(4) << std::setfill('0') << f << ".bin";
        W.write((fs::path(opts.out_dir) / name.str()).string());
      }
    }
    wt.tracked_fraction = compared ? double(tracked) / double(compared) : 0.0;
    manifest["resolved"]["wigner_y_max"] = ymax_used;
    res.wigner = std::move(wt);
  }

  if (want_exact && (want_action || want_schr)) {
    std::map<std::string, std::vector<RField>> d;
    for (const char* m : {"exact", "action", "schrodinger"})
      if (res.density.count(m)) d[m] = res.density.at(m);
    res.comparison = compare_models(g, res.t, d, s.window, e0_l1);
  }

  manifest["grid"] = {{"dims", g.dims()}, {"n", {g.n(0), g.n(1)}}, {"length", {g.length(0), g.dims() == 2 ? g.length(1) : 0.0}}};
  manifest["outputs"] = json::array();
  if (write) {
    const fs::path out(opts.out_dir);
    auto note = [&](const std::string& f) { manifest["outputs"].push_back(f); };
    {
      std::ofstream tf(out / "times.csv");
      tf << "t\n" << std::setprecision(17);
      for (double t : res.t) tf << t << "\n";
      note("times.csv");
    }
    for (const auto& [name, frames] : res.density) {
      write_frames((out / ("density_" + name + ".bin")).string(), g, frames, s.duration);
      note("density_" + name + ".bin");
    }
    write_field_binary((out / "depth.bin").string(), g, env.b);
    write_field_binary((out / "current_x.bin").string(), g, env.Ux);
    note("depth.bin");
    note("current_x.bin");
    if (g.dims() == 2) {
      write_field_binary((out / "current_y.bin").string(), g, env.Uy);
      note("current_y.bin");
    }
    if (!res.total_energy.empty()) {
      std::ofstream ef(out / "totals.csv");
      ef << "t,total_energy\n" << std::setprecision(17);
      for (std::size_t r = 0; r < res.t.size(); ++r) ef << res.t[r] << "," << res.total_energy[r] << "\n";
      note("totals.csv");
    }
    if (res.budget) {
      res.budget->write_csv((out / "energy_budget.csv").string());
      note("energy_budget.csv");
    }
    if (res.ray) {
      res.ray->write_csv((out / "ray.csv").string());
      note("ray.csv");
    }
    if (res.wigner) {
      std::ofstream wf(out / "wigner_peaks.csv");
      wf << "t,x_peak,k_peak,value,ray_x,ray_k,x_marginal_error,k_marginal_error,imag_residue\n" << std::setprecision(17);
      const WignerTrack& wt = *res.wigner;
      for (std::size_t f = 0; f < wt.peaks.size(); ++f)
        wf << wt.peaks[f].t << "," << wt.peaks[f].x << "," << wt.peaks[f].k << "," << wt.peaks[f].value << ","
           << wt.ray_x[f] << "," << wt.ray_k[f] << "," << wt.x_marginal_error[f] << "," << wt.k_marginal_error[f] << ","
           << wt.imag_residue[f] << "\n";
      note("wigner_peaks.csv");
    }
    if (res.comparison) {
      res.comparison->write_csv((out / "comparison.csv").string());
      note("comparison.csv");
    }
    std::ofstream(out / "manifest.json") << manifest.dump(2) << "\n";
  }
  res.manifest = std::move(manifest);
  return res;
}

ModelComparison compare_runs(const std::string& run_a, const std::string& run_b, const std::vector<double>& window) {
  auto load_manifest = [](const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw ConfigError(dir + ": no manifest.json");
    return json::parse(in);
  };
  const json ma = load_manifest(run_a), mb = load_manifest(run_b);
  if (ma.at("grid") != mb.at("grid")) throw ConfigError("runs are on different grids");
  const json& gj = ma.at("grid");
  const int dims = gj.at("dims").get<int>();
  const auto n = gj.at("n").get<std::vector<std::size_t>>();
  const auto L = gj.at("length").get<std::vector<double>>();
  const Grid g = dims == 1 ? Grid(L[0], n[0]) : Grid(L[0], L[1], n[0], n[1]);
  auto times = [](const std::string& dir) {
    std::ifstream in(fs::path(dir) / "times.csv");
    std::string line;
    std::getline(in, line);
    std::vector<double> t;
    while (std::getline(in, line))
      if (!line.empty()) t.push_back(std::stod(line));
    return t;
  };
  const std::vector<double> ta = times(run_a), tb = times(run_b);
  if (ta.size() != tb.size()) throw ConfigError("runs do not share a time axis");
  for (std::size_t i = 0; i < ta.size(); ++i)
    if (std::abs(ta[i] - tb[i]) > 1e-9 * std::max(1.0, std::abs(ta[i]))) throw ConfigError("runs do not share a time axis");
  std::map<std::string, std::vector<RField>> d;
  const fs::path ea = fs::path(run_a) / "density_exact.bin";
  if (!fs::exists(ea)) throw ConfigError(run_a + ": no exact density");
  d["exact"] = read_frames(ea.string(), g.size());
  for (const char* m : {"exact", "action", "schrodinger"}) {
    const fs::path p = fs::path(run_b) / (std::string("density_") + m + ".bin");
    if (fs::exists(p)) d[std::string(m) == "exact" ? "exact_b" : m] = read_frames(p.string(), g.size());
  }
  if (d.size() == 1) throw ConfigError(run_b + ": no density output");
  std::vector<double> w = window;
  if (dims == 2 && w.size() == 2) {
    w.push_back(0.0);
    w.push_back(L[1]);
  }
  return compare_models(g, ta, d, w, l1(g, d["exact"].front()));
}

}  // namespace wavecore
