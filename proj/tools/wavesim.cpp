// wavesim: run scenarios, self-validate, compare run directories.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration or grid
// error, 3 numerical abort.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wavecore/errors.hpp"
#include "wavecore/runner.hpp"
#include "wavecore/validate.hpp"

namespace fs = std::filesystem;
using namespace wavecore;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string output_root() {
  const char* env = std::getenv("WAVESIM_OUTPUT_ROOT");
  return env && *env ? env : "runs";
}

Scenario resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return load_scenario(arg);
  for (const auto& n : builtin_names())
    if (n == arg) return builtin_scenario(arg);
  throw ConfigError(arg + ": no such config file or built-in scenario");
}

int cmd_run(const std::string& config, std::string out, const std::string& models, bool quick) {
  Scenario s = resolve_config(config);
  RunOptions o;
  o.quick = quick;
  if (!models.empty()) o.models = split(models, ',');
  if (out.empty()) out = (fs::path(output_root()) / (s.name + (quick ? "_quick" : ""))).string();
  o.out_dir = out;
  const RunResult r = run_scenario(s, o);
  std::cout << "scenario " << r.scenario.name << ": " << r.t.size() << " samples, dt " << r.dt << " s\n";
  if (r.budget) std::cout << "energy budget mismatch " << budget_check(*r.budget) << "\n";
  if (r.turning_x) std::cout << "ray turning point x = " << *r.turning_x << " m\n";
  if (r.wigner) std::cout << "Wigner peak tracked in " << r.wigner->tracked_fraction * 100.0 << "% of frames\n";
  std::cout << "outputs in " << out << "\n";
  return 0;
}

int cmd_validate(bool quick, std::uint64_t seed, bool fault, const std::string& json_path) {
  ValidateOptions o;
  o.quick = quick;
  o.seed = seed;
  o.break_symmetry = fault;
  const ValidateReport rep = validate_suite(o);
  const std::string text = rep.to_json().dump(2);
  if (json_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream(json_path) << text << "\n";
    for (const auto& c : rep.checks)
      std::cout << (c.pass ? "pass " : "FAIL ") << c.name << " " << c.value << " (tol " << c.tolerance << ")\n";
  }
  return rep.all_pass() ? 0 : 1;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& window, const std::string& out) {
  std::vector<double> w;
  for (const auto& p : split(window, ',')) {
    try {
      w.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw ConfigError("--window: cannot parse \"" + p + "\"");
    }
  }
  if (w.size() != 2 && w.size() != 4) throw ConfigError("--window expects a,b or x0,x1,y0,y1");
  const ModelComparison c = compare_runs(a, b, w);
  if (out.empty()) {
    const std::string tmp = (fs::temp_directory_path() / "wavesim_compare.csv").string();
    c.write_csv(tmp);
    std::ifstream in(tmp);
    std::cout << in.rdbuf();
    fs::remove(tmp);
  } else {
    c.write_csv(out);
    std::cout << "comparison written to " << out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear surface-wave simulator over currents and bathymetry"};
  app.require_subcommand(1);

  std::string config, out, models;
  bool quick = false;
  auto* run = app.add_subcommand("run", "Run a config file or a built-in scenario");
  run->add_option("config", config, "config.json path or built-in name")->required();
  run->add_option("--out", out, "output directory (default $WAVESIM_OUTPUT_ROOT/<name>)");
  run->add_option("--models", models, "comma list of exact,action,schrodinger,rays,wigner");
  run->add_flag("--quick", quick, "half resolution, quarter duration");

  bool vquick = false, fault = false;
  std::uint64_t seed = ValidateOptions{}.seed;
  std::string json_path;
  auto* val = app.add_subcommand("validate", "Run the small-grid property suite");
  val->add_flag("--quick", vquick, "N = 64");
  val->add_option("--seed", seed, "random seed for test fields");
  val->add_option("--json", json_path, "write the report here instead of stdout");
  val->add_flag("--fault-break-symmetry", fault)->group("");

  std::string run_a, run_b, window, cmp_out;
  auto* cmp = app.add_subcommand("compare", "Compare the exact density of run A with run B");
  cmp->add_option("runA", run_a)->required();
  cmp->add_option("runB", run_b)->required();
  cmp->add_option("--window", window, "a,b (or x0,x1,y0,y1 in 2D)")->required();
  cmp->add_option("--out", cmp_out, "CSV path (default: stdout)");

  app.add_subcommand("list", "List built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config, out, models, quick);
    if (*val) return cmd_validate(vquick, seed, fault, json_path);
    if (*cmp) return cmd_compare(run_a, run_b, window, cmp_out);
    for (const auto& n : builtin_names()) std::cout << n << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const GridMismatch& e) {
    std::cerr << "grid mismatch: " << e.what() << "\n";
    return 2;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
