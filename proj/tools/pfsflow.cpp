#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "pfs/harness.hpp"
#include "pfs/validation.hpp"

namespace fs = std::filesystem;

namespace {

pfs::ScenarioConfig resolve(const std::string& what) {
  const auto names = pfs::builtin_names();
  if (std::find(names.begin(), names.end(), what) != names.end()) return pfs::builtin_scenario(what);
  return pfs::load_config(what);
}

void write_file(const fs::path& p, const std::function<void(std::ostream&)>& fn) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  fn(os);
}

int run(const std::string& what, const std::string& method, const std::string& out_dir, double scale) {
  pfs::ScenarioConfig cfg = resolve(what);
  if (scale != 1.0) cfg = pfs::refined(cfg, scale);
  pfs::RunOptions opt;
  if (!method.empty()) opt.method = pfs::parse_method(method);
  const pfs::RunOutput out = pfs::run_scenario(cfg, opt);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file(dir / (cfg.name + "_fields.csv"), [&](std::ostream& os) { pfs::write_fields_csv(os, out.fields); });
  write_file(dir / (cfg.name + "_diagnostics.csv"),
             [&](std::ostream& os) { pfs::write_diagnostics_csv(os, out.diagnostics); });
  write_file(dir / (cfg.name + "_transitions.csv"),
             [&](std::ostream& os) { pfs::write_events_csv(os, out.events); });
  if (!cfg.probes.empty()) {
    write_file(dir / (cfg.name + "_probes.csv"),
               [&](std::ostream& os) { pfs::write_probes_csv(os, out.probes, cfg.probes); });
  }

  std::size_t fallbacks = 0;
  for (const auto& e : out.events) fallbacks += e.fallback;
  const double mass = out.diagnostics.empty() ? out.initial_mass : out.diagnostics.back().mass;
  std::cout << std::setprecision(10) << cfg.name << ": t=" << out.final_state.t
            << " steps=" << out.diagnostics.size() << " mass=" << mass
            << " (initial " << out.initial_mass << ") transitions=" << out.events.size()
            << " fallbacks=" << fallbacks << "\n";
  if (out.aborted) {
    std::cerr << "aborted: " << out.abort_message << "\n";
    return 2;
  }
  return 0;
}

int convergence(const std::string& what, int levels, double time) {
  const pfs::ScenarioConfig cfg = resolve(what);
  const auto study = pfs::convergence_study(cfg, levels, time > 0.0 ? time : cfg.end_time);
  std::cout << "cells,dx,l2_error\n";
  for (std::size_t k = 0; k < study.cells.size(); ++k) {
    std::cout << study.cells[k] << ',' << std::setprecision(10) << study.fit.dx[k] << ','
              << study.fit.errors[k] << "\n";
  }
  std::cout << "reference cells " << study.reference_cells << ", t = " << study.time
            << ", fitted order " << study.fit.order << "\n";
  return 0;
}

int validate(bool all, const std::vector<int>& only) {
  const auto ids = !only.empty() ? only : (all ? pfs::all_check_ids() : pfs::quick_check_ids());
  const auto results = pfs::run_checks(ids);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail
              << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)\n";
    std::cout.unsetf(std::ios::fixed);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic simulator for mixed free-surface and pressurized pipe flows"};
  app.require_subcommand(1);

  std::string target, method, out_dir = "out";
  double scale = 1.0;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario config or built-in scenario");
  run_cmd->add_option("scenario", target, "Config path or built-in name")->required();
  run_cmd->add_option("--method", method, "Transition solver")->check(CLI::IsMember({"ghost", "fka"}));
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--refine", scale, "Multiply every segment's cell count");

  int levels = 3;
  double time = 0.0;
  auto* conv_cmd = app.add_subcommand("convergence", "Self-convergence study on nested meshes");
  conv_cmd->add_option("scenario", target, "Config path or built-in name")->required();
  conv_cmd->add_option("--levels", levels, "Number of mesh levels")->check(CLI::Range(3, 8));
  conv_cmd->add_option("--time", time, "Comparison time (default: end time)");

  bool all = false;
  auto* val_cmd = app.add_subcommand("validate", "Run the oracle and property checks");
  val_cmd->add_flag("--all", all, "Include the long scenario checks");
  std::vector<int> only;
  val_cmd->add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 10));

  auto* list_cmd = app.add_subcommand("list", "List built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(target, method, out_dir, scale);
    if (*conv_cmd) return convergence(target, levels, time);
    if (*val_cmd) return validate(all, only);
    if (*list_cmd) {
      for (const auto& n : pfs::builtin_names()) std::cout << n << "  " << pfs::builtin_path(n) << "\n";
      return 0;
    }
  } catch (const pfs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
