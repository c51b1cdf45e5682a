// circlepoll: simulation and exact-drift toolkit for a spatial polling queue
// on a circle served by greedy nearest-first scans.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circlepoll/corpus.hpp"
#include "circlepoll/parallel.hpp"
#include "circlepoll/scenario.hpp"
#include "circlepoll/simulate.hpp"

namespace fs = std::filesystem;
using namespace circlepoll;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfigError = 2;

struct global_opts {
  std::uint64_t seed = 20260814;
  std::string out_dir = ".";
  int threads = 1;
  std::string config_path;
};

int resolve_threads(int requested) { return requested <= 0 ? par::max_threads() : requested; }

scenario_config load_config(const global_opts& g) {
  if (g.config_path.empty()) return scenario_config{};
  return scenario_config::from_file(g.config_path);
}

void apply_override(scenario_config& cfg, const std::string& key, const std::optional<long long>& value) {
  if (value) cfg.set(key, std::to_string(*value));
}

std::ofstream open_report(const global_opts& g, const std::string& command, const scenario_config& cfg) {
  fs::create_directories(g.out_dir);
  std::string name = command + "_report.txt";
  for (char& c : name)
    if (c == '-') c = '_';
  std::ofstream out(fs::path(g.out_dir) / name);
  if (!out) throw std::runtime_error("cannot write report in " + g.out_dir);
  out << "command=" << command << "\n";
  out << "seed=" << g.seed << "\n";
  out << "threads=" << resolve_threads(g.threads) << "\n";
  out << "# resolved configuration\n" << cfg.canonical_text() << "# results\n";
  return out;
}

std::ofstream open_csv(const global_opts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  std::ofstream out(fs::path(g.out_dir) / name);
  if (!out) throw std::runtime_error("cannot write " + name + " in " + g.out_dir);
  return out;
}

stationary_estimate stationary_with_fallback(const system_params& params, const scenario_config& cfg,
                                             std::uint64_t seed) {
  const long min_cycles = static_cast<long>(cfg.get_long("min_cycles", 1000));
  const long max_steps = static_cast<long>(cfg.get_long("max_steps", 2000000));
  stationary_estimate est = estimate_stationary(params, min_cycles, max_steps, seed);
  if (est.complete) return est;
  const long steps = static_cast<long>(cfg.get_long("steps", 200000));
  return batch_means_estimate(params, steps, seed);
}

int run_verify_lemmas(const global_opts& g, scenario_config cfg, std::optional<long long> trials,
                      bool corrupt_kernel) {
  apply_override(cfg, "trials", trials);
  check_options opts;
  opts.seed = g.seed;
  opts.trials = static_cast<std::size_t>(cfg.get_long("trials", 10000));
  opts.circumference = cfg.get_double("ell", 1.0);
  opts.threads = resolve_threads(g.threads);
  opts.corrupt_kernel = corrupt_kernel;
  const std::vector<check_result> results = run_lemma_checks(opts);
  std::ofstream report = open_report(g, "verify-lemmas", cfg);
  bool all_pass = true;
  for (const check_result& res : results) {
    std::ostringstream line;
    line << (res.passed() ? "PASS " : "FAIL ") << res.name << ": trials=" << res.trials
         << " failures=" << res.failures << " worst_margin=" << res.worst;
    std::cout << line.str() << "\n";
    report << line.str() << "\n";
    if (!res.passed()) {
      all_pass = false;
      if (!res.example.empty()) report << "worst example:\n" << res.example;
    }
  }
  std::cout << (all_pass ? "all checks passed" : "checks FAILED") << "\n";
  return all_pass ? kExitPass : kExitViolation;
}

int run_drift_certificate_cmd(const global_opts& g, scenario_config cfg, std::optional<long long> trials) {
  apply_override(cfg, "trials", trials);
  const system_params params = build_system_params(cfg);
  const energy_params ep = build_energy_params(cfg, params);
  const std::size_t n = static_cast<std::size_t>(cfg.get_long("trials", 10000));
  const drift_certificate cert = run_drift_certificate(params, ep, n, g.seed, resolve_threads(g.threads));
  std::ofstream report = open_report(g, "drift-certificate", cfg);
  std::ostringstream line;
  line << (cert.violations == 0 ? "PASS" : "FAIL") << " drift-certificate: c1=" << cert.bound.c1
       << " c2=" << cert.bound.c2 << " trials=" << cert.trials << " violations=" << cert.violations
       << " min_margin=" << cert.min_margin;
  std::cout << line.str() << "\n";
  report << line.str() << "\n";
  if (cert.violations > 0) report << "worst example:\n" << cert.worst_example;
  if (params.circumference == 1.0 && cert.bound.c1 > 0) {
    const drift_margin margin = seminorm_drift_margin(params, ep);
    std::ostringstream extra;
    extra << "seminorm drift: threshold=" << margin.threshold << " alpha=" << margin.alpha;
    std::cout << extra.str() << "\n";
    report << extra.str() << "\n";
  }
  return cert.violations == 0 ? kExitPass : kExitViolation;
}

int run_figures(const global_opts& g, scenario_config cfg, std::optional<long long> steps_opt) {
  apply_override(cfg, "steps", steps_opt);
  const long steps = static_cast<long>(cfg.get_long("steps", 20000));
  const system_params base = build_system_params(cfg);
  const double s1 = base.dist.mean();
  const struct {
    const char* name;
    double load;
  } regimes[] = {{"stable", 0.5}, {"critical", 1.0}, {"unstable", 1.1}};
  std::ofstream report = open_report(g, "figures", cfg);
  for (const auto& regime : regimes) {
    const system_params params(regime.load / s1, base.scan_radius, base.circumference, base.dist);
    const path_record record = run_path(params, steps, g.seed, configuration(params.circumference));
    const std::string file = std::string("path_") + regime.name + ".csv";
    std::ofstream csv = open_csv(g, file);
    write_path_csv(csv, record);
    std::ostringstream line;
    line << "wrote " << file << ": load=" << regime.load << " steps=" << steps
         << " final_population=" << record.population.back();
    std::cout << line.str() << "\n";
    report << line.str() << "\n";
  }
  return kExitPass;
}

int run_stability_sweep(const global_opts& g, scenario_config cfg, std::optional<long long> steps_opt) {
  apply_override(cfg, "steps", steps_opt);
  const bool sweep_radius = cfg.has("r_grid") || !cfg.has("lambda_grid");
  const std::vector<double> grid =
      sweep_radius ? cfg.get_grid("r_grid", {0.05, 0.1, 0.25}) : cfg.get_grid("lambda_grid", {});
  const std::string param_name = sweep_radius ? "r" : "lambda";
  std::vector<sweep_row> rows;
  std::ofstream report = open_report(g, "stability-sweep", cfg);
  for (double value : grid) {
    scenario_config point = cfg;
    point.set(param_name, std::to_string(value));
    const system_params params = build_system_params(point);
    const stationary_estimate est = stationary_with_fallback(params, point, g.seed);
    sweep_row row;
    row.param = value;
    // Mean population seen at polling instants (post-scan mean + load, exact
    // in steady state); this is what light_traffic_mean approximates.
    row.mean = est.mean_population + params.load();
    row.half_width = est.half_width_95;
    row.approximation = light_traffic_mean(params);
    row.cycles = est.cycles;
    row.complete = est.complete;
    rows.push_back(row);
    std::ostringstream line;
    line << param_name << "=" << value << ": polled_mean=" << row.mean << " ci95=" << est.half_width_95
         << " cycles=" << est.cycles << (est.approximate ? " (batch means)" : "")
         << " light_traffic=" << row.approximation;
    std::cout << line.str() << "\n";
    report << line.str() << "\n";
  }
  std::ofstream csv = open_csv(g, "sweep.csv");
  write_sweep_csv(csv, param_name, rows);
  std::cout << "wrote sweep.csv\n";
  return kExitPass;
}

int run_stationary(const global_opts& g, scenario_config cfg, std::optional<long long> steps_opt) {
  apply_override(cfg, "steps", steps_opt);
  const system_params params = build_system_params(cfg);
  const stationary_estimate est = stationary_with_fallback(params, cfg, g.seed);
  std::ofstream report = open_report(g, "stationary", cfg);
  std::ostringstream line;
  line << "mean_population=" << est.mean_population << " polled_mean=" << est.mean_population + params.load()
       << " ci95=" << est.half_width_95 << " cycles=" << est.cycles << " mean_cycle_length=" << est.cycle_length_mean
       << " steps_used=" << est.steps_used << (est.approximate ? " estimator=batch_means" : " estimator=regenerative")
       << " light_traffic=" << light_traffic_mean(params);
  std::cout << line.str() << "\n";
  report << line.str() << "\n";
  std::ofstream csv = open_csv(g, "tail.csv");
  write_tail_csv(csv, est);
  std::cout << "wrote tail.csv\n";
  if (!est.complete) {
    std::cout << "estimate INCOMPLETE within the step budget\n";
    report << "estimate INCOMPLETE within the step budget\n";
    return kExitViolation;
  }
  return kExitPass;
}

int run_laplace_check(const global_opts& g, scenario_config cfg, std::optional<long long> steps_opt) {
  apply_override(cfg, "steps", steps_opt);
  const system_params params = build_system_params(cfg);
  const long steps = static_cast<long>(cfg.get_long("steps", 1000000));
  const std::vector<double> thetas = cfg.get_grid("theta_grid", {0.5, 1.0, 2.0});
  const stationary_sample sample = collect_stationary_sample(params, steps, g.seed);
  std::ofstream report = open_report(g, "laplace-check", cfg);
  bool all_pass = true;
  for (double theta : thetas) {
    const residual_estimate res = laplace_residual(params, theta, sample);
    const bool pass = std::abs(res.residual) <= 4 * res.std_error;
    all_pass = all_pass && pass;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " theta=" << theta << ": residual=" << res.residual
         << " stderr=" << res.std_error << " cycles=" << res.cycles;
    std::cout << line.str() << "\n";
    report << line.str() << "\n";
  }
  return all_pass ? kExitPass : kExitViolation;
}

int run_tail_fit(const global_opts& g, scenario_config cfg, std::optional<long long> steps_opt) {
  apply_override(cfg, "steps", steps_opt);
  const system_params params = build_system_params(cfg);
  const stationary_estimate est = stationary_with_fallback(params, cfg, g.seed);
  std::ofstream report = open_report(g, "tail-fit", cfg);
  std::ofstream csv = open_csv(g, "tail.csv");
  write_tail_csv(csv, est);
  tail_fit fit;
  try {
    fit = tail_geometric_fit(est);
  } catch (const std::invalid_argument& err) {
    std::cout << "FAIL tail-fit: " << err.what() << "\n";
    report << "FAIL tail-fit: " << err.what() << "\n";
    return kExitViolation;
  }
  std::ostringstream line;
  line << "tail-fit: slope=" << fit.slope << " r_squared=" << fit.r_squared << " levels=" << fit.levels
       << " cycles=" << est.cycles;
  std::cout << line.str() << "\n";
  report << line.str() << "\n";
  std::cout << "wrote tail.csv\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial polling queue on a circle with greedy nearest-customer scans"};
  app.require_subcommand(1);
  app.fallthrough();

  global_opts g;
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--out-dir", g.out_dir, "directory for reports and CSV files");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware limit)");
  app.add_option("--config", g.config_path, "key=value experiment file");

  std::optional<long long> trials, steps;
  bool corrupt_kernel = false;

  CLI::App* verify = app.add_subcommand("verify-lemmas", "run the geometry/seminorm/interpolation property corpus");
  verify->add_option("--trials", trials, "trials per property");
  verify->add_flag("--corrupt-kernel", corrupt_kernel, "sabotage the kernel to prove the harness can fail")
      ->group("");

  CLI::App* drift = app.add_subcommand("drift-certificate", "check the exact energy drift against its certified line");
  drift->add_option("--trials", trials, "corpus size");

  CLI::App* figures = app.add_subcommand("figures", "write sample paths in stable/critical/unstable regimes");
  figures->add_option("--steps", steps, "scans per path");

  CLI::App* sweep = app.add_subcommand("stability-sweep", "stationary mean across a parameter grid");
  sweep->add_option("--steps", steps, "step budget for the batch-means fallback");

  CLI::App* stationary = app.add_subcommand("stationary", "regenerative stationary estimate at one parameter point");
  stationary->add_option("--steps", steps, "step budget for the batch-means fallback");

  CLI::App* laplace = app.add_subcommand("laplace-check", "stationary transform identity residuals");
  laplace->add_option("--steps", steps, "scans in the measurement run");

  CLI::App* tail = app.add_subcommand("tail-fit", "geometric tail fit of the stationary distribution");
  tail->add_option("--steps", steps, "step budget for the batch-means fallback");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    const scenario_config cfg = load_config(g);
    if (verify->parsed()) return run_verify_lemmas(g, cfg, trials, corrupt_kernel);
    if (drift->parsed()) return run_drift_certificate_cmd(g, cfg, trials);
    if (figures->parsed()) return run_figures(g, cfg, steps);
    if (sweep->parsed()) return run_stability_sweep(g, cfg, steps);
    if (stationary->parsed()) return run_stationary(g, cfg, steps);
    if (laplace->parsed()) return run_laplace_check(g, cfg, steps);
    if (tail->parsed()) return run_tail_fit(g, cfg, steps);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfigError;
  }
  std::cerr << "error: no subcommand\n";
  return kExitConfigError;
}
