// Command-line front end: Monte-Carlo sweeps, single-slot solves, and the
// invariant selftest.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include "ccipm/baselines.hpp"
#include "ccipm/ci_precoder.hpp"
#include "ccipm/evaluation.hpp"
#include "ccipm/harness.hpp"

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int run_sweep_command(const std::string& config_path, const std::string& out_path,
                      std::uint64_t seed, bool seed_set, int trials,
                      const std::string& schemes, int workers) {
  ccipm::SweepSpec spec = ccipm::load_sweep_spec(config_path);
  if (seed_set) spec.base_config.seed = seed;
  if (trials > 0) spec.trials_per_point = trials;
  if (!schemes.empty()) {
    spec.schemes.clear();
    for (const std::string& label : split_csv(schemes))
      spec.schemes.push_back(ccipm::scheme_from_label(label));
  }
  if (workers > 0)
    spec.workers = workers;
  else if (spec.workers <= 1)
    spec.workers = std::max(1u, std::thread::hardware_concurrency());

  const ccipm::SweepResult result = ccipm::run_sweep(spec);
  ccipm::write_csv(result, out_path);
  std::cout << "wrote " << result.rows.size() << " rows to " << out_path
            << " (seed " << result.seed << ", digest " << result.config_digest
            << ")\n";
  if (result.any_empty_point) {
    std::cerr << "warning: at least one sweep point had no feasible trial\n";
    return 3;
  }
  return 0;
}

int run_solve_one(const std::string& config_path, const std::string& symbols_arg,
                  std::uint64_t trial, const std::string& scheme_label) {
  const ccipm::ScenarioConfig cfg = ccipm::load_scenario_config(config_path);
  const ccipm::PskAlphabet alphabet(cfg.modulation_order);
  const ccipm::PskAlphabet primary_alphabet(cfg.resolved_primary_order());
  const ccipm::ChannelSet channels = ccipm::generate_channels(cfg, trial);

  ccipm::SymbolVector symbols;
  if (symbols_arg.empty()) {
    ccipm::SubstreamRng rng(cfg.seed, ccipm::kSymbolStream, trial);
    symbols = ccipm::uniform_symbols(alphabet, primary_alphabet, cfg.num_users, rng);
  } else {
    std::vector<int> indices;
    for (const std::string& item : split_csv(symbols_arg))
      indices.push_back(std::stoi(item));
    if (static_cast<int>(indices.size()) != cfg.num_users) {
      std::cerr << "error: expected " << cfg.num_users << " symbol indices\n";
      return 1;
    }
    symbols = ccipm::symbols_from_indices(alphabet, primary_alphabet, indices, 0);
  }

  ccipm::PrecodeSolution sol;
  ccipm::ScenarioConfig audit_cfg = cfg;
  if (scheme_label == "ccipm") {
    sol = ccipm::solve_precoder(channels, symbols, cfg);
  } else if (scheme_label == "ccipm_strict") {
    sol = ccipm::solve_ccipm_strict(channels, symbols, cfg);
    audit_cfg.interference_limit = 0.0;
  } else if (scheme_label == "ccizf_standin") {
    sol = ccipm::solve_ccizf(channels, symbols, cfg);
    audit_cfg.interference_limit = 0.0;
  } else {
    std::cerr << "error: unknown scheme " << scheme_label << "\n";
    return 1;
  }

  std::cout << "scheme: " << scheme_label << "\n";
  std::cout << "trial: " << trial << "\n";
  std::cout << "symbols:";
  for (int idx : symbols.indices) std::cout << ' ' << idx;
  std::cout << "\n";
  std::cout << "status: " << ccipm::to_string(sol.status) << "\n";
  if (sol.status != ccipm::SolveStatus::Optimal) return 2;

  std::cout << "power: " << fmt(sol.power) << "\n";
  if (sol.lambda)
    std::cout << "lambda: " << fmt(*sol.lambda) << "\n";
  else
    std::cout << "lambda: n/a (strict)\n";
  for (std::size_t j = 0; j < sol.alpha.size(); ++j)
    std::cout << "multipliers[" << j << "]: alpha " << fmt(sol.alpha[j])
              << ", mu " << fmt(sol.mu[j]) << "\n";
  for (Eigen::Index i = 0; i < sol.x.size(); ++i)
    std::cout << "x[" << i << "]: " << fmt(sol.x(i).real()) << (sol.x(i).imag() < 0 ? " - " : " + ")
              << fmt(std::abs(sol.x(i).imag())) << "i\n";
  std::cout << "interference_power: " << fmt(sol.interference_power) << "\n";
  std::cout << "root_search_iterations: " << sol.iterations << "\n";

  const ccipm::ConstraintAudit audit =
      ccipm::audit_solution(channels, sol.x, symbols, audit_cfg);
  double max_phase = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (double p : audit.phase_error) max_phase = std::max(max_phase, p);
  for (double r : audit.snr_ratio) min_ratio = std::min(min_ratio, r);
  std::cout << "audit phase_error_max: " << fmt(max_phase) << " rad\n";
  std::cout << "audit snr_ratio_min: " << fmt(min_ratio) << "\n";
  std::cout << "audit interference: " << fmt(audit.interference_power)
            << " (limit " << fmt(audit_cfg.interference_limit) << ")\n";
  std::cout << "audit pass: " << (audit.pass() ? "yes" : "no") << "\n";
  return audit.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol-level constructive-interference precoding simulator "
               "for the cognitive MISO downlink"};
  app.require_subcommand(1);

  std::string config_path, out_path, schemes, symbols_arg, scheme = "ccipm";
  std::uint64_t seed = 0, trial = 0;
  int trials = 0, workers = 0;
  bool seed_set = false;

  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep");
  sweep->add_option("--config", config_path, "key-value config file")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();
  sweep->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  sweep->add_option("--trials", trials, "override trials per sweep point");
  sweep->add_option("--schemes", schemes, "comma-separated scheme list");
  sweep->add_option("--workers", workers, "worker thread count (0 = auto)");

  CLI::App* solve = app.add_subcommand("solve-one", "solve a single slot");
  solve->add_option("--config", config_path, "key-value config file")->required();
  solve->add_option("--symbols", symbols_arg, "comma-separated symbol indices");
  solve->add_option("--trial", trial, "channel realization index");
  solve->add_option("--scheme", scheme, "ccipm | ccipm_strict | ccizf_standin");

  CLI::App* selftest = app.add_subcommand("selftest", "run the invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return run_sweep_command(config_path, out_path, seed, seed_set, trials,
                               schemes, workers);
    if (solve->parsed()) return run_solve_one(config_path, symbols_arg, trial, scheme);
    if (selftest->parsed()) return ccipm::run_selftest(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
