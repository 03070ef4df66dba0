// Monte-Carlo experiment driver: sweeps channel strength, target rate, or
// the interference limit; runs every requested scheme on identical
// (channels, symbols) pairs per trial; aggregates metrics; writes CSV.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccipm/evaluation.hpp"
#include "ccipm/scenario.hpp"

namespace ccipm {

inline constexpr const char* kCodeVersion = "0.1.0";

enum class SweepVariable { ChannelStrengthDb, TargetRate, InterferenceLimit };

enum class Scheme {
  Ccipm,
  CcipmStrict,
  CcizfStandin,
  MulticastBound,
  MulticastBoundStrict,
};

std::string to_string(SweepVariable variable);
SweepVariable sweep_variable_from_string(const std::string& name);
std::string scheme_label(Scheme scheme);
Scheme scheme_from_label(const std::string& label);

struct SweepSpec {
  SweepVariable sweep_variable = SweepVariable::ChannelStrengthDb;
  std::vector<double> sweep_points;  // nonempty, strictly monotone
  int trials_per_point = 2000;
  std::vector<Scheme> schemes;
  ScenarioConfig base_config;
  int workers = 1;

  void validate() const;  // throws std::invalid_argument
};

struct SweepRow {
  double sweep_point = 0.0;
  std::string scheme;
  MetricRecord metrics;
  int trial_count = 0;       // trials_per_point - degenerate_count
  int degenerate_count = 0;  // non-Optimal trials (degenerate or infeasible)
  bool empty = false;        // no feasible trial at all
};

struct SweepResult {
  std::string sweep_variable_name;
  std::vector<SweepRow> rows;  // sorted by (sweep_point, scheme)
  std::uint64_t seed = 0;
  std::string config_digest;  // FNV-1a of the resolved config text
  std::string code_version;
  std::string resolved_config_text;  // sidecar content
  bool any_empty_point = false;      // some sweep point had no feasible trial
};

// The per-point scenario derived from the base config and a sweep value.
// Channel strength applies the dB value to all four channel gains jointly.
ScenarioConfig config_for_point(const SweepSpec& spec, double point);

// Deterministic in (spec, base_config.seed) regardless of worker count.
SweepResult run_sweep(const SweepSpec& spec);

// CSV with the fixed header
//   sweep_variable,sweep_point,scheme,mean_power,energy_efficiency,ser,
//   feasibility_rate,mean_bound_power,trials,degenerate,seed
// floats printed with 12 significant digits. Also writes
// "<path>.config.txt" with the resolved configuration.
std::string render_csv(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);

// Reads scenario + sweep keys from one key-value file.
SweepSpec sweep_spec_from_keyvalues(const KeyValueFile& kv);
SweepSpec load_sweep_spec(const std::string& path);

// Compact invariant battery used by the `selftest` CLI subcommand.
// Prints one line per check; returns true iff all pass.
bool run_selftest(std::ostream& out);

}  // namespace ccipm
