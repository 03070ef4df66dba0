// Scenario configuration and per-trial channel realizations for an underlay
// cognitive MISO downlink: one multi-antenna cognitive base station (CBS)
// serving K single-antenna cognitive users alongside a primary base station
// (PBS) serving one primary user (PU).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ccipm/rng.hpp"

namespace ccipm {

// Distinguished interference_limit value: no interference constraint.
inline constexpr double kUnboundedInterference =
    std::numeric_limits<double>::infinity();

struct ScenarioConfig {
  int num_tx_antennas = 3;       // M, CBS antennas
  int num_users = 2;             // K, cognitive users
  int num_primary_antennas = 2;  // N_p, PBS antennas
  double noise_power = 1.0;      // sigma^2, linear watts
  double channel_gain_ss = 1.0;  // per-entry variance, CBS -> CU
  double channel_gain_sp = 1.0;  // per-entry variance, PBS -> CU
  double channel_gain_ps = 1.0;  // per-entry variance, CBS -> PU
  double channel_gain_pp = 1.0;  // per-entry variance, PBS -> PU
  int modulation_order = 4;      // M-PSK order, power of two
  // 0 means "same as modulation_order".
  int primary_modulation_order = 0;
  // Per-user delivered-SNR targets zeta_j, linear. Empty means 3.0 for
  // every user (QPSK operating point); a single entry is broadcast to K.
  std::vector<double> snr_targets;
  double interference_limit = kUnboundedInterference;  // I_th, linear watts
  double primary_power = 1.0;                          // p_p
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on violation of any field constraint,
  // in particular K <= M - 1.
  void validate() const;

  // snr_targets resolved to exactly K entries.
  std::vector<double> resolved_snr_targets() const;
  int resolved_primary_order() const;
};

// One realization of every channel in the scenario plus the primary
// beamformer. Immutable after construction; safe to share across workers.
struct ChannelSet {
  Eigen::MatrixXcd h_ss;     // K x M,   CBS -> CU k
  Eigen::MatrixXcd h_sp;     // K x N_p, PBS -> CU k
  Eigen::RowVectorXcd h_ps;  // 1 x M,   CBS -> PU
  Eigen::RowVectorXcd h_pp;  // 1 x N_p, PBS -> PU
  Eigen::VectorXcd g;        // N_p, primary beamformer, ||g||^2 = p_p
  Eigen::VectorXd psi;       // K, psi_j = sigma^2 + |h_sp,j g|^2
};

// Maximum-ratio transmission toward the PU: g = sqrt(p_p) h_pp^H / ||h_pp||.
// Throws std::invalid_argument if h_pp is zero while primary_power > 0.
Eigen::VectorXcd make_primary_beamformer(const Eigen::RowVectorXcd& h_pp,
                                         double primary_power);

// Draws one i.i.d. complex-Gaussian channel realization. Pure function of
// (config.seed, trial_index); entries have per-entry variance equal to the
// corresponding channel_gain field.
ChannelSet generate_channels(const ScenarioConfig& config,
                             std::uint64_t trial_index);

// Flat key-value config file support. One "key = value" pair per line,
// '#' comments. Values are linear; any numeric key also accepts a
// "_db"-suffixed variant that is converted with 10^(x/10) on load.
// interference_limit additionally accepts "unbounded" or "inf".
struct KeyValueFile {
  // Preserves first-seen order; later duplicates overwrite.
  std::vector<std::pair<std::string, std::string>> entries;

  static KeyValueFile load(const std::string& path);  // throws on I/O error
  static KeyValueFile parse(const std::string& text);
  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;  // throws if absent
};

// Reads the ScenarioConfig fields from a parsed key-value file.
// Unknown keys are ignored (the sweep harness reads its own keys from the
// same file). Calls validate() before returning.
ScenarioConfig scenario_from_keyvalues(const KeyValueFile& kv);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace ccipm
