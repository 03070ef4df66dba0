// Per-slot link simulation, independent constraint audits, and scalar
// metrics (transmit power, energy efficiency, symbol-error rate).

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ccipm/constellation.hpp"
#include "ccipm/scenario.hpp"

namespace ccipm {

struct SlotOutcome {
  Eigen::VectorXcd y_users;  // received samples at the K cognitive users
  std::complex<double> y_primary{0.0, 0.0};
  double tx_power = 0.0;             // ||x||^2
  double interference_at_pu = 0.0;   // |h_ps x|^2
  std::vector<int> detected;         // per-user detected alphabet indices
  std::vector<bool> errors;          // detected != transmitted
};

// y_users[k] = h_ss,k x + h_sp,k g d_p + n_k with n_k ~ CN(0, sigma^2);
// y_primary = h_pp g d_p + h_ps x + n. Noise and the primary symbol are
// deterministic in (config.seed, noise_seed). Detection is coherent
// against the transmit constellation.
SlotOutcome simulate_slot(const ChannelSet& channels,
                          const Eigen::VectorXcd& x,
                          const SymbolVector& symbols,
                          const ScenarioConfig& config,
                          std::uint64_t noise_seed);

// eta = sum_j rates[j] / tx_power. Throws std::domain_error for
// tx_power == 0.
double energy_efficiency(const std::vector<double>& rates, double tx_power);

// Per-user rate used by the harness: R_j = log2(1 + zeta_j).
std::vector<double> user_rates(const ScenarioConfig& config);

struct RateModulation {
  int modulation_order;  // 2^rate
  double snr_target;     // 2^rate - 1, linear
};

// Maps an integer target rate (bits/s/Hz) to its M-PSK order and the
// matching SNR target. Throws std::invalid_argument for non-integer or
// non-positive rates.
RateModulation rate_to_modulation(double target_rate);

// Independent re-verification of the delivery and interference
// constraints. Never reads solver internals: everything is recomputed
// from (channels, x, symbols, config).
struct ConstraintAudit {
  std::vector<double> phase_error;       // |angle(h_ss,j x) - angle(d_j)|, rad
  std::vector<double> snr_ratio;         // delivered SNR / zeta_j
  std::vector<double> equality_residual; // |h_ss,j x - b_j| / |b_j|
  double interference_power = 0.0;       // |h_ps x|^2
  double interference_margin = 0.0;      // I_th - |h_ps x|^2 (finite I_th)
  bool phase_ok = false;
  bool snr_ok = false;
  bool interference_ok = false;
  bool pass() const { return phase_ok && snr_ok && interference_ok; }
};

// Audit tolerances: phase error <= 1e-6 rad, SNR shortfall <= 1e-6
// relative, interference overshoot <= 1e-9 relative with an absolute
// floor of (1e-10 ||h_ps|| ||x||)^2 that also covers I_th = 0.
ConstraintAudit audit_solution(const ChannelSet& channels,
                               const Eigen::VectorXcd& x,
                               const SymbolVector& symbols,
                               const ScenarioConfig& config);

// Aggregated Monte-Carlo statistics for one (sweep point, scheme) pair.
struct MetricRecord {
  double mean_power = 0.0;
  double energy_efficiency = 0.0;  // mean of per-trial eta
  double ser = 0.0;
  double feasibility_rate = 0.0;
  double mean_bound_power = 0.0;  // matching-mode bound mean; NaN if not run
  std::string scheme_label;
};

}  // namespace ccipm
