#include "ccipm/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace ccipm {

SlotOutcome simulate_slot(const ChannelSet& channels, const Eigen::VectorXcd& x,
                          const SymbolVector& symbols,
                          const ScenarioConfig& config,
                          std::uint64_t noise_seed) {
  const int k = config.num_users;
  SubstreamRng rng(config.seed, kNoiseStream, noise_seed);
  const PskAlphabet alphabet(config.modulation_order);
  const PskAlphabet primary_alphabet(config.resolved_primary_order());

  // Draw order is fixed: primary symbol, user noise, primary noise.
  const int dp_index = static_cast<int>(rng.uniform_int(primary_alphabet.order()));
  const std::complex<double> d_p = primary_alphabet.point(dp_index);

  SlotOutcome out;
  out.y_users.resize(k);
  out.detected.resize(k);
  out.errors.resize(k);
  for (int j = 0; j < k; ++j) {
    const std::complex<double> direct = (channels.h_ss.row(j) * x).value();
    const std::complex<double> primary_leak = (channels.h_sp.row(j) * channels.g).value() * d_p;
    const std::complex<double> n = rng.complex_normal(config.noise_power);
    out.y_users(j) = direct + primary_leak + n;
    const Detection det = detect(out.y_users(j), alphabet);
    out.detected[j] = det.index;
    out.errors[j] = det.index != symbols.indices[j];
  }
  const std::complex<double> n_p = rng.complex_normal(config.noise_power);
  out.y_primary = (channels.h_pp * channels.g).value() * d_p +
                  (channels.h_ps * x).value() + n_p;
  out.tx_power = x.squaredNorm();
  out.interference_at_pu = std::norm((channels.h_ps * x).value());
  return out;
}

double energy_efficiency(const std::vector<double>& rates, double tx_power) {
  if (!(tx_power > 0.0))
    throw std::domain_error("energy_efficiency: tx_power must be > 0");
  double sum = 0.0;
  for (double r : rates) sum += r;
  return sum / tx_power;
}

std::vector<double> user_rates(const ScenarioConfig& config) {
  std::vector<double> rates = config.resolved_snr_targets();
  for (double& z : rates) z = std::log2(1.0 + z);
  return rates;
}

RateModulation rate_to_modulation(double target_rate) {
  const double rounded = std::round(target_rate);
  if (!(target_rate > 0.0) || std::abs(target_rate - rounded) > 1e-12)
    throw std::invalid_argument("rate_to_modulation: rate must be a positive integer");
  const int bits = static_cast<int>(rounded);
  if (bits > 30) throw std::invalid_argument("rate_to_modulation: rate too large");
  const int order = 1 << bits;
  return {order, static_cast<double>(order - 1)};
}

ConstraintAudit audit_solution(const ChannelSet& channels,
                               const Eigen::VectorXcd& x,
                               const SymbolVector& symbols,
                               const ScenarioConfig& config) {
  const std::vector<double> zeta = config.resolved_snr_targets();
  const int k = config.num_users;
  ConstraintAudit audit;
  audit.phase_error.resize(k);
  audit.snr_ratio.resize(k);
  audit.equality_residual.resize(k);

  bool phase_ok = true, snr_ok = true;
  for (int j = 0; j < k; ++j) {
    const std::complex<double> delivered = (channels.h_ss.row(j) * x).value();
    audit.phase_error[j] =
        angle_distance(std::arg(delivered), std::arg(symbols.d(j)));
    const double snr = std::norm(delivered) / channels.psi(j);
    audit.snr_ratio[j] = snr / zeta[j];
    const std::complex<double> target =
        std::sqrt(channels.psi(j) * zeta[j]) * symbols.d(j);
    audit.equality_residual[j] = std::abs(delivered - target) / std::abs(target);
    if (audit.phase_error[j] > 1e-6) phase_ok = false;
    if (audit.snr_ratio[j] < 1.0 - 1e-6) snr_ok = false;
  }
  audit.phase_ok = phase_ok;
  audit.snr_ok = snr_ok;

  audit.interference_power = std::norm((channels.h_ps * x).value());
  const double ith = config.interference_limit;
  // Absolute floor covers the strict case: |h_ps x| <= 1e-10 ||h_ps|| ||x||.
  const double floor =
      1e-20 * channels.h_ps.squaredNorm() * x.squaredNorm();
  if (std::isinf(ith)) {
    audit.interference_margin = std::numeric_limits<double>::infinity();
    audit.interference_ok = true;
  } else {
    audit.interference_margin = ith - audit.interference_power;
    audit.interference_ok =
        audit.interference_power <= ith * (1.0 + 1e-9) + floor;
  }
  return audit;
}

}  // namespace ccipm
