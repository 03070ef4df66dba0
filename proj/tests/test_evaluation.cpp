#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ccipm/baselines.hpp"
#include "ccipm/ci_precoder.hpp"
#include "ccipm/evaluation.hpp"

using namespace ccipm;
using cd = std::complex<double>;

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Exact QPSK symbol-error rate at symbol SNR gamma.
double qpsk_ser(double gamma) {
  const double q = q_function(std::sqrt(gamma));
  return 2.0 * q - q * q;
}

// Craig's integral for M-PSK SER at symbol SNR gamma. Simpson's rule;
// the integrand is smooth and vanishes at the left endpoint.
double mpsk_ser(double gamma, int order) {
  const double s2 = std::sin(M_PI / order) * std::sin(M_PI / order);
  const double upper = M_PI * (order - 1) / order;
  const int n = 20000;  // even
  const double h = upper / n;
  auto f = [&](double theta) {
    const double s = std::sin(theta);
    if (s <= 0.0) return 0.0;
    return std::exp(-gamma * s2 / (s * s));
  };
  double acc = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0 / M_PI;
}

ScenarioConfig desk_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_tx_antennas = 3;
  cfg.num_users = 2;
  cfg.snr_targets = {3.0, 3.0};
  cfg.interference_limit = kUnboundedInterference;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

SymbolVector desk_symbols(const ScenarioConfig& cfg, std::uint64_t trial) {
  const PskAlphabet alphabet(cfg.modulation_order);
  SubstreamRng rng(cfg.seed, kSymbolStream, trial);
  return uniform_symbols(alphabet, alphabet, cfg.num_users, rng);
}

}  // namespace

TEST_CASE("the two SER oracles agree for QPSK") {
  for (double gamma : {1.0, 3.0, 10.0})
    CHECK(mpsk_ser(gamma, 4) == doctest::Approx(qpsk_ser(gamma)).epsilon(1e-5));
}

TEST_CASE("noiseless slots with solver output are error free") {
  ScenarioConfig cfg = desk_config(71);
  cfg.primary_power = 0.0;
  for (int t = 0; t < 50; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = desk_symbols(cfg, t);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    REQUIRE(sol.status == SolveStatus::Optimal);
    ScenarioConfig quiet = cfg;
    quiet.noise_power = 1e-300;
    const SlotOutcome slot = simulate_slot(ch, sol.x, sym, quiet, t);
    for (bool e : slot.errors) CHECK_FALSE(e);
    CHECK(slot.tx_power == doctest::Approx(sol.power));
  }
}

TEST_CASE("zero transmit vector leaves pure noise at the users") {
  ScenarioConfig cfg = desk_config(72);
  cfg.primary_power = 0.0;
  cfg.noise_power = 0.8;
  const ChannelSet ch = generate_channels(cfg, 0);
  const SymbolVector sym = desk_symbols(cfg, 0);
  const Eigen::VectorXcd x = Eigen::VectorXcd::Zero(cfg.num_tx_antennas);

  double acc = 0.0;
  const int slots = 20000;
  for (int s = 0; s < slots; ++s) {
    const SlotOutcome slot = simulate_slot(ch, x, sym, cfg, s);
    acc += std::norm(slot.y_users(0));
    CHECK(slot.tx_power == 0.0);
    CHECK(slot.interference_at_pu == 0.0);
  }
  CHECK(acc / slots == doctest::Approx(0.8).epsilon(0.05));

  // Determinism in the noise seed.
  const SlotOutcome a = simulate_slot(ch, x, sym, cfg, 5);
  const SlotOutcome b = simulate_slot(ch, x, sym, cfg, 5);
  CHECK(a.y_users == b.y_users);
  CHECK(a.y_primary == b.y_primary);
}

TEST_CASE("high target SNR drives the error rate to zero") {
  ScenarioConfig cfg = desk_config(73);
  cfg.snr_targets = {100.0, 100.0};
  int errors = 0, samples = 0;
  for (int t = 0; t < 200; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = desk_symbols(cfg, t);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    REQUIRE(sol.status == SolveStatus::Optimal);
    for (int s = 0; s < 50; ++s) {
      const SlotOutcome slot =
          simulate_slot(ch, sol.x, sym, cfg, 1000 * t + s);
      for (bool e : slot.errors) {
        errors += e ? 1 : 0;
        ++samples;
      }
    }
  }
  // Analytic QPSK SER at SNR 100 is ~2e-12; with 2e4 samples the bound
  // plus three Monte-Carlo standard errors is effectively zero errors.
  const double analytic = mpsk_ser(100.0, 4);
  const double se = std::sqrt(analytic * (1.0 - analytic) / samples);
  CHECK(static_cast<double>(errors) / samples <= analytic + 3.0 * se);
}

TEST_CASE("delivered-SNR error rate matches the analytic oracle") {
  // p_p = 0 makes the disturbance exactly Gaussian with power psi, so the
  // empirical SER at delivered SNR zeta concentrates on the M-PSK curve.
  ScenarioConfig cfg = desk_config(74);
  cfg.primary_power = 0.0;
  int errors = 0, samples = 0;
  for (int t = 0; t < 200; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = desk_symbols(cfg, t);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    REQUIRE(sol.status == SolveStatus::Optimal);
    for (int s = 0; s < 50; ++s) {
      const SlotOutcome slot = simulate_slot(ch, sol.x, sym, cfg, 977 * t + s);
      for (bool e : slot.errors) {
        errors += e ? 1 : 0;
        ++samples;
      }
    }
  }
  const double analytic = mpsk_ser(3.0, 4);  // zeta = 3
  const double se = std::sqrt(analytic * (1.0 - analytic) / samples);
  const double empirical = static_cast<double>(errors) / samples;
  CHECK(empirical <= analytic + 3.0 * se);
  CHECK(empirical >= analytic - 5.0 * se);  // gross-failure sanity
}

TEST_CASE("energy efficiency arithmetic") {
  // Two users at zeta = 3 (4.7712 dB) carry log2(1+3) = 2 bits/s/Hz each.
  CHECK(energy_efficiency({2.0, 2.0}, 2.0) == doctest::Approx(2.0));
  CHECK(energy_efficiency({1.0}, 1.0) == doctest::Approx(1.0));
  const double eta1 = energy_efficiency({1.5, 2.5}, 3.0);
  const double eta2 = energy_efficiency({1.5, 2.5}, 6.0);
  CHECK(eta1 == doctest::Approx(2.0 * eta2));
  CHECK_THROWS_AS(energy_efficiency({1.0}, 0.0), std::domain_error);

  ScenarioConfig cfg = desk_config(75);
  const std::vector<double> rates = user_rates(cfg);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0] == doctest::Approx(2.0));
}

TEST_CASE("target rate maps to modulation order and SNR") {
  const RateModulation r2 = rate_to_modulation(2.0);
  CHECK(r2.modulation_order == 4);
  CHECK(r2.snr_target == 3.0);
  // The QPSK operating point: zeta = 3 is 4.7712 dB.
  CHECK(10.0 * std::log10(r2.snr_target) == doctest::Approx(4.7712).epsilon(1e-4));

  const RateModulation r1 = rate_to_modulation(1.0);
  CHECK(r1.modulation_order == 2);
  CHECK(r1.snr_target == 1.0);

  const RateModulation r3 = rate_to_modulation(3.0);
  CHECK(r3.modulation_order == 8);
  CHECK(r3.snr_target == 7.0);

  CHECK_THROWS_AS(rate_to_modulation(2.5), std::invalid_argument);
  CHECK_THROWS_AS(rate_to_modulation(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rate_to_modulation(-1.0), std::invalid_argument);
}

TEST_CASE("audit passes solver output and fails a scaled copy") {
  ScenarioConfig cfg = desk_config(76);
  cfg.interference_limit = 1.0;
  for (int t = 0; t < 50; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = desk_symbols(cfg, t);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    if (sol.status != SolveStatus::Optimal) continue;
    const ConstraintAudit good = audit_solution(ch, sol.x, sym, cfg);
    CHECK(good.pass());

    // Halving the vector quarters the delivered SNR.
    const ConstraintAudit bad = audit_solution(ch, 0.5 * sol.x, sym, cfg);
    CHECK_FALSE(bad.snr_ok);
    for (int j = 0; j < cfg.num_users; ++j)
      CHECK(bad.snr_ratio[j] == doctest::Approx(0.25 * good.snr_ratio[j]).epsilon(1e-12));
    CHECK(bad.phase_ok);  // phase unaffected by positive scaling
  }
}

TEST_CASE("audit reports zero interference for null-space precoders") {
  ScenarioConfig cfg = desk_config(77);
  cfg.interference_limit = 0.0;
  for (int t = 0; t < 50; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = desk_symbols(cfg, t);
    const PrecodeSolution zf = solve_ccizf(ch, sym, cfg);
    REQUIRE(zf.status == SolveStatus::Optimal);
    const ConstraintAudit audit = audit_solution(ch, zf.x, sym, cfg);
    CHECK(audit.interference_ok);
    CHECK(audit.interference_power <=
          1e-20 * ch.h_ps.squaredNorm() * zf.x.squaredNorm());
    CHECK(audit.pass());
  }
}
