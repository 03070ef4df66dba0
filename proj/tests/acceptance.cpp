// Acceptance suite: end-to-end checks at the QPSK operating point
// (M = 3, K = 2, zeta = 3 = 4.7712 dB). One pass/fail line per criterion;
// exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccipm/baselines.hpp"
#include "ccipm/ci_precoder.hpp"
#include "ccipm/evaluation.hpp"
#include "ccipm/harness.hpp"

using namespace ccipm;

namespace {

int g_failures = 0;
int g_index = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  ++g_index;
  std::printf("[%2d/10] %-28s %s (%s)\n", g_index, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

ScenarioConfig desk_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.num_tx_antennas = 3;
  cfg.num_users = 2;
  cfg.num_primary_antennas = 2;
  cfg.modulation_order = 4;
  cfg.snr_targets = {3.0, 3.0};
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

SymbolVector draw_symbols(const ScenarioConfig& cfg, std::uint64_t trial) {
  const PskAlphabet alphabet(cfg.modulation_order);
  const PskAlphabet primary(cfg.resolved_primary_order());
  SubstreamRng rng(cfg.seed, kSymbolStream, trial);
  return uniform_symbols(alphabet, primary, cfg.num_users, rng);
}

SweepSpec fig1_sweep(std::uint64_t seed, int workers) {
  SweepSpec spec;
  spec.sweep_variable = SweepVariable::ChannelStrengthDb;
  spec.sweep_points = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  spec.trials_per_point = 2000;
  spec.schemes = {Scheme::CcipmStrict, Scheme::CcizfStandin};
  spec.base_config = desk_config(seed);
  spec.base_config.interference_limit = 0.0;
  spec.workers = workers;
  return spec;
}

// 1. Constraint satisfaction across interference regimes.
void criterion_constraints() {
  const auto t0 = std::chrono::steady_clock::now();
  const double modes[] = {0.0, 0.1, 1.0, 10.0, kUnboundedInterference};
  int audited = 0, failed = 0, degenerate = 0;
  double worst_phase = 0.0, worst_snr = 0.0, worst_leak = 0.0;
  for (double mode : modes) {
    ScenarioConfig cfg = desk_config(0xACC0);
    cfg.interference_limit = mode;
    for (int t = 0; t < 1000; ++t) {
      const ChannelSet ch = generate_channels(cfg, t);
      const SymbolVector sym = draw_symbols(cfg, t);
      const PrecodeSolution sol = solve_precoder(ch, sym, cfg);
      if (sol.status != SolveStatus::Optimal) {
        ++degenerate;
        continue;
      }
      const ConstraintAudit audit = audit_solution(ch, sol.x, sym, cfg);
      ++audited;
      if (!audit.pass()) ++failed;
      for (double p : audit.phase_error) worst_phase = std::max(worst_phase, p);
      for (double r : audit.snr_ratio)
        worst_snr = std::max(worst_snr, std::max(0.0, 1.0 - r));
      if (!std::isinf(mode))
        worst_leak = std::max(
            worst_leak, std::max(0.0, audit.interference_power - mode) /
                            std::max(1.0, mode));
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = failed == 0 && audited >= 4990 && secs <= 10.0;
  report("constraint satisfaction", pass,
         std::to_string(audited) + " audits, " + std::to_string(failed) +
             " failures, max phase " + fmt(worst_phase) + " rad, max snr short " +
             fmt(worst_snr) + ", max leak " + fmt(worst_leak) + ", " +
             fmt(secs) + " s, " + std::to_string(degenerate) + " degenerate");
}

// 2. Single-user closed form.
void criterion_matched_filter() {
  ScenarioConfig cfg = desk_config(0xACC1);
  cfg.num_users = 1;
  cfg.snr_targets = {3.0};
  const PskAlphabet qpsk(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    SubstreamRng rng(cfg.seed, kSymbolStream, t);
    const SymbolVector sym = uniform_symbols(qpsk, qpsk, 1, rng);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    const Eigen::VectorXcd expect = std::sqrt(ch.psi(0) * 3.0) * sym.d(0) *
                                    ch.h_ss.row(0).adjoint() /
                                    ch.h_ss.row(0).squaredNorm();
    worst = std::max(worst, (sol.x - expect).norm() / expect.norm());
  }
  report("matched-filter closed form", worst <= 1e-9,
         "100 channels, max rel err " + fmt(worst));
}

// 3. Random-search optimality oracle on binding instances.
void criterion_oracle() {
  ScenarioConfig base = desk_config(0xACC3);
  SubstreamRng perturb(base.seed, kTestStream, 1);
  int instances = 0, beaten = 0;
  long long feasible_draws = 0;
  for (int t = 0; instances < 50 && t < 200; ++t) {
    const ChannelSet ch = generate_channels(base, t);
    const SymbolVector sym = draw_symbols(base, t);
    ScenarioConfig cfg = base;
    cfg.interference_limit = kUnboundedInterference;
    const PrecodeSolution free = solve_ccipm(ch, sym, cfg);
    if (free.status != SolveStatus::Optimal || free.interference_power < 1e-9)
      continue;
    cfg.interference_limit = free.interference_power / 4.0;  // binding
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    if (sol.status != SolveStatus::Optimal) continue;
    ++instances;

    const Eigen::MatrixXcd h = ch.h_ss;
    const Eigen::VectorXcd b = delivery_targets(ch, sym, cfg);
    const Eigen::LLT<Eigen::MatrixXcd> gram_llt((h * h.adjoint()).eval());
    for (int i = 0; i < 100000; ++i) {
      Eigen::VectorXcd cand = sol.x;
      const double radius =
          sol.x.norm() * std::pow(10.0, -4.0 * perturb.uniform());
      for (int j = 0; j < cand.size(); ++j)
        cand(j) += radius * perturb.complex_normal(1.0);
      cand -= h.adjoint() * gram_llt.solve(h * cand - b);
      if (std::norm((ch.h_ps * cand).value()) > cfg.interference_limit) continue;
      ++feasible_draws;
      if (cand.squaredNorm() < sol.power * (1.0 - 1e-6)) ++beaten;
    }
  }
  report("random-search optimality", instances == 50 && beaten == 0,
         std::to_string(instances) + " instances, " +
             std::to_string(feasible_draws) + " feasible draws, " +
             std::to_string(beaten) + " better than solver");
}

// 4. Bound ordering and single-user tightness.
void criterion_bound() {
  ScenarioConfig cfg = desk_config(0xACC4);
  cfg.interference_limit = 1.0;
  int checked = 0, violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = draw_symbols(cfg, t);
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    const BoundSolution bound = solve_multicast_bound(ch, cfg);
    if (sol.status != SolveStatus::Optimal || bound.status != BoundStatus::Optimal)
      continue;
    ++checked;
    if (bound.power > sol.power + 1e-6 * sol.power) ++violations;
  }

  ScenarioConfig single = desk_config(0xACC5);
  single.num_users = 1;
  single.snr_targets = {3.0};
  single.interference_limit = 1e9;  // inactive
  const PskAlphabet qpsk(4);
  double worst_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const ChannelSet ch = generate_channels(single, t);
    SubstreamRng rng(single.seed, kSymbolStream, t);
    const SymbolVector sym = uniform_symbols(qpsk, qpsk, 1, rng);
    const PrecodeSolution sol = solve_ccipm(ch, sym, single);
    const BoundSolution bound = solve_multicast_bound(ch, single);
    if (sol.status != SolveStatus::Optimal || bound.status != BoundStatus::Optimal)
      continue;
    worst_gap = std::max(worst_gap, std::abs(bound.power - sol.power) / sol.power);
  }
  report("bound ordering + tightness",
         checked >= 990 && violations == 0 && worst_gap <= 1e-6,
         std::to_string(checked) + " pairs, " + std::to_string(violations) +
             " violations, K=1 gap " + fmt(worst_gap));
}

// 5. Strict scheme dominates zero forcing, per instance and in the sweep.
void criterion_scheme_ordering() {
  ScenarioConfig cfg = desk_config(0xACC6);
  cfg.interference_limit = 0.0;
  int violations = 0, checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const ChannelSet ch = generate_channels(cfg, t);
    const SymbolVector sym = draw_symbols(cfg, t);
    const PrecodeSolution strict = solve_ccipm_strict(ch, sym, cfg);
    const PrecodeSolution zf = solve_ccizf(ch, sym, cfg);
    if (strict.status != SolveStatus::Optimal || zf.status != SolveStatus::Optimal)
      continue;
    ++checked;
    if (strict.power > zf.power + 1e-9) ++violations;
  }

  const SweepSpec spec = fig1_sweep(0xACC7, 4);
  const SweepResult result = run_sweep(spec);
  int eta_violations = 0;
  for (double point : spec.sweep_points) {
    double eta_strict = 0.0, eta_zf = 0.0;
    for (const SweepRow& row : result.rows) {
      if (row.sweep_point != point) continue;
      if (row.scheme == "ccipm_strict") eta_strict = row.metrics.energy_efficiency;
      if (row.scheme == "ccizf_standin") eta_zf = row.metrics.energy_efficiency;
    }
    if (eta_strict < eta_zf * (1.0 - 1e-9)) ++eta_violations;
  }
  report("scheme ordering (vs CCIZF)",
         checked >= 990 && violations == 0 && eta_violations == 0,
         std::to_string(checked) + " pairs, " + std::to_string(violations) +
             " power violations, " + std::to_string(eta_violations) +
             " eta violations over " + std::to_string(spec.sweep_points.size()) +
             " sweep points x 2000 trials");
}

// 6. Power monotone along the interference-limit chain.
void criterion_monotonicity() {
  ScenarioConfig base = desk_config(0xACC8);
  const double limits[] = {0.01, 0.1, 1.0, 10.0, kUnboundedInterference};
  int violations = 0, instances = 0;
  for (int t = 0; t < 1000; ++t) {
    const ChannelSet ch = generate_channels(base, t);
    const SymbolVector sym = draw_symbols(base, t);
    const PrecodeSolution strict = solve_ccipm_strict(ch, sym, base);
    if (strict.status != SolveStatus::Optimal) continue;
    ++instances;
    double prev = strict.power;
    for (double limit : limits) {
      ScenarioConfig cfg = base;
      cfg.interference_limit = limit;
      const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
      if (sol.status != SolveStatus::Optimal) continue;
      if (sol.power > prev * (1.0 + 1e-12)) ++violations;
      prev = sol.power;
    }
  }
  report("power monotone in I_th", instances >= 990 && violations == 0,
         std::to_string(instances) + " instances x 6 limits, " +
             std::to_string(violations) + " violations");
}

// 7. Complementary slackness of the interference multiplier.
void criterion_slackness() {
  ScenarioConfig base = desk_config(0xACC9);
  int checked = 0, violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const ChannelSet ch = generate_channels(base, t);
    const SymbolVector sym = draw_symbols(base, t);
    ScenarioConfig cfg = base;
    cfg.interference_limit = kUnboundedInterference;
    const PrecodeSolution free = solve_ccipm(ch, sym, cfg);
    if (free.status != SolveStatus::Optimal) continue;
    cfg.interference_limit = 1.0;
    const PrecodeSolution sol = solve_ccipm(ch, sym, cfg);
    if (sol.status != SolveStatus::Optimal || !sol.lambda) continue;
    ++checked;
    if (free.interference_power <= cfg.interference_limit) {
      if (*sol.lambda != 0.0) ++violations;
    } else {
      const double product =
          std::abs(*sol.lambda *
                   (sol.interference_power - cfg.interference_limit));
      if (product > 1e-6 * std::max(1.0, cfg.interference_limit)) ++violations;
      if (*sol.lambda <= 0.0) ++violations;
    }
  }
  report("complementary slackness", checked >= 990 && violations == 0,
         std::to_string(checked) + " instances, " + std::to_string(violations) +
             " violations");
}

// 8. Mutual constructive interference on the QPSK grid.
void criterion_mutuality() {
  const PskAlphabet qpsk(4);
  SubstreamRng rng(0xACCA, kTestStream, 2);
  int counterexamples = 0;
  for (int i = 0; i < 10000; ++i) {
    const double r = std::sqrt(rng.uniform());
    const double phi = 2.0 * M_PI * rng.uniform();
    const std::complex<double> rho{r * std::cos(phi), r * std::sin(phi)};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (is_constructive(rho, qpsk.point(a), qpsk.point(b), 4) !=
            is_constructive(rho, qpsk.point(b), qpsk.point(a), 4))
          ++counterexamples;
  }
  report("constructive mutuality", counterexamples == 0,
         "16 symbol pairs x 10000 rho, " + std::to_string(counterexamples) +
             " counterexamples");
}

// 9. Projector algebra.
void criterion_projector() {
  SubstreamRng rng(0xACCB, kTestStream, 3);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Eigen::RowVectorXcd h(3);
    Eigen::VectorXcd v(3);
    for (int j = 0; j < 3; ++j) {
      h(j) = rng.complex_normal(1.0);
      v(j) = rng.complex_normal(1.0);
    }
    const NullSpaceProjector p = make_projector(h);
    worst = std::max(worst, (p.pi * p.pi - p.pi).norm());
    worst = std::max(worst, (p.pi - p.pi.adjoint()).norm());
    worst = std::max(worst, (p.pi * h.adjoint()).norm() / h.norm());
    const double pythagoras =
        (p.pi * v).squaredNorm() + std::norm((h * v).value()) / h.squaredNorm();
    worst = std::max(worst, std::abs(pythagoras - v.squaredNorm()) / v.squaredNorm());
  }
  report("projector algebra", worst <= 1e-10,
         "10000 draws, max residual " + fmt(worst));
}

// 10. Byte-identical sweep output across worker counts.
void criterion_determinism() {
  SweepSpec spec = fig1_sweep(0xACCC, 1);
  const SweepResult r1 = run_sweep(spec);
  spec.workers = 8;
  const SweepResult r8 = run_sweep(spec);

  const std::string path1 = "acceptance_w1.csv";
  const std::string path8 = "acceptance_w8.csv";
  write_csv(r1, path1);
  write_csv(r8, path8);
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string bytes1 = slurp(path1);
  const std::string bytes8 = slurp(path8);
  const bool pass = !bytes1.empty() && bytes1 == bytes8;
  for (const std::string& p : {path1, path8}) {
    std::remove(p.c_str());
    std::remove((p + ".config.txt").c_str());
  }
  report("determinism across workers", pass,
         std::to_string(bytes1.size()) + " bytes, workers 1 vs 8");
}

}  // namespace

int main() {
  std::printf("acceptance suite: M = 3, K = 2, QPSK, zeta = 3 (4.7712 dB)\n");
  criterion_constraints();
  criterion_matched_filter();
  criterion_oracle();
  criterion_bound();
  criterion_scheme_ordering();
  criterion_monotonicity();
  criterion_slackness();
  criterion_mutuality();
  criterion_projector();
  criterion_determinism();
  if (g_failures == 0)
    std::printf("all 10 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
