#include "ccipm/ci_precoder.hpp"

#include <cmath>
#include <stdexcept>

namespace ccipm {

namespace {

constexpr double kConditionCap = 1e12;
constexpr double kInterferenceTolRel = 1e-10;
constexpr int kRootSearchCap = 200;
constexpr double kResidualTolRel = 1e-6;

// Smallest/largest eigenvalue of a Hermitian matrix; rank-deficiency guard.
bool well_conditioned(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo > 0.0 && hi <= kConditionCap * lo;
}

void fill_multipliers(const Eigen::VectorXcd& c, PrecodeSolution* sol) {
  const int k = static_cast<int>(c.size());
  sol->mu.resize(k);
  sol->alpha.resize(k);
  for (int j = 0; j < k; ++j) {
    sol->alpha[j] = 2.0 * c(j).real();
    sol->mu[j] = 2.0 * c(j).imag();
  }
}

void fill_residuals(const ChannelSet& channels, const Eigen::VectorXcd& b,
                    PrecodeSolution* sol) {
  const Eigen::VectorXcd delivered = channels.h_ss * sol->x;
  const int k = static_cast<int>(b.size());
  sol->residual_phase.resize(k);
  for (int j = 0; j < k; ++j)
    sol->residual_phase[j] = std::abs(delivered(j) - b(j)) / std::abs(b(j));
  sol->interference_power = std::norm((channels.h_ps * sol->x).value());
}

PrecodeSolution degenerate_solution(int m) {
  PrecodeSolution sol;
  sol.x = Eigen::VectorXcd::Zero(m);
  sol.status = SolveStatus::Degenerate;
  return sol;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

Eigen::VectorXcd delivery_targets(const ChannelSet& channels,
                                  const SymbolVector& symbols,
                                  const ScenarioConfig& config) {
  const std::vector<double> zeta = config.resolved_snr_targets();
  const int k = config.num_users;
  if (symbols.d.size() != k || channels.psi.size() != k)
    throw std::invalid_argument("delivery_targets: dimension mismatch");
  Eigen::VectorXcd b(k);
  for (int j = 0; j < k; ++j)
    b(j) = std::sqrt(channels.psi(j) * zeta[j]) * symbols.d(j);
  return b;
}

NullSpaceProjector make_projector(const Eigen::RowVectorXcd& h_ps) {
  const double n2 = h_ps.squaredNorm();
  if (n2 == 0.0) throw std::invalid_argument("make_projector: zero h_ps");
  const Eigen::Index m = h_ps.size();
  NullSpaceProjector p;
  p.pi = Eigen::MatrixXcd::Identity(m, m) - h_ps.adjoint() * h_ps / n2;
  return p;
}

PrecodeSolution solve_ccipm(const ChannelSet& channels,
                            const SymbolVector& symbols,
                            const ScenarioConfig& config) {
  const double ith = config.interference_limit;
  if (ith == 0.0)
    throw std::invalid_argument(
        "solve_ccipm: interference_limit is 0; use solve_ccipm_strict");

  const int m = config.num_tx_antennas;
  const Eigen::VectorXcd b = delivery_targets(channels, symbols, config);
  const Eigen::MatrixXcd& h = channels.h_ss;
  const Eigen::MatrixXcd gram = h * h.adjoint();
  const Eigen::VectorXcd v = h * channels.h_ps.adjoint();  // v_j = h_j h_ps^H
  const double nps = channels.h_ps.squaredNorm();

  // x(lambda) and |h_ps x(lambda)|^2 via the rank-one update of
  // (I + lambda h_ps^H h_ps)^{-1}: A(lambda) = G - t(lambda) v v^H with
  // t = lambda / (1 + lambda ||h_ps||^2).
  PrecodeSolution sol;
  double last_lambda = -1.0, last_phi = 0.0;
  bool degenerate = false;
  auto eval = [&](double lambda, Eigen::VectorXcd* c_out,
                  double* phi_out) -> bool {
    const double t = lambda == 0.0 ? 0.0 : lambda / (1.0 + lambda * nps);
    const Eigen::MatrixXcd a = gram - t * (v * v.adjoint());
    if (!well_conditioned(a)) {
      degenerate = true;
      return false;
    }
    const Eigen::VectorXcd c = a.llt().solve(b);
    const std::complex<double> vc = v.adjoint() * c;
    const double phi = std::norm(vc) / ((1.0 + lambda * nps) * (1.0 + lambda * nps));
    ++sol.iterations;
    if (last_lambda >= 0.0) {
      // Interference must not increase with lambda (allows bisection).
      const bool ordered = lambda >= last_lambda ? phi <= last_phi * (1.0 + 1e-9) + 1e-300
                                                 : phi >= last_phi * (1.0 - 1e-9) - 1e-300;
      if (!ordered) sol.interference_monotone = false;
    }
    last_lambda = lambda;
    last_phi = phi;
    *c_out = c;
    *phi_out = phi;
    return true;
  };

  auto finish = [&](double lambda, const Eigen::VectorXcd& c) {
    const double t = lambda == 0.0 ? 0.0 : lambda / (1.0 + lambda * nps);
    const std::complex<double> vc = v.adjoint() * c;
    sol.x = h.adjoint() * c - t * vc * channels.h_ps.adjoint();
    sol.power = sol.x.squaredNorm();
    sol.lambda = lambda;
    fill_multipliers(c, &sol);
    fill_residuals(channels, b, &sol);
    const bool unbounded = std::isinf(ith);
    sol.residual_interference =
        unbounded ? 0.0
                  : std::max(0.0, sol.interference_power - ith) / std::max(1.0, ith);
    double max_phase = 0.0;
    for (double r : sol.residual_phase) max_phase = std::max(max_phase, r);
    sol.status = (max_phase <= kResidualTolRel &&
                  sol.residual_interference <= 1e-9)
                     ? SolveStatus::Optimal
                     : SolveStatus::Infeasible;
    return sol;
  };

  Eigen::VectorXcd c0;
  double phi0 = 0.0;
  if (!eval(0.0, &c0, &phi0)) return degenerate_solution(m);
  if (std::isinf(ith) || phi0 <= ith) return finish(0.0, c0);

  // Bracket: expand lambda geometrically until the constraint is met.
  const double tol = kInterferenceTolRel * ith;
  double lo = 0.0;
  double hi = nps > 0.0 ? 1.0 / nps : 1.0;
  Eigen::VectorXcd c_hi;
  double phi_hi = phi0;
  for (;;) {
    if (!eval(hi, &c_hi, &phi_hi)) return degenerate_solution(m);
    if (phi_hi <= ith) break;
    lo = hi;
    hi *= 4.0;
    if (sol.iterations > kRootSearchCap || hi > 1e30) {
      sol = degenerate_solution(m);
      sol.status = SolveStatus::Infeasible;
      return sol;
    }
  }
  if (std::abs(phi_hi - ith) <= tol) return finish(hi, c_hi);

  // Bisection on lambda; keep the feasible endpoint as fallback.
  double best_lambda = hi;
  Eigen::VectorXcd best_c = c_hi;
  for (int it = 0; it < kRootSearchCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd c;
    double phi;
    if (!eval(mid, &c, &phi)) return degenerate_solution(m);
    if (std::abs(phi - ith) <= tol) return finish(mid, c);
    if (phi > ith) {
      lo = mid;
    } else {
      hi = mid;
      best_lambda = mid;
      best_c = c;
    }
  }
  return finish(best_lambda, best_c);
}

PrecodeSolution solve_ccipm_strict(const ChannelSet& channels,
                                   const SymbolVector& symbols,
                                   const ScenarioConfig& config) {
  const int m = config.num_tx_antennas;
  const Eigen::VectorXcd b = delivery_targets(channels, symbols, config);
  const NullSpaceProjector proj = make_projector(channels.h_ps);
  const Eigen::MatrixXcd hp = channels.h_ss * proj.pi;  // projected rows
  const Eigen::MatrixXcd a = hp * hp.adjoint();
  if (!well_conditioned(a)) return degenerate_solution(m);

  const Eigen::VectorXcd c = a.llt().solve(b);
  PrecodeSolution sol;
  sol.x = hp.adjoint() * c;
  sol.power = sol.x.squaredNorm();
  sol.lambda = std::nullopt;
  fill_multipliers(c, &sol);
  fill_residuals(channels, b, &sol);
  const double scale = channels.h_ps.squaredNorm() * sol.x.squaredNorm();
  sol.residual_interference =
      scale > 0.0 ? sol.interference_power / scale : 0.0;
  double max_phase = 0.0;
  for (double r : sol.residual_phase) max_phase = std::max(max_phase, r);
  sol.status = (max_phase <= kResidualTolRel && sol.residual_interference <= 1e-20)
                   ? SolveStatus::Optimal
                   : SolveStatus::Infeasible;
  return sol;
}

PrecodeSolution solve_precoder(const ChannelSet& channels,
                               const SymbolVector& symbols,
                               const ScenarioConfig& config) {
  if (config.interference_limit == 0.0)
    return solve_ccipm_strict(channels, symbols, config);
  return solve_ccipm(channels, symbols, config);
}

}  // namespace ccipm
