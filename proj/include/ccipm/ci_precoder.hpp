// Per-slot power-minimizing symbol-level precoders for the cognitive
// downlink. Both solvers deliver each user's symbol exactly,
//   h_ss,j x = sqrt(psi_j zeta_j) d_j   for all j,
// which pins the received phase to angle(d_j) and the delivered SNR to
// zeta_j. The relaxed variant additionally enforces the interference
// temperature |h_ps x|^2 <= I_th through a nonnegative multiplier lambda;
// the strict variant forces h_ps x = 0 via a null-space projector.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "ccipm/constellation.hpp"
#include "ccipm/scenario.hpp"

namespace ccipm {

enum class SolveStatus { Optimal, Infeasible, Degenerate };

const char* to_string(SolveStatus status);

struct PrecodeSolution {
  Eigen::VectorXcd x;            // transmit vector, length M
  double power = 0.0;            // ||x||^2
  std::optional<double> lambda;  // interference multiplier; nullopt in strict mode
  std::vector<double> mu;        // imaginary-part equality multipliers
  std::vector<double> alpha;     // real-part equality multipliers
  // Per-user relative residual |h_ss,j x - sqrt(psi_j zeta_j) d_j| /
  // sqrt(psi_j zeta_j).
  std::vector<double> residual_phase;
  // Relative interference-constraint violation: max(0, phi - I_th)/max(1, I_th)
  // for finite I_th; phi / (||h_ps||^2 ||x||^2) in strict mode; 0 unbounded.
  double residual_interference = 0.0;
  double interference_power = 0.0;  // phi = |h_ps x|^2
  int iterations = 0;               // interference evaluations in the root search
  SolveStatus status = SolveStatus::Optimal;
  // Diagnostic: phi was non-increasing across all evaluated multiplier
  // values (the property that justifies bisection).
  bool interference_monotone = true;
};

// Orthogonal projector onto the null space of h_ps:
// pi = I - h_ps^H h_ps / ||h_ps||^2. Hermitian, idempotent, rank M-1.
struct NullSpaceProjector {
  Eigen::MatrixXcd pi;
};

// Throws std::invalid_argument for zero h_ps.
NullSpaceProjector make_projector(const Eigen::RowVectorXcd& h_ps);

// Relaxed solver. Writes x(lambda) = (I + lambda h_ps^H h_ps)^{-1} H^H c
// with complex multipliers c_j = 0.5 (alpha_j + i mu_j); for fixed lambda
// the K symbol-delivery equalities give a Hermitian linear system
// A(lambda) c = b. If the lambda = 0 solution already meets the
// interference constraint it is returned (complementary slackness);
// otherwise lambda is driven to |h_ps x(lambda)|^2 = I_th by bracketed
// bisection (interference is non-increasing in lambda).
//
// Throws std::invalid_argument when config.interference_limit == 0; the
// zero-interference problem is solve_ccipm_strict's.
PrecodeSolution solve_ccipm(const ChannelSet& channels,
                            const SymbolVector& symbols,
                            const ScenarioConfig& config);

// Strict (zero-interference) solver: x = pi x_hat with
// x_hat = sum_j c_j h_ss,j^H and A c = b, A_jk = h_ss,j pi h_ss,k^H.
// Minimum-norm among all x with exact symbol delivery and h_ps x = 0.
PrecodeSolution solve_ccipm_strict(const ChannelSet& channels,
                                   const SymbolVector& symbols,
                                   const ScenarioConfig& config);

// Routes on config.interference_limit: 0 -> strict, otherwise relaxed.
PrecodeSolution solve_precoder(const ChannelSet& channels,
                               const SymbolVector& symbols,
                               const ScenarioConfig& config);

// Symbol-delivery targets b_j = sqrt(psi_j zeta_j) d_j.
Eigen::VectorXcd delivery_targets(const ChannelSet& channels,
                                  const SymbolVector& symbols,
                                  const ScenarioConfig& config);

}  // namespace ccipm
