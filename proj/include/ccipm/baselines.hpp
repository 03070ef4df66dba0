// Comparison schemes: the phase-relaxed trace-minimization bound on
// achievable transmit power (a small semidefinite program over the input
// covariance Q) and a null-space zero-forcing precoder that delivers every
// symbol exactly with zero interference at the primary user.

#pragma once

#include <Eigen/Dense>

#include "ccipm/ci_precoder.hpp"
#include "ccipm/scenario.hpp"

namespace ccipm {

enum class BoundStatus { Optimal, Infeasible, MaxIter };

const char* to_string(BoundStatus status);

struct BoundSolution {
  Eigen::MatrixXcd Q;         // Hermitian PSD input covariance
  double power = 0.0;         // trace(Q)
  int rank = 0;               // numerical rank of Q
  double kkt_residual = 0.0;  // max of primal/dual/complementarity residuals
  BoundStatus status = BoundStatus::Optimal;
  int iterations = 0;  // Newton steps
};

struct BoundOptions {
  // When true the per-user constraints are the inequality form
  // h_ss,j Q h_ss,j^H >= psi_j zeta_j (can only lower the bound);
  // default is the equality form.
  bool snr_at_least = false;
};

// min trace(Q) s.t. h_ss,j Q h_ss,j^H = psi_j zeta_j for all j and
// h_ps Q h_ps^H <= I_th (dropped when I_th is unbounded, equals 0 when
// I_th = 0). Dense dual log-barrier interior-point method; contract:
// primal feasibility <= 1e-7 relative, duality gap and complementarity
// <= 1e-6 relative (reported in kkt_residual).
BoundSolution solve_multicast_bound(const ChannelSet& channels,
                                    const ScenarioConfig& config,
                                    const BoundOptions& options = {});

// Same program with the zero-interference constraint regardless of the
// configured I_th (solved in the null space of h_ps).
BoundSolution solve_multicast_bound_strict(const ChannelSet& channels,
                                           const ScenarioConfig& config,
                                           const BoundOptions& options = {});

struct CcizfConfig {
  double power_budget = 1.0;     // initial budget; the final vector is scaled
  double scale_tolerance = 1e-9;  // tolerance on the post-scaling SNR check
  void validate() const;          // throws std::invalid_argument
};

// Zero-forcing stand-in: x = pi H_p^H (H_p H_p^H)^{-1} u with H_p the
// matrix of null-space-projected user channels and u_j = sqrt(psi_j
// zeta_j) d_j, then scaled by the minimal factor >= 1 that meets every SNR
// target (1 by construction). Exact symbol delivery, h_ps x = 0.
PrecodeSolution solve_ccizf(const ChannelSet& channels,
                            const SymbolVector& symbols,
                            const ScenarioConfig& config,
                            const CcizfConfig& baseline_cfg = {});

}  // namespace ccipm
