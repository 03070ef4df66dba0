#include "ccipm/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace ccipm {

namespace {

// The endgame accuracy is limited by cond(S) ~ 1/nu: the gradient cannot
// be evaluated below ~eps/nu. nu_end = 1e-8 leaves the duality gap near
// M * 1e-8 relative while keeping the gradient floor around 1e-8, inside
// the 1e-7 primal-feasibility contract.
constexpr double kNewtonTolFinal = 1e-9;
constexpr double kNuEnd = 1e-8;
constexpr double kNuShrink = 0.2;
constexpr int kNewtonStageCap = 500;
constexpr int kNewtonTotalCap = 20000;
constexpr double kDualBlowup = 1e9;

// Dual barrier state for
//   min tr(Q)  s.t.  <u_j^H u_j, Q> (= or >=) b_j,  [<u_c^H u_c, Q> <= i_cap],
// in normalized coordinates (unit constraint rows, max b = 1). The dual is
//   max b^T y - i_cap w   s.t.  S = I - sum_j y_j u_j^H u_j + w u_c^H u_c >= 0,
// with w >= 0 and, in the >= form, y >= 0.
struct DualBarrier {
  Eigen::MatrixXcd rows;  // (K + has_cap) x m, unit rows; last row is u_c
  Eigen::VectorXd b;      // K targets
  bool has_cap = false;
  double i_cap = 0.0;
  bool y_nonneg = false;

  int k() const { return static_cast<int>(b.size()); }
  int m() const { return static_cast<int>(rows.cols()); }
  int vars() const { return k() + (has_cap ? 1 : 0); }

  Eigen::MatrixXcd build_s(const Eigen::VectorXd& yw) const {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(m(), m());
    for (int j = 0; j < k(); ++j)
      s -= yw(j) * (rows.row(j).adjoint() * rows.row(j));
    if (has_cap) s += yw(k()) * (rows.row(k()).adjoint() * rows.row(k()));
    return s;
  }

  // Objective with barrier; -inf when outside the domain.
  double eval(const Eigen::VectorXd& yw, double nu, Eigen::LLT<Eigen::MatrixXcd>* llt) const {
    if (has_cap && yw(k()) <= 0.0) return -std::numeric_limits<double>::infinity();
    if (y_nonneg)
      for (int j = 0; j < k(); ++j)
        if (yw(j) <= 0.0) return -std::numeric_limits<double>::infinity();
    llt->compute(build_s(yw));
    if (llt->info() != Eigen::Success)
      return -std::numeric_limits<double>::infinity();
    double logdet = 0.0;
    for (int i = 0; i < m(); ++i) {
      const double d = llt->matrixLLT()(i, i).real();
      if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
      logdet += 2.0 * std::log(d);
    }
    double f = b.dot(yw.head(k())) + nu * logdet;
    if (has_cap) f += -i_cap * yw(k()) + nu * std::log(yw(k()));
    if (y_nonneg)
      for (int j = 0; j < k(); ++j) f += nu * std::log(yw(j));
    return f;
  }
};

struct CoreResult {
  Eigen::MatrixXcd q;  // normalized primal recovery
  Eigen::MatrixXcd s;  // dual slack matrix at the final iterate
  double dual_obj = 0.0;
  BoundStatus status = BoundStatus::Optimal;
  int iterations = 0;
};

// Barrier gradient and negated Hessian at yw; also returns the objective.
// Returns false when yw is outside the domain.
bool eval_derivatives(const DualBarrier& prob, const Eigen::VectorXd& yw,
                      double nu, Eigen::LLT<Eigen::MatrixXcd>* llt, double* f,
                      Eigen::VectorXd* grad, Eigen::MatrixXd* hess_neg) {
  *f = prob.eval(yw, nu, llt);
  if (std::isinf(*f)) return false;
  const int n = prob.vars();
  // T = rows S^{-1} rows^H drives gradient and Hessian.
  const Eigen::MatrixXcd sinv_rows = llt->solve(prob.rows.adjoint());
  const Eigen::MatrixXcd t = prob.rows * sinv_rows;

  grad->resize(n);
  if (hess_neg) hess_neg->resize(n, n);
  for (int j = 0; j < prob.k(); ++j) {
    (*grad)(j) = prob.b(j) - nu * t(j, j).real();
    if (hess_neg)
      for (int l = 0; l < prob.k(); ++l)
        (*hess_neg)(j, l) = nu * std::norm(t(j, l));
  }
  if (prob.has_cap) {
    const int c = prob.k();
    (*grad)(c) = -prob.i_cap + nu * t(c, c).real() + nu / yw(c);
    if (hess_neg) {
      for (int j = 0; j < prob.k(); ++j) {
        (*hess_neg)(j, c) = -nu * std::norm(t(j, c));
        (*hess_neg)(c, j) = (*hess_neg)(j, c);
      }
      (*hess_neg)(c, c) = nu * std::norm(t(c, c)) + nu / (yw(c) * yw(c));
    }
  }
  if (prob.y_nonneg)
    for (int j = 0; j < prob.k(); ++j) {
      (*grad)(j) += nu / yw(j);
      if (hess_neg) (*hess_neg)(j, j) += nu / (yw(j) * yw(j));
    }
  return true;
}

CoreResult solve_dual_barrier(const DualBarrier& prob) {
  CoreResult res;
  const int n = prob.vars();
  Eigen::VectorXd yw = Eigen::VectorXd::Zero(n);
  if (prob.has_cap) yw(prob.k()) = 1.0;
  if (prob.y_nonneg) {
    // Interior start that keeps S = I - sum y_j A_j well clear of the cone
    // boundary even when the scaled rows have large norms.
    double total = 0.0;
    for (int j = 0; j < prob.k(); ++j) total += prob.rows.row(j).squaredNorm();
    yw.head(prob.k()).setConstant(0.25 / std::max(1.0, total));
  }

  Eigen::LLT<Eigen::MatrixXcd> llt(prob.m());
  double nu = 1.0;
  bool final_stage = false;
  while (true) {
    const double tol = final_stage ? kNewtonTolFinal : std::max(1e-2 * nu, 1e-12);
    double f;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess_neg;
    if (!eval_derivatives(prob, yw, nu, &llt, &f, &grad, &hess_neg)) break;

    for (int it = 0; it < kNewtonStageCap; ++it) {
      if (res.iterations >= kNewtonTotalCap) break;
      ++res.iterations;
      if (grad.lpNorm<Eigen::Infinity>() <= tol) break;

      // The curvature spread grows like 1/nu toward the end; solve with
      // LDLT and only regularize if the factorization breaks down, so the
      // weak-curvature directions keep their Newton step.
      Eigen::VectorXd step;
      double ridge = 0.0;
      for (;;) {
        Eigen::MatrixXd h = hess_neg;
        if (ridge > 0.0)
          h.diagonal().array() += ridge * hess_neg.diagonal().maxCoeff();
        step = h.ldlt().solve(grad);
        if (step.allFinite() && grad.dot(step) > 0.0) break;
        ridge = ridge == 0.0 ? 1e-14 : ridge * 100.0;
        if (ridge > 1e-4) {
          step = grad / hess_neg.diagonal().maxCoeff();
          break;
        }
      }
      const double slope = grad.dot(step);

      // Exact fraction-to-boundary: S(alpha) = S - alpha * D stays positive
      // definite up to 1/lambda_max(S^{-1} D). Long dual paths (binding,
      // nearly parallel constraints) would otherwise crawl through
      // bisected step sizes.
      double alpha = 1.0;
      {
        Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(prob.m(), prob.m());
        for (int j = 0; j < prob.k(); ++j)
          d += step(j) * (prob.rows.row(j).adjoint() * prob.rows.row(j));
        if (prob.has_cap)
          d -= step(prob.k()) *
               (prob.rows.row(prob.k()).adjoint() * prob.rows.row(prob.k()));
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
            d, prob.build_s(yw), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
        const double lead = ges.eigenvalues().maxCoeff();
        if (lead > 0.0) alpha = std::min(1.0, 0.99 / lead);
        if (prob.has_cap && step(prob.k()) < 0.0)
          alpha = std::min(alpha, -0.99 * yw(prob.k()) / step(prob.k()));
        if (prob.y_nonneg)
          for (int j = 0; j < prob.k(); ++j)
            if (step(j) < 0.0) alpha = std::min(alpha, -0.99 * yw(j) / step(j));
      }

      // Accept on sufficient ascent or on gradient-norm decrease. Near the
      // central point the objective increments fall below the rounding
      // noise of log det S while the gradient still contracts cleanly.
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd cand = yw + alpha * step;
        double fc;
        Eigen::VectorXd grad_c;
        Eigen::MatrixXd hess_c;
        if (eval_derivatives(prob, cand, nu, &llt, &fc, &grad_c, &hess_c) &&
            (fc >= f + 1e-4 * alpha * slope ||
             grad_c.lpNorm<Eigen::Infinity>() <=
                 0.9 * grad.lpNorm<Eigen::Infinity>())) {
          yw = cand;
          f = fc;
          grad = std::move(grad_c);
          hess_neg = std::move(hess_c);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // progress below the numerical floor

      const double dual_obj =
          prob.b.dot(yw.head(prob.k())) -
          (prob.has_cap ? prob.i_cap * yw(prob.k()) : 0.0);
      if (dual_obj > kDualBlowup || yw.lpNorm<Eigen::Infinity>() > 1e12) {
        res.status = BoundStatus::Infeasible;
        return res;
      }
    }
    if (final_stage || res.iterations >= kNewtonTotalCap) break;
    nu *= kNuShrink;
    if (nu <= kNuEnd) {
      nu = kNuEnd;
      final_stage = true;
    }
  }

  // Primal recovery from the central point: Q = nu S^{-1}. Whether the
  // result meets the KKT contract is decided by the caller from the
  // recovered Q, not from the iteration history.
  prob.eval(yw, nu, &llt);
  const Eigen::MatrixXcd sinv =
      llt.solve(Eigen::MatrixXcd::Identity(prob.m(), prob.m()));
  res.q = nu * 0.5 * (sinv + sinv.adjoint());
  res.s = prob.build_s(yw);
  res.dual_obj = prob.b.dot(yw.head(prob.k())) -
                 (prob.has_cap ? prob.i_cap * yw(prob.k()) : 0.0);
  return res;
}

// Constraints near-active at q: all equalities (shortfall-only in the
// >= form) plus the interference cap when it is violated or near-binding.
std::vector<int> active_constraints(const DualBarrier& prob,
                                    const Eigen::MatrixXcd& q) {
  std::vector<int> active;
  for (int j = 0; j < prob.k(); ++j) {
    const double got = (prob.rows.row(j) * q * prob.rows.row(j).adjoint())(0).real();
    if (!prob.y_nonneg || got < prob.b(j) * (1.0 + 1e-6)) active.push_back(j);
  }
  if (prob.has_cap) {
    const double leak =
        (prob.rows.row(prob.k()) * q * prob.rows.row(prob.k()).adjoint())(0).real();
    if (leak > prob.i_cap * (1.0 - 1e-6)) active.push_back(prob.k());
  }
  return active;
}

// Worst relative constraint/PSD violation of q (targets are normalized
// to 1, so absolute and relative coincide for the equalities).
double primal_violation(const DualBarrier& prob, const Eigen::MatrixXcd& q) {
  double worst = 0.0;
  for (int j = 0; j < prob.k(); ++j) {
    const double got = (prob.rows.row(j) * q * prob.rows.row(j).adjoint())(0).real();
    const double miss = prob.y_nonneg ? std::max(0.0, prob.b(j) - got)
                                      : std::abs(got - prob.b(j));
    worst = std::max(worst, miss);
  }
  if (prob.has_cap) {
    const double leak =
        (prob.rows.row(prob.k()) * q * prob.rows.row(prob.k()).adjoint())(0).real();
    worst = std::max(worst, (leak - prob.i_cap) / std::max(1.0, prob.i_cap));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
  worst = std::max(worst, -es.eigenvalues().minCoeff() /
                              std::max(1.0, q.trace().real()));
  return worst;
}

// Feasibility polish. The barrier recovery Q = nu S^{-1} carries
// O(cond(S) * eps) constraint residue that Newton cannot remove. The
// optimal face, however, is available to machine precision as the
// near-null space of the dual slack S (built entry-exact from y). Restrict
// Q to that face and correct the face coordinates against the active
// constraints; the PSD condition is inactive there, so the linear
// correction is exact. Falls back to alternating affine/PSD projections
// when no face separates.
void polish_primal(const DualBarrier& prob, const Eigen::MatrixXcd& s,
                   Eigen::MatrixXcd* q) {
  const int k = prob.k();
  const int m = prob.m();
  double best_violation = primal_violation(prob, *q);
  if (best_violation <= 1e-12) return;

  // Face coordinates from the dual slack's small eigenspace.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_s(s);
  const double top = es_s.eigenvalues().maxCoeff();
  int rank_face = 0;
  for (int i = 0; i < m; ++i)
    if (es_s.eigenvalues()(i) <= 1e-4 * top) ++rank_face;
  if (rank_face > 0) {
    const Eigen::MatrixXcd v = es_s.eigenvectors().leftCols(rank_face);
    const std::vector<int> active = active_constraints(prob, *q);
    const int nc = static_cast<int>(active.size());
    const int nx = rank_face * rank_face;  // real dof of Hermitian X

    // <M_i, X> as a real-linear map of X's packed coordinates.
    Eigen::MatrixXd a(nc, nx);
    Eigen::VectorXd rhs(nc);
    Eigen::MatrixXcd x0 = v.adjoint() * *q * v;
    x0 = 0.5 * (x0 + x0.adjoint()).eval();
    for (int i = 0; i < nc; ++i) {
      const Eigen::RowVectorXcd rv = prob.rows.row(active[i]) * v;
      const Eigen::MatrixXcd mi = rv.adjoint() * rv;
      int col = 0;
      for (int d = 0; d < rank_face; ++d) a(i, col++) = mi(d, d).real();
      for (int d = 0; d < rank_face; ++d)
        for (int e = d + 1; e < rank_face; ++e) {
          a(i, col++) = 2.0 * mi(d, e).real();
          a(i, col++) = 2.0 * mi(d, e).imag();
        }
      const double target = active[i] < k ? prob.b(active[i]) : prob.i_cap;
      rhs(i) = target - (rv * x0 * rv.adjoint())(0).real();
    }
    const Eigen::VectorXd dx =
        a.completeOrthogonalDecomposition().solve(rhs);
    if (dx.allFinite()) {
      Eigen::MatrixXcd x = x0;
      int col = 0;
      for (int d = 0; d < rank_face; ++d) x(d, d) += dx(col++);
      for (int d = 0; d < rank_face; ++d)
        for (int e = d + 1; e < rank_face; ++e) {
          const std::complex<double> delta(dx(col), dx(col + 1));
          col += 2;
          x(d, e) += delta;
          x(e, d) += std::conj(delta);
        }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_x(x);
      const Eigen::VectorXd clipped = es_x.eigenvalues().cwiseMax(0.0);
      const Eigen::MatrixXcd q_face = v * es_x.eigenvectors() *
                                      clipped.asDiagonal() *
                                      es_x.eigenvectors().adjoint() * v.adjoint();
      const double face_violation = primal_violation(prob, q_face);
      if (face_violation < best_violation) {
        *q = q_face;
        best_violation = face_violation;
      }
    }
  }
  if (best_violation <= 1e-12) return;

  // Alternating projections as a fallback.
  Eigen::MatrixXcd q_ap = *q;
  for (int round = 0; round < 12; ++round) {
    const std::vector<int> active = active_constraints(prob, q_ap);
    const int n = static_cast<int>(active.size());
    if (n > 0) {
      Eigen::MatrixXd gram(n, n);
      Eigen::VectorXd miss(n);
      for (int i = 0; i < n; ++i) {
        const auto& ri = prob.rows.row(active[i]);
        miss(i) = (active[i] < k ? prob.b(active[i]) : prob.i_cap) -
                  (ri * q_ap * ri.adjoint())(0).real();
        for (int l = 0; l < n; ++l) {
          const auto& rl = prob.rows.row(active[l]);
          gram(i, l) = std::norm((ri * rl.adjoint())(0));
        }
      }
      const Eigen::VectorXd mu = gram.ldlt().solve(miss);
      if (!mu.allFinite()) break;
      for (int i = 0; i < n; ++i) {
        const auto& ri = prob.rows.row(active[i]);
        q_ap += mu(i) * (ri.adjoint() * ri);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q_ap);
    if (es.eigenvalues().minCoeff() >=
        -1e-13 * std::max(1.0, q_ap.trace().real())) {
      const double v_ap = primal_violation(prob, q_ap);
      if (v_ap < best_violation) {
        *q = q_ap;
        best_violation = v_ap;
      }
      if (best_violation <= 1e-12) return;
      continue;
    }
    q_ap = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
           es.eigenvectors().adjoint();
  }
  const double v_ap = primal_violation(prob, q_ap);
  if (v_ap < best_violation) *q = q_ap;
}

int numerical_rank(const Eigen::MatrixXcd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0)) return 0;
  int r = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-7 * top) ++r;
  return r;
}

// Common driver. When `basis` is non-empty the program is solved in the
// reduced coordinates Q = basis Qr basis^H (strict mode: basis spans the
// null space of h_ps) and no interference cap is used.
BoundSolution solve_bound_impl(const ChannelSet& channels,
                               const ScenarioConfig& config,
                               const BoundOptions& options, bool strict) {
  const std::vector<double> zeta = config.resolved_snr_targets();
  const int k = config.num_users;
  const int m = config.num_tx_antennas;

  Eigen::MatrixXcd basis;  // m x m' reduction
  if (strict) {
    const double nps = channels.h_ps.squaredNorm();
    if (nps == 0.0) {
      basis = Eigen::MatrixXcd::Identity(m, m);
    } else {
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(channels.h_ps.adjoint());
      const Eigen::MatrixXcd full = qr.householderQ();
      basis = full.rightCols(m - 1);
    }
  } else {
    basis = Eigen::MatrixXcd::Identity(m, m);
  }
  const int mr = static_cast<int>(basis.cols());

  BoundSolution sol;
  DualBarrier prob;
  const bool unbounded = std::isinf(config.interference_limit);
  prob.has_cap = !strict && !unbounded;
  prob.y_nonneg = options.snr_at_least;
  prob.rows.resize(k + (prob.has_cap ? 1 : 0), mr);
  prob.b.resize(k);

  // Scale every delivery constraint to target exactly 1 so the barrier
  // gradient components are per-constraint relative residuals; the overall
  // magnitude beta keeps the normalized trace near 1.
  Eigen::VectorXd targets(k);  // b_j = psi_j zeta_j against original channels
  double beta = 0.0;
  for (int j = 0; j < k; ++j) {
    const double n2 = (channels.h_ss.row(j) * basis).squaredNorm();
    targets(j) = channels.psi(j) * zeta[j];
    if (n2 < 1e-14 * channels.h_ss.row(j).squaredNorm()) {
      // Positive delivery through an annihilated channel is impossible.
      sol.status = BoundStatus::Infeasible;
      sol.Q = Eigen::MatrixXcd::Zero(m, m);
      return sol;
    }
    beta = std::max(beta, targets(j) / n2);
  }
  for (int j = 0; j < k; ++j) {
    prob.rows.row(j) =
        (channels.h_ss.row(j) * basis) * std::sqrt(beta / targets(j));
    prob.b(j) = 1.0;
  }
  if (prob.has_cap) {
    const double nps = channels.h_ps.squaredNorm();
    prob.rows.row(k) = channels.h_ps / std::sqrt(nps);
    prob.i_cap = config.interference_limit / nps / beta;
  }

  CoreResult core = solve_dual_barrier(prob);
  sol.iterations = core.iterations;
  sol.status = core.status;
  if (core.status == BoundStatus::Infeasible) {
    sol.Q = Eigen::MatrixXcd::Zero(m, m);
    return sol;
  }
  polish_primal(prob, core.s, &core.q);

  sol.Q = beta * (basis * core.q * basis.adjoint());
  sol.Q = 0.5 * (sol.Q + sol.Q.adjoint()).eval();
  sol.power = sol.Q.trace().real();
  sol.rank = numerical_rank(sol.Q);

  // KKT residuals against the original (unnormalized) program.
  double eq_rel = 0.0;
  for (int j = 0; j < k; ++j) {
    const double got =
        (channels.h_ss.row(j) * sol.Q * channels.h_ss.row(j).adjoint())(0).real();
    const double miss = options.snr_at_least ? std::max(0.0, targets(j) - got)
                                             : std::abs(got - targets(j));
    eq_rel = std::max(eq_rel, miss / targets(j));
  }
  double ineq_rel = 0.0;
  const double leak =
      (channels.h_ps * sol.Q * channels.h_ps.adjoint())(0).real();
  if (strict) {
    const double scale = channels.h_ps.squaredNorm() * std::max(sol.power, 1e-300);
    ineq_rel = std::abs(leak) / scale;
  } else if (!unbounded) {
    ineq_rel = std::max(0.0, leak - config.interference_limit) /
               std::max(1.0, config.interference_limit);
  }
  const double gap_rel = std::abs(sol.power - beta * core.dual_obj) /
                         std::max(1.0, sol.power);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sol.Q, Eigen::EigenvaluesOnly);
  const double psd_rel =
      std::max(0.0, -es.eigenvalues().minCoeff()) / std::max(sol.power, 1e-300);
  sol.kkt_residual = std::max({eq_rel, ineq_rel, gap_rel, psd_rel});

  sol.status = (eq_rel <= 1e-7 && sol.kkt_residual <= 1e-6)
                   ? BoundStatus::Optimal
                   : BoundStatus::MaxIter;
  return sol;
}

}  // namespace

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Optimal: return "optimal";
    case BoundStatus::Infeasible: return "infeasible";
    case BoundStatus::MaxIter: return "maxiter";
  }
  return "unknown";
}

BoundSolution solve_multicast_bound(const ChannelSet& channels,
                                    const ScenarioConfig& config,
                                    const BoundOptions& options) {
  return solve_bound_impl(channels, config, options,
                          config.interference_limit == 0.0);
}

BoundSolution solve_multicast_bound_strict(const ChannelSet& channels,
                                           const ScenarioConfig& config,
                                           const BoundOptions& options) {
  return solve_bound_impl(channels, config, options, true);
}

void CcizfConfig::validate() const {
  if (!(power_budget > 0.0))
    throw std::invalid_argument("CcizfConfig: power_budget must be > 0");
  if (!(scale_tolerance > 0.0))
    throw std::invalid_argument("CcizfConfig: scale_tolerance must be > 0");
}

PrecodeSolution solve_ccizf(const ChannelSet& channels,
                            const SymbolVector& symbols,
                            const ScenarioConfig& config,
                            const CcizfConfig& baseline_cfg) {
  baseline_cfg.validate();
  const int m = config.num_tx_antennas;
  const Eigen::VectorXcd u = delivery_targets(channels, symbols, config);
  const NullSpaceProjector proj = make_projector(channels.h_ps);
  const Eigen::MatrixXcd hp = channels.h_ss * proj.pi;
  const Eigen::MatrixXcd a = hp * hp.adjoint();
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi > 1e12 * lo) {
      PrecodeSolution d;
      d.x = Eigen::VectorXcd::Zero(m);
      d.status = SolveStatus::Degenerate;
      return d;
    }
  }
  const Eigen::VectorXcd c = a.llt().solve(u);

  PrecodeSolution sol;
  sol.x = proj.pi * (hp.adjoint() * c);

  // Power scaling: lift the whole vector until every user meets its target.
  // Exact delivery makes the factor 1 up to rounding.
  const std::vector<double> zeta = config.resolved_snr_targets();
  double factor = 1.0;
  for (int j = 0; j < config.num_users; ++j) {
    const double got = std::abs((channels.h_ss.row(j) * sol.x).value());
    const double want = std::sqrt(channels.psi(j) * zeta[j]);
    if (got > 0.0) factor = std::max(factor, want / got);
  }
  if (factor > 1.0) sol.x *= factor;

  sol.power = sol.x.squaredNorm();
  sol.lambda = std::nullopt;
  const int k = config.num_users;
  sol.mu.resize(k);
  sol.alpha.resize(k);
  for (int j = 0; j < k; ++j) {
    sol.alpha[j] = 2.0 * c(j).real();
    sol.mu[j] = 2.0 * c(j).imag();
  }
  const Eigen::VectorXcd delivered = channels.h_ss * sol.x;
  sol.residual_phase.resize(k);
  for (int j = 0; j < k; ++j)
    sol.residual_phase[j] = std::abs(delivered(j) - u(j)) / std::abs(u(j));
  sol.interference_power = std::norm((channels.h_ps * sol.x).value());
  const double scale = channels.h_ps.squaredNorm() * sol.x.squaredNorm();
  sol.residual_interference =
      scale > 0.0 ? sol.interference_power / scale : 0.0;
  double max_phase = 0.0;
  for (double r : sol.residual_phase) max_phase = std::max(max_phase, r);
  sol.status = (max_phase <= 1e-6 && sol.residual_interference <= 1e-20)
                   ? SolveStatus::Optimal
                   : SolveStatus::Infeasible;
  return sol;
}

}  // namespace ccipm
