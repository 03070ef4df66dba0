#include "ccipm/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace ccipm {

PskAlphabet::PskAlphabet(int order) : order_(order) {
  if (order < 2 || (order & (order - 1)) != 0)
    throw std::invalid_argument("PskAlphabet: order must be a power of two >= 2");
  points_.resize(order);
  for (int k = 0; k < order; ++k) {
    const double phase = 2.0 * M_PI * k / order;
    double re = std::cos(phase);
    double im = std::sin(phase);
    // Components at axis angles must be exactly zero; the strict sign
    // conditions of the constructive-interference test would otherwise
    // see rounding residue of cos(pi/2) as a signed quantity.
    if (std::abs(re) < 1e-12) re = 0.0;
    if (std::abs(im) < 1e-12) im = 0.0;
    points_[k] = {re, im};
  }
}

CrossCorrelation cross_correlation(const Eigen::RowVectorXcd& h_j,
                                   const Eigen::VectorXcd& w_k, int target_user,
                                   int source_user) {
  const double hn = h_j.norm();
  const double wn = w_k.norm();
  if (hn == 0.0 || wn == 0.0)
    throw std::invalid_argument("cross_correlation: zero-norm input");
  return {(h_j * w_k).value() / (hn * wn), source_user, target_user};
}

double angle_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * M_PI));
}

bool is_constructive(std::complex<double> rho, std::complex<double> d_k,
                     std::complex<double> d_j, int order) {
  // (a): rho*d_k falls inside d_j's detection cone, boundary inclusive.
  const double ang = angle_distance(std::arg(rho * d_k), std::arg(d_j));
  if (ang > M_PI / order) return false;
  // (b): sign compatibility, strict. A zero product is non-constructive;
  // for BPSK all quantities are real and the imaginary clause is skipped.
  const std::complex<double> t = rho * d_j;
  if (!(d_k.real() * t.real() > 0.0)) return false;
  if (order > 2 && !(d_k.imag() * t.imag() > 0.0)) return false;
  return true;
}

Detection detect(std::complex<double> y, const PskAlphabet& alphabet) {
  if (y == std::complex<double>(0.0, 0.0)) return {0, true};
  const double ay = std::arg(y);
  int best = 0;
  double best_dist = angle_distance(ay, std::arg(alphabet.point(0)));
  for (int k = 1; k < alphabet.order(); ++k) {
    const double d = angle_distance(ay, std::arg(alphabet.point(k)));
    if (d < best_dist) {
      best = k;
      best_dist = d;
    }
  }
  return {best, false};
}

SymbolVector symbols_from_indices(const PskAlphabet& alphabet,
                                  const PskAlphabet& primary_alphabet,
                                  const std::vector<int>& indices,
                                  int primary_index) {
  SymbolVector sv;
  sv.indices = indices;
  sv.d.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= alphabet.order())
      throw std::invalid_argument("symbols_from_indices: index out of range");
    sv.d(static_cast<Eigen::Index>(k)) = alphabet.point(indices[k]);
  }
  if (primary_index < 0 || primary_index >= primary_alphabet.order())
    throw std::invalid_argument("symbols_from_indices: primary index out of range");
  sv.primary_index = primary_index;
  sv.d_p = primary_alphabet.point(primary_index);
  return sv;
}

SymbolVector uniform_symbols(const PskAlphabet& alphabet,
                             const PskAlphabet& primary_alphabet, int num_users,
                             SubstreamRng& rng) {
  std::vector<int> indices(num_users);
  for (int k = 0; k < num_users; ++k)
    indices[k] = static_cast<int>(rng.uniform_int(alphabet.order()));
  const int primary =
      static_cast<int>(rng.uniform_int(primary_alphabet.order()));
  return symbols_from_indices(alphabet, primary_alphabet, indices, primary);
}

}  // namespace ccipm
