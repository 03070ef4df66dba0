// M-PSK alphabet, detection regions, the normalized cross-correlation
// between a channel and a precoder, and the constructive-interference
// classifier for simultaneously transmitted M-PSK symbols.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ccipm/rng.hpp"

namespace ccipm {

class PskAlphabet {
 public:
  // points[k] = exp(i 2 pi k / order). Throws std::invalid_argument unless
  // order is a power of two >= 2.
  explicit PskAlphabet(int order);

  int order() const { return order_; }
  std::complex<double> point(int index) const { return points_[index]; }
  const std::vector<std::complex<double>>& points() const { return points_; }

 private:
  int order_;
  std::vector<std::complex<double>> points_;
};

// Normalized interference factor of stream k as seen by user j:
// rho = h_j w_k / (||h_j|| ||w_k||), |rho| <= 1 by Cauchy-Schwarz.
struct CrossCorrelation {
  std::complex<double> rho;
  int source_user = 0;  // k
  int target_user = 0;  // j
};

// Throws std::invalid_argument if either vector has zero norm.
CrossCorrelation cross_correlation(const Eigen::RowVectorXcd& h_j,
                                   const Eigen::VectorXcd& w_k,
                                   int target_user = 0, int source_user = 0);

// True iff the interference rho * d_k is constructive for symbol d_j:
//   (a) the angle of rho*d_k lies within +-pi/order of angle(d_j)
//       (shortest arc, boundary inclusive), and
//   (b) Re{d_k} Re{rho d_j} > 0 and Im{d_k} Im{rho d_j} > 0, strictly;
//       the imaginary clause is vacuous for order 2 and is skipped.
bool is_constructive(std::complex<double> rho, std::complex<double> d_k,
                     std::complex<double> d_j, int order);

struct Detection {
  int index = 0;
  bool ambiguous = false;  // set for y exactly zero
};

// Maximum-likelihood M-PSK detection: nearest alphabet point in angle,
// ties broken toward the smaller index.
Detection detect(std::complex<double> y, const PskAlphabet& alphabet);

// The K cognitive data symbols plus the primary symbol for one slot.
struct SymbolVector {
  std::vector<int> indices;  // cognitive symbol indices, size K
  Eigen::VectorXcd d;        // alphabet points, size K
  int primary_index = 0;
  std::complex<double> d_p{1.0, 0.0};
};

SymbolVector symbols_from_indices(const PskAlphabet& alphabet,
                                  const PskAlphabet& primary_alphabet,
                                  const std::vector<int>& indices,
                                  int primary_index);

SymbolVector uniform_symbols(const PskAlphabet& alphabet,
                             const PskAlphabet& primary_alphabet,
                             int num_users, SubstreamRng& rng);

// Shortest-arc angular distance |wrap(a - b)| in [0, pi].
double angle_distance(double a, double b);

}  // namespace ccipm
