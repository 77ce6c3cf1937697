#ifndef DPPREC_DP_MECHANISM_HPP_
#define DPPREC_DP_MECHANISM_HPP_

#include <cmath>
#include <cstdint>
#include <random>

#include "dpprec/errors.hpp"
#include "dpprec/matrix_core.hpp"
#include "dpprec/seeding.hpp"

namespace dpprec {

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(epsilon > 0.0)) {
      throw InvalidBudgetError("epsilon must be positive");
    }
    if (!(delta > 0.0) || !(delta < 1.0)) {
      throw InvalidBudgetError("delta must lie in (0, 1)");
    }
  }
};

// Gaussian standard deviation calibrated to the covariance release, together
// with the sample size it was derived from.
struct NoiseScale {
  double beta = 0.0;
  long n = 0;
};

// l2-sensitivity of X X^T / n over column-normalized neighbors.
inline double covariance_sensitivity(long n) {
  if (n < 1) {
    throw DimensionMismatchError("sample size must be at least 1");
  }
  return std::sqrt(2.0) / static_cast<double>(n);
}

inline NoiseScale noise_scale(const PrivacyBudget& budget, long n) {
  budget.validate();
  const double beta = covariance_sensitivity(n) *
                      std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
                      budget.epsilon;
  return NoiseScale{beta, n};
}

// Symmetric noise matrix: upper triangle (diagonal included) i.i.d.
// N(0, beta^2), lower triangle mirrored. Deterministic given the seed.
inline SymmetricMatrix sample_noise_matrix(int p, const NoiseScale& scale,
                                           std::uint64_t seed) {
  if (p < 1) {
    throw DimensionMismatchError("dimension must be at least 1");
  }
  if (!(scale.beta > 0.0)) {
    throw InvalidBudgetError("noise scale must be positive");
  }
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, scale.beta);
  Eigen::MatrixXd e(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double draw = normal(rng);
      e(i, j) = draw;
      e(j, i) = draw;
    }
  }
  return SymmetricMatrix(std::move(e));
}

struct PerturbedCovariance {
  SymmetricMatrix matrix;
  NoiseScale noise_scale;
  std::uint64_t seed = 0;
};

// S~ = S + E. Not re-projected to the PSD cone; downstream spectral maps
// handle indefinite input.
inline PerturbedCovariance perturb_covariance(const SymmetricMatrix& s,
                                              const PrivacyBudget& budget,
                                              long n, std::uint64_t seed) {
  const NoiseScale scale = noise_scale(budget, n);
  const SymmetricMatrix e = sample_noise_matrix(s.dim(), scale, seed);
  return PerturbedCovariance{SymmetricMatrix(s.mat() + e.mat()), scale, seed};
}

}  // namespace dpprec

#endif  // DPPREC_DP_MECHANISM_HPP_
