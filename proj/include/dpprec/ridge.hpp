#ifndef DPPREC_RIDGE_HPP_
#define DPPREC_RIDGE_HPP_

#include <cmath>
#include <cstdint>

#include "dpprec/data_pipeline.hpp"
#include "dpprec/dp_mechanism.hpp"
#include "dpprec/errors.hpp"
#include "dpprec/estimate.hpp"
#include "dpprec/matrix_core.hpp"

namespace dpprec {

struct RidgeConfig {
  double lambda = 0.0;

  void validate() const {
    if (lambda < 0.0) {
      throw SingularMapError("ridge lambda must be nonnegative");
    }
  }
};

// Spectral shrinkage of a single covariance eigenvalue,
// phi -> 2 / (phi + sqrt(phi^2 + 8 lambda)). Positive for any real phi when
// lambda > 0.
inline double shrunk_eigenvalue(double phi, double lambda) {
  if (lambda == 0.0) {
    if (phi <= 0.0) {
      throw SingularMapError("lambda = 0 requires a positive eigenvalue");
    }
    return 1.0 / phi;
  }
  return 2.0 / (phi + std::sqrt(phi * phi + 8.0 * lambda));
}

// Closed-form ridge precision estimate: map each eigenvalue of S through
// shrunk_eigenvalue and recompose in the same eigenbasis.
inline PrecisionEstimate ridge_precision(const SymmetricMatrix& s,
                                         const RidgeConfig& cfg) {
  cfg.validate();
  const EigenDecomposition d = sym_eigen(s);
  if (cfg.lambda == 0.0 && d.eigenvalues.minCoeff() <= 1e-12) {
    throw SingularMapError("lambda = 0 on a numerically singular covariance");
  }
  Eigen::VectorXd shrunk(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < shrunk.size(); ++i) {
    shrunk[i] = shrunk_eigenvalue(d.eigenvalues[i], cfg.lambda);
  }
  PrecisionEstimate est{spectral_compose(d.eigenvectors, shrunk)};
  est.lambda = cfg.lambda;
  return est;
}

// DP-RP: release S once through the Gaussian mechanism, then apply the
// closed form to the perturbed covariance.
inline PrecisionEstimate dp_rp(const DataMatrix& x, const PrivacyBudget& budget,
                               const RidgeConfig& cfg, std::uint64_t seed) {
  require_normalized(x);
  const SymmetricMatrix s = sample_covariance(x);
  const PerturbedCovariance perturbed = perturb_covariance(s, budget, x.n(), seed);
  PrecisionEstimate est = ridge_precision(perturbed.matrix, cfg);
  est.is_private = true;
  est.budget = budget;
  est.seed = seed;
  return est;
}

}  // namespace dpprec

#endif  // DPPREC_RIDGE_HPP_
