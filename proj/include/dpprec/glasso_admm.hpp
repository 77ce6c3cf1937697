#ifndef DPPREC_GLASSO_ADMM_HPP_
#define DPPREC_GLASSO_ADMM_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include "dpprec/data_pipeline.hpp"
#include "dpprec/dp_mechanism.hpp"
#include "dpprec/errors.hpp"
#include "dpprec/estimate.hpp"
#include "dpprec/matrix_core.hpp"

namespace dpprec {

struct AdmmConfig {
  double lambda = 0.0;
  double rho = 100.0;
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  int max_iter = 1000;
  bool penalize_diagonal = true;
  // Optional extensions, both off by default. adaptive_rho rebalances the
  // penalty parameter by factors of two whenever one residual dominates the
  // other by 10x (checked every five iterations); the fixed point is
  // unchanged. rescale solves in trace-normalized coordinates (divide S and
  // lambda by tr(S)/p, multiply the solution back), which is the exact same
  // minimizer by scale equivariance but keeps the iteration well conditioned
  // when S has a tiny scale. With rescale on, the reported residuals refer to
  // the normalized coordinates.
  bool adaptive_rho = false;
  bool rescale = false;
  // Refuse provably unbounded instances (indefinite covariance with a lambda
  // too small to control the negative directions) before iterating. Off, the
  // iteration runs until the cap or the divergence guard.
  bool unbounded_check = true;

  void validate() const {
    if (!(rho > 0.0)) throw DimensionMismatchError("rho must be positive");
    if (lambda < 0.0) throw DimensionMismatchError("lambda must be nonnegative");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
      throw DimensionMismatchError("tolerances must be positive");
    }
    if (max_iter < 1) throw DimensionMismatchError("max_iter must be >= 1");
  }
};

struct AdmmState {
  SymmetricMatrix theta;
  SymmetricMatrix z;
  SymmetricMatrix u;
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

class MaxIterExceededError : public Error {
 public:
  MaxIterExceededError(const std::string& what, AdmmState state)
      : Error("MaxIterExceeded", what), state_(std::move(state)) {}
  const AdmmState& state() const { return state_; }

 private:
  AdmmState state_;
};

// Closed-form minimizer of -log|Theta| + tr(S Theta) + (rho/2)||Theta - Z + U||_F^2.
// Every eigenvalue of the result is strictly positive for any real spectrum
// of rho (Z - U) - S.
inline SymmetricMatrix theta_update(const SymmetricMatrix& s,
                                    const SymmetricMatrix& z,
                                    const SymmetricMatrix& u, double rho) {
  const SymmetricMatrix target(rho * (z.mat() - u.mat()) - s.mat());
  const EigenDecomposition d = sym_eigen(target);
  Eigen::VectorXd mapped(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    const double l = d.eigenvalues[i];
    mapped[i] = (l + std::sqrt(l * l + 4.0 * rho)) / (2.0 * rho);
  }
  return spectral_compose(d.eigenvectors, mapped);
}

// Entrywise soft-thresholding of Theta + U at lambda / rho. The diagonal is
// thresholded too unless penalize_diagonal is off.
inline SymmetricMatrix z_update(const SymmetricMatrix& theta,
                                const SymmetricMatrix& u, double lambda,
                                double rho, bool penalize_diagonal = true) {
  const double kappa = lambda / rho;
  const int p = theta.dim();
  Eigen::MatrixXd z(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double v = theta(i, j) + u(i, j);
      const double t =
          (i == j && !penalize_diagonal) ? v : soft_threshold(v, kappa);
      z(i, j) = t;
      z(j, i) = t;
    }
  }
  return SymmetricMatrix(std::move(z));
}

inline SymmetricMatrix u_update(const SymmetricMatrix& u,
                                const SymmetricMatrix& theta,
                                const SymmetricMatrix& z) {
  return SymmetricMatrix(u.mat() + theta.mat() - z.mat());
}

// Scaled-form ADMM for the graphical lasso. Returns the sparse split iterate
// Z as the estimate (exact zeros from the prox); the positive-definite Theta
// iterate is kept in dense_theta.
inline PrecisionEstimate solve_glasso(const SymmetricMatrix& s,
                                      const AdmmConfig& cfg,
                                      std::optional<AdmmState> init = {},
                                      AdmmState* final_state = nullptr);

namespace detail {

// Maps an ADMM state between the original and trace-normalized coordinates.
// The primal iterates scale with the precision matrix, the scaled dual U
// scales inversely (its fixed point is lambda/rho times a subgradient).
inline AdmmState scale_admm_state(const AdmmState& state, double c) {
  return AdmmState{SymmetricMatrix(state.theta.mat() * c),
                   SymmetricMatrix(state.z.mat() * c),
                   SymmetricMatrix(state.u.mat() / c),
                   state.iteration,
                   state.primal_residual,
                   state.dual_residual};
}

inline PrecisionEstimate solve_glasso_rescaled(const SymmetricMatrix& s,
                                               const AdmmConfig& cfg,
                                               std::optional<AdmmState> init,
                                               AdmmState* final_state) {
  const double sigma = s.mat().trace() / s.dim();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw NotPositiveDefiniteError(
        "covariance needs a positive trace for rescaling");
  }
  AdmmConfig inner = cfg;
  inner.rescale = false;
  inner.lambda = cfg.lambda / sigma;
  std::optional<AdmmState> inner_init;
  if (init) {
    inner_init = scale_admm_state(*init, sigma);
  }
  const SymmetricMatrix s_scaled(s.mat() / sigma);
  AdmmState inner_state{SymmetricMatrix::zero(s.dim()),
                        SymmetricMatrix::zero(s.dim()),
                        SymmetricMatrix::zero(s.dim())};
  try {
    PrecisionEstimate est =
        solve_glasso(s_scaled, inner, std::move(inner_init), &inner_state);
    est.matrix = SymmetricMatrix(est.matrix.mat() / sigma);
    if (est.dense_theta) {
      est.dense_theta = SymmetricMatrix(est.dense_theta->mat() / sigma);
    }
    est.lambda = cfg.lambda;
    if (final_state) {
      *final_state = scale_admm_state(inner_state, 1.0 / sigma);
    }
    return est;
  } catch (const MaxIterExceededError& e) {
    throw MaxIterExceededError(
        "ADMM did not converge in " + std::to_string(cfg.max_iter) +
            " iterations",
        scale_admm_state(e.state(), 1.0 / sigma));
  }
}

}  // namespace detail

inline PrecisionEstimate solve_glasso(const SymmetricMatrix& s,
                                      const AdmmConfig& cfg,
                                      std::optional<AdmmState> init,
                                      AdmmState* final_state) {
  cfg.validate();
  if (!s.all_finite()) {
    throw NonFiniteError("covariance contains NaN or Inf");
  }
  if (cfg.rescale) {
    return detail::solve_glasso_rescaled(s, cfg, std::move(init), final_state);
  }
  const int p = s.dim();
  if (cfg.unbounded_check) {
    // A noisy covariance can be indefinite. Along the bottom eigenvector v the
    // objective grows like t * (v'Sv + lambda * penalty(vv')), so a negative
    // coefficient certifies an unbounded problem; refuse it up front instead
    // of iterating to the max.
    const EigenDecomposition sd = sym_eigen(s);
    const double bottom = sd.eigenvalues[p - 1];
    if (bottom < 0.0) {
      const Eigen::VectorXd v = sd.eigenvectors.col(p - 1);
      double penalty = std::pow(v.cwiseAbs().sum(), 2);
      if (!cfg.penalize_diagonal) {
        penalty -= v.squaredNorm();
      }
      if (bottom + cfg.lambda * penalty < 0.0) {
        throw ConvergenceFailureError(
            "objective is unbounded: covariance is indefinite and lambda is "
            "too small");
      }
    }
  }
  SymmetricMatrix z = init ? init->z : SymmetricMatrix::zero(p);
  SymmetricMatrix u = init ? init->u : SymmetricMatrix::zero(p);
  SymmetricMatrix theta = SymmetricMatrix::identity(p);
  const double sqrt_p = std::sqrt(static_cast<double>(p));

  double primal = 0.0, dual = 0.0;
  double rho = cfg.rho;
  const double theta_cap =
      1e6 / std::max(s.mat().diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    theta = theta_update(s, z, u, rho);
    SymmetricMatrix z_next =
        z_update(theta, u, cfg.lambda, rho, cfg.penalize_diagonal);
    dual = rho * (z_next.mat() - z.mat()).norm();
    z = std::move(z_next);
    u = u_update(u, theta, z);
    primal = (theta.mat() - z.mat()).norm();
    if (!theta.all_finite() || theta.mat().norm() > theta_cap) {
      // The eigenvector pre-check above is only a sufficient condition; a
      // near-unbounded instance shows up as iterates drifting far past any
      // plausible solution scale.
      throw ConvergenceFailureError("ADMM iterates diverged");
    }

    const double eps_pri =
        sqrt_p * cfg.abs_tol +
        cfg.rel_tol * std::max(theta.mat().norm(), z.mat().norm());
    const double eps_dual =
        sqrt_p * cfg.abs_tol + cfg.rel_tol * rho * u.mat().norm();
    if (cfg.adaptive_rho && k % 5 == 0 && !(primal <= eps_pri && dual <= eps_dual)) {
      if (primal > 10.0 * dual && rho < 1e10) {
        rho *= 2.0;
        u = SymmetricMatrix(u.mat() / 2.0);
      } else if (dual > 10.0 * primal && rho > 1e-10) {
        rho /= 2.0;
        u = SymmetricMatrix(u.mat() * 2.0);
      }
    }
    if (primal <= eps_pri && dual <= eps_dual) {
      if (final_state) {
        *final_state = AdmmState{theta, z, u, k, primal, dual};
      }
      PrecisionEstimate est{z};
      est.lambda = cfg.lambda;
      est.iterations = k;
      est.dense_theta = theta;
      est.primal_residual = primal;
      est.dual_residual = dual;
      return est;
    }
  }
  throw MaxIterExceededError(
      "ADMM did not converge in " + std::to_string(cfg.max_iter) + " iterations",
      AdmmState{theta, z, u, cfg.max_iter, primal, dual});
}

// DP-AGL: perturb S once, then run the ADMM iteration on the released matrix.
inline PrecisionEstimate dp_agl(const DataMatrix& x, const PrivacyBudget& budget,
                                const AdmmConfig& cfg, std::uint64_t seed) {
  require_normalized(x);
  const SymmetricMatrix s = sample_covariance(x);
  const PerturbedCovariance perturbed = perturb_covariance(s, budget, x.n(), seed);
  PrecisionEstimate est = solve_glasso(perturbed.matrix, cfg);
  est.is_private = true;
  est.budget = budget;
  est.seed = seed;
  return est;
}

}  // namespace dpprec

#endif  // DPPREC_GLASSO_ADMM_HPP_
