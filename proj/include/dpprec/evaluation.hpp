#ifndef DPPREC_EVALUATION_HPP_
#define DPPREC_EVALUATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpprec/data_pipeline.hpp"
#include "dpprec/dp_mechanism.hpp"
#include "dpprec/errors.hpp"
#include "dpprec/estimate.hpp"
#include "dpprec/glasso_admm.hpp"
#include "dpprec/matrix_core.hpp"
#include "dpprec/ridge.hpp"
#include "dpprec/seeding.hpp"

namespace dpprec {

// -log det(Theta) + tr(S Theta), log det via eigenvalues.
inline double negative_log_likelihood(const SymmetricMatrix& theta,
                                      const SymmetricMatrix& s) {
  const EigenDecomposition d = sym_eigen(theta);
  if (d.eigenvalues.minCoeff() <= 0.0) {
    throw NotPositiveDefiniteError("log-likelihood needs a PD precision matrix");
  }
  const double log_det = d.eigenvalues.array().log().sum();
  const double trace = (s.mat() * theta.mat()).trace();
  return -log_det + trace;
}

struct LossTriple {
  double l1_rel = 0.0;
  double frob_rel = 0.0;
  double spectral_rel = 0.0;
};

// ||priv - nonpriv|| / ||nonpriv|| in entrywise-l1, Frobenius and spectral
// norms.
inline LossTriple relative_losses(const PrecisionEstimate& priv,
                                  const PrecisionEstimate& nonpriv) {
  if (priv.matrix.dim() != nonpriv.matrix.dim()) {
    throw DimensionMismatchError("estimates have different dimensions");
  }
  const SymmetricMatrix diff(priv.matrix.mat() - nonpriv.matrix.mat());
  const double l1_ref = entrywise_l1_norm(nonpriv.matrix);
  if (l1_ref == 0.0) {
    throw ZeroDenominatorError("reference estimate is the zero matrix");
  }
  return LossTriple{entrywise_l1_norm(diff) / l1_ref,
                    frobenius_norm(diff) / frobenius_norm(nonpriv.matrix),
                    spectral_norm(diff) / spectral_norm(nonpriv.matrix)};
}

// Off-diagonal support; both symmetric halves are stored, so the cardinality
// counts ordered pairs.
struct SupportSet {
  std::set<std::pair<int, int>> pairs;

  std::size_t size() const { return pairs.size(); }
};

inline SupportSet support_of(const SymmetricMatrix& theta,
                             double zero_tol = 0.0) {
  SupportSet s;
  const int p = theta.dim();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (std::abs(theta(i, j)) > zero_tol) {
        s.pairs.insert({i, j});
        s.pairs.insert({j, i});
      }
    }
  }
  return s;
}

// TPR/FPR; both symmetric halves are counted consistently, so the ratios
// equal the unordered-pair ones.
inline std::pair<double, double> tpr_fpr(const SupportSet& est,
                                         const SupportSet& truth, int p) {
  if (truth.pairs.empty()) {
    throw EmptyTruthError("true support is empty");
  }
  long tp = 0, fp = 0;
  for (const auto& pair : est.pairs) {
    if (truth.pairs.count(pair)) {
      ++tp;
    } else {
      ++fp;
    }
  }
  const double negatives =
      static_cast<double>(p) * (p - 1) - static_cast<double>(truth.pairs.size());
  const double tpr = static_cast<double>(tp) / truth.pairs.size();
  const double fpr = negatives > 0.0 ? fp / negatives : 0.0;
  return {tpr, fpr};
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double lambda = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by fpr, monotone tpr envelope
  double auc = 0.0;
  int warning_count = 0;
};

namespace detail {

inline RocCurve finalize_roc(std::vector<RocPoint> pts, int warnings) {
  std::stable_sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr;
  });
  pts.insert(pts.begin(), RocPoint{0.0, 0.0, 0.0});
  pts.push_back(RocPoint{1.0, 1.0, 0.0});
  double running = 0.0;
  for (RocPoint& pt : pts) {
    running = std::max(running, pt.tpr);
    pt.tpr = running;
  }
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auc += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  }
  return RocCurve{std::move(pts), auc, warnings};
}

}  // namespace detail

struct RocOptions {
  std::vector<double> lambda_grid;  // descending
  AdmmConfig admm;                  // lambda field ignored per grid point
  std::optional<PrivacyBudget> budget;  // absent: non-private sweep
  int replicates = 1;
  std::uint64_t master_seed = 0;
  double zero_tol = 0.0;
};

// Sweep the l1 path on S (or a freshly perturbed S~ per replicate), average
// TPR/FPR per grid point vertically across replicates, and integrate.
inline RocCurve roc_sweep(const SymmetricMatrix& s, long n,
                          const SupportSet& truth, const RocOptions& opt) {
  if (opt.lambda_grid.empty()) {
    throw DimensionMismatchError("lambda grid must be nonempty");
  }
  const int p = s.dim();
  const std::size_t m = opt.lambda_grid.size();
  std::vector<double> tpr_sum(m, 0.0), fpr_sum(m, 0.0);
  std::vector<long> counts(m, 0);
  int warnings = 0;

  for (int rep = 0; rep < opt.replicates; ++rep) {
    SymmetricMatrix working = s;
    if (opt.budget) {
      working = perturb_covariance(s, *opt.budget, n,
                                   derive_seed(opt.master_seed, rep))
                    .matrix;
    }
    std::optional<AdmmState> warm;
    for (std::size_t g = 0; g < m; ++g) {
      AdmmConfig cfg = opt.admm;
      cfg.lambda = opt.lambda_grid[g];
      try {
        AdmmState state{SymmetricMatrix::zero(p), SymmetricMatrix::zero(p),
                        SymmetricMatrix::zero(p)};
        PrecisionEstimate est = solve_glasso(working, cfg, warm, &state);
        warm = state;
        const auto [tpr, fpr] = tpr_fpr(support_of(est.matrix, opt.zero_tol), truth, p);
        tpr_sum[g] += tpr;
        fpr_sum[g] += fpr;
        ++counts[g];
      } catch (const Error&) {
        // grid point skipped; keep the last successful state as warm start
        ++warnings;
      }
    }
  }

  std::vector<RocPoint> pts;
  for (std::size_t g = 0; g < m; ++g) {
    if (counts[g] > 0) {
      pts.push_back(RocPoint{fpr_sum[g] / counts[g], tpr_sum[g] / counts[g],
                             opt.lambda_grid[g]});
    }
  }
  return detail::finalize_roc(std::move(pts), warnings);
}

enum class EstimatorKind { ridge, glasso };

struct CvResult {
  std::vector<double> grid;             // descending, deduplicated
  std::vector<double> mean_heldout_nll;
  double best_lambda = 0.0;
  std::vector<std::string> notes;
};

// Five-fold CV: seeded column shuffle, k contiguous blocks, fit on the
// training folds' covariance, score held-out negative log-likelihood. Ties go
// to the larger lambda. When a budget is given the per-fold training
// covariance is perturbed before fitting (fresh noise per fold), so the
// selected lambda reflects what the private estimator actually sees.
inline CvResult cross_validate(const DataMatrix& x, EstimatorKind kind,
                               std::vector<double> grid,
                               const AdmmConfig& admm_base, int k,
                               std::uint64_t seed,
                               std::optional<PrivacyBudget> budget = {}) {
  if (grid.empty()) {
    throw DimensionMismatchError("CV grid must be nonempty");
  }
  const long n = x.n();
  if (n < k) {
    throw DimensionMismatchError("need at least k observations for k folds");
  }
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng = make_rng(derive_seed(seed, 0x5f0ed));
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t m = grid.size();
  std::vector<double> nll_sum(m, 0.0);
  std::vector<bool> failed(m, false);
  CvResult result;
  result.grid = grid;

  for (int fold = 0; fold < k; ++fold) {
    const long lo = fold * n / k;
    const long hi = (fold + 1) * n / k;
    Eigen::MatrixXd train(x.p(), n - (hi - lo));
    Eigen::MatrixXd test(x.p(), hi - lo);
    long ti = 0, vi = 0;
    for (long idx = 0; idx < n; ++idx) {
      if (idx >= lo && idx < hi) {
        test.col(vi++) = x.columns.col(order[idx]);
      } else {
        train.col(ti++) = x.columns.col(order[idx]);
      }
    }
    const long train_n = train.cols();
    SymmetricMatrix s_train =
        sample_covariance(DataMatrix{std::move(train), x.normalized});
    const SymmetricMatrix s_test =
        sample_covariance(DataMatrix{std::move(test), x.normalized});
    if (budget) {
      s_train = perturb_covariance(s_train, *budget, train_n,
                                   derive_seed(seed, 0xf01d0 + fold))
                    .matrix;
    }

    std::optional<AdmmState> warm;
    for (std::size_t g = 0; g < m; ++g) {
      if (failed[g]) continue;
      try {
        if (kind == EstimatorKind::ridge) {
          const PrecisionEstimate est =
              ridge_precision(s_train, RidgeConfig{grid[g]});
          nll_sum[g] += negative_log_likelihood(est.matrix, s_test);
        } else {
          AdmmConfig cfg = admm_base;
          cfg.lambda = grid[g];
          AdmmState state{SymmetricMatrix::zero(x.p()),
                          SymmetricMatrix::zero(x.p()),
                          SymmetricMatrix::zero(x.p())};
          const PrecisionEstimate est = solve_glasso(s_train, cfg, warm, &state);
          warm = state;
          nll_sum[g] += negative_log_likelihood(*est.dense_theta, s_test);
        }
      } catch (const Error& e) {
        failed[g] = true;
        result.notes.push_back("lambda " + std::to_string(grid[g]) +
                               " excluded: " + e.what());
      }
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::optional<double> best_lambda;
  result.mean_heldout_nll.assign(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t g = 0; g < m; ++g) {
    if (failed[g]) continue;
    result.mean_heldout_nll[g] = nll_sum[g] / k;
    // grid is descending, so a strict < keeps the largest tied lambda
    if (result.mean_heldout_nll[g] < best) {
      best = result.mean_heldout_nll[g];
      best_lambda = grid[g];
    }
  }
  if (!best_lambda) {
    throw ConvergenceFailureError("every CV grid point failed");
  }
  result.best_lambda = *best_lambda;
  return result;
}

// ---------------------------------------------------------------------------
// Plug-in LDA for two classes labeled +1 / -1.

struct LdaModel {
  Eigen::VectorXd mean_pos;
  Eigen::VectorXd mean_neg;
  double prior_pos = 0.5;
  double prior_neg = 0.5;
};

inline LdaModel lda_train(const Eigen::MatrixXd& features,  // d x n
                          const std::vector<int>& labels) {
  if (static_cast<long>(labels.size()) != features.cols()) {
    throw LengthMismatchError("one label per observation required");
  }
  Eigen::VectorXd sum_pos = Eigen::VectorXd::Zero(features.rows());
  Eigen::VectorXd sum_neg = Eigen::VectorXd::Zero(features.rows());
  long n_pos = 0, n_neg = 0;
  for (long j = 0; j < features.cols(); ++j) {
    if (labels[j] > 0) {
      sum_pos += features.col(j);
      ++n_pos;
    } else {
      sum_neg += features.col(j);
      ++n_neg;
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw SingleClassDataError("both classes must appear in training data");
  }
  const double n_total = static_cast<double>(n_pos + n_neg);
  return LdaModel{sum_pos / n_pos, sum_neg / n_neg, n_pos / n_total,
                  n_neg / n_total};
}

// argmax_k x^T Theta mu_k - mu_k^T Theta mu_k / 2 + log pi_k; ties go to +1.
inline int lda_classify(const Eigen::VectorXd& x, const LdaModel& model,
                        const SymmetricMatrix& theta) {
  const Eigen::VectorXd tp = theta.mat() * model.mean_pos;
  const Eigen::VectorXd tn = theta.mat() * model.mean_neg;
  const double score_pos =
      x.dot(tp) - 0.5 * model.mean_pos.dot(tp) + std::log(model.prior_pos);
  const double score_neg =
      x.dot(tn) - 0.5 * model.mean_neg.dot(tn) + std::log(model.prior_neg);
  return score_pos >= score_neg ? 1 : -1;
}

inline double misclassification_error(const std::vector<int>& predictions,
                                      const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw LengthMismatchError("prediction/label lengths differ");
  }
  if (predictions.empty()) {
    throw LengthMismatchError("no predictions");
  }
  long wrong = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    wrong += predictions[i] != labels[i];
  }
  return static_cast<double>(wrong) / predictions.size();
}

struct Aggregate {
  double mean = 0.0;
  std::optional<double> std_error;  // sample sd / sqrt(R); absent when R < 2
};

inline Aggregate aggregate_replicates(const std::vector<double>& values) {
  if (values.empty()) {
    throw LengthMismatchError("no replicates to aggregate");
  }
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (values.size() < 2) {
    return Aggregate{mean, std::nullopt};
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(ss / (values.size() - 1));
  return Aggregate{mean, sd / std::sqrt(static_cast<double>(values.size()))};
}

}  // namespace dpprec

#endif  // DPPREC_EVALUATION_HPP_
