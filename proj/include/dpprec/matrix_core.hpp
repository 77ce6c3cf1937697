#ifndef DPPREC_MATRIX_CORE_HPP_
#define DPPREC_MATRIX_CORE_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "dpprec/errors.hpp"

namespace dpprec {

// Dense symmetric p x p matrix. Entries (i,j) and (j,i) are bit-identical;
// the constructor rejects anything else.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
      throw DimensionMismatchError("symmetric matrix must be square with dim >= 1");
    }
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const double a = m_(i, j), b = m_(j, i);
        if (!(a == b) && !(std::isnan(a) && std::isnan(b))) {
          throw AsymmetricError("entries (i,j) and (j,i) differ exactly");
        }
      }
    }
  }

  // Symmetrize (M + M^T)/2; IEEE addition makes the result exactly symmetric.
  static SymmetricMatrix symmetrize(const Eigen::MatrixXd& m) {
    return SymmetricMatrix(((m + m.transpose()) / 2.0).eval());
  }

  // For matrices round-tripped through text formats: tolerate tiny asymmetry,
  // reject genuinely asymmetric input.
  static SymmetricMatrix from_nearly_symmetric(const Eigen::MatrixXd& m,
                                               double rel_tol = 1e-8) {
    if (m.rows() != m.cols()) {
      throw DimensionMismatchError("matrix is not square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose().eval()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * scale) {
      throw AsymmetricError("asymmetry exceeds tolerance");
    }
    return symmetrize(m);
  }

  static SymmetricMatrix zero(int p) {
    return SymmetricMatrix(Eigen::MatrixXd::Zero(p, p));
  }
  static SymmetricMatrix identity(int p) {
    return SymmetricMatrix(Eigen::MatrixXd::Identity(p, p));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  bool all_finite() const { return m_.allFinite(); }

 private:
  Eigen::MatrixXd m_;
};

// Eigenvalues sorted descending, column i of eigenvectors paired with
// eigenvalue i.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

inline EigenDecomposition sym_eigen(const SymmetricMatrix& a) {
  if (!a.all_finite()) {
    throw NonFiniteError("matrix contains NaN or Inf");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.mat());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailureError("symmetric eigensolver did not converge");
  }
  // Eigen sorts ascending; flip to descending.
  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues().reverse();
  d.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return d;
}

inline double entrywise_l1_norm(const SymmetricMatrix& a) {
  return a.mat().cwiseAbs().sum();
}

inline double frobenius_norm(const SymmetricMatrix& a) { return a.mat().norm(); }

inline double spectral_norm(const SymmetricMatrix& a) {
  const EigenDecomposition d = sym_eigen(a);
  return d.eigenvalues.cwiseAbs().maxCoeff();
}

inline double soft_threshold(double x, double kappa) {
  const double shrunk = std::abs(x) - kappa;
  return shrunk <= 0.0 ? 0.0 : (x < 0.0 ? -shrunk : shrunk);
}

inline bool is_positive_definite(const SymmetricMatrix& a, double floor = 0.0) {
  const EigenDecomposition d = sym_eigen(a);
  return d.eigenvalues.minCoeff() > floor;
}

// Q diag(v) Q^T as an exactly symmetric matrix.
inline SymmetricMatrix spectral_compose(const Eigen::MatrixXd& q,
                                        const Eigen::VectorXd& v) {
  return SymmetricMatrix::symmetrize(q * v.asDiagonal() * q.transpose());
}

}  // namespace dpprec

#endif  // DPPREC_MATRIX_CORE_HPP_
