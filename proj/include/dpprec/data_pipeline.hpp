#ifndef DPPREC_DATA_PIPELINE_HPP_
#define DPPREC_DATA_PIPELINE_HPP_

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dpprec/errors.hpp"
#include "dpprec/matrix_core.hpp"
#include "dpprec/seeding.hpp"

namespace dpprec {

// p x n matrix of column observations.
struct DataMatrix {
  Eigen::MatrixXd columns;  // p rows, n columns
  bool normalized = false;

  int p() const { return static_cast<int>(columns.rows()); }
  long n() const { return columns.cols(); }
};

inline SymmetricMatrix sample_covariance(const DataMatrix& x) {
  if (x.n() < 1) {
    throw DimensionMismatchError("need at least one observation");
  }
  Eigen::MatrixXd s = x.columns * x.columns.transpose() / static_cast<double>(x.n());
  return SymmetricMatrix::symmetrize(s);
}

// Divide every entry by the largest column l2 norm, so max_i ||x_i|| == 1.
inline DataMatrix normalize_max_l2(const DataMatrix& x) {
  const double max_norm = x.columns.colwise().norm().maxCoeff();
  if (!(max_norm > 0.0)) {
    throw AllZeroDataError("every column is zero");
  }
  return DataMatrix{x.columns / max_norm, true};
}

inline void require_normalized(const DataMatrix& x) {
  const double max_norm = x.columns.colwise().norm().maxCoeff();
  if (max_norm > 1.0 + 1e-12) {
    throw UnnormalizedDataError("column l2 norms must not exceed 1");
  }
}

struct SyntheticModel {
  std::string name;
  SymmetricMatrix theta_star;
  SymmetricMatrix sigma_star;
  std::optional<std::uint64_t> gen_seed;
};

namespace detail {

inline SymmetricMatrix spectral_inverse(const SymmetricMatrix& a) {
  const EigenDecomposition d = sym_eigen(a);
  if (d.eigenvalues.minCoeff() <= 1e-10) {
    throw NotPositiveDefiniteError("matrix is not safely positive definite");
  }
  return spectral_compose(d.eigenvectors, d.eigenvalues.cwiseInverse());
}

inline SyntheticModel make_model(std::string name, SymmetricMatrix theta,
                                 std::optional<std::uint64_t> seed) {
  SymmetricMatrix sigma = spectral_inverse(theta);
  return SyntheticModel{std::move(name), std::move(theta), std::move(sigma), seed};
}

}  // namespace detail

// Unstructured dense precision: Theta = W W^T / 10000, W ~ N(0,1) p x 10000.
inline SyntheticModel gen_model1(int p, std::uint64_t seed) {
  constexpr int kWishartSamples = 10000;
  std::mt19937_64 rng = make_rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(p, kWishartSamples);
  for (long j = 0; j < w.cols(); ++j) {
    for (int i = 0; i < p; ++i) {
      w(i, j) = normal(rng);
    }
  }
  SymmetricMatrix theta =
      SymmetricMatrix::symmetrize(w * w.transpose() / double(kWishartSamples));
  return detail::make_model("model1", std::move(theta), seed);
}

// Compound symmetry: unit diagonal, 0.5 everywhere else.
inline SyntheticModel gen_model2(int p) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(p, p, 0.5);
  t.diagonal().setOnes();
  return detail::make_model("model2", SymmetricMatrix(std::move(t)), std::nullopt);
}

// AR(2) bands: unit diagonal, 0.5 on the first off-diagonals, 0.25 on the
// second.
inline SyntheticModel gen_model3(int p) {
  if (p < 3) {
    throw DimensionMismatchError("model3 needs p >= 3");
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(p, p);
  for (int i = 1; i < p; ++i) {
    t(i, i - 1) = t(i - 1, i) = 0.5;
  }
  for (int i = 2; i < p; ++i) {
    t(i, i - 2) = t(i - 2, i) = 0.25;
  }
  return detail::make_model("model3", SymmetricMatrix(std::move(t)), std::nullopt);
}

// Random sparse support with the condition number pinned to p, then
// standardized to unit diagonal. Degenerate all-zero draws are retried with a
// derived sub-seed.
inline SyntheticModel gen_model4(int p, std::uint64_t seed) {
  if (p < 2) {
    throw DegenerateModelError("model4 needs p >= 2");
  }
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 rng = make_rng(derive_seed(seed, attempt));
    std::bernoulli_distribution edge(0.1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    int nonzeros = 0;
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        if (edge(rng)) {
          a(i, j) = a(j, i) = 0.5;
          ++nonzeros;
        }
      }
    }
    if (nonzeros == 0) {
      continue;  // condition-number equation unsolvable; redraw
    }
    const EigenDecomposition d = sym_eigen(SymmetricMatrix(a));
    const double phi_max = d.eigenvalues.maxCoeff();
    const double phi_min = d.eigenvalues.minCoeff();
    const double alpha = (phi_max - p * phi_min) / (p - 1.0);
    Eigen::MatrixXd t0 = a + alpha * Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd dinv_sqrt = t0.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd t = dinv_sqrt.asDiagonal() * t0 * dinv_sqrt.asDiagonal();
    t = (t + t.transpose().eval()) / 2.0;
    t.diagonal().setOnes();
    return detail::make_model("model4", SymmetricMatrix(std::move(t)), seed);
  }
}

inline SyntheticModel gen_model(int which, int p, std::uint64_t seed) {
  switch (which) {
    case 1: return gen_model1(p, seed);
    case 2: return gen_model2(p);
    case 3: return gen_model3(p);
    case 4: return gen_model4(p, seed);
    default: throw DegenerateModelError("model must be one of 1..4");
  }
}

// Columns i.i.d. N(0, Sigma*) via the symmetric square root of Sigma*.
inline DataMatrix sample_gaussian(const SyntheticModel& model, long n,
                                  std::uint64_t seed) {
  const EigenDecomposition d = sym_eigen(model.sigma_star);
  const Eigen::VectorXd sqrt_ev = d.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd root =
      d.eigenvectors * sqrt_ev.asDiagonal() * d.eigenvectors.transpose();
  const int p = model.sigma_star.dim();
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(p, n);
  for (long j = 0; j < n; ++j) {
    for (int i = 0; i < p; ++i) {
      g(i, j) = normal(rng);
    }
  }
  return DataMatrix{root * g, false};
}

// ---------------------------------------------------------------------------
// CSV interchange: rows are variables, columns are observations, 17
// significant digits, no trailing delimiter.

inline Eigen::MatrixXd read_csv_matrix(const std::string& path,
                                       bool header = false) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (header && lineno == 1) {
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    long col = 0;
    while (std::getline(ss, cell, ',')) {
      ++col;
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) {
          ++used;
        }
        if (used != cell.size()) {
          throw std::invalid_argument(cell);
        }
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("bad number at row " + std::to_string(lineno) +
                         ", column " + std::to_string(col) + " in " + path);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionMismatchError("ragged row " + std::to_string(lineno) +
                                   " in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("no data in " + path);
  }
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

inline void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& m,
                             const std::string& header = "") {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot open " + path + " for writing");
  }
  if (!header.empty()) {
    out << header << "\n";
  }
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace dpprec

#endif  // DPPREC_DATA_PIPELINE_HPP_
