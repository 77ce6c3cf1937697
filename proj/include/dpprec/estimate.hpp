#ifndef DPPREC_ESTIMATE_HPP_
#define DPPREC_ESTIMATE_HPP_

#include <cstdint>
#include <optional>

#include "dpprec/dp_mechanism.hpp"
#include "dpprec/matrix_core.hpp"

namespace dpprec {

// Precision-matrix estimate plus the metadata needed to reproduce it.
// For the ADMM solver `matrix` is the sparse split iterate and `dense_theta`
// keeps the positive-definite primal iterate for likelihood evaluation.
struct PrecisionEstimate {
  SymmetricMatrix matrix;
  double lambda = 0.0;
  bool is_private = false;
  std::optional<PrivacyBudget> budget;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<SymmetricMatrix> dense_theta;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

}  // namespace dpprec

#endif  // DPPREC_ESTIMATE_HPP_
