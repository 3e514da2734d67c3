#pragma once

#include <gtest/gtest.h>

#include "entwit/linalg.hpp"

namespace entwit::testing {

inline ::testing::AssertionResult MatrixNear(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
                                         << b.cols();
  }
  const double err = (a - b).norm();
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "Frobenius distance " << err << " exceeds " << tol;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

inline ComplexMatrix random_symmetric(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_ginibre(n, n, rng);
  return g + g.transpose();
}

}  // namespace entwit::testing
