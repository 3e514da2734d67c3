#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "entwit/hollow.hpp"
#include "support.hpp"

using namespace entwit;
using entwit::testing::MatrixNear;

namespace {

ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(values.size(), values.size());
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

void expect_unitary(const ComplexMatrix& u) {
  EXPECT_TRUE(MatrixNear(u.adjoint() * u, ComplexMatrix::Identity(u.rows(), u.cols()), 1e-10));
}

ComplexMatrix padded(const ComplexMatrix& s, Eigen::Index m) {
  ComplexMatrix p = ComplexMatrix::Zero(m, m);
  p.topLeftCorner(s.rows(), s.cols()) = s;
  return p;
}

}  // namespace

TEST(ClosingPhases, SumVanishes) {
  for (const std::vector<double>& lengths :
       {std::vector<double>{1, 1}, {1, 1, 1}, {3, 2, 1}, {5, 1, 1, 1, 1, 1}, {0.7, 0.3, 0.2, 0.2}}) {
    const auto theta = closing_phases(lengths);
    Complex sum = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) sum += lengths[i] * std::polar(1.0, 2.0 * theta[i]);
    EXPECT_LT(std::abs(sum), 1e-12);
  }
}

TEST(Hollowize, TwoByTwoIdentity) {
  const ComplexMatrix s = diag({1, 1});
  ComplexMatrix known(2, 2);
  known << 1.0, 1.0, kI, -kI;
  known /= std::sqrt(2.0);
  ComplexMatrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  EXPECT_TRUE(MatrixNear(known.transpose() * s * known, swap, 1e-15));

  const auto cert = hollowizing_unitary(s);
  EXPECT_TRUE(cert.converged);
  EXPECT_TRUE(cert.condition_holds);
  expect_unitary(cert.u);
  EXPECT_LT(cert.max_abs_diagonal, 1e-6);
  EXPECT_LT((cert.u.transpose() * padded(s, cert.u.rows()) * cert.u).diagonal().cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Hollowize, ViolatingMatrixDoesNotConverge) {
  const auto cert = hollowizing_unitary(diag({2, 0.5, 0.5}));
  EXPECT_FALSE(cert.condition_holds);
  EXPECT_FALSE(cert.converged);
  EXPECT_NEAR(cert.condition_margin, 1.0, 1e-12);
  EXPECT_NEAR(cert.diagonal_floor, 1.0 / 3.0, 1e-12);
  EXPECT_GE(cert.max_abs_diagonal, cert.diagonal_floor - 1e-12);
}

TEST(Hollowize, FloorHoldsForAnyUnitary) {
  const ComplexMatrix s = diag({2, 0.5, 0.5});
  Rng rng = derive_rng(1, 0);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix u = random_unitary(3, rng);
    EXPECT_GE((u.transpose() * s * u).diagonal().cwiseAbs().maxCoeff(), 1.0 / 3.0 - 1e-12);
  }
}

TEST(Hollowize, AlreadyHollow) {
  ComplexMatrix s(3, 3);
  s << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  const auto cert = hollowizing_unitary(s);
  EXPECT_TRUE(cert.converged);
  EXPECT_EQ(cert.iterations, 0u);
  EXPECT_EQ(cert.u, ComplexMatrix::Identity(3, 3));
}

TEST(Hollowize, RandomSymmetricSatisfyingCondition) {
  Rng rng = derive_rng(2, 0);
  int tested = 0;
  for (int n = 2; n <= 8 && tested < 30; ++n) {
    for (int t = 0; t < 6; ++t) {
      const ComplexMatrix s = entwit::testing::random_symmetric(n, rng);
      const auto sv = singular_values(s);
      if (sv[0] > std::accumulate(sv.begin() + 1, sv.end(), 0.0)) continue;
      ++tested;
      HollowOptions opt;
      opt.seed = static_cast<std::uint64_t>(t);
      const auto cert = hollowizing_unitary(s, opt);
      EXPECT_TRUE(cert.converged) << "side " << n;
      expect_unitary(cert.u);
      const ComplexMatrix t_mat = cert.u.transpose() * padded(s, cert.u.rows()) * cert.u;
      EXPECT_LT(t_mat.diagonal().cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LE(cert.u.rows(), n + 1);
    }
  }
  EXPECT_GT(tested, 10);
}

TEST(Hollowize, SeparableStateSMatrix) {
  Rng rng = derive_rng(3, 0);
  const auto rho = random_separable_mixture({2, 2}, 3, rng);
  const auto cert = hollowizing_unitary(s_matrix(rho, bipartite_basis_witness({2, 2}, 0, 1, 0, 1)));
  EXPECT_TRUE(cert.condition_holds);
  EXPECT_TRUE(cert.converged);
  EXPECT_LT(cert.max_abs_diagonal, 1e-6);
}

TEST(Hollowize, ExplicitPaddingSize) {
  HollowOptions opt;
  opt.size = 5;
  const auto cert = hollowizing_unitary(diag({1, 1, 1}), opt);
  EXPECT_EQ(cert.u.rows(), 5);
  EXPECT_TRUE(cert.converged);
}

TEST(Hollowize, NoPaddingReportsHonestly) {
  HollowOptions opt;
  opt.allow_padding = false;
  opt.max_iter = 50;
  const auto cert = hollowizing_unitary(diag({3, 2, 1}), opt);
  EXPECT_EQ(cert.u.rows(), 3);
  EXPECT_EQ(cert.converged, cert.max_abs_diagonal < opt.hollow_tol);
  expect_unitary(cert.u);
}

TEST(Hollowize, Validation) {
  ComplexMatrix ns(2, 2);
  ns << 0, 1, 2, 0;
  EXPECT_THROW(hollowizing_unitary(ns), ValidationError);
  ComplexMatrix inf = diag({1, 1});
  inf(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(hollowizing_unitary(inf), ValidationError);
}

TEST(Hollowize, Deterministic) {
  Rng rng = derive_rng(4, 0);
  const ComplexMatrix s = entwit::testing::random_symmetric(5, rng);
  EXPECT_EQ(hollowizing_unitary(s).u, hollowizing_unitary(s).u);
}
