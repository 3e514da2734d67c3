#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "entwit/linalg.hpp"
#include "entwit/separability.hpp"

namespace entwit {

struct HollowOptions {
  double hollow_tol = 1e-6;
  std::size_t max_iter = 10000;
  /// Side M of the unitary; 0 means the side of S. Larger values pad S with
  /// zero rows and columns.
  std::size_t size = 0;
  /// When the search at size M fails although the singular-value condition
  /// holds, retry once at M + 1. Side-3 matrices often need this: U(3) modulo
  /// column phases has as many parameters as the diagonal has equations.
  bool allow_padding = true;
  std::uint64_t seed = 0;
  Tolerances tol{};
};

/// Unitary u with u^T S u (approximately) hollow, plus the evidence.
struct DecompositionCertificate {
  ComplexMatrix u;  // M x M; S is padded with zeros when M exceeds its side
  double max_abs_diagonal = 0.0;
  /// (lambda_1 - sum_{i>=2} lambda_i) / M, clamped at 0: no unitary can push
  /// the largest diagonal modulus below this.
  double diagonal_floor = 0.0;
  double condition_margin = 0.0;
  bool condition_holds = false;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Angles theta with sum_i lengths_i e^{2 i theta_i} = 0. Requires the
/// largest length not to exceed the sum of the others. The non-maximal
/// lengths are split greedily into two parallel groups whose sums close a
/// triangle with the maximal one.
inline std::vector<double> closing_phases(const std::vector<double>& lengths) {
  const std::size_t n = lengths.size();
  std::vector<double> theta(n, 0.0);
  if (n < 2) return theta;
  const std::size_t top = static_cast<std::size_t>(std::max_element(lengths.begin(), lengths.end()) - lengths.begin());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i)
    if (i != top) order.push_back(i);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lengths[a] > lengths[b]; });

  double sum_a = 0.0, sum_b = 0.0;
  std::vector<bool> in_a(n, false);
  for (auto i : order) {
    if (sum_a <= sum_b) {
      in_a[i] = true;
      sum_a += lengths[i];
    } else {
      sum_b += lengths[i];
    }
  }
  const double big = lengths[top];
  if (big == 0.0) return theta;

  // big + a e^{i phi_a} + b e^{i phi_b} = 0
  double phi_a = std::numbers::pi, phi_b = std::numbers::pi;
  if (sum_b > 0.0) {
    const double cos_b = std::clamp((sum_a * sum_a - big * big - sum_b * sum_b) / (2.0 * big * sum_b), -1.0, 1.0);
    phi_b = std::acos(cos_b);
    phi_a = std::arg(Complex(-big, 0.0) - sum_b * std::polar(1.0, phi_b));
  }
  for (auto i : order) theta[i] = 0.5 * (in_a[i] ? phi_a : phi_b);
  return theta;
}

namespace detail {

inline double max_abs_diag(const ComplexMatrix& t) { return t.diagonal().cwiseAbs().maxCoeff(); }

/// (I - A/2)^{-1} (I + A/2): unitary for skew-Hermitian A.
inline ComplexMatrix cayley(const ComplexMatrix& a) {
  const auto n = a.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return (id - 0.5 * a).partialPivLu().solve(id + 0.5 * a);
}

/// Skew-Hermitian matrix from real parameters: per pair p < q (re, im) then
/// one imaginary diagonal entry per index.
inline ComplexMatrix skew_from_params(const Eigen::VectorXd& x, Eigen::Index n) {
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  Eigen::Index at = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      a(p, q) = Complex(x(at), x(at + 1));
      a(q, p) = Complex(-x(at), x(at + 1));
      at += 2;
    }
  }
  for (Eigen::Index p = 0; p < n; ++p) a(p, p) = Complex(0.0, x(at++));
  return a;
}

/// Real Jacobian of (Re d, Im d), d_j = (u^T S u)_jj, for u -> u (I + A);
/// d d_j = 2 sum_k T_jk A_kj with T = u^T S u.
inline RealMatrix diagonal_jacobian(const ComplexMatrix& t) {
  const Eigen::Index n = t.rows();
  RealMatrix jac = RealMatrix::Zero(2 * n, n * n);
  const auto put = [&](Eigen::Index row, Eigen::Index col, Complex v) {
    jac(2 * row, col) += v.real();
    jac(2 * row + 1, col) += v.imag();
  };
  Eigen::Index at = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      // A_pq = a + ib feeds d_q; A_qp = -a + ib feeds d_p.
      put(q, at, 2.0 * t(q, p));
      put(q, at + 1, 2.0 * kI * t(q, p));
      put(p, at, -2.0 * t(p, q));
      put(p, at + 1, 2.0 * kI * t(p, q));
      at += 2;
    }
  }
  for (Eigen::Index p = 0; p < n; ++p) put(p, at++, 2.0 * kI * t(p, p));
  return jac;
}

inline Eigen::VectorXd stacked_diagonal(const ComplexMatrix& t) {
  Eigen::VectorXd r(2 * t.rows());
  for (Eigen::Index j = 0; j < t.rows(); ++j) {
    r(2 * j) = t(j, j).real();
    r(2 * j + 1) = t(j, j).imag();
  }
  return r;
}

inline ComplexMatrix dft(Eigen::Index n) {
  ComplexMatrix f(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      f(i, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           2.0 * std::numbers::pi * static_cast<double>(i * j) / static_cast<double>(n));
  return f;
}

}  // namespace detail

namespace detail {

inline DecompositionCertificate hollowize_at_size(const ComplexMatrix& s, Eigen::Index m, const HollowOptions& opt) {
  const Eigen::Index side = s.rows();
  if (static_cast<std::size_t>(m) > kDefaultDimensionCap) throw SizeLimitError("hollowizing_unitary: size above cap");

  ComplexMatrix padded = ComplexMatrix::Zero(m, m);
  padded.topLeftCorner(side, side) = 0.5 * (s + s.transpose());

  DecompositionCertificate cert;
  const auto condition = detail::evaluate_condition({}, singular_values(padded), opt.tol);
  cert.condition_margin = condition.margin;
  cert.condition_holds = !condition.violated;
  cert.diagonal_floor = std::max(0.0, condition.margin) / static_cast<double>(m);

  const auto finish = [&](ComplexMatrix u) {
    cert.u = std::move(u);
    cert.max_abs_diagonal = detail::max_abs_diag(cert.u.transpose() * padded * cert.u);
    cert.converged = cert.condition_holds && cert.max_abs_diagonal < opt.hollow_tol;
    return cert;
  };

  if (detail::max_abs_diag(padded) < opt.hollow_tol) return finish(ComplexMatrix::Identity(m, m));

  const auto takagi = takagi_decompose(padded);
  const ComplexMatrix base = takagi.vectors.conjugate();  // base^T S base = diag(lambda)
  if (!cert.condition_holds) return finish(base);

  const auto theta = closing_phases(takagi.values);
  ComplexMatrix phases = ComplexMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) phases(i, i) = std::polar(1.0, theta[i]);
  ComplexMatrix u = base * phases * detail::dft(m);

  Rng rng = derive_rng(opt.seed, 0x686f6c6c6f77ULL);
  ComplexMatrix t = u.transpose() * padded * u;
  Eigen::VectorXd r = detail::stacked_diagonal(t);
  double f = r.squaredNorm();
  double damping = 1e-6 * std::max(1.0, padded.squaredNorm());
  const double scale = std::max(1.0, padded.squaredNorm());

  while (detail::max_abs_diag(t) >= opt.hollow_tol && cert.iterations < opt.max_iter) {
    ++cert.iterations;
    const RealMatrix jac = detail::diagonal_jacobian(t);
    RealMatrix normal = jac * jac.transpose();
    normal.diagonal().array() += damping;
    const Eigen::VectorXd step = -jac.transpose() * normal.ldlt().solve(r);
    const ComplexMatrix trial_u = u * detail::cayley(detail::skew_from_params(step, m));
    const ComplexMatrix trial_t = trial_u.transpose() * padded * trial_u;
    const Eigen::VectorXd trial_r = detail::stacked_diagonal(trial_t);
    if (trial_r.squaredNorm() < f) {
      u = trial_u;
      t = trial_t;
      r = trial_r;
      f = r.squaredNorm();
      damping = std::max(damping * 0.1, 1e-15 * scale);
    } else {
      damping *= 10.0;
      if (damping > 1e8 * scale) {
        // Stalled: kick by a small random unitary and continue from there.
        ComplexMatrix g = random_ginibre(m, m, rng);
        u = u * detail::cayley(0.1 * (g - g.adjoint()));
        t = u.transpose() * padded * u;
        r = detail::stacked_diagonal(t);
        f = r.squaredNorm();
        damping = 1e-6 * scale;
      }
    }
  }
  // Cayley steps are unitary up to rounding; re-orthonormalize before reporting.
  Eigen::HouseholderQR<ComplexMatrix> qr(u);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Complex rkk = qr.matrixQR()(k, k);
    if (std::abs(rkk) > 0.0) q.col(k) *= rkk / std::abs(rkk);
  }
  return finish(q);
}

}  // namespace detail

/// Searches for a unitary u making u^T S u hollow (zero diagonal).
///
/// Stage 1 takes the Takagi form S = V diag(lambda) V^T, rotates each Takagi
/// vector by a phase so that sum lambda_i e^{2 i theta_i} = 0, and spreads
/// them with a DFT so every column starts from that balanced average. Stage 2
/// is damped Gauss-Newton on the unitary group driving the diagonal to zero,
/// with a random kick whenever the damping saturates. Only attempted when the
/// singular-value condition holds; otherwise no hollow form exists.
inline DecompositionCertificate hollowizing_unitary(const ComplexMatrix& s, const HollowOptions& opt = {}) {
  require_finite(s, "hollowizing_unitary");
  if (!is_symmetric(s)) throw ValidationError("hollowizing_unitary: matrix is not symmetric");
  const Eigen::Index m = std::max<Eigen::Index>(s.rows(), static_cast<Eigen::Index>(opt.size));
  auto cert = detail::hollowize_at_size(s, m, opt);
  if (!cert.converged && cert.condition_holds && opt.allow_padding) {
    auto padded = detail::hollowize_at_size(s, m + 1, opt);
    padded.iterations += cert.iterations;
    if (padded.converged) return padded;
  }
  return cert;
}

}  // namespace entwit
