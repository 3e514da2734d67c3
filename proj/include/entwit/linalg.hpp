#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entwit/errors.hpp"

namespace entwit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline constexpr Complex kI{0.0, 1.0};

/// Largest Hilbert-space dimension (matrix side) any construction may produce.
inline constexpr std::size_t kDefaultDimensionCap = 4096;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kSymmetric = 1e-10;
inline constexpr double kPsdClamp = 1e-10;
}  // namespace tol

/// Ordered subsystem dimensions D_1 ... D_N of a composite system.
/// Basis ordering is row-major: the leftmost subsystem is the most significant
/// digit of the composite index.
class DimSpec {
 public:
  DimSpec() = default;

  explicit DimSpec(std::vector<std::size_t> dims, std::size_t cap = kDefaultDimensionCap)
      : dims_(std::move(dims)) {
    if (dims_.empty()) throw ValidationError("DimSpec: empty dimension list");
    total_ = 1;
    for (auto d : dims_) {
      if (d < 1) throw ValidationError("DimSpec: subsystem dimension must be >= 1");
      if (total_ > cap / d) {
        throw SizeLimitError("DimSpec: total dimension exceeds cap of " + std::to_string(cap));
      }
      total_ *= d;
    }
  }

  DimSpec(std::initializer_list<std::size_t> dims) : DimSpec(std::vector<std::size_t>(dims)) {}

  std::size_t parties() const noexcept { return dims_.size(); }
  std::size_t total() const noexcept { return total_; }
  std::size_t operator[](std::size_t k) const { return dims_.at(k); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }

  /// Product of the dimensions to the right of subsystem k.
  std::size_t stride(std::size_t k) const {
    std::size_t s = 1;
    for (std::size_t m = k + 1; m < dims_.size(); ++m) s *= dims_[m];
    return s;
  }

  /// Requirements shared by every witness construction.
  void require_witness_ready() const {
    if (parties() < 2) throw ValidationError("witnesses need at least two subsystems");
    for (auto d : dims_) {
      if (d < 2) throw ValidationError("witnesses need every subsystem dimension >= 2");
    }
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (k) out += "x";
      out += std::to_string(dims_[k]);
    }
    return out;
  }

  friend bool operator==(const DimSpec& a, const DimSpec& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 0;
};

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

inline void require_finite(const ComplexMatrix& m, const char* what) {
  if (m.size() == 0) throw ValidationError(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ValidationError(std::string(what) + ": matrix is not square");
}

inline double hermitian_defect(const ComplexMatrix& h) { return (h - h.adjoint()).norm(); }
inline double symmetric_defect(const ComplexMatrix& s) { return (s - s.transpose()).norm(); }

inline bool is_hermitian(const ComplexMatrix& h, double tolerance = tol::kHermitian) {
  return h.rows() == h.cols() && hermitian_defect(h) <= tolerance * std::max(1.0, h.norm());
}

inline bool is_symmetric(const ComplexMatrix& s, double tolerance = tol::kSymmetric) {
  return s.rows() == s.cols() && symmetric_defect(s) <= tolerance * std::max(1.0, s.norm());
}

// ---------------------------------------------------------------------------
// Tensor structure

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          std::size_t cap = kDefaultDimensionCap) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > cap || cols > cap) {
    throw SizeLimitError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " exceeds dimension cap " + std::to_string(cap));
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Kronecker product of a list, left to right.
inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors,
                              std::size_t cap = kDefaultDimensionCap) {
  if (factors.empty()) throw ValidationError("kron_all: no factors");
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k], cap);
  return out;
}

inline ComplexVector kron_vec(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace detail {

inline void require_state_shape(const ComplexMatrix& rho, const DimSpec& dims, const char* what) {
  require_square(rho, what);
  if (static_cast<std::size_t>(rho.rows()) != dims.total()) {
    throw ValidationError(std::string(what) + ": matrix side " + std::to_string(rho.rows()) +
                          " does not match dims " + dims.to_string());
  }
}

}  // namespace detail

/// Reduced matrix over the subsystems listed in `keep` (0-based, any order;
/// the result follows ascending subsystem order).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const DimSpec& dims,
                                   std::vector<std::size_t> keep) {
  detail::require_state_shape(rho, dims, "partial_trace");
  if (keep.empty()) throw ValidationError("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.back() >= dims.parties()) throw ValidationError("partial_trace: subsystem out of range");

  const std::size_t n = dims.total();
  std::vector<bool> kept(dims.parties(), false);
  for (auto k : keep) kept[k] = true;

  // Split each composite index into its kept part and its traced part.
  std::vector<std::size_t> kept_index(n), traced_index(n);
  std::size_t kept_total = 1;
  for (auto k : keep) kept_total *= dims[k];
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i, ki = 0, ti = 0, kmul = 1, tmul = 1;
    for (std::size_t m = dims.parties(); m-- > 0;) {
      const std::size_t digit = rem % dims[m];
      rem /= dims[m];
      if (kept[m]) {
        ki += digit * kmul;
        kmul *= dims[m];
      } else {
        ti += digit * tmul;
        tmul *= dims[m];
      }
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }

  ComplexMatrix out = ComplexMatrix::Zero(kept_total, kept_total);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += rho(i, j);
    }
  }
  return out;
}

/// Transpose on the indices of one tensor factor (0-based subsystem).
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, const DimSpec& dims,
                                       std::size_t subsystem) {
  detail::require_state_shape(rho, dims, "partial_transpose");
  if (subsystem >= dims.parties()) {
    throw ValidationError("partial_transpose: subsystem out of range");
  }
  const std::size_t n = dims.total();
  const std::size_t stride = dims.stride(subsystem);
  const std::size_t d = dims[subsystem];
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t di = (i / stride) % d;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dj = (j / stride) % d;
      const std::size_t ni = i - di * stride + dj * stride;
      const std::size_t nj = j - dj * stride + di * stride;
      out(ni, nj) = rho(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral kernels

struct HermitianEig {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // columns match `values`
};

inline HermitianEig hermitian_eig(const ComplexMatrix& h, double tolerance = tol::kHermitian) {
  require_finite(h, "hermitian_eig");
  if (!is_hermitian(h, tolerance)) throw ValidationError("hermitian_eig: matrix is not Hermitian");
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eig: solver failed");
  const auto n = sym.rows();
  HermitianEig out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& rho, double clamp = tol::kPsdClamp) {
  const auto eig = hermitian_eig(rho);
  Eigen::VectorXd roots(eig.values.size());
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    const double v = eig.values[k];
    if (v < -clamp) {
      throw NotADensityMatrix("matrix_sqrt_psd: eigenvalue " + std::to_string(v) +
                              " below -" + std::to_string(clamp));
    }
    roots(k) = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

inline std::vector<double> singular_values(const ComplexMatrix& m) {
  require_finite(m, "singular_values");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

struct Takagi {
  std::vector<double> values;  // descending, >= 0
  ComplexMatrix vectors;       // unitary V with s = V diag(values) V^T
};

/// Takagi factorization of a complex symmetric matrix.
///
/// Uses the real symmetric embedding [[Re s, Im s], [Im s, -Re s]], whose
/// spectrum is {+-sigma_i}. An eigenvector [x; y] for +sigma gives a Takagi
/// vector x + iy. Numerically null directions are completed from the unitary
/// complement of the range, which stays valid under degeneracy.
inline Takagi takagi_decompose(const ComplexMatrix& s, double tolerance = tol::kSymmetric) {
  require_finite(s, "takagi_decompose");
  if (!is_symmetric(s, tolerance)) throw ValidationError("takagi_decompose: matrix is not symmetric");
  const Eigen::Index n = s.rows();
  const ComplexMatrix sym = 0.5 * (s + s.transpose());

  RealMatrix embed(2 * n, 2 * n);
  embed.topLeftCorner(n, n) = sym.real();
  embed.topRightCorner(n, n) = sym.imag();
  embed.bottomLeftCorner(n, n) = sym.imag();
  embed.bottomRightCorner(n, n) = -sym.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(embed);
  if (solver.info() != Eigen::Success) throw NumericalError("takagi_decompose: solver failed");

  const double top = std::max(solver.eigenvalues()(2 * n - 1), 0.0);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(top, 1e-300) *
                       static_cast<double>(n);

  Takagi out;
  out.values.resize(n);
  out.vectors = ComplexMatrix::Zero(n, n);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sigma = solver.eigenvalues()(2 * n - 1 - k);
    out.values[k] = std::max(sigma, 0.0);
    if (sigma > floor) {
      const auto w = solver.eigenvectors().col(2 * n - 1 - k);
      ComplexVector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(w(i), w(n + i));
      out.vectors.col(rank++) = v.normalized();
    }
  }
  if (rank < n) {
    // Orthonormal completion of the range spanned by the nonzero Takagi vectors.
    ComplexMatrix basis = ComplexMatrix::Identity(n, n);
    if (rank > 0) {
      Eigen::HouseholderQR<ComplexMatrix> qr(out.vectors.leftCols(rank));
      basis = qr.householderQ() * ComplexMatrix::Identity(n, n);
    }
    out.vectors.rightCols(n - rank) = basis.rightCols(n - rank);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random ensembles

/// Independent generator for stream `index` of a master seed. The rule is
/// fixed: seed_seq over the 32-bit halves of (master, index).
inline Rng derive_rng(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
inline ComplexMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw ValidationError("random_ginibre: empty shape");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

/// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) folded in.
inline ComplexMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = random_ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    q.col(k) *= mag > 0.0 ? r(k, k) / mag : Complex(1.0);
  }
  return q;
}

}  // namespace entwit
