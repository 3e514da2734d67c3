#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "entwit/linalg.hpp"

namespace entwit {

namespace tol {
inline constexpr double kState = 1e-10;
}  // namespace tol

/// Normalized state vector on a composite system.
class PureState {
 public:
  /// Takes ownership of an already normalized amplitude vector; validates it.
  PureState(DimSpec dims, ComplexVector amplitudes) : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amps_.size()) != dims_.total()) {
      throw ValidationError("PureState: expected " + std::to_string(dims_.total()) +
                            " amplitudes, got " + std::to_string(amps_.size()));
    }
    if (!amps_.allFinite()) throw ValidationError("PureState: non-finite amplitude");
    if (std::abs(amps_.norm() - 1.0) > tol::kState) {
      throw ValidationError("PureState: amplitudes are not normalized");
    }
  }

  const DimSpec& dims() const noexcept { return dims_; }
  const ComplexVector& amplitudes() const noexcept { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  /// |psi><psi| as a plain matrix.
  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  DimSpec dims_;
  ComplexVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix on a composite system.
class DensityMatrix {
 public:
  DensityMatrix(DimSpec dims, ComplexMatrix matrix) : dims_(std::move(dims)), mat_(std::move(matrix)) {
    require_finite(mat_, "DensityMatrix");
    detail::require_state_shape(mat_, dims_, "DensityMatrix");
    if (hermitian_defect(mat_) > tol::kState) throw NotADensityMatrix("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace() - Complex(1.0)) > tol::kState) {
      throw NotADensityMatrix("DensityMatrix: trace is not 1");
    }
    const auto eig = hermitian_eig(mat_);
    if (eig.values.back() < -tol::kState) {
      throw NotADensityMatrix("DensityMatrix: negative eigenvalue " + std::to_string(eig.values.back()));
    }
  }

  const DimSpec& dims() const noexcept { return dims_; }
  const ComplexMatrix& matrix() const noexcept { return mat_; }

  double purity() const { return (mat_ * mat_).trace().real(); }

 private:
  DimSpec dims_;
  ComplexMatrix mat_;
};

/// Normalizes `coeffs` into a state; errors on length mismatch or zero vector.
inline PureState pure_from_coeffs(const DimSpec& dims, const ComplexVector& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != dims.total()) {
    throw ValidationError("pure_from_coeffs: expected " + std::to_string(dims.total()) +
                          " coefficients, got " + std::to_string(coeffs.size()));
  }
  if (!coeffs.allFinite()) throw ValidationError("pure_from_coeffs: non-finite coefficient");
  const double norm = coeffs.norm();
  if (norm == 0.0) throw ValidationError("pure_from_coeffs: zero vector");
  return PureState(dims, coeffs / norm);
}

inline PureState pure_from_coeffs(const DimSpec& dims, std::initializer_list<Complex> coeffs) {
  ComplexVector v(static_cast<Eigen::Index>(coeffs.size()));
  Eigen::Index i = 0;
  for (auto c : coeffs) v(i++) = c;
  return pure_from_coeffs(dims, v);
}

inline DensityMatrix density_from_pure(const PureState& psi) {
  return DensityMatrix(psi.dims(), psi.projector());
}

/// Composite-index of a computational basis state given its digits.
inline std::size_t basis_index(const DimSpec& dims, const std::vector<std::size_t>& digits) {
  if (digits.size() != dims.parties()) throw ValidationError("basis_index: wrong digit count");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] >= dims[k]) throw ValidationError("basis_index: digit out of range");
    idx = idx * dims[k] + digits[k];
  }
  return idx;
}

inline PureState basis_state(const DimSpec& dims, const std::vector<std::size_t>& digits) {
  ComplexVector v = ComplexVector::Zero(dims.total());
  v(basis_index(dims, digits)) = 1.0;
  return PureState(dims, v);
}

/// (1/sqrt d) sum_i |i i ... i> on n subsystems of dimension d.
inline PureState ghz(std::size_t n, std::size_t d) {
  if (n < 2 || d < 2) throw ValidationError("ghz: need n >= 2 and d >= 2");
  DimSpec dims(std::vector<std::size_t>(n, d));
  ComplexVector v = ComplexVector::Zero(dims.total());
  for (std::size_t i = 0; i < d; ++i) v(basis_index(dims, std::vector<std::size_t>(n, i))) = 1.0;
  return PureState(dims, v / std::sqrt(static_cast<double>(d)));
}

/// Equal superposition of the n weight-one qubit basis states.
inline PureState w_state(std::size_t n) {
  if (n < 2) throw ValidationError("w_state: need n >= 2");
  DimSpec dims(std::vector<std::size_t>(n, 2));
  ComplexVector v = ComplexVector::Zero(dims.total());
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> digits(n, 0);
    digits[k] = 1;
    v(basis_index(dims, digits)) = 1.0;
  }
  return PureState(dims, v / std::sqrt(static_cast<double>(n)));
}

inline PureState bell_phi_plus() { return ghz(2, 2); }

/// Tensor product of single-subsystem (normalized) vectors.
inline PureState product_state(const std::vector<ComplexVector>& factors) {
  if (factors.empty()) throw ValidationError("product_state: no factors");
  std::vector<std::size_t> dims;
  ComplexVector v = ComplexVector::Ones(1);
  for (const auto& f : factors) {
    dims.push_back(static_cast<std::size_t>(f.size()));
    v = kron_vec(v, f.normalized());
  }
  return PureState(DimSpec(dims), v);
}

/// p |Psi-><Psi-| + (1 - p) I/4 with |Psi-> = (|01> - |10>)/sqrt 2.
inline DensityMatrix werner_2qubit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("werner_2qubit: p outside [0, 1]");
  ComplexVector singlet = ComplexVector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  ComplexMatrix rho = p * singlet * singlet.adjoint() + (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
  return DensityMatrix(DimSpec{2, 2}, rho);
}

/// p |Phi_d><Phi_d| + (1 - p) I/d^2 on d x d, with |Phi_d> the maximally
/// entangled state. Entangled exactly when p > 1/(d + 1).
inline DensityMatrix isotropic(std::size_t d, double p) {
  if (d < 2) throw ValidationError("isotropic: need d >= 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("isotropic: p outside [0, 1]");
  const auto phi = ghz(2, d).amplitudes();
  const auto n = static_cast<Eigen::Index>(d * d);
  ComplexMatrix rho = p * phi * phi.adjoint() +
                      (1.0 - p) * ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(DimSpec{d, d}, rho);
}

/// p |psi><psi| + (1 - p) I/D.
inline DensityMatrix noisy_pure(const PureState& psi, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("noisy_pure: p outside [0, 1]");
  const auto n = static_cast<Eigen::Index>(psi.dims().total());
  ComplexMatrix rho =
      p * psi.projector() + (1.0 - p) * ComplexMatrix::Identity(n, n) / static_cast<double>(n);
  return DensityMatrix(psi.dims(), rho);
}

// ---------------------------------------------------------------------------
// Random states

inline PureState random_pure(const DimSpec& dims, Rng& rng) {
  return pure_from_coeffs(dims, ComplexVector(random_ginibre(dims.total(), 1, rng)));
}

/// Random product pure state with Haar-random factors.
inline PureState random_product_pure(const DimSpec& dims, Rng& rng) {
  std::vector<ComplexVector> factors;
  for (auto d : dims.dims()) factors.emplace_back(ComplexVector(random_ginibre(d, 1, rng)));
  return product_state(factors);
}

/// G G^dagger / tr(G G^dagger) with G a D x rank Ginibre matrix.
inline DensityMatrix random_mixed(const DimSpec& dims, std::size_t rank, Rng& rng) {
  if (rank < 1) throw ValidationError("random_mixed: rank must be >= 1");
  const ComplexMatrix g = random_ginibre(dims.total(), rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(dims, rho);
}

/// Dirichlet(1, ..., 1) weights: normalized unit exponentials.
inline std::vector<double> random_simplex_weights(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = expo(rng));
  for (auto& x : w) x /= sum;
  return w;
}

/// sum_t P_t |a_t><a_t| (x) |b_t><b_t| (x) ... with random product pure
/// terms and simplex-uniform weights P.
inline DensityMatrix random_separable_mixture(const DimSpec& dims, std::size_t terms, Rng& rng) {
  if (terms < 1) throw ValidationError("random_separable_mixture: terms must be >= 1");
  const auto weights = random_simplex_weights(terms, rng);
  const auto n = static_cast<Eigen::Index>(dims.total());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto psi = random_product_pure(dims, rng);
    rho += weights[t] * psi.projector();
  }
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();
  return DensityMatrix(dims, rho);
}

/// Tensor product of independent random single-subsystem mixed states.
inline DensityMatrix random_product_mixed(const DimSpec& dims, Rng& rng) {
  ComplexMatrix rho = ComplexMatrix::Ones(1, 1);
  for (auto d : dims.dims()) rho = kron(rho, random_mixed(DimSpec{d}, d, rng).matrix());
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(dims, rho);
}

// ---------------------------------------------------------------------------
// Local unitaries

inline ComplexMatrix local_unitary(const DimSpec& dims, const std::vector<ComplexMatrix>& unitaries) {
  if (unitaries.size() != dims.parties()) {
    throw ValidationError("apply_local_unitary: need one unitary per subsystem");
  }
  for (std::size_t k = 0; k < unitaries.size(); ++k) {
    const auto& u = unitaries[k];
    if (u.rows() != u.cols() || static_cast<std::size_t>(u.rows()) != dims[k]) {
      throw ValidationError("apply_local_unitary: unitary " + std::to_string(k + 1) +
                            " does not match subsystem dimension");
    }
    const auto n = u.rows();
    if ((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() > 1e-10 * std::sqrt(double(n))) {
      throw ValidationError("apply_local_unitary: matrix " + std::to_string(k + 1) + " is not unitary");
    }
  }
  return kron_all(unitaries);
}

inline PureState apply_local_unitary(const PureState& psi, const std::vector<ComplexMatrix>& unitaries) {
  const ComplexVector v = local_unitary(psi.dims(), unitaries) * psi.amplitudes();
  return PureState(psi.dims(), v.normalized());
}

inline DensityMatrix apply_local_unitary(const DensityMatrix& rho,
                                         const std::vector<ComplexMatrix>& unitaries) {
  const ComplexMatrix u = local_unitary(rho.dims(), unitaries);
  ComplexMatrix out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(rho.dims(), out);
}

/// One Haar unitary per subsystem.
inline std::vector<ComplexMatrix> random_local_unitaries(const DimSpec& dims, Rng& rng) {
  std::vector<ComplexMatrix> out;
  for (auto d : dims.dims()) out.push_back(random_unitary(static_cast<Eigen::Index>(d), rng));
  return out;
}

}  // namespace entwit
