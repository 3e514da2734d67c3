#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entwit/linalg.hpp"
#include "entwit/states.hpp"

namespace entwit {

/// Which bipartition a witness probes: the two-party split of a bipartite
/// system, or subsystem k against all the others merged.
class WitnessStructure {
 public:
  static WitnessStructure bipartite(DimSpec dims) {
    dims.require_witness_ready();
    if (dims.parties() != 2) throw ValidationError("bipartite witness needs exactly two subsystems");
    return WitnessStructure(std::move(dims), std::nullopt);
  }

  /// Cut k | rest, k 0-based.
  static WitnessStructure cut(DimSpec dims, std::size_t k) {
    dims.require_witness_ready();
    if (k >= dims.parties()) {
      throw ValidationError("cut index " + std::to_string(k + 1) + " outside 1.." +
                            std::to_string(dims.parties()));
    }
    return WitnessStructure(std::move(dims), k);
  }

  const DimSpec& dims() const noexcept { return dims_; }
  bool is_bipartite() const noexcept { return !cut_.has_value(); }
  std::optional<std::size_t> cut_index() const noexcept { return cut_; }

  std::string to_string() const {
    return dims_.to_string() + (cut_ ? " cut " + std::to_string(*cut_ + 1) : " bipartite");
  }

  friend bool operator==(const WitnessStructure& a, const WitnessStructure& b) {
    return a.dims_ == b.dims_ && a.cut_ == b.cut_;
  }

 private:
  WitnessStructure(DimSpec dims, std::optional<std::size_t> cut) : dims_(std::move(dims)), cut_(cut) {}

  DimSpec dims_;
  std::optional<std::size_t> cut_;
};

/// Complex symmetric operator O (O^T = O) used as an entanglement witness.
///
/// `coefficients` is set only for operators built by compose_witness and holds
/// the coefficients exactly as supplied; `scale` is the Frobenius norm that
/// was divided out, so matrix() * scale is the raw combination.
struct WitnessOperator {
  WitnessStructure structure;
  ComplexMatrix matrix;
  std::string label;
  std::vector<Complex> coefficients;
  double scale = 1.0;
};

namespace detail {

inline std::string pair_label(std::size_t r, std::size_t c) {
  return std::to_string(r + 1) + "," + std::to_string(c + 1);
}

inline void require_symmetric_witness(const WitnessOperator& op) {
  if (symmetric_defect(op.matrix) > 1e-12 * std::max(1.0, op.matrix.norm())) {
    throw NumericalError("witness '" + op.label + "' is not symmetric");
  }
}

/// Divide out the Frobenius norm and record it.
inline WitnessOperator normalized(WitnessOperator op) {
  const double norm = op.matrix.norm();
  if (!(norm > 0.0)) throw ValidationError("witness '" + op.label + "' is the zero operator");
  op.matrix /= norm;
  op.scale *= norm;
  return op;
}

}  // namespace detail

/// d x d matrix with a single 1 at (r, c), 0-based.
inline ComplexMatrix elementary_sigma(std::size_t d, std::size_t r, std::size_t c) {
  if (d < 1 || r >= d || c >= d) throw ValidationError("elementary_sigma: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

inline ComplexMatrix antisymmetrize(const ComplexMatrix& m) {
  require_square(m, "antisymmetrize");
  return m - m.transpose();
}

/// [s(i,i') - s(i,i')^T] (x) [s(j,j') - s(j,j')^T] with i < i', j < j' (0-based),
/// stored at unit norm with scale 2.
inline WitnessOperator bipartite_basis_witness(const DimSpec& dims, std::size_t i, std::size_t i2,
                                               std::size_t j, std::size_t j2) {
  auto structure = WitnessStructure::bipartite(dims);
  if (!(i < i2 && i2 < dims[0] && j < j2 && j2 < dims[1])) {
    throw ValidationError("bipartite_basis_witness: need i < i' <= D1 and j < j' <= D2");
  }
  const ComplexMatrix a = antisymmetrize(elementary_sigma(dims[0], i, i2));
  const ComplexMatrix b = antisymmetrize(elementary_sigma(dims[1], j, j2));
  return detail::normalized({std::move(structure), kron(a, b),
                            "basis(" + detail::pair_label(i, i2) + ":" + detail::pair_label(j, j2) + ")", {}, 1.0});
}

/// The (D1 choose 2)(D2 choose 2) basis witnesses, lexicographic in (i,i',j,j').
inline std::vector<WitnessOperator> enumerate_bipartite_basis(const DimSpec& dims) {
  WitnessStructure::bipartite(dims);
  std::vector<WitnessOperator> out;
  for (std::size_t i = 0; i < dims[0]; ++i)
    for (std::size_t i2 = i + 1; i2 < dims[0]; ++i2)
      for (std::size_t j = 0; j < dims[1]; ++j)
        for (std::size_t j2 = j + 1; j2 < dims[1]; ++j2)
          out.push_back(bipartite_basis_witness(dims, i, i2, j, j2));
  return out;
}

/// Antisymmetrized Ginibre factors on both sides, unit Frobenius norm.
inline WitnessOperator semi_random_bipartite(const DimSpec& dims, Rng& rng) {
  auto structure = WitnessStructure::bipartite(dims);
  const auto d1 = static_cast<Eigen::Index>(dims[0]);
  const auto d2 = static_cast<Eigen::Index>(dims[1]);
  const ComplexMatrix a = antisymmetrize(random_ginibre(d1, d1, rng));
  const ComplexMatrix b = antisymmetrize(random_ginibre(d2, d2, rng));
  return detail::normalized({std::move(structure), kron(a, b), "semi-random", {}, 1.0});
}

struct IndexPair {
  std::size_t row;
  std::size_t col;
};

/// s_1(i,i') (x) ... (x) [s_k(m,m') - s_k(m,m')^T] (x) ... (x) s_N(j,j') + transpose.
/// `indices` holds one (row, col) pair per subsystem, 0-based; the pair at
/// position k must have distinct entries.
inline WitnessOperator multipartite_cut_witness(const DimSpec& dims, std::size_t k,
                                                const std::vector<IndexPair>& indices) {
  auto structure = WitnessStructure::cut(dims, k);
  if (indices.size() != dims.parties()) {
    throw ValidationError("multipartite_cut_witness: need one index pair per subsystem");
  }
  if (indices[k].row == indices[k].col) {
    throw ValidationError("multipartite_cut_witness: antisymmetrized pair must have distinct indices");
  }
  std::vector<ComplexMatrix> factors;
  std::string label = "cut" + std::to_string(k + 1) + "(";
  for (std::size_t m = 0; m < dims.parties(); ++m) {
    ComplexMatrix s = elementary_sigma(dims[m], indices[m].row, indices[m].col);
    factors.push_back(m == k ? antisymmetrize(s) : s);
    if (m) label += ":";
    label += detail::pair_label(indices[m].row, indices[m].col);
  }
  label += ")";
  const ComplexMatrix x = kron_all(factors);
  return {std::move(structure), x + x.transpose(), std::move(label), {}, 1.0};
}

/// Random factors everywhere, antisymmetrized at k, plus the transpose of the
/// product. Unit Frobenius norm.
inline WitnessOperator semi_random_multipartite(const DimSpec& dims, std::size_t k, Rng& rng) {
  auto structure = WitnessStructure::cut(dims, k);
  std::vector<ComplexMatrix> factors;
  for (std::size_t m = 0; m < dims.parties(); ++m) {
    const auto d = static_cast<Eigen::Index>(dims[m]);
    ComplexMatrix s = random_ginibre(d, d, rng);
    factors.push_back(m == k ? antisymmetrize(s) : s);
  }
  const ComplexMatrix x = kron_all(factors);
  return detail::normalized(
      {std::move(structure), x + x.transpose(), "semi-random(cut " + std::to_string(k + 1) + ")", {}, 1.0});
}

/// sum_m c_m O_m over a common structure, normalized to unit Frobenius norm.
inline WitnessOperator compose_witness(const std::vector<WitnessOperator>& basis,
                                       const std::vector<Complex>& coeffs) {
  if (basis.empty()) throw ValidationError("compose_witness: empty basis");
  if (basis.size() != coeffs.size()) throw ValidationError("compose_witness: length mismatch");
  const auto& structure = basis.front().structure;
  ComplexMatrix sum = ComplexMatrix::Zero(basis.front().matrix.rows(), basis.front().matrix.cols());
  std::ostringstream label;
  label.precision(6);
  label << "compose[";
  for (std::size_t m = 0; m < basis.size(); ++m) {
    if (!(basis[m].structure == structure)) throw ValidationError("compose_witness: mismatched structures");
    sum += coeffs[m] * basis[m].scale * basis[m].matrix;
    if (m) label << " + ";
    label << "(" << coeffs[m].real() << (coeffs[m].imag() < 0 ? "" : "+") << coeffs[m].imag() << "i)*"
          << basis[m].label;
  }
  label << "]";
  WitnessOperator out{structure, std::move(sum), label.str(), coeffs, 1.0};
  return detail::normalized(std::move(out));
}

/// <psi*|O|psi> = psi^T O psi.
inline Complex conjugate_overlap(const ComplexVector& psi, const ComplexMatrix& op) {
  return (psi.transpose() * op * psi)(0, 0);
}

inline Complex conjugate_overlap(const PureState& psi, const WitnessOperator& op) {
  if (!(psi.dims() == op.structure.dims())) throw ValidationError("conjugate_overlap: dimension mismatch");
  return conjugate_overlap(psi.amplitudes(), op.matrix);
}

}  // namespace entwit
