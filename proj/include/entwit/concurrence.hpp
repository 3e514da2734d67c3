#pragma once

#include <cmath>
#include <vector>

#include "entwit/states.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Pure states with concurrence below this are reported as product states.
inline constexpr double kProductThreshold = 1e-8;

/// The operator-sum form enumerates N * D^2 dense operators; it is a
/// validation route and refuses systems larger than this total dimension.
inline constexpr std::size_t kOperatorFormDimensionCap = 64;

namespace detail {

inline void require_bipartite(const PureState& psi, const char* what) {
  if (psi.dims().parties() != 2) throw ValidationError(std::string(what) + ": state is not bipartite");
}

inline double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

/// Amplitudes reordered so that subsystem k is the leading tensor factor,
/// viewed as a D_k x (product of the others) matrix.
inline ComplexMatrix cut_coefficients(const PureState& psi, std::size_t k) {
  const auto& dims = psi.dims();
  if (k >= dims.parties()) throw ValidationError("cut index out of range");
  const std::size_t dk = dims[k];
  const std::size_t rest = dims.total() / dk;
  const std::size_t stride = dims.stride(k);
  ComplexMatrix out(dk, rest);
  for (std::size_t i = 0; i < dims.total(); ++i) {
    const std::size_t digit = (i / stride) % dk;
    const std::size_t high = i / (stride * dk);
    const std::size_t low = i % stride;
    out(digit, high * stride + low) = psi[i];
  }
  return out;
}

/// tr(rho_k^2) of the single-subsystem marginal.
inline double marginal_purity(const PureState& psi, std::size_t k) {
  const ComplexMatrix c = cut_coefficients(psi, k);
  const ComplexMatrix rho = c * c.adjoint();
  return rho.squaredNorm();
}

}  // namespace detail

/// sqrt of the sum of |<psi*|O|psi>|^2 over the bipartite basis witnesses.
inline double o_concurrence_bipartite(const PureState& psi) {
  detail::require_bipartite(psi, "o_concurrence_bipartite");
  double sum = 0.0;
  for (const auto& op : enumerate_bipartite_basis(psi.dims())) sum += std::norm(op.scale * conjugate_overlap(psi, op));
  return std::sqrt(sum);
}

/// sqrt(2 - tr rho_1^2 - tr rho_2^2) with marginals from partial_trace.
inline double i_concurrence_bipartite(const PureState& psi) {
  detail::require_bipartite(psi, "i_concurrence_bipartite");
  const ComplexMatrix rho = psi.projector();
  const ComplexMatrix r1 = partial_trace(rho, psi.dims(), {0});
  const ComplexMatrix r2 = partial_trace(rho, psi.dims(), {1});
  return detail::safe_sqrt(2.0 - (r1 * r1).trace().real() - (r2 * r2).trace().real());
}

/// Bipartite concurrence of subsystem k (0-based) against the rest merged.
inline double cut_concurrence(const PureState& psi, std::size_t k) {
  if (psi.dims().parties() < 2) throw ValidationError("cut_concurrence: need at least two subsystems");
  if (k >= psi.dims().parties()) throw ValidationError("cut_concurrence: cut index out of range");
  const ComplexMatrix c = detail::cut_coefficients(psi, k);
  const DimSpec merged({static_cast<std::size_t>(c.rows()), static_cast<std::size_t>(c.cols())});
  // Row-major flattening of the D_k x rest matrix is the reordered state.
  ComplexVector v(c.size());
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) v(i * c.cols() + j) = c(i, j);
  return i_concurrence_bipartite(PureState(merged, v));
}

/// sqrt(1/2 sum_k C(psi_{k|rest})^2).
inline double multipartite_concurrence(const PureState& psi) {
  double sum = 0.0;
  for (std::size_t k = 0; k < psi.dims().parties(); ++k) {
    const double c = cut_concurrence(psi, k);
    sum += c * c;
  }
  return std::sqrt(0.5 * sum);
}

/// sqrt(N - sum_k tr rho_k^2).
inline double multipartite_concurrence_purity(const PureState& psi) {
  const auto n = psi.dims().parties();
  if (n < 2) throw ValidationError("multipartite_concurrence_purity: need at least two subsystems");
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += detail::marginal_purity(psi, k);
  return detail::safe_sqrt(static_cast<double>(n) - sum);
}

/// Calls `visit(k, indices)` for every cut k and every tuple of index pairs,
/// with unrestricted ranges except that the antisymmetrized pair at k skips
/// the diagonal (those operators vanish).
template <typename Visitor>
void for_each_cut_witness_index(const DimSpec& dims, Visitor&& visit) {
  const std::size_t n = dims.parties();
  std::vector<IndexPair> idx(n);
  const auto advance = [&](std::vector<std::size_t>& counter) {
    for (std::size_t m = n; m-- > 0;) {
      if (++counter[m] < dims[m] * dims[m]) return true;
      counter[m] = 0;
    }
    return false;
  };
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> counter(n, 0);
    do {
      for (std::size_t m = 0; m < n; ++m) idx[m] = {counter[m] / dims[m], counter[m] % dims[m]};
      if (idx[k].row != idx[k].col) visit(k, idx);
    } while (advance(counter));
  }
}

/// sqrt(1/8 sum_k sum_{all index tuples} |<psi*|O_k(indices)|psi>|^2).
inline double multipartite_concurrence_operator_form(const PureState& psi) {
  const auto& dims = psi.dims();
  dims.require_witness_ready();
  if (dims.total() > kOperatorFormDimensionCap) {
    throw SizeLimitError("operator-form concurrence limited to total dimension " +
                         std::to_string(kOperatorFormDimensionCap));
  }
  double sum = 0.0;
  for_each_cut_witness_index(dims, [&](std::size_t k, const std::vector<IndexPair>& idx) {
    sum += std::norm(conjugate_overlap(psi, multipartite_cut_witness(dims, k, idx)));
  });
  return std::sqrt(sum / 8.0);
}

}  // namespace entwit
