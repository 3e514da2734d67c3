#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "entwit/concurrence.hpp"
#include "entwit/linalg.hpp"
#include "entwit/states.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Violation threshold: margin must exceed max(relative * lambda_1, absolute).
struct Tolerances {
  double relative = 1e-8;
  double absolute = 1e-12;

  double threshold(double lambda1) const { return std::max(relative * lambda1, absolute); }
};

struct WitnessTestResult {
  std::string label;
  std::vector<double> singular_values;  // descending
  double lhs = 0.0;                     // lambda_1
  double rhs = 0.0;                     // sum of the rest
  double margin = 0.0;                  // lhs - rhs
  double threshold = 0.0;
  bool violated = false;
};

namespace detail {

inline void require_matching(const DensityMatrix& rho, const WitnessOperator& o, const char* what) {
  if (!(rho.dims() == o.structure.dims())) {
    throw ValidationError(std::string(what) + ": state dims " + rho.dims().to_string() +
                          " do not match witness dims " + o.structure.dims().to_string());
  }
}

inline WitnessTestResult evaluate_condition(std::string label, std::vector<double> sv, const Tolerances& tol) {
  WitnessTestResult r;
  r.label = std::move(label);
  r.lhs = sv.empty() ? 0.0 : sv.front();
  for (std::size_t i = 1; i < sv.size(); ++i) r.rhs += sv[i];
  r.margin = r.lhs - r.rhs;
  r.threshold = tol.threshold(r.lhs);
  r.violated = r.margin > r.threshold;
  r.singular_values = std::move(sv);
  return r;
}

}  // namespace detail

/// (sqrt rho)^T O sqrt rho from a precomputed square root.
inline ComplexMatrix s_matrix_from_sqrt(const ComplexMatrix& sqrt_rho, const ComplexMatrix& o) {
  return sqrt_rho.transpose() * o * sqrt_rho;
}

inline ComplexMatrix s_matrix(const DensityMatrix& rho, const WitnessOperator& o) {
  detail::require_matching(rho, o, "s_matrix");
  return s_matrix_from_sqrt(matrix_sqrt_psd(rho.matrix()), o.matrix);
}

/// Singular-value test lambda_1 <= sum_{i>=2} lambda_i on S. A violation
/// certifies entanglement.
inline WitnessTestResult witness_test(const DensityMatrix& rho, const WitnessOperator& o,
                                      const Tolerances& tol = {}) {
  return detail::evaluate_condition(o.label, singular_values(s_matrix(rho, o)), tol);
}

/// Same singular values obtained from the state directly: square roots of the
/// eigenvalues of rho O^dagger rho^* O.
inline std::vector<double> spectrum_via_rho(const DensityMatrix& rho, const WitnessOperator& o,
                                            double clamp = 1e-10) {
  detail::require_matching(rho, o, "spectrum_via_rho");
  const ComplexMatrix& r = rho.matrix();
  const ComplexMatrix product = r * o.matrix.adjoint() * r.conjugate() * o.matrix;
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(product, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("spectrum_via_rho: eigensolver failed");
  const double scale = std::max(1.0, product.norm());
  std::vector<double> out;
  out.reserve(product.rows());
  for (Eigen::Index i = 0; i < product.rows(); ++i) {
    const double v = solver.eigenvalues()(i).real();
    if (v < -clamp * scale) {
      throw NumericalError("spectrum_via_rho: eigenvalue " + std::to_string(v) + " is negative");
    }
    out.push_back(v > 0.0 ? std::sqrt(v) : 0.0);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// ---------------------------------------------------------------------------
// Randomized detection

enum class Verdict { Entangled, Inconclusive, Separable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Entangled: return "Entangled";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Separable: return "Separable";
  }
  return "?";
}

enum class SamplingFamily {
  Bipartite,      // two-party semi-random operators
  CutRoundRobin,  // cut operators, cut k = (t - 1) mod N for trial t
};

inline const char* to_string(SamplingFamily f) {
  return f == SamplingFamily::Bipartite ? "bipartite" : "cut-round-robin";
}

struct DetectionOptions {
  std::size_t trials = 1000;
  std::uint64_t master_seed = 0;
  Tolerances tol{};
  bool full_stats = false;
  unsigned threads = 1;
  /// Evaluated between early-exit checks; fixed so results do not depend on
  /// the thread count.
  std::size_t batch = 64;
  std::optional<SamplingFamily> family;
};

struct DetectionReport {
  std::string state_id;
  SamplingFamily family = SamplingFamily::Bipartite;
  std::size_t requested_trials = 0;
  std::size_t trials = 0;  // evaluated
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation_trial;  // 1-based
  double max_margin = -std::numeric_limits<double>::infinity();
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t master_seed = 0;
  Tolerances tol{};
  bool full_stats = false;
};

inline SamplingFamily default_family(const DimSpec& dims) {
  return dims.parties() == 2 ? SamplingFamily::Bipartite : SamplingFamily::CutRoundRobin;
}

/// Witness drawn for trial t (1-based) of a campaign; depends only on
/// (master_seed, t).
inline WitnessOperator trial_witness(const DimSpec& dims, SamplingFamily family, std::uint64_t master_seed,
                                     std::size_t trial) {
  Rng rng = derive_rng(master_seed, trial);
  if (family == SamplingFamily::Bipartite) return semi_random_bipartite(dims, rng);
  return semi_random_multipartite(dims, (trial - 1) % dims.parties(), rng);
}

/// Runs the singular-value test on a seeded sequence of semi-random witnesses.
/// Default mode stops after the batch containing the first violation and
/// reports statistics for trials 1..first_violation only; full_stats runs all.
inline DetectionReport sample_witness_detection(const DensityMatrix& rho, const DetectionOptions& opt,
                                                std::string state_id = {}) {
  if (opt.trials < 1) throw ValidationError("sample_witness_detection: trials must be >= 1");
  const auto& dims = rho.dims();
  dims.require_witness_ready();
  const SamplingFamily family = opt.family.value_or(default_family(dims));
  if (family == SamplingFamily::Bipartite && dims.parties() != 2) {
    throw ValidationError("bipartite sampling needs a two-party state");
  }
  const ComplexMatrix sqrt_rho = matrix_sqrt_psd(rho.matrix());

  struct Outcome {
    double margin = 0.0;
    bool violated = false;
  };
  const auto run_trial = [&](std::size_t t) {
    const auto o = trial_witness(dims, family, opt.master_seed, t);
    const auto r = detail::evaluate_condition({}, singular_values(s_matrix_from_sqrt(sqrt_rho, o.matrix)), opt.tol);
    return Outcome{r.margin, r.violated};
  };

  DetectionReport rep;
  rep.state_id = std::move(state_id);
  rep.family = family;
  rep.requested_trials = opt.trials;
  rep.master_seed = opt.master_seed;
  rep.tol = opt.tol;
  rep.full_stats = opt.full_stats;

  const std::size_t batch = std::max<std::size_t>(opt.batch, 1);
  const unsigned threads = std::max(1u, opt.threads);
  std::vector<Outcome> outcomes(batch);
  for (std::size_t start = 1; start <= opt.trials; start += batch) {
    const std::size_t count = std::min(batch, opt.trials - start + 1);
    if (threads == 1 || count == 1) {
      for (std::size_t i = 0; i < count; ++i) outcomes[i] = run_trial(start + i);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < count; i += threads) outcomes[i] = run_trial(start + i);
        });
      }
    }
    // Sequential, ordered reduction.
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t t = start + i;
      if (!opt.full_stats && rep.first_violation_trial) break;
      ++rep.trials;
      rep.max_margin = std::max(rep.max_margin, outcomes[i].margin);
      if (outcomes[i].violated) {
        ++rep.violations;
        if (!rep.first_violation_trial) rep.first_violation_trial = t;
      }
    }
    if (!opt.full_stats && rep.first_violation_trial) break;
  }
  rep.verdict = rep.violations > 0 ? Verdict::Entangled : Verdict::Inconclusive;
  return rep;
}

// ---------------------------------------------------------------------------
// Pure states: complete check over the basis family

/// <psi*|O|psi> for the bipartite basis witness (i,i':j,j'), by index formula.
inline Complex bipartite_basis_overlap(const PureState& psi, std::size_t i, std::size_t i2, std::size_t j,
                                       std::size_t j2) {
  const std::size_t d2 = psi.dims()[1];
  const auto a = [&](std::size_t r, std::size_t c) { return psi[r * d2 + c]; };
  return 2.0 * (a(i, j) * a(i2, j2) - a(i, j2) * a(i2, j));
}

/// <psi*|O|psi> for multipartite_cut_witness(dims, k, indices), by index formula.
inline Complex cut_witness_overlap(const PureState& psi, std::size_t k, const std::vector<IndexPair>& idx) {
  const auto& dims = psi.dims();
  std::size_t a_plus = 0, b_plus = 0, a_minus = 0, b_minus = 0;
  for (std::size_t m = 0; m < dims.parties(); ++m) {
    const std::size_t r = idx[m].row, c = idx[m].col;
    a_plus = a_plus * dims[m] + r;
    b_plus = b_plus * dims[m] + c;
    a_minus = a_minus * dims[m] + (m == k ? c : r);
    b_minus = b_minus * dims[m] + (m == k ? r : c);
  }
  return 2.0 * (psi[a_plus] * psi[b_plus] - psi[a_minus] * psi[b_minus]);
}

struct PureCheckResult {
  Verdict verdict = Verdict::Separable;
  double max_overlap = 0.0;
  std::string worst_witness;
  std::size_t witnesses = 0;
};

/// |<psi*|O|psi>| over every basis witness (every cut for N > 2). The state
/// is a product state iff all of them vanish.
inline PureCheckResult pure_state_check(const PureState& psi, double threshold = kProductThreshold) {
  const auto& dims = psi.dims();
  dims.require_witness_ready();
  PureCheckResult out;
  const auto consider = [&](double v, auto&& label) {
    ++out.witnesses;
    if (v > out.max_overlap || out.worst_witness.empty()) {
      out.max_overlap = std::max(out.max_overlap, v);
      out.worst_witness = label();
    }
  };
  if (dims.parties() == 2) {
    for (std::size_t i = 0; i < dims[0]; ++i)
      for (std::size_t i2 = i + 1; i2 < dims[0]; ++i2)
        for (std::size_t j = 0; j < dims[1]; ++j)
          for (std::size_t j2 = j + 1; j2 < dims[1]; ++j2)
            consider(std::abs(bipartite_basis_overlap(psi, i, i2, j, j2)), [&] {
              return "basis(" + detail::pair_label(i, i2) + ":" + detail::pair_label(j, j2) + ")";
            });
  } else {
    for_each_cut_witness_index(dims, [&](std::size_t k, const std::vector<IndexPair>& idx) {
      consider(std::abs(cut_witness_overlap(psi, k, idx)), [&] {
        std::string s = "cut" + std::to_string(k + 1) + "(";
        for (std::size_t m = 0; m < idx.size(); ++m) s += (m ? ":" : "") + detail::pair_label(idx[m].row, idx[m].col);
        return s + ")";
      });
    });
  }
  out.verdict = out.max_overlap < threshold ? Verdict::Separable : Verdict::Entangled;
  return out;
}

// ---------------------------------------------------------------------------
// Concurrence bound from a composed witness

/// max(0, lambda_1 - sum_{j>=2} lambda_j) / sqrt|c_max|, evaluated on the raw
/// combination sum_m c_m O_m (coefficients as supplied, basis operators
/// unnormalized) with c_max the largest-modulus coefficient.
inline double average_concurrence_bound(const DensityMatrix& rho, const WitnessOperator& o,
                                        const Tolerances& tol = {}) {
  if (o.coefficients.empty()) {
    throw ValidationError("average_concurrence_bound: witness carries no combination coefficients");
  }
  double c_max = 0.0;
  for (auto c : o.coefficients) c_max = std::max(c_max, std::abs(c));
  if (c_max == 0.0) throw ValidationError("average_concurrence_bound: all coefficients vanish");
  const auto r = witness_test(rho, o, tol);
  const double raw_margin = r.margin * o.scale;
  return std::max(0.0, raw_margin) / std::sqrt(c_max);
}

// ---------------------------------------------------------------------------
// Independent oracles

struct PptResult {
  double min_eigenvalue = 0.0;
  bool npt = false;  // negative partial transpose: entangled
};

/// Partial transpose on `subsystem` (0-based) of a bipartite state.
inline PptResult ppt_oracle(const DensityMatrix& rho, std::size_t subsystem = 1, double threshold = 1e-10) {
  if (rho.dims().parties() != 2) throw ValidationError("ppt_oracle: state is not bipartite");
  const auto eig = hermitian_eig(partial_transpose(rho.matrix(), rho.dims(), subsystem));
  return {eig.values.back(), eig.values.back() < -threshold};
}

/// Sum of the moduli of the negative eigenvalues of the partial transpose.
inline double negativity(const DensityMatrix& rho, std::size_t subsystem = 1) {
  if (rho.dims().parties() != 2) throw ValidationError("negativity: state is not bipartite");
  const auto eig = hermitian_eig(partial_transpose(rho.matrix(), rho.dims(), subsystem));
  double sum = 0.0;
  for (double v : eig.values) sum += v < 0.0 ? -v : 0.0;
  return sum;
}

/// Two-qubit concurrence max(0, mu_1 - mu_2 - mu_3 - mu_4), mu the singular
/// values of sqrt(rho) (sy x sy) sqrt(rho)^*.
inline double wootters_oracle(const DensityMatrix& rho) {
  if (!(rho.dims() == DimSpec{2, 2})) throw ValidationError("wootters_oracle: needs a 2x2 state");
  ComplexMatrix sy(2, 2);
  sy << 0.0, -kI, kI, 0.0;
  const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
  const auto mu = singular_values(ComplexMatrix(root * kron(sy, sy) * root.conjugate()));
  return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

}  // namespace entwit
