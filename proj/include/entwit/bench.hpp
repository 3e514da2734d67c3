#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "entwit/separability.hpp"
#include "entwit/states.hpp"

namespace entwit {

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, t approximation with n - 2 dof
  std::size_t n = 0;
};

/// Ranks starting at 1, ties get their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
  SpearmanResult out;
  out.n = x.size();
  if (out.n < 3) return out;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(out.n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(out.n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < out.n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return out;  // a constant sample has no rank correlation
  out.rho = sxy / std::sqrt(sxx * syy);
  const double dof = static_cast<double>(out.n - 2);
  if (std::abs(out.rho) >= 1.0) {
    out.p_value = 0.0;
    return out;
  }
  const double t = out.rho * std::sqrt(dof / (1.0 - out.rho * out.rho));
  boost::math::students_t dist(dof);
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// Trials-to-detection benchmark

/// Families:
///   werner     2x2 Werner state, parameter p, oracle = Wootters concurrence
///   isotropic  d x d isotropic state, parameter p, oracle = negativity
///   schmidt    (|00> + s sum_{i>0} |ii>) in d x d under random local
///              unitaries, mixed with white noise at fixed visibility;
///              parameter s, oracle = negativity
struct BenchConfig {
  std::string family = "werner";
  std::vector<double> grid;
  std::size_t repetitions = 50;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t dim = 3;
  double visibility = 0.8;
  Tolerances tol{};
};

struct BenchSample {
  double param = 0.0;
  double oracle = 0.0;
  /// 1-based; trials + 1 when nothing was detected (censored).
  std::size_t first_violation_trial = 0;
  bool detected = false;
};

struct BenchRow {
  double param = 0.0;
  double oracle = 0.0;  // mean over repetitions
  double median_first_violation = 0.0;
  double mean_first_violation = 0.0;
  double violation_rate = 0.0;  // fraction of repetitions with a detection
  std::size_t repetitions = 0;
  std::size_t trials = 0;
};

struct BenchResult {
  BenchConfig config;
  std::vector<BenchRow> rows;
  std::vector<BenchSample> samples;
};

inline const std::vector<std::string>& bench_families() {
  static const std::vector<std::string> names{"werner", "isotropic", "schmidt"};
  return names;
}

inline DensityMatrix bench_state(const BenchConfig& cfg, double param, Rng& rng) {
  if (cfg.family == "werner") return werner_2qubit(param);
  if (cfg.family == "isotropic") return isotropic(cfg.dim, param);
  if (cfg.family == "schmidt") {
    if (cfg.dim < 2) throw ValidationError("bench: schmidt family needs dim >= 2");
    const DimSpec dims{cfg.dim, cfg.dim};
    ComplexVector v = ComplexVector::Zero(dims.total());
    v(0) = 1.0;
    for (std::size_t i = 1; i < cfg.dim; ++i) v(basis_index(dims, {i, i})) = param;
    const auto psi = apply_local_unitary(pure_from_coeffs(dims, v), random_local_unitaries(dims, rng));
    return noisy_pure(psi, cfg.visibility);
  }
  throw ValidationError("bench: unknown family '" + cfg.family + "'");
}

inline double bench_oracle(const BenchConfig& cfg, const DensityMatrix& rho) {
  return cfg.family == "werner" ? wootters_oracle(rho) : negativity(rho);
}

inline BenchResult run_bench(const BenchConfig& cfg) {
  if (cfg.grid.empty()) throw ValidationError("bench: empty parameter grid");
  if (cfg.repetitions < 1 || cfg.trials < 1) throw ValidationError("bench: repetitions and trials must be >= 1");
  BenchResult out;
  out.config = cfg;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const double param = cfg.grid[g];
    std::vector<double> firsts;
    std::size_t detected = 0;
    double oracle_sum = 0.0;
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      const std::uint64_t stream = g * cfg.repetitions + r;
      Rng state_rng = derive_rng(cfg.seed, 2 * stream);
      const auto rho = bench_state(cfg, param, state_rng);
      DetectionOptions opt;
      opt.trials = cfg.trials;
      opt.master_seed = derive_rng(cfg.seed, 2 * stream + 1)();
      opt.tol = cfg.tol;
      opt.threads = cfg.threads;
      const auto rep = sample_witness_detection(rho, opt);
      BenchSample s;
      s.param = param;
      s.oracle = bench_oracle(cfg, rho);
      s.detected = rep.first_violation_trial.has_value();
      s.first_violation_trial = rep.first_violation_trial.value_or(cfg.trials + 1);
      out.samples.push_back(s);
      firsts.push_back(static_cast<double>(s.first_violation_trial));
      detected += s.detected ? 1 : 0;
      oracle_sum += s.oracle;
    }
    BenchRow row;
    row.param = param;
    row.oracle = oracle_sum / static_cast<double>(cfg.repetitions);
    row.median_first_violation = median(firsts);
    row.mean_first_violation = std::accumulate(firsts.begin(), firsts.end(), 0.0) / static_cast<double>(firsts.size());
    row.violation_rate = static_cast<double>(detected) / static_cast<double>(cfg.repetitions);
    row.repetitions = cfg.repetitions;
    row.trials = cfg.trials;
    out.rows.push_back(row);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header plus one row per grid point. Censored repetitions count as
/// trials + 1 in the median and mean.
inline std::string bench_csv(const BenchResult& res) {
  std::string out =
      "family,param,oracle,median_first_violation_trial,mean_first_violation_trial,violation_rate,repetitions,trials\n";
  for (const auto& r : res.rows) {
    out += res.config.family + "," + format_double(r.param) + "," + format_double(r.oracle) + "," +
           format_double(r.median_first_violation) + "," + format_double(r.mean_first_violation) + "," +
           format_double(r.violation_rate) + "," + std::to_string(r.repetitions) + "," + std::to_string(r.trials) +
           "\n";
  }
  return out;
}

/// Rank correlation between the oracle value and the first violating trial
/// over all repetitions.
inline SpearmanResult bench_trend(const BenchResult& res) {
  std::vector<double> x, y;
  for (const auto& s : res.samples) {
    x.push_back(s.oracle);
    y.push_back(static_cast<double>(s.first_violation_trial));
  }
  return spearman(x, y);
}

}  // namespace entwit
