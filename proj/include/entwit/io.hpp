#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "entwit/hollow.hpp"
#include "entwit/separability.hpp"
#include "entwit/states.hpp"

namespace entwit {

using json = nlohmann::json;

inline constexpr int kStateFormatVersion = 1;

/// A state read from disk: pure or mixed.
using AnyState = std::variant<PureState, DensityMatrix>;

inline const DimSpec& dims_of(const AnyState& s) {
  return std::visit([](const auto& v) -> const DimSpec& { return v.dims(); }, s);
}

inline DensityMatrix as_density(const AnyState& s) {
  if (const auto* p = std::get_if<PureState>(&s)) return density_from_pure(*p);
  return std::get<DensityMatrix>(s);
}

// ---------------------------------------------------------------------------
// StateFile

inline json matrix_to_json(const ComplexMatrix& m) {
  std::vector<std::vector<double>> re(m.rows()), im(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re[r].push_back(m(r, c).real());
      im[r].push_back(m(r, c).imag());
    }
  }
  return {{"re", re}, {"im", im}};
}

inline json state_to_json(const AnyState& state) {
  json j;
  j["format_version"] = kStateFormatVersion;
  j["dims"] = dims_of(state).dims();
  if (const auto* p = std::get_if<PureState>(&state)) {
    j["kind"] = "pure";
    std::vector<double> re, im;
    for (Eigen::Index i = 0; i < p->amplitudes().size(); ++i) {
      re.push_back(p->amplitudes()(i).real());
      im.push_back(p->amplitudes()(i).imag());
    }
    j["data"] = {{"re", re}, {"im", im}};
  } else {
    j["kind"] = "mixed";
    j["data"] = matrix_to_json(std::get<DensityMatrix>(state).matrix());
  }
  return j;
}

inline AnyState state_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kStateFormatVersion) {
      throw ValidationError("state file: unsupported format_version");
    }
    const DimSpec dims(j.at("dims").get<std::vector<std::size_t>>());
    const auto kind = j.at("kind").get<std::string>();
    const auto& data = j.at("data");
    const auto n = static_cast<Eigen::Index>(dims.total());
    if (kind == "pure") {
      const auto re = data.at("re").get<std::vector<double>>();
      const auto im = data.at("im").get<std::vector<double>>();
      if (re.size() != dims.total() || im.size() != dims.total()) {
        throw ValidationError("state file: amplitude arrays do not match dims");
      }
      ComplexVector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(re[i], im[i]);
      return PureState(dims, v);
    }
    if (kind == "mixed") {
      const auto re = data.at("re").get<std::vector<std::vector<double>>>();
      const auto im = data.at("im").get<std::vector<std::vector<double>>>();
      if (re.size() != dims.total() || im.size() != dims.total()) {
        throw ValidationError("state file: matrix arrays do not match dims");
      }
      ComplexMatrix m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (re[r].size() != dims.total() || im[r].size() != dims.total()) {
          throw ValidationError("state file: ragged matrix row");
        }
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = Complex(re[r][c], im[r][c]);
      }
      return DensityMatrix(dims, m);
    }
    throw ValidationError("state file: kind must be \"pure\" or \"mixed\"");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("state file: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

inline AnyState load_state(const std::string& path) {
  return state_from_json(parse_json(read_text(path), path));
}

inline void save_state(const std::string& path, const AnyState& state, const json& meta = {}) {
  json j = state_to_json(state);
  if (!meta.is_null()) j["meta"] = meta;
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Report fragments

inline json tolerances_to_json(const Tolerances& t) {
  return {{"relative", t.relative}, {"absolute", t.absolute}};
}

inline json to_json(const WitnessTestResult& r) {
  return {{"witness", r.label},      {"singular_values", r.singular_values},
          {"lhs", r.lhs},            {"rhs", r.rhs},
          {"margin", r.margin},      {"threshold", r.threshold},
          {"violated", r.violated}};
}

inline json to_json(const DetectionReport& r) {
  json j = {{"state", r.state_id},
            {"family", to_string(r.family)},
            {"requested_trials", r.requested_trials},
            {"trials", r.trials},
            {"violations", r.violations},
            {"max_margin", r.max_margin},
            {"verdict", to_string(r.verdict)},
            {"master_seed", r.master_seed},
            {"tolerances", tolerances_to_json(r.tol)},
            {"full_stats", r.full_stats}};
  j["first_violation_trial"] = r.first_violation_trial ? json(*r.first_violation_trial) : json(nullptr);
  return j;
}

inline json to_json(const PureCheckResult& r) {
  return {{"verdict", to_string(r.verdict)},
          {"max_overlap", r.max_overlap},
          {"worst_witness", r.worst_witness},
          {"witnesses", r.witnesses}};
}

inline json to_json(const DecompositionCertificate& c) {
  return {{"size", c.u.rows()},
          {"u", matrix_to_json(c.u)},
          {"max_abs_diagonal", c.max_abs_diagonal},
          {"diagonal_floor", c.diagonal_floor},
          {"condition_margin", c.condition_margin},
          {"condition_holds", c.condition_holds},
          {"converged", c.converged},
          {"iterations", c.iterations}};
}

}  // namespace entwit
