// entwit: command-line front end for the entwit library.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "entwit/bench.hpp"
#include "entwit/concurrence.hpp"
#include "entwit/hollow.hpp"
#include "entwit/io.hpp"
#include "entwit/separability.hpp"
#include "entwit/states.hpp"
#include "entwit/witness.hpp"

namespace {

using namespace entwit;

struct Global {
  std::uint64_t seed = 0;
  double tol = Tolerances{}.relative;
  std::string out;
  bool json = false;
  bool timing = false;
  unsigned threads = 1;
};

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

Tolerances tolerances(const Global& g) {
  Tolerances t;
  t.relative = g.tol;
  return t;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
  return out;
}

double parse_double(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string(what) + ": cannot parse '" + text + "'");
  }
}

/// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double(item, "grid"));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw ValidationError("grid: expected start:stop:step with step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, "grid"));
  if (out.empty()) throw ValidationError("grid: empty");
  return out;
}

/// Writes the machine report to --out when given, prints JSON or the human
/// text to stdout.
void emit(const Global& g, const json& report, const std::string& human) {
  const std::string machine = report.dump(2) + "\n";
  if (!g.out.empty()) write_text(g.out, machine);
  std::cout << (g.json ? machine : human);
}

void add_timing(const Global& g, json& report, std::chrono::steady_clock::time_point start) {
  if (!g.timing) return;
  report["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json echo(const Global& g, const std::string& state_path) {
  return {{"state", state_path}, {"seed", g.seed}, {"tolerances", tolerances_to_json(tolerances(g))}};
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string family;
  std::size_t n = 2;
  std::size_t d = 2;
  double p = 0.5;
  std::string dims = "2,2";
  std::size_t rank = 0;
  std::size_t terms = 0;
};

int cmd_gen(const Global& g, const GenArgs& a) {
  Rng rng = derive_rng(g.seed, 0);
  json params;
  std::optional<AnyState> state;
  const auto dims = [&] { return DimSpec(parse_size_list(a.dims, "--dims")); };
  if (a.family == "ghz") {
    state = ghz(a.n, a.d);
    params = {{"n", a.n}, {"d", a.d}};
  } else if (a.family == "w") {
    state = w_state(a.n);
    params = {{"n", a.n}};
  } else if (a.family == "bell") {
    state = bell_phi_plus();
  } else if (a.family == "werner") {
    state = werner_2qubit(a.p);
    params = {{"p", a.p}};
  } else if (a.family == "isotropic") {
    state = isotropic(a.d, a.p);
    params = {{"d", a.d}, {"p", a.p}};
  } else if (a.family == "random-pure") {
    state = random_pure(dims(), rng);
    params = {{"dims", a.dims}};
  } else if (a.family == "random-mixed") {
    const auto ds = dims();
    const std::size_t rank = a.rank ? a.rank : ds.total();
    state = random_mixed(ds, rank, rng);
    params = {{"dims", a.dims}, {"rank", rank}};
  } else if (a.family == "random-separable") {
    const auto ds = dims();
    const std::size_t terms = a.terms ? a.terms : ds.total();
    state = random_separable_mixture(ds, terms, rng);
    params = {{"dims", a.dims}, {"terms", terms}};
  } else if (a.family == "product") {
    state = random_product_pure(dims(), rng);
    params = {{"dims", a.dims}};
  } else {
    throw ValidationError("gen: unknown family '" + a.family +
                          "' (ghz, w, bell, werner, isotropic, random-pure, random-mixed, random-separable, product)");
  }
  const json meta = {{"family", a.family}, {"seed", g.seed}, {"params", params}};
  json doc = state_to_json(*state);
  doc["meta"] = meta;
  const std::string text = doc.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text(g.out, text);
    if (!g.json) {
      std::cerr << "wrote " << a.family << " state (" << dims_of(*state).to_string() << ", seed " << g.seed
                << ") to " << g.out << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// concurrence

int cmd_concurrence(const Global& g, const std::string& path, const std::string& method) {
  const auto start = std::chrono::steady_clock::now();
  const auto state = load_state(path);
  const auto* psi = std::get_if<PureState>(&state);
  if (!psi) {
    throw ValidationError(
        "concurrence: input is a mixed state; mixed-state concurrence needs a convex-roof extension, which is not "
        "implemented. Use 'detect' or 'oracle' instead.");
  }
  const auto& dims = psi->dims();
  json values = json::object();
  const bool all = method == "all";
  if (!all && method != "o" && method != "i" && method != "cuts" && method != "purity" && method != "operator") {
    throw ValidationError("concurrence: unknown method '" + method + "' (all, o, i, cuts, purity, operator)");
  }
  if (dims.parties() == 2) {
    if (all || method == "o") values["o_concurrence"] = o_concurrence_bipartite(*psi);
    if (all || method == "i") values["i_concurrence"] = i_concurrence_bipartite(*psi);
  }
  if (all || method == "cuts") values["cut_sum"] = multipartite_concurrence(*psi);
  if (all || method == "purity") values["purity_form"] = multipartite_concurrence_purity(*psi);
  if ((all && dims.total() <= kOperatorFormDimensionCap) || method == "operator") {
    values["operator_form"] = multipartite_concurrence_operator_form(*psi);
  }
  if (values.empty()) throw ValidationError("concurrence: method '" + method + "' needs a bipartite state");

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [k, v] : values.items()) {
    lo = std::min(lo, v.get<double>());
    hi = std::max(hi, v.get<double>());
  }
  json report = echo(g, path);
  report["dims"] = dims.dims();
  report["concurrence"] = values;
  report["max_discrepancy"] = hi - lo;
  add_timing(g, report, start);

  std::string human;
  for (const auto& [k, v] : values.items()) human += k + ": " + fixed6(v.get<double>()) + "\n";
  human += "max discrepancy: " + fixed6(hi - lo) + "\n";
  emit(g, report, human);
  return 0;
}

// ---------------------------------------------------------------------------
// detect

int cmd_detect(const Global& g, const std::string& path, std::size_t trials, bool full_stats) {
  const auto start = std::chrono::steady_clock::now();
  const auto state = load_state(path);
  json report = echo(g, path);
  report["trials"] = trials;
  std::string human;
  if (const auto* psi = std::get_if<PureState>(&state)) {
    const auto r = pure_state_check(*psi);
    report["method"] = "pure_state_check";
    report["result"] = to_json(r);
    // A violated basis witness is the first and only test needed.
    report["result"]["first_violation_trial"] = r.verdict == Verdict::Entangled ? json(1) : json(nullptr);
    human = "verdict: " + std::string(to_string(r.verdict)) + "\nmax overlap: " + fixed6(r.max_overlap) +
            " (" + r.worst_witness + ")\nwitnesses checked: " + std::to_string(r.witnesses) + "\n";
  } else {
    DetectionOptions opt;
    opt.trials = trials;
    opt.master_seed = g.seed;
    opt.tol = tolerances(g);
    opt.full_stats = full_stats;
    opt.threads = g.threads;
    const auto r = sample_witness_detection(std::get<DensityMatrix>(state), opt, path);
    report["method"] = "sample_witness_detection";
    report["result"] = to_json(r);
    human = "verdict: " + std::string(to_string(r.verdict)) + "\ntrials evaluated: " + std::to_string(r.trials) +
            " of " + std::to_string(r.requested_trials) + "\nviolations: " + std::to_string(r.violations) +
            "\nfirst violation trial: " +
            (r.first_violation_trial ? std::to_string(*r.first_violation_trial) : std::string("none")) +
            "\nmax margin: " + fixed6(r.max_margin) + "\n";
  }
  add_timing(g, report, start);
  emit(g, report, human);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

int cmd_oracle(const Global& g, const std::string& path) {
  const auto start = std::chrono::steady_clock::now();
  const auto rho = as_density(load_state(path));
  const auto ppt = ppt_oracle(rho);
  json report = echo(g, path);
  report["ppt"] = {{"min_eigenvalue", ppt.min_eigenvalue}, {"npt", ppt.npt}};
  report["negativity"] = negativity(rho);
  std::string human = std::string("partial transpose: ") + (ppt.npt ? "NPT" : "PPT") +
                      "\nmin eigenvalue: " + fixed6(ppt.min_eigenvalue) + "\nnegativity: " +
                      fixed6(negativity(rho)) + "\n";
  if (rho.dims() == DimSpec{2, 2}) {
    const double c = wootters_oracle(rho);
    report["wootters_concurrence"] = c;
    human += "wootters concurrence: " + fixed6(c) + "\n";
  }
  add_timing(g, report, start);
  emit(g, report, human);
  return 0;
}

// ---------------------------------------------------------------------------
// hollow

WitnessOperator parse_witness(const std::string& spec, const DimSpec& dims, std::uint64_t seed) {
  if (spec.rfind("basis:", 0) == 0) {
    const auto idx = parse_size_list(spec.substr(6), "--witness");
    if (idx.size() != 4 || std::find(idx.begin(), idx.end(), 0) != idx.end()) {
      throw ValidationError("--witness basis:i,i',j,j' takes four 1-based indices");
    }
    if (dims.parties() != 2) throw ValidationError("--witness basis needs a bipartite state");
    return bipartite_basis_witness(dims, idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1);
  }
  if (spec == "semi-random" || spec.rfind("semi-random:", 0) == 0) {
    Rng rng = derive_rng(seed, 0);
    if (spec == "semi-random" && dims.parties() == 2) return semi_random_bipartite(dims, rng);
    const std::size_t k = spec == "semi-random" ? 1 : parse_size_list(spec.substr(12), "--witness").at(0);
    if (k < 1 || k > dims.parties()) throw ValidationError("--witness semi-random:k needs 1 <= k <= N");
    return semi_random_multipartite(dims, k - 1, rng);
  }
  throw ValidationError("--witness: expected basis:i,i',j,j' or semi-random[:k]");
}

int cmd_hollow(const Global& g, const std::string& path, const std::string& witness, double hollow_tol,
               std::size_t max_iter) {
  const auto start = std::chrono::steady_clock::now();
  const auto rho = as_density(load_state(path));
  rho.dims().require_witness_ready();
  const auto o = parse_witness(witness, rho.dims(), g.seed);
  const auto test = witness_test(rho, o, tolerances(g));
  HollowOptions opt;
  opt.hollow_tol = hollow_tol;
  opt.max_iter = max_iter;
  opt.seed = g.seed;
  opt.tol = tolerances(g);
  const auto cert = hollowizing_unitary(s_matrix(rho, o), opt);

  json report = echo(g, path);
  report["witness"] = o.label;
  report["hollow_tol"] = hollow_tol;
  report["max_iter"] = max_iter;
  report["test"] = to_json(test);
  report["certificate"] = to_json(cert);
  add_timing(g, report, start);
  const std::string human = "witness: " + o.label + "\ncondition holds: " + (cert.condition_holds ? "yes" : "no") +
                            " (margin " + fixed6(cert.condition_margin) + ")\nconverged: " +
                            (cert.converged ? "yes" : "no") + "\nmax |diagonal|: " + fixed6(cert.max_abs_diagonal) +
                            "\ndiagonal floor: " + fixed6(cert.diagonal_floor) + "\nunitary size: " +
                            std::to_string(cert.u.rows()) + "\niterations: " + std::to_string(cert.iterations) + "\n";
  emit(g, report, human);
  return 0;
}

// ---------------------------------------------------------------------------
// bench

int cmd_bench(const Global& g, BenchConfig cfg, const std::string& grid) {
  cfg.grid = parse_grid(grid);
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.tol = tolerances(g);
  const auto result = run_bench(cfg);
  const std::string csv = bench_csv(result);
  if (!g.out.empty()) {
    write_text(g.out, csv);
  } else {
    std::cout << csv;
  }
  const auto trend = bench_trend(result);
  std::cerr << "spearman(oracle, first violation trial) = " << fixed6(trend.rho) << ", p = " << trend.p_value
            << ", n = " << trend.n << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const Global& g, const std::string& path) {
  const auto state = load_state(path);
  const auto& dims = dims_of(state);
  const bool pure = std::holds_alternative<PureState>(state);
  const double purity = as_density(state).purity();
  json report = {{"state", path}, {"valid", true}, {"dims", dims.dims()}, {"kind", pure ? "pure" : "mixed"},
                 {"purity", purity}};
  emit(g, report,
       "valid " + std::string(pure ? "pure" : "mixed") + " state, dims " + dims.to_string() + ", purity " +
           fixed6(purity) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement witnesses from symmetric operators"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "Master seed (unsigned 64-bit)");
  app.add_option("--tol", g.tol, "Relative violation tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Output path");
  app.add_flag("--json", g.json, "Machine-readable output on stdout");
  app.add_flag("--timing", g.timing, "Record wall time in reports");
  app.add_option("--threads", g.threads, "Worker threads for detection")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a state file");
  gen_cmd->add_option("family", gen.family, "State family")->required();
  gen_cmd->add_option("--n", gen.n, "Number of parties");
  gen_cmd->add_option("--d", gen.d, "Local dimension");
  gen_cmd->add_option("--p", gen.p, "Mixing parameter");
  gen_cmd->add_option("--dims", gen.dims, "Comma-separated local dimensions");
  gen_cmd->add_option("--rank", gen.rank, "Rank of random-mixed (default full)");
  gen_cmd->add_option("--terms", gen.terms, "Terms of random-separable (default D)");

  std::string path, method = "all";
  auto* conc_cmd = app.add_subcommand("concurrence", "Pure-state concurrence");
  conc_cmd->add_option("state", path, "State file")->required();
  conc_cmd->add_option("--method", method, "all, o, i, cuts, purity or operator");

  std::size_t trials = 1000;
  bool full_stats = false;
  auto* detect_cmd = app.add_subcommand("detect", "Entanglement detection");
  detect_cmd->add_option("state", path, "State file")->required();
  detect_cmd->add_option("--trials", trials, "Number of random witnesses")->check(CLI::PositiveNumber);
  detect_cmd->add_flag("--full-stats", full_stats, "Evaluate all trials");

  auto* oracle_cmd = app.add_subcommand("oracle", "PPT and two-qubit concurrence oracles");
  oracle_cmd->add_option("state", path, "State file")->required();

  std::string witness = "semi-random";
  double hollow_tol = 1e-6;
  std::size_t max_iter = 10000;
  auto* hollow_cmd = app.add_subcommand("hollow", "Hollowizing unitary for the S matrix");
  hollow_cmd->add_option("state", path, "State file")->required();
  hollow_cmd->add_option("--witness", witness, "basis:i,i',j,j' (1-based) or semi-random[:k]");
  hollow_cmd->add_option("--hollow-tol", hollow_tol, "Target max |diagonal|")->check(CLI::PositiveNumber);
  hollow_cmd->add_option("--max-iter", max_iter, "Iteration budget");

  BenchConfig bench;
  std::string grid = "0.4:1.0:0.1";
  auto* bench_cmd = app.add_subcommand("bench", "Trials-to-detection benchmark (CSV)");
  bench_cmd->add_option("--family", bench.family, "werner, isotropic or schmidt");
  bench_cmd->add_option("--grid", grid, "a,b,c or start:stop:step");
  bench_cmd->add_option("--trials", bench.trials, "Trials per repetition")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", bench.repetitions, "Repetitions per grid point")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--dim", bench.dim, "Local dimension (isotropic, schmidt)");
  bench_cmd->add_option("--visibility", bench.visibility, "Noise visibility (schmidt)");

  auto* validate_cmd = app.add_subcommand("validate", "Check a state file");
  validate_cmd->add_option("state", path, "State file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen);
    if (*conc_cmd) return cmd_concurrence(g, path, method);
    if (*detect_cmd) return cmd_detect(g, path, trials, full_stats);
    if (*oracle_cmd) return cmd_oracle(g, path);
    if (*hollow_cmd) return cmd_hollow(g, path, witness, hollow_tol, max_iter);
    if (*bench_cmd) return cmd_bench(g, bench, grid);
    if (*validate_cmd) return cmd_validate(g, path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
