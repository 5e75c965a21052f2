#include "ljsr/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "ljsr/analysis.hpp"
#include "ljsr/fmx.hpp"
#include "ljsr/keyval.hpp"
#include "ljsr/model.hpp"
#include "ljsr/recovery.hpp"
#include "ljsr/sampling.hpp"
#include "ljsr/subspace.hpp"

namespace fs = std::filesystem;

namespace ljsr {
namespace {

// --- config helpers ----------------------------------------------------------

Config merge_file_and_overrides(const Config& overrides) {
  Config cfg;
  if (auto it = overrides.find("config"); it != overrides.end()) {
    try {
      cfg = read_keyval_file(it->second);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& [k, v] : overrides)
    if (k != "config") cfg[k] = v;
  return cfg;
}

void require_keys(const Config& cfg, const std::vector<std::string>& required) {
  for (const auto& k : required)
    if (!cfg.count(k)) throw ConfigError("missing required key '" + k + "'");
}

void reject_unknown_keys(const Config& cfg, const std::set<std::string>& allowed) {
  for (const auto& [k, _] : cfg)
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "'");
}

long parse_long(const Config& cfg, const std::string& key) {
  const std::string& s = cfg.at(key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
  }
}

int get_int(const Config& cfg, const std::string& key, std::optional<int> def = {}) {
  if (!cfg.count(key)) {
    if (def) return *def;
    throw ConfigError("missing required key '" + key + "'");
  }
  return static_cast<int>(parse_long(cfg, key));
}

std::uint64_t get_seed(const Config& cfg) {
  if (!cfg.count("seed")) return 0;
  return static_cast<std::uint64_t>(parse_long(cfg, "seed"));
}

double get_double(const Config& cfg, const std::string& key, std::optional<double> def = {}) {
  if (!cfg.count(key)) {
    if (def) return *def;
    throw ConfigError("missing required key '" + key + "'");
  }
  const std::string& s = cfg.at(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + s + "' is not a number");
  }
}

std::string get_string(const Config& cfg, const std::string& key, const std::string& def) {
  auto it = cfg.find(key);
  return it == cfg.end() ? def : it->second;
}

void check_range(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

fs::path make_out_dir(const Config& cfg) {
  require_keys(cfg, {"out"});
  fs::path out(cfg.at("out"));
  fs::create_directories(out);
  return out;
}

void write_resolved_config(const fs::path& out, const Config& cfg) {
  KeyVal kv(cfg.begin(), cfg.end());
  if (!kv.count("seed")) kv["seed"] = "0";
  write_keyval_file(out / "config", kv);
}

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> v;
  std::istringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stoi(trim(tok)));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': bad integer list entry '" + tok + "'");
    }
  }
  if (v.empty()) throw ConfigError("key '" + key + "': empty list");
  return v;
}

// --- signal sourcing ----------------------------------------------------------

const std::set<std::string> kSignalKeys = {"x", "nx", "ny", "N", "period", "k_target",
                                           "n",  "r",  "k"};

/// Builds or loads the signal from config keys: `x` (FMX path, with nx/ny
/// for frame interpretation), or phantom keys nx/ny/N/period, or random
/// instance keys n/N/r/k.
SignalMatrix source_signal(const Config& cfg, std::uint64_t seed) {
  if (cfg.count("x")) {
    SignalMatrix X;
    try {
      X.values = read_fmx_complex(cfg.at("x"));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    if (cfg.count("nx") || cfg.count("ny")) {
      const int nx = get_int(cfg, "nx"), ny = get_int(cfg, "ny");
      check_range(static_cast<Index>(nx) * ny == X.n(), "nx*ny does not match the matrix rows");
      X.frame_shape = FrameShape{nx, ny};
    }
    X.true_rank = cfg.count("r") ? get_int(cfg, "r") : numerical_rank(X.values);
    return X;
  }
  if (cfg.count("nx")) {
    PhantomSpec spec;
    spec.nx = get_int(cfg, "nx");
    spec.ny = get_int(cfg, "ny");
    spec.N = get_int(cfg, "N");
    spec.period = get_int(cfg, "period");
    spec.k_target = get_int(cfg, "k_target", 0);
    spec.seed = seed;
    check_range(spec.nx >= 4 && spec.ny >= 4, "nx, ny must be >= 4");
    check_range(spec.period >= 1, "period must be >= 1");
    check_range(spec.N >= spec.period, "N must be >= period");
    return make_dynamic_phantom(spec);
  }
  if (cfg.count("n")) {
    const int n = get_int(cfg, "n"), N = get_int(cfg, "N");
    const int r = get_int(cfg, "r"), k = get_int(cfg, "k");
    check_range(r >= 1 && r <= k && r <= N && k <= n,
                "need 1 <= r <= min(k, N) and k <= n");
    return make_random_lrjs(n, N, r, k, seed);
  }
  throw ConfigError("no signal source: give x=, nx=... (phantom) or n=... (random instance)");
}

// --- subcommands ---------------------------------------------------------------

const std::set<std::string> kPhantomKeys = {"out", "seed", "config", "x", "nx", "ny", "N",
                                            "period", "k_target", "n", "r", "k"};

void run_phantom_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kPhantomKeys);
  const fs::path out = make_out_dir(cfg);
  const std::uint64_t seed = get_seed(cfg);
  const SignalMatrix X = source_signal(cfg, seed);
  write_fmx(out / "X.fmx", X.values);

  KeyVal meta;
  meta["n"] = std::to_string(X.n());
  meta["N"] = std::to_string(X.frames());
  if (X.frame_shape) {
    meta["nx"] = std::to_string(X.frame_shape->nx);
    meta["ny"] = std::to_string(X.frame_shape->ny);
  }
  if (X.true_rank) meta["rank"] = std::to_string(*X.true_rank);
  if (X.true_support) meta["support_size"] = std::to_string(X.true_support->size());
  meta["seed"] = std::to_string(seed);
  write_keyval_file(out / "meta", meta);
  write_resolved_config(out, cfg);
  std::cout << "phantom: wrote " << (out / "X.fmx").string() << " (" << X.n() << " x "
            << X.frames() << ", rank " << (X.true_rank ? *X.true_rank : -1) << ")\n";
}

const std::set<std::string> kPipelineKeys = {
    "out", "seed", "config",
    // signal
    "x", "nx", "ny", "N", "period", "k_target", "n", "r", "k",
    // sampling
    "kind", "m_c", "common_lines", "m_v", "variable_lines", "scheme", "p", "snr_db",
    // subspace
    "r_sub", "rel_tol",
    // solver
    "solver", "lambda", "beta", "max_outer", "pcg_tol", "pcg_max", "stop_tol", "ls_tol",
    "ls_max_iter", "check_unique"};

PipelineSummary run_pipeline_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kPipelineKeys);
  const fs::path out = make_out_dir(cfg);
  const std::uint64_t seed = get_seed(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  const SignalMatrix X = source_signal(cfg, seed);
  const int n = static_cast<int>(X.n());
  const int N = static_cast<int>(X.frames());
  const int r_true = X.true_rank.value_or(numerical_rank(X.values));
  check_range(r_true >= 1, "signal has rank 0");

  const std::string kind_s = get_string(cfg, "kind", X.frame_shape ? "fourier" : "gaussian");
  OperatorGeometry geom;
  if (kind_s == "fourier") {
    if (!X.frame_shape) throw ConfigError("kind = fourier needs frame dimensions (nx, ny)");
    geom = {OperatorKind::FourierLines, n, *X.frame_shape};
  } else if (kind_s == "gaussian") {
    geom = {OperatorKind::DenseGaussian, n, FrameShape{}};
  } else {
    throw ConfigError("key 'kind': expected gaussian or fourier");
  }

  MeasurementOperator phi;
  if (geom.kind == OperatorKind::FourierLines) {
    const int lines = get_int(cfg, "common_lines", 4);
    check_range(lines >= 1, "common_lines must be >= 1");
    phi = build_common_fourier(geom.frame.nx, geom.frame.ny, lines, seed);
  } else {
    const int m_c = get_int(cfg, "m_c");
    check_range(m_c >= 1, "m_c must be >= 1");
    phi = build_common_gaussian(m_c, n, seed);
  }

  ClusterScheme scheme;
  try {
    scheme = cluster_scheme_from_string(get_string(cfg, "scheme", "consecutive"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const int p = get_int(cfg, "p", (N + r_true - 1) / r_true);
  check_range(p >= 1 && p <= N, "p must be in [1, N]");
  const int per_op = geom.kind == OperatorKind::FourierLines
                         ? get_int(cfg, "variable_lines", 5)
                         : get_int(cfg, "m_v");
  check_range(per_op >= 1, "variable rows/lines must be >= 1");
  const VariableOperatorSet vset = build_variable_set(scheme, p, N, per_op, geom, seed);

  const MeasurementSet clean = measure(X, phi, vset, 0.0, seed);
  double sigma = 0.0;
  if (cfg.count("snr_db")) sigma = sigma_for_snr_db(clean, get_double(cfg, "snr_db"));
  const MeasurementSet ms = sigma > 0.0 ? measure(X, phi, vset, sigma, seed) : clean;

  KeyVal extra;
  extra["seed"] = std::to_string(seed);
  extra["kind"] = kind_s;
  save_measurement_dir(out / "meas", ms, phi, vset, extra);

  const std::string r_sub = get_string(cfg, "r_sub", "auto");
  const double rel_tol = get_double(cfg, "rel_tol", 1e-8);
  const SubspaceEstimate est = estimate_right_subspace(
      gram(ms.Z), r_sub == "auto" ? kAutoRank : get_int(cfg, "r_sub"), rel_tol);
  save_subspace_estimate(out / "subspace", est);

  PipelineSummary summary;
  summary.noise_sigma = sigma;
  summary.subspace_rank = est.r_est;
  if (r_true <= std::min<Index>(X.n(), X.frames())) {
    const MatC V_true = truncated_svd(X, r_true).V;
    summary.projection_error = projection_error(est.Q, V_true);
  }

  const std::string solver = get_string(cfg, "solver", "admm");
  MatC P;
  if (solver == "ls") {
    const BlockSystem B = assemble_block_system(vset, est);
    const double tol = get_double(cfg, "ls_tol", 1e-10);
    const int max_iter = get_int(cfg, "ls_max_iter", 2000);
    check_range(tol > 0 && max_iter >= 1, "ls_tol/ls_max_iter out of range");
    const LeastSquaresResult res = solve_least_squares(B, ms.Y, tol, max_iter);
    if (!res.converged)
      std::cerr << "ljsr: least squares did not converge (residual "
                << format_double(res.relative_residual)
                << (res.stagnated ? ", stagnated)" : ")") << "\n";
    P = res.P;
    summary.iterations = res.iterations;
    summary.converged = res.converged;
    if (get_int(cfg, "check_unique", 0)) {
      double gap = 0.0;
      const bool unique = least_squares_minimizer_unique(B, ms.Y, tol, max_iter, seed, &gap);
      if (!unique)
        std::cerr << "ljsr: least-squares minimizer is not unique (solution gap "
                  << format_double(gap) << "); system is rank deficient\n";
      KeyVal uq;
      uq["unique"] = unique ? "1" : "0";
      uq["solution_gap"] = format_double(gap);
      write_keyval_file(out / "uniqueness", uq);
    }
  } else if (solver == "admm") {
    if (!X.frame_shape) throw ConfigError("solver = admm needs frame dimensions (nx, ny)");
    ADMMConfig acfg;
    acfg.lambda = get_double(cfg, "lambda", 1e-6);
    acfg.beta = get_double(cfg, "beta", 1.0);
    acfg.max_outer = get_int(cfg, "max_outer", 200);
    acfg.pcg_tol = get_double(cfg, "pcg_tol", 1e-8);
    acfg.pcg_max = get_int(cfg, "pcg_max", 60);
    acfg.stop_tol = get_double(cfg, "stop_tol", 1e-5);
    try {
      acfg.validate();
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
    const ADMMResult res = admm_recover(ms.Y, vset, est, *X.frame_shape, acfg, &X);
    P = res.P;
    summary.iterations = res.report.iterations_run;
    summary.converged = res.report.converged;
    write_report_csv(out / "report.csv", res.report);
  } else {
    throw ConfigError("key 'solver': expected ls or admm");
  }

  const SignalMatrix Xhat = reconstruct(P, est);
  summary.relative_error = relative_error(Xhat.values, X.values);
  write_fmx(out / "P.fmx", P);
  write_fmx(out / "Xhat.fmx", Xhat.values);

  const auto t1 = std::chrono::steady_clock::now();
  KeyVal sm;
  sm["relative_error"] = format_double(summary.relative_error);
  if (summary.projection_error >= 0.0)
    sm["projection_error"] = format_double(summary.projection_error);
  sm["subspace_rank"] = std::to_string(summary.subspace_rank);
  sm["noise_sigma"] = format_double(sigma);
  sm["solver"] = solver;
  sm["iterations"] = std::to_string(summary.iterations);
  sm["converged"] = summary.converged ? "1" : "0";
  sm["elapsed_ms"] = std::to_string(
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  write_keyval_file(out / "summary", sm);
  write_resolved_config(out, cfg);

  std::cout << "pipeline: relative_error = " << format_double(summary.relative_error);
  if (summary.projection_error >= 0.0)
    std::cout << ", projection_error = " << format_double(summary.projection_error);
  std::cout << ", solver = " << solver << ", iterations = " << summary.iterations << "\n";
  return summary;
}

const std::set<std::string> kFig2Keys = {"out", "seed", "config", "nx", "ny", "N", "period",
                                         "k_target", "trials", "m_c_list", "kind", "rel_tol"};

void run_fig2_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kFig2Keys);
  const fs::path out = make_out_dir(cfg);
  const std::uint64_t seed = get_seed(cfg);

  PhantomSpec spec;
  spec.nx = get_int(cfg, "nx", 32);
  spec.ny = get_int(cfg, "ny", 32);
  spec.N = get_int(cfg, "N", 60);
  spec.period = get_int(cfg, "period", 6);
  spec.k_target = get_int(cfg, "k_target", 0);
  spec.seed = seed;
  const SignalMatrix X = make_dynamic_phantom(spec);

  const int trials = get_int(cfg, "trials", 10);
  check_range(trials >= 1, "trials must be >= 1");
  std::vector<int> m_c = parse_int_list(get_string(cfg, "m_c_list", "1,2,3,4,5,6,7,8,10,12"),
                                        "m_c_list");
  const std::string kind_s = get_string(cfg, "kind", "gaussian");
  const OperatorKind kind = kind_s == "fourier" ? OperatorKind::FourierLines
                          : kind_s == "gaussian" ? OperatorKind::DenseGaussian
                          : throw ConfigError("key 'kind': expected gaussian or fourier");

  const auto curve =
      subspace_error_curve(X, m_c, trials, seed, kind, get_double(cfg, "rel_tol", 1e-8));
  write_curve_csv(out / "fig2.csv", curve);
  write_resolved_config(out, cfg);
  for (const auto& pt : curve)
    std::cout << "fig2: m_c = " << pt.m_c << "  mean = " << format_double(pt.mean_proj_err)
              << "  max = " << format_double(pt.max_proj_err) << "\n";
}

Config pipeline_subconfig(const Config& base, const std::set<std::string>& drop,
                          const fs::path& out) {
  Config sub;
  for (const auto& [k, v] : base)
    if (!drop.count(k) && k != "out" && k != "config") sub[k] = v;
  sub["out"] = out.string();
  return sub;
}

const std::set<std::string> kFig3Keys = [] {
  std::set<std::string> s = kPipelineKeys;
  s.erase("x");
  return s;
}();

void run_fig3_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kFig3Keys);
  const fs::path out = make_out_dir(cfg);

  Config base = cfg;
  if (!base.count("nx") && !base.count("n")) {
    base["nx"] = "32";
    base["ny"] = "32";
    base["N"] = "60";
    base["period"] = "6";
  }
  const double snr_db = get_double(cfg, "snr_db", 35.0);

  Config noiseless = pipeline_subconfig(base, {"snr_db"}, out / "noiseless");
  const PipelineSummary clean = run_pipeline_impl(noiseless);

  Config noisy = pipeline_subconfig(base, {}, out / "noisy");
  noisy["snr_db"] = format_double(snr_db);
  const PipelineSummary with_noise = run_pipeline_impl(noisy);

  std::ofstream os(out / "fig3.csv");
  if (!os) throw std::runtime_error("cannot open fig3.csv for writing");
  os << "run,snr_db,relative_error,projection_error,iterations,converged\n";
  os << "noiseless,inf," << format_double(clean.relative_error) << ','
     << format_double(clean.projection_error) << ',' << clean.iterations << ','
     << clean.converged << '\n';
  os << "noisy," << format_double(snr_db) << ',' << format_double(with_noise.relative_error)
     << ',' << format_double(with_noise.projection_error) << ',' << with_noise.iterations << ','
     << with_noise.converged << '\n';
  write_resolved_config(out, cfg);
  std::cout << "fig3: noiseless error = " << format_double(clean.relative_error)
            << ", noisy (" << snr_db << " dB) error = "
            << format_double(with_noise.relative_error) << "\n";
}

const std::set<std::string> kFig4Keys = [] {
  std::set<std::string> s = kPipelineKeys;
  s.erase("x");
  s.erase("scheme");
  return s;
}();

void run_fig4_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kFig4Keys);
  const fs::path out = make_out_dir(cfg);

  Config base = cfg;
  if (!base.count("nx") && !base.count("n")) {
    base["nx"] = "32";
    base["ny"] = "32";
    base["N"] = "60";
    base["period"] = "6";
  }

  std::ofstream os(out / "fig4.csv");
  if (!os) throw std::runtime_error("cannot open fig4.csv for writing");
  os << "scheme,relative_error,projection_error,iterations,converged\n";
  for (const char* scheme : {"consecutive", "periodic", "permuted"}) {
    Config sub = pipeline_subconfig(base, {}, out / scheme);
    sub["scheme"] = scheme;
    const PipelineSummary s = run_pipeline_impl(sub);
    os << scheme << ',' << format_double(s.relative_error) << ','
       << format_double(s.projection_error) << ',' << s.iterations << ',' << s.converged << '\n';
    std::cout << "fig4: " << scheme << " error = " << format_double(s.relative_error) << "\n";
  }
  write_resolved_config(out, cfg);
}

const std::set<std::string> kBudgetKeys = {"out", "config", "k", "r", "N"};

void run_budget_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kBudgetKeys);
  const int k = get_int(cfg, "k"), r = get_int(cfg, "r"), N = get_int(cfg, "N");
  check_range(r >= 1 && r <= k, "need 1 <= r <= k");
  check_range(N >= r, "need N >= r");
  const BudgetReport b = budget(k, r, N);
  std::cout << b.to_text();
  if (cfg.count("out")) {
    const fs::path out = make_out_dir(cfg);
    std::ofstream os(out / "budget.csv");
    os << BudgetReport::csv_header() << '\n' << b.csv_row() << '\n';
    write_resolved_config(out, cfg);
  }
}

const std::set<std::string> kSparkKeys = {"matrix", "config", "out"};

void run_spark_impl(const Config& cfg) {
  reject_unknown_keys(cfg, kSparkKeys);
  require_keys(cfg, {"matrix"});
  MatC A;
  try {
    A = read_fmx_complex(cfg.at("matrix"));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (A.cols() > 24)
    throw ConfigError("spark: matrix has " + std::to_string(A.cols()) +
                      " columns; the exhaustive oracle is limited to 24");
  const SparkCertificate c = spark_bruteforce_detail(A);
  std::cout << "spark = " << c.spark << "\n";
  if (!c.columns.empty()) {
    std::cout << "dependent columns:";
    for (int j : c.columns) std::cout << ' ' << j;
    std::cout << "\n";
  }
  if (cfg.count("out")) {
    const fs::path out = make_out_dir(cfg);
    KeyVal kv;
    kv["spark"] = std::to_string(c.spark);
    write_keyval_file(out / "spark", kv);
  }
}

}  // namespace

Config parse_cli_args(const std::vector<std::string>& args,
                      const std::vector<std::string>& positional_keys) {
  Config overrides;
  std::size_t positional = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      std::string key = a.substr(2);
      std::string value;
      if (const auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
      } else {
        if (i + 1 >= args.size()) throw ConfigError("option '--" + key + "' needs a value");
        value = args[++i];
      }
      if (key.empty()) throw ConfigError("empty option name");
      overrides[key] = value;
    } else {
      if (positional >= positional_keys.size())
        throw ConfigError("unexpected positional argument '" + a + "'");
      overrides[positional_keys[positional++]] = a;
    }
  }
  return merge_file_and_overrides(overrides);
}

void run_phantom(const Config& cfg) { run_phantom_impl(cfg); }
PipelineSummary run_pipeline(const Config& cfg) { return run_pipeline_impl(cfg); }
void run_fig2(const Config& cfg) { run_fig2_impl(cfg); }
void run_fig3(const Config& cfg) { run_fig3_impl(cfg); }
void run_fig4(const Config& cfg) { run_fig4_impl(cfg); }
void run_budget(const Config& cfg) { run_budget_impl(cfg); }
void run_spark(const Config& cfg) { run_spark_impl(cfg); }

namespace {

void print_usage(std::ostream& os) {
  os << "usage: ljsr <subcommand> [--key value]... [--config file]\n"
        "subcommands:\n"
        "  phantom   generate a test signal (phantom or random instance)\n"
        "  pipeline  measure, estimate the subspace, recover, reconstruct\n"
        "  fig2      subspace error vs. number of common measurements\n"
        "  fig3      noiseless vs. noisy pipeline comparison\n"
        "  fig4      clustering-scheme comparison (consecutive/periodic/permuted)\n"
        "  budget    measurement-budget formulas\n"
        "  spark     exhaustive spark of an FMX matrix (<= 24 columns)\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      print_usage(std::cerr);
      return 2;
    }
    const std::string& cmd = args[0];
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      print_usage(std::cout);
      return 0;
    }
    if (cmd == "phantom") run_phantom(parse_cli_args(rest));
    else if (cmd == "pipeline") run_pipeline(parse_cli_args(rest));
    else if (cmd == "fig2") run_fig2(parse_cli_args(rest));
    else if (cmd == "fig3") run_fig3(parse_cli_args(rest));
    else if (cmd == "fig4") run_fig4(parse_cli_args(rest));
    else if (cmd == "budget") run_budget(parse_cli_args(rest));
    else if (cmd == "spark") run_spark(parse_cli_args(rest, {"matrix"}));
    else {
      std::cerr << "ljsr: unknown subcommand '" << cmd << "'\n";
      print_usage(std::cerr);
      return 2;
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "ljsr: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ljsr: error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace ljsr
