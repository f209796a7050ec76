#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "srr/analysis.hpp"
#include "srr/csv.hpp"
#include "srr/error.hpp"
#include "srr/market_data.hpp"
#include "srr/pca.hpp"
#include "srr/pipeline.hpp"
#include "srr/solver.hpp"
#include "srr/synthetic.hpp"

namespace srr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SrrArgs {
  std::string prices;
  std::string out;
  std::string singular_out;
  std::string manifest;
  std::string layout = "auto";
  std::string align = "intersect";
  std::size_t window = 2500;
  std::string method = "direct";
  double epsilon = 0.005;
  double delta_nu = 1e-5;
  double delta_sigma = 1e-3;
  std::string svd_mode;
  unsigned threads = 0;
};

struct SimulateArgs {
  std::size_t n = 2;
  std::size_t steps = 3000;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string params;
  std::string truth;
  std::string manifest;
  std::string layout = "wide";
};

struct StatsArgs {
  std::string input;
  std::vector<std::string> columns{"nu_hat"};
  std::string out;
};

struct SelectArgs {
  std::string universe;
  std::size_t n = 28;
  std::string out;
};

struct MinRateArgs {
  std::string prices;
  std::string layout = "auto";
  std::size_t window = 0;
  std::size_t k0 = 2;
  double tol_sigma = 1e-6;
  double tol_r = 1e-6;
  std::string stop = "breaching";
  std::string out;
};

CsvLayout parse_layout(const std::string& text) {
  if (text == "long") return CsvLayout::kLong;
  if (text == "wide") return CsvLayout::kWide;
  return CsvLayout::kAuto;
}

AlignPolicy parse_align(const std::string& text) {
  return text == "strict" ? AlignPolicy::kErrorOnGap : AlignPolicy::kIntersectDates;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

// Writes to `path` when given, to `out` otherwise.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty()) {
    fn(out);
    return;
  }
  auto f = open_output(path);
  fn(f);
}

const char* divisor_name(VarianceDivisor d) {
  return d == VarianceDivisor::kSampleMinusOne ? "M-1" : "M";
}

json config_json(const PipelineConfig& cfg) {
  return json{
      {"window", cfg.window_m},
      {"method", std::string(to_string(cfg.method))},
      {"epsilon", cfg.epsilon},
      {"delta_nu", cfg.delta_nu},
      {"delta_sigma", cfg.delta_sigma},
      {"svd_mode", std::string(to_string(cfg.effective_svd_mode()))},
      {"pca_divisor", divisor_name(cfg.pca_divisor)},
      {"regression_divisor", divisor_name(cfg.regression_divisor)},
  };
}

json digest_json(const fs::path& path) {
  return json{{"path", path.string()},
              {"digest", {{"algorithm", kDigestAlgorithm}, {"value", file_digest(path)}}}};
}

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(row);
  }
  return rows;
}

int cmd_srr(const SrrArgs& a) {
  PipelineConfig cfg;
  cfg.window_m = a.window;
  cfg.method = parse_calibration_method(a.method);
  cfg.epsilon = a.epsilon;
  cfg.delta_nu = a.delta_nu;
  cfg.delta_sigma = a.delta_sigma;
  if (!a.svd_mode.empty()) cfg.svd_mode = parse_svd_mode(a.svd_mode);
  cfg.threads = a.threads;

  const fs::path out_path(a.out);
  const fs::path singular_path =
      a.singular_out.empty() ? sibling(out_path, ".singular.csv") : fs::path(a.singular_out);
  const fs::path manifest_path =
      a.manifest.empty() ? sibling(out_path, ".manifest.json") : fs::path(a.manifest);

  ReturnMatrix returns;
  json input;
  try {
    const auto series = load_prices(a.prices, parse_layout(a.layout));
    returns = log_returns(series, parse_align(a.align));
    input = digest_json(a.prices);
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(e.what());
  }

  const auto rows = run_srr_series(returns, cfg);

  {
    auto f = open_output(out_path);
    write_srr_csv(f, rows);
  }
  {
    auto f = open_output(singular_path);
    write_singular_values_csv(f, rows);
  }
  json config = config_json(cfg);
  config["layout"] = a.layout;
  config["align"] = a.align;
  write_manifest(manifest_path,
                 json{{"tool", "srr"},
                      {"version", kToolVersion},
                      {"command", "srr"},
                      {"config", config},
                      {"input", input},
                      {"seed", nullptr},
                      {"rows", rows.size()},
                      {"outputs", {{"series", out_path.string()},
                                   {"singular_values", singular_path.string()}}}});
  return kExitOk;
}

GbmSpec default_spec(std::size_t n, std::uint64_t seed) {
  // Parameters drawn from a stream decorrelated from the path stream.
  NormalStream params(seed ^ 0x9E3779B97F4A7C15ULL);
  GbmSpec spec;
  const auto N = static_cast<Eigen::Index>(n);
  spec.mu.resize(N);
  spec.sigma.resize(N, N - 1);
  spec.s0 = Eigen::VectorXd::Constant(N, 100.0);
  const double scale = 0.01 / std::sqrt(static_cast<double>(std::max<std::size_t>(n - 1, 1)));
  for (Eigen::Index j = 0; j < N; ++j) {
    spec.mu(j) = 4e-4 + 2e-4 * params.next();
    for (Eigen::Index k = 0; k < N - 1; ++k) spec.sigma(j, k) = scale * params.next();
  }
  return spec;
}

GbmSpec spec_from_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parameter file " + path.string());
  json j;
  try {
    in >> j;
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto sigma = j.at("sigma").get<std::vector<std::vector<double>>>();
    GbmSpec spec;
    const auto n = static_cast<Eigen::Index>(mu.size());
    spec.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), n);
    spec.sigma.resize(n, std::max<Eigen::Index>(n - 1, 0));
    if (static_cast<Eigen::Index>(sigma.size()) != n) throw DataError("sigma needs N rows");
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(sigma[static_cast<std::size_t>(r)].size()) != n - 1) {
        throw DataError("sigma rows need N-1 entries");
      }
      for (Eigen::Index c = 0; c < n - 1; ++c) {
        spec.sigma(r, c) = sigma[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
    }
    if (j.contains("s0")) {
      const auto s0 = j.at("s0").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(s0.size()) != n) throw DataError("s0 needs N entries");
      spec.s0 = Eigen::Map<const Eigen::VectorXd>(s0.data(), n);
    } else {
      spec.s0 = Eigen::VectorXd::Constant(n, 100.0);
    }
    return spec;
  } catch (const json::exception& e) {
    throw DataError("bad parameter file " + path.string() + ": " + e.what());
  }
}

int cmd_simulate(const SimulateArgs& a, bool n_given) {
  GbmSpec spec;
  json input = nullptr;
  if (!a.params.empty()) {
    spec = spec_from_json(a.params);
    if (n_given && static_cast<std::size_t>(spec.mu.size()) != a.n) {
      throw InvalidArgument("--n disagrees with the parameter file");
    }
    input = digest_json(a.params);
  } else {
    if (a.n < 2) throw InvalidArgument("--n must be at least 2");
    spec = default_spec(a.n, *a.seed);
  }
  spec.steps = a.steps;
  spec.seed = *a.seed;

  const auto market = simulate_gbm(spec);
  const fs::path out_path(a.out);
  save_prices(out_path, market.prices, parse_layout(a.layout));

  json outputs{{"prices", out_path.string()}};
  if (!a.truth.empty()) {
    json truth{{"mu", vector_json(spec.mu)},
               {"sigma", matrix_json(spec.sigma)},
               {"s0", vector_json(spec.s0)},
               {"log_drift", vector_json(log_drift(spec))}};
    try {
      const auto sol = solve_lu(build_phi(spec.sigma, log_drift(spec)));
      truth["deflator"] = {{"nu", sol.nu},
                           {"sigma_pi", vector_json(sol.sigma_pi_vec)},
                           {"sigma_pi_total", sol.sigma_pi_total},
                           {"kappa", sol.kappa}};
    } catch (const SingularMatrixError&) {
      truth["deflator"] = nullptr;
    }
    write_manifest(a.truth, truth);
    outputs["truth"] = a.truth;
  }

  const fs::path manifest_path =
      a.manifest.empty() ? sibling(out_path, ".manifest.json") : fs::path(a.manifest);
  write_manifest(manifest_path,
                 json{{"tool", "srr"},
                      {"version", kToolVersion},
                      {"command", "simulate"},
                      {"config", {{"n", spec.mu.size()}, {"steps", a.steps}, {"layout", a.layout}}},
                      {"input", input},
                      {"seed", *a.seed},
                      {"outputs", outputs}});
  return kExitOk;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  std::vector<std::pair<std::string, QuantileSummary>> summaries;
  for (const auto& column : a.columns) {
    std::ifstream in(a.input);
    if (!in) throw DataError("cannot open " + a.input);
    summaries.emplace_back(column, quantiles(csv::read_column(in, column)));
  }
  emit(a.out, out, [&](std::ostream& o) {
    o << "column,count,min,p25,p50,p75,max,mean\n";
    for (const auto& [name, s] : summaries) {
      o << name << ',' << s.count << ',' << csv::format_double(s.min) << ','
        << csv::format_double(s.p25) << ',' << csv::format_double(s.p50) << ','
        << csv::format_double(s.p75) << ',' << csv::format_double(s.max) << ','
        << csv::format_double(s.mean) << '\n';
    }
  });
  return kExitOk;
}

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const auto universe = load_universe(a.universe);
  const auto ids = select_assets(universe, a.n);
  emit(a.out, out, [&](std::ostream& o) {
    o << "asset_id\n";
    for (const auto& id : ids) o << id << '\n';
  });
  return kExitOk;
}

int cmd_min_rate(const MinRateArgs& a, std::ostream& out) {
  ReturnMatrix returns;
  try {
    returns = log_returns(load_prices(a.prices, parse_layout(a.layout)));
  } catch (const DataError&) {
    throw;
  } catch (const Error& e) {
    throw DataError(e.what());
  }
  if (a.window > 0) returns = window(returns, returns.rows() - 1, a.window);

  const CenteredPanel centered = center_columns(returns.values);
  const PcaResult p = pca(centered);
  MinRateOptions options;
  options.k0 = a.k0;
  options.tol_sigma = a.tol_sigma;
  options.tol_r = a.tol_r;
  options.stop = a.stop == "previous" ? StopRule::kReturnPrevious : StopRule::kReturnBreaching;
  const MinRateResult result = min_rate(p, centered.means, options);
  const FullUniverseResult full =
      compare_full_universe(result, centered.means, sample_covariance(returns.values));

  json history = json::array();
  for (const auto& h : result.history) history.push_back({{"j", h.j}, {"r", h.r}, {"sigma", h.sigma}});
  json doc{{"j_star", result.j_star},
           {"r", result.r},
           {"sigma_r", result.sigma_r},
           {"weights", vector_json(result.weights)},
           {"stop_reason", std::string(to_string(result.reason))},
           {"history", history},
           {"full_universe",
            {{"r", full.r_n},
             {"sigma_r", full.sigma_r_n},
             {"weights", vector_json(full.weights)},
             {"sigma_ratio", full.sigma_ratio}}}};
  emit(a.out, out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shadow riskless rate estimation from historical prices"};
  app.require_subcommand(1);

  SrrArgs srr_args;
  auto* srr = app.add_subcommand("srr", "Moving-window SRR and deflator volatility series");
  srr->add_option("--prices", srr_args.prices, "Price CSV (long or wide layout)")->required();
  srr->add_option("--out", srr_args.out, "Output series CSV")->required();
  srr->add_option("--window", srr_args.window, "Estimation window in trading days")
      ->capture_default_str();
  srr->add_option("--method", srr_args.method, "Volatility calibration")
      ->check(CLI::IsMember({"direct", "regression"}))
      ->capture_default_str();
  srr->add_option("--epsilon", srr_args.epsilon, "Singular-value band")->capture_default_str();
  srr->add_option("--delta-nu", srr_args.delta_nu, "Secondary band on nu")->capture_default_str();
  srr->add_option("--delta-sigma", srr_args.delta_sigma, "Secondary band on sigma_pi_k")
      ->capture_default_str();
  srr->add_option("--svd-mode", srr_args.svd_mode,
                  "Clamp only d_min (min) or every singular value (all); "
                  "defaults to min for direct, all for regression")
      ->check(CLI::IsMember({"min", "all"}));
  srr->add_option("--layout", srr_args.layout)->check(CLI::IsMember({"auto", "long", "wide"}));
  srr->add_option("--align", srr_args.align, "Date alignment across assets")
      ->check(CLI::IsMember({"intersect", "strict"}));
  srr->add_option("--singular-out", srr_args.singular_out, "Singular-value dump CSV");
  srr->add_option("--manifest", srr_args.manifest, "Run manifest JSON");
  srr->add_option("--threads", srr_args.threads, "Calibration threads (0 = all cores)");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Write a correlated-GBM price file");
  auto* n_opt = sim->add_option("--n", sim_args.n, "Number of assets")->capture_default_str();
  sim->add_option("--steps", sim_args.steps, "Number of price observations")->capture_default_str();
  sim->add_option("--seed", sim_args.seed, "Generator seed")->required();
  sim->add_option("--out", sim_args.out, "Output price CSV")->required();
  sim->add_option("--params", sim_args.params, "JSON with mu, sigma and optional s0");
  sim->add_option("--truth", sim_args.truth, "Write true parameters and deflator here");
  sim->add_option("--manifest", sim_args.manifest, "Run manifest JSON");
  sim->add_option("--layout", sim_args.layout)->check(CLI::IsMember({"long", "wide"}));

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Quantile summary of pipeline output columns");
  stats->add_option("--input", stats_args.input, "Pipeline CSV")->required();
  stats->add_option("--column", stats_args.columns, "Column name (repeatable)")
      ->capture_default_str();
  stats->add_option("--out", stats_args.out, "Write the summary here instead of stdout");

  SelectArgs select_args;
  auto* select = app.add_subcommand("select", "Capitalization-percentile asset selection");
  select->add_option("--universe", select_args.universe, "asset_id,market_cap CSV")->required();
  select->add_option("--n", select_args.n, "Number of assets to pick")->capture_default_str();
  select->add_option("--out", select_args.out, "Write ids here instead of stdout");

  MinRateArgs mr_args;
  auto* mr = app.add_subcommand("min-rate", "Minimum-variance rate over PCA composite assets");
  mr->add_option("--prices", mr_args.prices, "Price CSV")->required();
  mr->add_option("--layout", mr_args.layout)->check(CLI::IsMember({"auto", "long", "wide"}));
  mr->add_option("--window", mr_args.window, "Use only the last N returns (0 = all)");
  mr->add_option("--k0", mr_args.k0, "Starting number of composites")->capture_default_str();
  mr->add_option("--tol-sigma", mr_args.tol_sigma)->capture_default_str();
  mr->add_option("--tol-r", mr_args.tol_r)->capture_default_str();
  mr->add_option("--stop", mr_args.stop, "Return the breaching or the previous portfolio")
      ->check(CLI::IsMember({"breaching", "previous"}));
  mr->add_option("--out", mr_args.out, "Write JSON here instead of stdout");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*srr) return cmd_srr(srr_args);
    if (*sim) return cmd_simulate(sim_args, n_opt->count() > 0);
    if (*stats) return cmd_stats(stats_args, out);
    if (*select) return cmd_select(select_args, out);
    if (*mr) return cmd_min_rate(mr_args, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIngest;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPipeline;
  }
  return kExitPipeline;
}

}  // namespace srr::cli
