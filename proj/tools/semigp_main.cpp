// Command-line front end: variable selection in linear models with
// Dirichlet-process residual mixtures, plus the simulation and
// Bayes-factor utilities.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "semigp/chain.hpp"
#include "semigp/evidence.hpp"
#include "semigp/io.hpp"
#include "semigp/simulate.hpp"
#include "semigp/summary.hpp"

namespace {

using namespace semigp;

// bad flag combinations and malformed inputs map to exit code 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplerFlags {
  long iters = 50000;
  long burnin = 5000;
  long thin = 1;
  double hyper_g_a = 4.0;
  double m_shape = 0.1;
  double m_rate = 1.0;
  int grid_size = 1000;
  double prior_inclusion = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--iters", iters, "MCMC iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--burnin", burnin, "Burn-in iterations")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--thin", thin, "Thinning interval")->check(CLI::PositiveNumber);
    cmd->add_option("--hyper-g-a", hyper_g_a, "Hyper-g prior parameter a (> 2)");
    cmd->add_option("--m-shape", m_shape, "DP mass prior shape a_m")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--m-rate", m_rate, "DP mass prior rate b_m")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-size", grid_size, "Griddy Gibbs grid size for g")
        ->check(CLI::Range(10, 1000000));
    cmd->add_option("--prior-inclusion", prior_inclusion,
                    "Prior inclusion probability per predictor");
  }

  SamplerConfig to_config(std::uint64_t seed) const {
    SamplerConfig cfg;
    cfg.iterations = iters;
    cfg.burn_in = burnin;
    cfg.thin = thin;
    cfg.hyper_g_a = hyper_g_a;
    cfg.m_prior_shape = m_shape;
    cfg.m_prior_rate = m_rate;
    cfg.g_grid_size = grid_size;
    cfg.prior_inclusion = prior_inclusion;
    cfg.rng_seed = seed;
    cfg.validate();
    return cfg;
  }

  nlohmann::json to_json() const {
    return {{"iters", iters},          {"burnin", burnin},
            {"thin", thin},            {"hyper_g_a", hyper_g_a},
            {"m_shape", m_shape},      {"m_rate", m_rate},
            {"grid_size", grid_size},  {"prior_inclusion", prior_inclusion}};
  }
};

std::string default_out_dir() {
  const char* env = std::getenv("SEMIGP_OUT_DIR");
  return env && *env ? env : ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<int> parse_index_list(const std::string& csv) {
  std::vector<int> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok) - 1);  // user-facing indices are 1-based
  }
  return out;
}

void write_manifest(const std::string& path, nlohmann::json manifest) {
  manifest["format_version"] = 1;
  io::write_file(path, manifest.dump(2) + "\n");
}

int cmd_simulate(int scenario, int n_single, std::vector<int> n_grid, int replicates,
                 int test_n, const std::string& baseline, std::uint64_t seed,
                 const SamplerFlags& flags, int threads, const std::string& out_dir) {
  const SamplerConfig cfg = flags.to_config(seed);
  if (n_grid.empty()) n_grid.push_back(n_single);

  sim::BaselineMode mode = sim::BaselineMode::both;
  if (baseline == "slm") mode = sim::BaselineMode::slm;
  else if (baseline == "nlm") mode = sim::BaselineMode::nlm;

  std::vector<std::pair<int, std::vector<sim::ReplicateResult>>> by_n;
  std::vector<std::string> names;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const int n = n_grid[gi];
    const sim::GeneratorSpec spec = scenario == 1 ? sim::GeneratorSpec::case_one(n, test_n)
                                                  : sim::GeneratorSpec::case_two(n, test_n);
    if (names.empty())
      for (int j = 0; j < spec.p(); ++j) names.push_back("x" + std::to_string(j + 1));
    // separate seed lane per grid point, replicate streams derived inside
    const std::uint64_t lane = seed + 0x5151000ULL * (gi + 1);
    by_n.emplace_back(n, sim::run_replicates(spec, cfg, mode, replicates, lane, threads));
    std::cerr << "n=" << n << ": " << by_n.back().second.size() << " chains done\n";
  }

  std::ostringstream reps;
  io::write_replicates_csv(reps, names, by_n);
  io::write_file(join_path(out_dir, "replicates.csv"), reps.str());

  std::ostringstream mips;
  bool headed = false;
  for (ResidualModel method : {ResidualModel::slm, ResidualModel::nlm}) {
    if (method == ResidualModel::slm && mode == sim::BaselineMode::nlm) continue;
    if (method == ResidualModel::nlm && mode == sim::BaselineMode::slm) continue;
    const auto curves = sim::mip_curves(by_n, method, names);
    std::ostringstream tmp;
    io::write_mip_curves_csv(tmp, curves, method == ResidualModel::slm ? "slm" : "nlm");
    std::string body = tmp.str();
    if (headed) body = body.substr(body.find('\n') + 1);  // keep a single header
    mips << body;
    headed = true;
  }
  io::write_file(join_path(out_dir, "mip_curves.csv"), mips.str());

  write_manifest(join_path(out_dir, "manifest.json"),
                 {{"command", "simulate"},
                  {"case", scenario},
                  {"n_grid", n_grid},
                  {"replicates", replicates},
                  {"test_n", test_n},
                  {"baseline", baseline},
                  {"seed", seed},
                  {"threads", threads},
                  {"sampler", flags.to_json()},
                  {"outputs", {"replicates.csv", "mip_curves.csv"}}});
  std::cout << "wrote " << join_path(out_dir, "replicates.csv") << "\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& response,
            bool standardize, std::uint64_t seed, const SamplerFlags& flags,
            const std::string& model, int density_points, const std::string& out_dir) {
  const SamplerConfig cfg = flags.to_config(seed);
  const RawTable table = io::read_csv_file(data_path);
  if (std::find(table.columns.begin(), table.columns.end(), response) ==
      table.columns.end())
    throw UsageError("response column '" + response + "' not present in " + data_path);
  TrimmedDataset trimmed = validate_dataset(table, response);
  std::cout << "rows kept: " << trimmed.data.n() << ", dropped (missing cells): "
            << trimmed.dropped_rows << "\n";

  Dataset data = std::move(trimmed.data);
  if (standardize) {
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      const double mean = data.x.col(j).mean();
      double sd = std::sqrt((data.x.col(j).array() - mean).square().sum() /
                            std::max<Eigen::Index>(1, data.n() - 1));
      if (sd == 0.0) sd = 1.0;
      data.x.col(j) = (data.x.col(j).array() - mean) / sd;
    }
  }

  const ResidualModel method = model == "nlm" ? ResidualModel::nlm : ResidualModel::slm;
  Chain chain(data, cfg, method, RngStream::derive(seed, 1));
  const Draws draws = chain.run();
  const PosteriorSummary summary = summarize(draws, data.names);

  std::ostringstream csv, json;
  io::write_summary_csv(csv, summary);
  io::write_summary_json(json, summary);
  io::write_file(join_path(out_dir, "summary.csv"), csv.str());
  io::write_file(join_path(out_dir, "summary.json"), json.str());

  // residual density on a grid spanning the fitted residuals
  const Eigen::VectorXd fitted_resid = data.y - data.x * summary.beta_hat;
  const double lo = fitted_resid.minCoeff(), hi = fitted_resid.maxCoeff();
  const double pad = 0.5 * (hi - lo) + 1e-6;
  Eigen::VectorXd grid(density_points);
  for (int i = 0; i < density_points; ++i)
    grid[i] = (lo - pad) + (hi - lo + 2 * pad) * i / (density_points - 1);
  const Eigen::VectorXd density = dp::residual_density_estimate(draws.sticks, grid);
  std::ostringstream dens;
  io::write_density_csv(dens, grid, density);
  io::write_file(join_path(out_dir, "residual_density.csv"), dens.str());

  write_manifest(join_path(out_dir, "manifest.json"),
                 {{"command", "fit"},
                  {"data", data_path},
                  {"response", response},
                  {"standardize", standardize},
                  {"model", model},
                  {"rows_kept", data.n()},
                  {"rows_dropped", trimmed.dropped_rows},
                  {"seed", seed},
                  {"sampler", flags.to_json()},
                  {"outputs", {"summary.csv", "summary.json", "residual_density.csv"}}});
  std::cout << "wrote " << join_path(out_dir, "summary.csv") << "\n";
  return 0;
}

int cmd_bf(const std::string& mode, const std::string& model1_csv,
           const std::string& model2_csv, double m, int n_max, std::vector<int> n_grid,
           int replicates, const std::string& data_path, const std::string& gen_beta_csv,
           double gen_sd, double phi, double hyper_g_a, std::uint64_t seed, int threads,
           const std::string& out_dir) {
  const evidence::GPrior prior{hyper_g_a};
  const std::vector<int> model1 = parse_index_list(model1_csv);
  const std::vector<int> model2 = parse_index_list(model2_csv);

  Eigen::VectorXd beta_true;
  {
    std::stringstream ss(gen_beta_csv);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) vals.push_back(std::stod(tok));
    beta_true = Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
  }

  if (mode == "exact") {
    Dataset data;
    if (!data_path.empty()) {
      const RawTable table = io::read_csv_file(data_path);
      TrimmedDataset trimmed = validate_dataset(table, table.columns.at(0));
      data = std::move(trimmed.data);
      if (data.n() > n_max) {
        Eigen::VectorXd y = data.y.head(n_max);
        Eigen::MatrixXd x = data.x.topRows(n_max);
        data = make_dataset(std::move(y), std::move(x), data.names);
      }
    } else {
      sim::GeneratorSpec spec{beta_true, sim::ResidualLaw::gaussian(0.0, gen_sd * gen_sd),
                              n_max, 0};
      RngStream rng = RngStream::derive(seed, 7);
      data = sim::generate(spec, rng).train;
    }
    const auto ev = evidence::exact_evidence(data, model1, model2, m, prior);
    std::ostringstream csv;
    csv << "n,m,log_marginal_1,log_marginal_2,log_bf_21,log_bf_21_single_cluster,"
           "log_bf_21_identity,r2_model1_identity,r2_model2_identity\n"
        << data.n() << ',' << io::format_double(m) << ','
        << io::format_double(ev.log_marginal_1) << ','
        << io::format_double(ev.log_marginal_2) << ','
        << io::format_double(ev.log_bf_21) << ','
        << io::format_double(ev.log_bf_21_single_cluster) << ','
        << io::format_double(ev.log_bf_21_identity) << ','
        << io::format_double(ev.r2_model1_identity) << ','
        << io::format_double(ev.r2_model2_identity) << "\n";
    io::write_file(join_path(out_dir, "bf_exact.csv"), csv.str());
    std::cout << "log BF21 = " << ev.log_bf_21 << "\n";
    write_manifest(join_path(out_dir, "manifest.json"),
                   {{"command", "bf"},
                    {"mode", mode},
                    {"model1", model1_csv},
                    {"model2", model2_csv},
                    {"m", m},
                    {"n", data.n()},
                    {"hyper_g_a", hyper_g_a},
                    {"seed", seed},
                    {"outputs", {"bf_exact.csv"}}});
    return 0;
  }

  // trajectory mode
  evidence::TrajectoryRequest req;
  req.mode = mode == "trajectory-exact" ? evidence::TrajectoryMode::exact
                                        : evidence::TrajectoryMode::conditional_identity;
  req.n_grid = n_grid.empty() ? std::vector<int>{4, 8, 12} : n_grid;
  req.replicates = replicates;
  req.m = m;
  req.prior = prior;
  req.beta_true = beta_true;
  req.residual = sim::ResidualLaw::gaussian(0.0, gen_sd * gen_sd);
  req.phi = phi;
  req.model1 = model1;
  req.model2 = model2;
  const auto result = evidence::bf_trajectory(req, seed, threads);

  std::ostringstream csv;
  io::write_trajectory_csv(csv, result);
  io::write_file(join_path(out_dir, "bf_trajectory.csv"), csv.str());
  for (const auto& s : result.summaries())
    std::cout << "n=" << s.n << "  log BF21 quartiles: " << s.q25 << " / " << s.median
              << " / " << s.q75 << "\n";
  if (result.r2_limit)
    std::cout << "analytic R^2 limit: " << *result.r2_limit << "\n";
  write_manifest(join_path(out_dir, "manifest.json"),
                 {{"command", "bf"},
                  {"mode", mode},
                  {"model1", model1_csv},
                  {"model2", model2_csv},
                  {"m", m},
                  {"n_grid", req.n_grid},
                  {"replicates", replicates},
                  {"phi", phi},
                  {"hyper_g_a", hyper_g_a},
                  {"seed", seed},
                  {"outputs", {"bf_trajectory.csv"}}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian variable selection with Dirichlet-process residual mixtures"};
  app.require_subcommand(1);

  // simulate
  auto* simc = app.add_subcommand("simulate", "Run simulation-study replicates");
  int scenario = 1, n_single = 100, replicates = 20, test_n = 25, threads = 0;
  std::vector<int> n_grid;
  std::string baseline = "both";
  std::uint64_t seed = 20240901;
  std::string out_dir = default_out_dir();
  SamplerFlags sim_flags;
  simc->add_option("--case", scenario, "Scenario: 1 bimodal residual, 2 Gaussian")
      ->check(CLI::Range(1, 2))
      ->required();
  simc->add_option("--n", n_single, "Training sample size")->check(CLI::Range(2, 1000000));
  simc->add_option("--n-grid", n_grid, "Comma-separated sample sizes")->delimiter(',');
  simc->add_option("--replicates", replicates, "Replicates per sample size")
      ->check(CLI::PositiveNumber);
  simc->add_option("--test-n", test_n, "Held-out test sample size");
  simc->add_option("--baseline", baseline, "slm, nlm, or both")
      ->check(CLI::IsMember({"slm", "nlm", "both"}));
  simc->add_option("--seed", seed, "Master RNG seed");
  simc->add_option("--threads", threads, "Worker threads (0 = hardware)");
  simc->add_option("--out-dir", out_dir, "Output directory");
  sim_flags.attach(simc);

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit one dataset from CSV");
  std::string data_path, response, fit_model = "slm";
  bool standardize = false;
  int density_points = 401;
  std::uint64_t fit_seed = 20240901;
  std::string fit_out = default_out_dir();
  SamplerFlags fit_flags;
  fitc->add_option("--data", data_path, "CSV file (header row)")->required();
  fitc->add_option("--response", response, "Response column name")->required();
  fitc->add_flag("--standardize", standardize, "Center and scale predictors");
  fitc->add_option("--model", fit_model, "slm or nlm")
      ->check(CLI::IsMember({"slm", "nlm"}));
  fitc->add_option("--density-points", density_points, "Residual density grid size")
      ->check(CLI::Range(16, 100000));
  fitc->add_option("--seed", fit_seed, "Master RNG seed");
  fitc->add_option("--out-dir", fit_out, "Output directory");
  fit_flags.attach(fitc);

  // bf
  auto* bfc = app.add_subcommand("bf", "Bayes factors: exact or trajectories");
  std::string bf_mode = "exact", model1_csv, model2_csv, bf_data, gen_beta = "2,0";
  double bf_m = 1.0, gen_sd = 1.0, bf_phi = 1.0, bf_a = 4.0;
  int n_max = 8, bf_reps = 50, bf_threads = 0;
  std::vector<int> bf_n_grid;
  std::uint64_t bf_seed = 20240901;
  std::string bf_out = default_out_dir();
  bfc->add_option("--mode", bf_mode, "exact, trajectory-exact, or trajectory-conditional")
      ->check(CLI::IsMember({"exact", "trajectory-exact", "trajectory-conditional"}));
  bfc->add_option("--model1", model1_csv, "Model 1 predictor indices, 1-based (e.g. 1,3)");
  bfc->add_option("--model2", model2_csv, "Model 2 predictor indices, 1-based");
  bfc->add_option("--m", bf_m, "DP mass for the allocation marginalization")
      ->check(CLI::PositiveNumber);
  bfc->add_option("--n-max", n_max, "Sample size for exact mode (<= 12)")
      ->check(CLI::Range(2, 12));
  bfc->add_option("--n-grid", bf_n_grid, "Trajectory sample sizes")->delimiter(',');
  bfc->add_option("--replicates", bf_reps, "Trajectory replicates")
      ->check(CLI::PositiveNumber);
  bfc->add_option("--data", bf_data, "Optional CSV (first column = response)");
  bfc->add_option("--gen-beta", gen_beta, "Generator coefficients, comma separated");
  bfc->add_option("--gen-residual-sd", gen_sd, "Generator residual sd (exact mode)")
      ->check(CLI::PositiveNumber);
  bfc->add_option("--phi", bf_phi, "Model precision (conditional mode)")
      ->check(CLI::PositiveNumber);
  bfc->add_option("--hyper-g-a", bf_a, "Hyper-g prior parameter a");
  bfc->add_option("--seed", bf_seed, "Master RNG seed");
  bfc->add_option("--threads", bf_threads, "Worker threads (0 = hardware)");
  bfc->add_option("--out-dir", bf_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help or the error message
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  const auto pick_threads = [](int t) {
    return t > 0 ? t : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  };

  try {
    if (simc->parsed())
      return cmd_simulate(scenario, n_single, n_grid, replicates, test_n, baseline, seed,
                          sim_flags, pick_threads(threads), out_dir);
    if (fitc->parsed())
      return cmd_fit(data_path, response, standardize, fit_seed, fit_flags, fit_model,
                     density_points, fit_out);
    if (bfc->parsed())
      return cmd_bf(bf_mode, model1_csv, model2_csv, bf_m, n_max, bf_n_grid, bf_reps,
                    bf_data, gen_beta, gen_sd, bf_phi, bf_a, bf_seed,
                    pick_threads(bf_threads), bf_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
