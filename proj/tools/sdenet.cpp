#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "sdenet/config.hpp"
#include "sdenet/conditions.hpp"
#include "sdenet/error.hpp"
#include "sdenet/io.hpp"
#include "sdenet/plots.hpp"
#include "sdenet/recover.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulate.hpp"
#include "sdenet/sweep.hpp"
#include "sdenet/verify.hpp"
#include "sdenet/version.hpp"

#include <json.hpp>

namespace {

using namespace sdenet;

void apply_threads(int threads) {
  if (threads <= 0) {
    const char* env = std::getenv("SDENET_THREADS");
    if (env) threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

std::ostream& open_sink(std::ofstream& file, const std::string& out) {
  if (out.empty() || out == "-") return std::cout;
  file.open(out);
  if (!file) throw Error("bad-file", "cannot write " + out);
  return file;
}

SystemModel model_from_options(const std::string& model_file, const std::string& ensemble,
                               int p, double k, double m, std::uint64_t seed) {
  if (!model_file.empty()) return make_explicit_model(read_matrix(model_file));
  if (ensemble.empty())
    throw Error("bad-input", "either --model or --ensemble is required");
  if (ensemble == ensemble_name(EnsembleKind::BinaryLiteral))
    return make_random_binary_model(p, k, seed, BinaryVariant::BinaryLiteral);
  if (ensemble == ensemble_name(EnsembleKind::StabilizedBinary))
    return make_random_binary_model(p, k, seed, BinaryVariant::Stabilized);
  if (ensemble == ensemble_name(EnsembleKind::Laplacian))
    return make_laplacian_model(
        random_connected_graph(p, std::max(2, static_cast<int>(k)), seed), m);
  throw Error("bad-input", "unknown ensemble " + ensemble);
}

void print_cells(const ExperimentResult& result) {
  for (const CellResult& c : result.cells) {
    WilsonInterval w = c.interval();
    std::printf("cell %2d  p=%-3d k=%-2d eta=%-5g T=%-6g rate=%.3f [%.3f, %.3f]  %d/%d%s%s\n",
                c.cell.index, c.cell.p, c.cell.k, c.cell.eta, c.cell.horizon, c.rate(), w.lo,
                w.hi, c.successes, c.trials, c.redraws ? " redraws " : "",
                c.redraws ? std::to_string(c.redraws).c_str() : "");
  }
  for (const ComplexityPoint& cp : result.complexity) {
    if (cp.reached)
      std::printf("complexity  p=%-3d horizon=%.2f\n", cp.p, cp.horizon);
    else
      std::printf("complexity  p=%-3d not reached\n", cp.p);
  }
}

std::vector<std::string> emit_result_plots(const ExperimentResult& result) {
  std::vector<std::string> files;
  auto append = [&files](std::vector<std::string> more) {
    files.insert(files.end(), more.begin(), more.end());
  };
  if (result.config.horizon_grid.size() > 1)
    append(emit_plots(result, PlotKind::RateVsHorizon, result.config.output_dir));
  if (!result.complexity.empty())
    append(emit_plots(result, PlotKind::ComplexityVsP, result.config.output_dir));
  if (result.config.eta_grid.size() > 1)
    append(emit_plots(result, PlotKind::RateVsEta, result.config.output_dir));
  return files;
}

// for eta sweeps: how far the coarsest sampling sits from the finest
void report_eta_spread(const ExperimentResult& result, nlohmann::json& summary) {
  if (result.config.eta_grid.size() < 2) return;
  const CellResult* coarse = nullptr;
  const CellResult* fine = nullptr;
  for (const CellResult& c : result.cells) {
    if (!coarse || c.cell.eta > coarse->cell.eta) coarse = &c;
    if (!fine || c.cell.eta < fine->cell.eta) fine = &c;
  }
  double diff = std::abs(coarse->rate() - fine->rate());
  std::printf("rate spread: |rate(eta=%g) - rate(eta=%g)| = %.4f\n", coarse->cell.eta,
              fine->cell.eta, diff);
  summary["eta_rate_spread"] = {{"eta_coarse", coarse->cell.eta},
                                {"eta_fine", fine->cell.eta},
                                {"rate_coarse", coarse->rate()},
                                {"rate_fine", fine->rate()},
                                {"difference", diff}};
}

void write_summary(const ExperimentResult& result, const std::vector<std::string>& plot_files,
                   nlohmann::json extra) {
  nlohmann::json summary = std::move(extra);
  summary["cells"] = nlohmann::json::array();
  for (const CellResult& c : result.cells) {
    WilsonInterval w = c.interval();
    summary["cells"].push_back({{"index", c.cell.index},
                                {"p", c.cell.p},
                                {"eta", c.cell.eta},
                                {"horizon", c.cell.horizon},
                                {"rate", c.rate()},
                                {"wilson_lo", w.lo},
                                {"wilson_hi", w.hi},
                                {"trials", c.trials}});
  }
  if (!result.complexity.empty()) {
    summary["complexity"] = nlohmann::json::array();
    for (const ComplexityPoint& cp : result.complexity)
      summary["complexity"].push_back(
          {{"p", cp.p}, {"horizon", cp.horizon}, {"reached", cp.reached}});
  }
  summary["plots"] = plot_files;
  std::ofstream out(std::filesystem::path(result.config.output_dir) / "summary.json");
  out << summary.dump(2) << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"network inference for sparse linear stochastic dynamics"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (env SDENET_THREADS)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a trajectory file");
  std::string sim_model, sim_ensemble, sim_out, sim_model_out, sim_mode = "discrete";
  int sim_p = 8, sim_n = 100, sim_ratio = 16;
  double sim_k = 2.0, sim_m = 1.0, sim_eta = 0.1, sim_T = 10.0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--model", sim_model, "matrix file holding the dynamics matrix");
  sim->add_option("--ensemble", sim_ensemble, "draw the model: binary-literal, stabilized-binary, laplacian");
  sim->add_option("--p", sim_p, "dimension for drawn models");
  sim->add_option("--k", sim_k, "expected connectivity / max degree");
  sim->add_option("--m", sim_m, "laplacian pull strength");
  sim->add_option("--mode", sim_mode, "discrete or continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  sim->add_option("--eta", sim_eta, "sampling step");
  sim->add_option("--n", sim_n, "discrete mode: number of steps");
  sim->add_option("--horizon", sim_T, "continuous mode: observation interval");
  sim->add_option("--delta-ratio", sim_ratio, "continuous mode: inner step is eta/ratio");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "trajectory file to write")->required();
  sim->add_option("--model-out", sim_model_out, "also save the dynamics matrix here");
  sim->callback([&] {
    apply_threads(threads);
    SystemModel model = model_from_options(sim_model, sim_ensemble, sim_p, sim_k, sim_m,
                                           derive_seed(sim_seed, 1));
    Trajectory traj = sim_mode == "discrete"
                          ? simulate_discrete(model, sim_eta, sim_n, derive_seed(sim_seed, 2))
                          : simulate_continuous(model, sim_T, sim_eta / sim_ratio, sim_eta,
                                                derive_seed(sim_seed, 2));
    write_trajectory(sim_out, traj);
    if (!sim_model_out.empty()) write_matrix(sim_model_out, model.A);
    std::printf("wrote %s (p=%d, n=%d, eta=%g)\n", sim_out.c_str(), traj.p(), traj.n(),
                traj.eta);
  });

  // estimate
  auto* est = app.add_subcommand("estimate", "recover the network from a trajectory");
  std::string est_traj, est_truth, est_out, est_format = "csv", est_loss = "discrete";
  std::string est_strategy = "fixed", est_rule = "discrete";
  double est_lambda = 0.0, est_fp = 0.1;
  est->add_option("--trajectory", est_traj, "trajectory file")->required();
  est->add_option("--loss", est_loss, "discrete or continuous")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  est->add_option("--strategy", est_strategy, "fixed, rule, or oracle-grid")
      ->check(CLI::IsMember({"fixed", "rule", "oracle-grid"}));
  est->add_option("--lambda", est_lambda, "penalty for the fixed strategy");
  est->add_option("--rule", est_rule, "guarantee rule: continuous, laplacian, discrete")
      ->check(CLI::IsMember({"continuous", "laplacian", "discrete"}));
  est->add_option("--failure-prob", est_fp, "failure probability for the rule strategy");
  est->add_option("--truth", est_truth, "matrix file with the true dynamics");
  est->add_option("--format", est_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  est->add_option("--out", est_out, "report file (stdout if omitted)");
  est->callback([&] {
    apply_threads(threads);
    Trajectory traj = read_trajectory(est_traj);
    std::optional<SystemModel> truth;
    if (!est_truth.empty()) truth = make_explicit_model(read_matrix(est_truth));
    LambdaStrategy strategy = LambdaStrategy::fixed(est_lambda);
    if (est_strategy == "rule")
      strategy = LambdaStrategy::from_rule(parse_guarantee_rule(est_rule), est_fp);
    else if (est_strategy == "oracle-grid")
      strategy = LambdaStrategy::oracle_grid();
    LossMode mode = est_loss == "discrete" ? LossMode::Discrete : LossMode::Continuous;
    NetworkEstimate net =
        recover_network(traj, strategy, mode, truth ? &*truth : nullptr);
    std::ofstream file;
    write_network_report(open_sink(file, est_out), net, parse_report_format(est_format));
  });

  // conditions
  auto* cond = app.add_subcommand("conditions", "recoverability report for a model");
  std::string cond_model, cond_out, cond_format = "csv";
  int cond_row = 0;
  double cond_fp = 0.1;
  double cond_eta = -1.0;
  cond->add_option("--model", cond_model, "matrix file holding the dynamics matrix")->required();
  cond->add_option("--row", cond_row, "row to analyze");
  cond->add_option("--eta", cond_eta, "include step-level quantities for this eta");
  cond->add_option("--failure-prob", cond_fp, "failure probability in the horizon bounds");
  cond->add_option("--format", cond_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cond->add_option("--out", cond_out, "report file (stdout if omitted)");
  cond->callback([&] {
    apply_threads(threads);
    SystemModel model = make_explicit_model(read_matrix(cond_model));
    std::optional<double> eta;
    if (cond_eta > 0.0) eta = cond_eta;
    ConditionReport report = compute_condition_report(model, cond_row, eta, cond_fp);
    std::ofstream file;
    write_condition_report(open_sink(file, cond_out), report, parse_report_format(cond_format));
  });

  // sweep
  auto* swp = app.add_subcommand("sweep", "run a configured experiment sweep");
  std::string swp_config, swp_out;
  bool swp_serial = false;
  swp->add_option("--config", swp_config, "json experiment config")->required();
  swp->add_option("--out", swp_out, "override the configured output dir");
  swp->add_flag("--serial", swp_serial, "single-threaded reference engine");
  swp->callback([&] {
    apply_threads(threads);
    ExperimentConfig cfg = load_experiment_config(swp_config);
    if (!swp_out.empty()) cfg.output_dir = swp_out;
    ExperimentResult result =
        run_sweep(cfg, swp_serial ? SweepEngine::Serial : SweepEngine::Parallel);
    print_cells(result);
    std::vector<std::string> plots = emit_result_plots(result);
    nlohmann::json extra;
    report_eta_spread(result, extra);
    write_summary(result, plots, std::move(extra));
    std::printf("results in %s\n", cfg.output_dir.c_str());
  });

  // verify-appendix
  auto* ver = app.add_subcommand("verify-appendix", "numerical audits of the analysis lemmas");
  std::uint64_t ver_seed = 20240817;
  bool ver_quick = false;
  ver->add_option("--seed", ver_seed, "audit seed");
  ver->add_flag("--quick", ver_quick, "reduced draw counts");
  ver->callback([&] {
    apply_threads(threads);
    SuiteResult suite = run_appendix_verification(ver_seed, ver_quick);
    for (const SuiteLine& line : suite.lines)
      std::printf("[%s] %-24s %s\n", line.ok ? "ok" : "FAIL", line.name.c_str(),
                  line.detail.c_str());
    if (!suite.all_ok) throw Error("verification-failed", "one or more audits failed");
    std::printf("all audits passed\n");
  });

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "run a canned desk-scale experiment");
  std::string rep_name, rep_out;
  std::uint64_t rep_seed = 20240817;
  int rep_trials = 0;
  bool rep_serial = false;
  rep->add_option("name", rep_name, "fig1-left, fig1-right, or fig2")->required();
  rep->add_option("--seed", rep_seed, "base seed");
  rep->add_option("--trials", rep_trials, "override trials per cell");
  rep->add_option("--out", rep_out, "override output dir");
  rep->add_flag("--serial", rep_serial, "single-threaded reference engine");
  rep->callback([&] {
    apply_threads(threads);
    ExperimentConfig cfg = reproduce_config(rep_name, rep_seed);
    if (rep_trials > 0) cfg.trials = rep_trials;
    if (!rep_out.empty()) cfg.output_dir = rep_out;
    ExperimentResult result =
        run_sweep(cfg, rep_serial ? SweepEngine::Serial : SweepEngine::Parallel);
    print_cells(result);
    std::vector<std::string> plots = emit_result_plots(result);
    nlohmann::json extra;
    report_eta_spread(result, extra);
    write_summary(result, plots, std::move(extra));
    std::printf("results in %s\n", cfg.output_dir.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sdenet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::string(e.code()) == "verification-failed" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
