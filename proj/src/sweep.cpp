#include "sdenet/sweep.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sdenet/error.hpp"
#include "sdenet/lyapunov.hpp"
#include "sdenet/recover.hpp"
#include "sdenet/rng.hpp"
#include "sdenet/simulate.hpp"
#include "sdenet/verify.hpp"
#include "sdenet/version.hpp"

namespace sdenet {

namespace fs = std::filesystem;

std::vector<SweepCell> enumerate_cells(const ExperimentConfig& config) {
  std::vector<double> ms = config.m_grid.empty() ? std::vector<double>{0.0} : config.m_grid;
  std::vector<SweepCell> cells;
  int index = 0;
  for (int p : config.p_grid)
    for (int k : config.k_grid)
      for (double eta : config.eta_grid)
        for (EnsembleKind ensemble : config.ensemble_grid)
          for (double m : ms)
            for (double horizon : config.horizon_grid) {
              SweepCell cell;
              cell.index = index++;
              cell.p = p;
              cell.k = k;
              cell.eta = eta;
              cell.horizon = horizon;
              cell.n = std::max(1, static_cast<int>(std::llround(horizon / eta)));
              cell.ensemble = ensemble;
              cell.m = m;
              cells.push_back(cell);
            }
  return cells;
}

namespace {

constexpr int kRedrawCap = 100;

bool step_contractive(const SystemModel& model, double eta) {
  Eigen::MatrixXd B =
      Eigen::MatrixXd::Identity(model.p(), model.p()) + eta * model.A;
  return B.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - 1e-9;
}

bool usable_model(const SystemModel& model, const ExperimentConfig& config,
                  const SweepCell& cell) {
  if (config.mode == SweepMode::Discrete) return step_contractive(model, cell.eta);
  return is_stable(model.A);
}

// deterministic decay from a stationary start; the degenerate zero-noise case
Trajectory noiseless_discrete(const SystemModel& model, double eta, int n, std::uint64_t seed) {
  const int p = model.p();
  Eigen::MatrixXd root = psd_sqrt(solve_lyapunov_discrete(model, eta).Q);
  Rng rng(seed);
  Eigen::VectorXd z(p);
  for (int i = 0; i < p; ++i) z(i) = rng.next_gaussian();

  Trajectory traj;
  traj.eta = eta;
  traj.delta = eta;
  traj.seed = seed;
  traj.provenance = Provenance::DiscreteNative;
  traj.samples.resize(p, n + 1);
  traj.samples.col(0) = root * z;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(p, p) + eta * model.A;
  for (int t = 0; t < n; ++t) traj.samples.col(t + 1) = B * traj.samples.col(t);
  return traj;
}

SystemModel draw_model(const SweepCell& cell, std::uint64_t seed) {
  switch (cell.ensemble) {
    case EnsembleKind::BinaryLiteral:
      return make_random_binary_model(cell.p, cell.k, seed, BinaryVariant::BinaryLiteral);
    case EnsembleKind::StabilizedBinary:
      return make_random_binary_model(cell.p, cell.k, seed, BinaryVariant::Stabilized);
    case EnsembleKind::Laplacian:
      return make_laplacian_model(random_connected_graph(cell.p, std::max(2, cell.k), seed),
                                  cell.m);
    case EnsembleKind::Explicit:
      break;
  }
  throw Error("bad-config", "explicit ensembles cannot be drawn in a sweep");
}

}  // namespace

TrialRecord run_single_trial(const ExperimentConfig& config, const SweepCell& cell,
                             int trial_index) {
  TrialRecord record;
  record.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(cell.index),
                            static_cast<std::uint64_t>(trial_index));

  SystemModel model;
  bool drew = false;
  for (int attempt = 0; attempt < kRedrawCap; ++attempt) {
    model = draw_model(cell, derive_seed(record.seed, 1, static_cast<std::uint64_t>(attempt)));
    if (usable_model(model, config, cell)) {
      drew = true;
      break;
    }
    ++record.redraws;
  }
  if (!drew) {
    std::ostringstream what;
    what << "no usable model after " << kRedrawCap << " draws (cell " << cell.index << ", p="
         << cell.p << ", k=" << cell.k << ", eta=" << cell.eta << ", ensemble="
         << ensemble_name(cell.ensemble) << ")";
    throw Error("unstable-ensemble", what.str());
  }

  const std::uint64_t sim_seed = derive_seed(record.seed, 2);
  Trajectory traj;
  if (config.noiseless)
    traj = noiseless_discrete(model, cell.eta, cell.n, sim_seed);
  else if (config.mode == SweepMode::Discrete)
    traj = simulate_discrete(model, cell.eta, cell.n, sim_seed);
  else
    traj = simulate_continuous(model, cell.n * cell.eta, cell.eta / config.delta_ratio,
                               cell.eta, sim_seed);

  Rng row_rng(derive_seed(record.seed, 3));
  int row = static_cast<int>(row_rng.next_below(static_cast<std::uint64_t>(cell.p)));

  RowRecovery recovery =
      recover_row(traj, row, config.lambda_strategy, LossMode::Discrete, &model);
  record.success = recovery.success;
  return record;
}

namespace {

struct CsvRow {
  SweepCell cell;
  int trials = 0;
  int successes = 0;
  int redraws = 0;
  std::string bits;
};

std::string cells_csv_header() {
  return "index,p,k,eta,horizon,n,ensemble,m,trials,successes,redraws,bits";
}

std::string csv_line(const CellResult& result, const std::vector<TrialRecord>& log) {
  std::ostringstream os;
  os.precision(17);
  const SweepCell& c = result.cell;
  os << c.index << ',' << c.p << ',' << c.k << ',' << c.eta << ',' << c.horizon << ',' << c.n
     << ',' << ensemble_name(c.ensemble) << ',' << c.m << ',' << result.trials << ','
     << result.successes << ',' << result.redraws << ',';
  for (const TrialRecord& t : log) os << (t.success ? '1' : '0');
  return os.str();
}

std::map<int, CsvRow> read_cells_csv(const fs::path& path) {
  std::map<int, CsvRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != cells_csv_header())
    throw Error("bad-file", "unrecognized cells.csv header in " + path.string());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() < 11) throw Error("bad-file", "short row in " + path.string());
    CsvRow row;
    row.cell.index = std::stoi(fields[0]);
    row.cell.p = std::stoi(fields[1]);
    row.cell.k = std::stoi(fields[2]);
    row.cell.eta = std::stod(fields[3]);
    row.cell.horizon = std::stod(fields[4]);
    row.cell.n = std::stoi(fields[5]);
    bool known = false;
    for (EnsembleKind e : {EnsembleKind::BinaryLiteral, EnsembleKind::StabilizedBinary,
                           EnsembleKind::Laplacian, EnsembleKind::Explicit})
      if (fields[6] == ensemble_name(e)) {
        row.cell.ensemble = e;
        known = true;
      }
    if (!known) throw Error("bad-file", "unknown ensemble in " + path.string());
    row.cell.m = std::stod(fields[7]);
    row.trials = std::stoi(fields[8]);
    row.successes = std::stoi(fields[9]);
    row.redraws = std::stoi(fields[10]);
    row.bits = fields.size() > 11 ? fields[11] : "";
    rows[row.cell.index] = std::move(row);
  }
  return rows;
}

bool same_cell(const SweepCell& a, const SweepCell& b) {
  return a.index == b.index && a.p == b.p && a.k == b.k && a.eta == b.eta &&
         a.horizon == b.horizon && a.n == b.n && a.ensemble == b.ensemble && a.m == b.m;
}

}  // namespace

ExperimentResult run_sweep(const ExperimentConfig& config, SweepEngine engine) {
  config.validate();

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);

  const fs::path config_path = out_dir / "config.json";
  const std::string config_text = experiment_config_json(config);
  if (fs::exists(config_path)) {
    std::ifstream in(config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (buf.str() != config_text)
      throw Error("bad-config",
                  "output dir " + config.output_dir + " holds a different experiment");
  } else {
    std::ofstream(config_path) << config_text;
  }

  const fs::path csv_path = out_dir / "cells.csv";
  std::map<int, CsvRow> done = read_cells_csv(csv_path);

  std::ofstream csv;
  if (done.empty()) {
    csv.open(csv_path, std::ios::trunc);
    csv << cells_csv_header() << '\n';
  } else {
    csv.open(csv_path, std::ios::app);
  }
  if (!csv) throw Error("bad-file", "cannot write " + csv_path.string());

  ExperimentResult result;
  result.config = config;
  std::vector<SweepCell> cells = enumerate_cells(config);
  result.trial_log.resize(cells.size());

  for (const SweepCell& cell : cells) {
    CellResult cr;
    cr.cell = cell;
    auto prev = done.find(cell.index);
    if (prev != done.end()) {
      if (!same_cell(prev->second.cell, cell) || prev->second.trials != config.trials ||
          static_cast<int>(prev->second.bits.size()) != config.trials)
        throw Error("bad-file", "cells.csv row does not match the configured sweep");
      cr.trials = prev->second.trials;
      cr.successes = prev->second.successes;
      cr.redraws = prev->second.redraws;
      cr.resumed = true;
      auto& log = result.trial_log[static_cast<std::size_t>(cell.index)];
      log.resize(static_cast<std::size_t>(config.trials));
      for (int t = 0; t < config.trials; ++t) {
        log[static_cast<std::size_t>(t)].seed =
            derive_seed(config.base_seed, static_cast<std::uint64_t>(cell.index),
                        static_cast<std::uint64_t>(t));
        log[static_cast<std::size_t>(t)].success = prev->second.bits[static_cast<std::size_t>(t)] == '1';
      }
      result.cells.push_back(cr);
      continue;
    }

    auto& log = result.trial_log[static_cast<std::size_t>(cell.index)];
    log.resize(static_cast<std::size_t>(config.trials));
    if (engine == SweepEngine::Parallel) {
      std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
      for (int t = 0; t < config.trials; ++t) {
        try {
          log[static_cast<std::size_t>(t)] = run_single_trial(config, cell, t);
        } catch (...) {
#pragma omp critical
          {
            if (!failure) failure = std::current_exception();
          }
        }
      }
      if (failure) std::rethrow_exception(failure);
    } else {
      for (int t = 0; t < config.trials; ++t)
        log[static_cast<std::size_t>(t)] = run_single_trial(config, cell, t);
    }
    cr.trials = config.trials;
    for (const TrialRecord& t : log) {
      cr.successes += t.success ? 1 : 0;
      cr.redraws += t.redraws;
    }
    result.cells.push_back(cr);
    csv << csv_line(cr, log) << '\n';
    csv.flush();
  }

  result.complexity = sample_complexity(config, result.cells);
  write_manifest(result, (out_dir / "manifest.json").string());
  return result;
}

TrialRecord replay_trial(const ExperimentConfig& config, int cell_index, int trial_index) {
  std::vector<SweepCell> cells = enumerate_cells(config);
  if (cell_index < 0 || cell_index >= static_cast<int>(cells.size()))
    throw Error("bad-input", "cell index out of range");
  if (trial_index < 0 || trial_index >= config.trials)
    throw Error("bad-input", "trial index out of range");
  return run_single_trial(config, cells[static_cast<std::size_t>(cell_index)], trial_index);
}

std::vector<ComplexityPoint> sample_complexity(const ExperimentConfig& config,
                                               const std::vector<CellResult>& cells) {
  std::vector<ComplexityPoint> out;
  std::size_t combos = config.k_grid.size() * config.eta_grid.size() *
                       config.ensemble_grid.size() * std::max<std::size_t>(1, config.m_grid.size());
  if (combos != 1 || config.horizon_grid.size() < 1) return out;

  for (int p : config.p_grid) {
    std::vector<std::pair<double, double>> curve;  // horizon, rate
    for (const CellResult& cr : cells)
      if (cr.cell.p == p) curve.emplace_back(cr.cell.horizon, cr.rate());
    std::sort(curve.begin(), curve.end());

    ComplexityPoint point;
    point.p = p;
    const double theta = config.success_threshold;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i].second >= theta) {
        point.reached = true;
        if (i == 0) {
          point.horizon = curve[0].first;
        } else {
          auto [h0, r0] = curve[i - 1];
          auto [h1, r1] = curve[i];
          point.horizon = h0 + (theta - r0) * (h1 - h0) / (r1 - r0);
        }
        break;
      }
    }
    out.push_back(point);
  }
  return out;
}

void write_manifest(const ExperimentResult& result, const std::string& path) {
  nlohmann::json root;
  root["config"] = nlohmann::json::parse(experiment_config_json(result.config));
  root["versions"] = {{"sdenet", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)}};
  root["cells"] = nlohmann::json::array();
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const CellResult& cr = result.cells[c];
    nlohmann::json cell;
    cell["index"] = cr.cell.index;
    cell["p"] = cr.cell.p;
    cell["k"] = cr.cell.k;
    cell["eta"] = cr.cell.eta;
    cell["horizon"] = cr.cell.horizon;
    cell["n"] = cr.cell.n;
    cell["ensemble"] = ensemble_name(cr.cell.ensemble);
    cell["m"] = cr.cell.m;
    cell["trials"] = cr.trials;
    cell["successes"] = cr.successes;
    cell["redraws"] = cr.redraws;
    cell["resumed"] = cr.resumed;
    WilsonInterval w = cr.interval();
    cell["rate"] = cr.rate();
    cell["wilson_lo"] = w.lo;
    cell["wilson_hi"] = w.hi;
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialRecord& t : result.trial_log[c]) {
      trials.push_back({{"seed", t.seed}, {"success", t.success}});
    }
    cell["trial_log"] = std::move(trials);
    root["cells"].push_back(std::move(cell));
  }
  if (!result.complexity.empty()) {
    root["complexity"] = nlohmann::json::array();
    for (const ComplexityPoint& cp : result.complexity)
      root["complexity"].push_back(
          {{"p", cp.p}, {"horizon", cp.horizon}, {"reached", cp.reached}});
  }
  std::ofstream out(path);
  if (!out) throw Error("bad-file", "cannot write " + path);
  out << root.dump(2) << '\n';
}

}  // namespace sdenet
