#pragma once

#include <string>
#include <vector>

#include "sdenet/model.hpp"
#include "sdenet/recover.hpp"

namespace sdenet {

enum class SweepMode { Discrete, Continuous };

const char* sweep_mode_name(SweepMode mode);

// Sweep over the cartesian product of the grid lists. Horizons are observation
// intervals T = n*eta; discrete cells take n = T/eta steps, continuous cells
// integrate to time T at inner step eta/delta_ratio.
struct ExperimentConfig {
  std::vector<int> p_grid;
  std::vector<int> k_grid;
  std::vector<double> eta_grid;
  std::vector<double> horizon_grid;
  std::vector<EnsembleKind> ensemble_grid;
  std::vector<double> m_grid;  // laplacian pull strengths; ignored otherwise

  int trials = 256;
  LambdaStrategy lambda_strategy = LambdaStrategy::oracle_grid();
  double success_threshold = 0.9;
  std::uint64_t base_seed = 1;
  std::string output_dir;
  SweepMode mode = SweepMode::Discrete;
  int delta_ratio = 1;    // continuous mode: inner step is eta/delta_ratio
  bool noiseless = false; // zero process noise; degenerate test configs only

  int cell_count() const;
  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& config);

// canned desk-scale reproductions
ExperimentConfig reproduce_config(const std::string& name, std::uint64_t seed);

}  // namespace sdenet
