#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdenet/config.hpp"
#include "sdenet/wilson.hpp"

namespace sdenet {

enum class SweepEngine { Serial, Parallel };

struct SweepCell {
  int index = 0;
  int p = 0;
  int k = 0;
  double eta = 0.0;
  double horizon = 0.0;  // requested T; the cell runs n = round(T/eta) steps
  int n = 0;
  EnsembleKind ensemble = EnsembleKind::StabilizedBinary;
  double m = 0.0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  bool success = false;
  int redraws = 0;  // unstable model draws discarded before this trial ran
};

struct CellResult {
  SweepCell cell;
  int trials = 0;
  int successes = 0;
  int redraws = 0;
  bool resumed = false;  // aggregates loaded from a previous run's csv

  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
  WilsonInterval interval() const { return wilson_interval(successes, trials); }
};

struct ComplexityPoint {
  int p = 0;
  double horizon = 0.0;
  bool reached = false;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;
  std::vector<std::vector<TrialRecord>> trial_log;  // parallel to cells
  std::vector<ComplexityPoint> complexity;
};

std::vector<SweepCell> enumerate_cells(const ExperimentConfig& config);

// one (cell, trial): fresh model draw with a retry cap, one trajectory, one
// uniformly chosen row, signed-support comparison
TrialRecord run_single_trial(const ExperimentConfig& config, const SweepCell& cell,
                             int trial_index);

ExperimentResult run_sweep(const ExperimentConfig& config,
                           SweepEngine engine = SweepEngine::Parallel);

TrialRecord replay_trial(const ExperimentConfig& config, int cell_index, int trial_index);

// smallest horizon whose success rate reaches the threshold, interpolated
// linearly between bracketing grid points; requires a single non-p coordinate
// combination
std::vector<ComplexityPoint> sample_complexity(const ExperimentConfig& config,
                                               const std::vector<CellResult>& cells);

void write_manifest(const ExperimentResult& result, const std::string& path);

}  // namespace sdenet
