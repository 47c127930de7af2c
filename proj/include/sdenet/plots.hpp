#pragma once

#include <string>
#include <vector>

#include "sdenet/sweep.hpp"

namespace sdenet {

enum class PlotKind { RateVsHorizon, ComplexityVsP, RateVsEta };

const char* plot_kind_name(PlotKind kind);
PlotKind parse_plot_kind(const std::string& name);

// one csv per curve (x, rate, wilson_lo, wilson_hi, trials) plus a single
// self-contained svg per kind; output is byte-identical for identical input
std::vector<std::string> emit_plots(const ExperimentResult& result, PlotKind kind,
                                    const std::string& out_dir);

}  // namespace sdenet
