#pragma once

#include <string>

#include "clrlab/config.hpp"
#include "clrlab/data.hpp"

namespace clrlab {

Dataset make_dataset(const DatasetConfig& config);

/// Runs one experiment and writes its outputs under config.out_dir:
///   train:       metrics.csv, snapshot_<iter>.clr, summary.txt
///   range-test:  metrics.csv, range.csv, features.txt, features.csv
///   interpolate: curve.csv, verdict.txt, best.clr
///   compare:     metrics_clr.csv, metrics_step.csv, compare.txt
/// plus config.resolved and plot.gp for every kind. Returns a short
/// human-readable summary. Errors surface as clrlab::Error subclasses.
std::string run_experiment(const ExperimentConfig& config);

}  // namespace clrlab
