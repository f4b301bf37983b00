#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clrlab/trainer.hpp"

namespace clrlab {

struct RangeCurve {
    std::vector<double> lrs;
    std::vector<double> test_accuracies;
    std::vector<double> train_losses;
    std::string source;

    std::size_t size() const { return lrs.size(); }

    friend bool operator==(const RangeCurve&, const RangeCurve&) = default;
};

struct Dip {
    std::size_t first = 0;  // curve indices, inclusive
    std::size_t last = 0;
    double lr_start = 0.0;
    double lr_end = 0.0;
    double depth = 0.0;
};

struct RangeFeatures {
    std::vector<Dip> dips;
    std::optional<std::pair<double, double>> plateau;
    std::optional<double> divergence_lr;
};

struct RangeAnalysisParams {
    std::size_t window = 5;
    double min_depth = 0.05;
    double plateau_tolerance = 0.05;

    friend bool operator==(const RangeAnalysisParams&, const RangeAnalysisParams&) = default;
};

/// Trains with a LinearRange schedule and returns the metric rows keyed by
/// learning rate. The full training trace is written to `trace` if given.
RangeCurve run_range_test(const TrainConfig& config, const Dataset& data,
                          TrainResult* trace = nullptr);

/// Builds a curve from metric rows; rates must be strictly ascending.
RangeCurve range_curve_from_metrics(const std::vector<MetricsRow>& rows, std::string source);

/// Centred moving average over [i - window, i + window], truncated at the ends.
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

/// A dip is a maximal run of the smoothed accuracy lying more than
/// min_depth / 2 below the running maximum before the run, that reaches a
/// shortfall of at least min_depth somewhere, and that later recovers to
/// within min_depth / 2 of that maximum. A run that never recovers is
/// divergence, not a dip. depth is the largest shortfall in the run.
std::vector<Dip> detect_dip(const RangeCurve& curve, std::size_t window, double min_depth);

/// Widest contiguous lr interval with accuracy >= max accuracy - tolerance.
/// Equal widths resolve to the lowest rates. None if only one point qualifies.
std::optional<std::pair<double, double>> detect_plateau(const RangeCurve& curve, double tolerance);

/// Learning rate where train loss first exceeds its initial value (or turns
/// NaN) after having dropped below it.
std::optional<double> detect_divergence(const RangeCurve& curve);

RangeFeatures analyze_range(const RangeCurve& curve, const RangeAnalysisParams& params = {});

/// Header `lr,test_accuracy,train_loss`.
void write_range_csv(const std::filesystem::path& path, const RangeCurve& curve);

/// Plain `key = value` block.
std::string format_features(const RangeFeatures& f);

/// Header `feature,lr_start,lr_end,depth`; one row per dip, plateau and divergence.
void write_features_csv(const std::filesystem::path& path, const RangeFeatures& f);

}  // namespace clrlab
