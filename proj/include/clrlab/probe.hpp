#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "clrlab/data.hpp"
#include "clrlab/nn.hpp"

namespace clrlab {

struct InterpolationCurve {
    std::vector<double> alphas;
    std::vector<double> train_losses;
    std::vector<double> test_losses;
    std::vector<double> test_accuracies;
    std::string net1_id;
    std::string net2_id;

    friend bool operator==(const InterpolationCurve&, const InterpolationCurve&) = default;
};

enum class BasinKind { SameBasin, DistinctMinima };

std::string_view to_string(BasinKind k);

struct BasinVerdict {
    BasinKind kind = BasinKind::SameBasin;
    /// Max interior train loss minus the larger endpoint train loss. Negative
    /// when the interior stays below both endpoints.
    double barrier_height = 0.0;
    double test_min_alpha = 0.0;
    bool test_min_interior = false;
};

inline constexpr double kDefaultBarrierTolerance = 0.1;

/// alpha * net1 + (1 - alpha) * net2, element-wise. Entries on which the two
/// nets agree are copied unchanged, and alpha == 1 / alpha == 0 return exact
/// copies of net1 / net2.
NetworkWeights interpolate_weights(const NetworkWeights& net1, const NetworkWeights& net2,
                                   double alpha);

/// `points` evenly spaced values on [0, 1]; requires points >= 3.
std::vector<double> default_alpha_grid(std::size_t points = 51);

/// [-0.25, 1.25] in steps of 0.025 (61 points, exact 0 and 1).
std::vector<double> extended_alpha_grid();

/// Evaluates train/test loss and test accuracy at every alpha. `jobs` > 1
/// spreads the alphas across threads; output is identical either way.
/// Throws NumericError naming the alpha if any loss is NaN.
InterpolationCurve interpolation_curve(const NetworkWeights& net1, const NetworkWeights& net2,
                                       const std::vector<double>& alphas, const Dataset& data,
                                       std::size_t jobs = 1);

/// Index of the test-loss minimum; exact ties go to the alpha closest to
/// 0.5, then to the smaller alpha.
std::size_t test_min_index(const InterpolationCurve& curve);

BasinVerdict classify_pair(const InterpolationCurve& curve,
                           double barrier_tolerance = kDefaultBarrierTolerance);

struct RegularizedPick {
    double best_alpha = 0.0;
    NetworkWeights weights;
    InterpolationCurve curve;
};

/// Picks the test-loss-minimizing alpha over the grid and returns the
/// matching interpolated weights.
RegularizedPick regularize_by_interpolation(const NetworkWeights& net1, const NetworkWeights& net2,
                                            const Dataset& data, const std::vector<double>& alphas,
                                            std::size_t jobs = 1);

/// Throws ConfigError when the curve violates its invariants.
void validate(const InterpolationCurve& curve);

/// Header `alpha,train_loss,test_loss,test_accuracy`.
void write_curve_csv(const std::filesystem::path& path, const InterpolationCurve& curve);

}  // namespace clrlab
