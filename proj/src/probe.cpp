#include "clrlab/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "clrlab/csv.hpp"
#include "clrlab/error.hpp"

namespace clrlab {

std::string_view to_string(BasinKind k) {
    return k == BasinKind::SameBasin ? "SameBasin" : "DistinctMinima";
}

NetworkWeights interpolate_weights(const NetworkWeights& net1, const NetworkWeights& net2,
                                   double alpha) {
    if (!(net1.arch() == net2.arch())) {
        throw ConfigError("cannot interpolate between architectures " + net1.arch().layers_string() +
                          "/" + std::string(to_string(net1.arch().activation())) + " and " +
                          net2.arch().layers_string() + "/" +
                          std::string(to_string(net2.arch().activation())));
    }
    if (alpha == 1.0) return net1;
    if (alpha == 0.0) return net2;
    NetworkWeights out(net1.arch());
    const auto a = net1.params();
    const auto b = net2.params();
    auto o = out.params();
    const double beta = 1.0 - alpha;
    for (std::size_t k = 0; k < o.size(); ++k) {
        o[k] = a[k] == b[k] ? a[k] : alpha * a[k] + beta * b[k];
    }
    return out;
}

std::vector<double> default_alpha_grid(std::size_t points) {
    if (points < 3) throw ConfigError("alpha grid needs at least 3 points");
    std::vector<double> grid(points);
    const double steps = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / steps;
    return grid;
}

std::vector<double> extended_alpha_grid() {
    std::vector<double> grid(61);
    for (int i = 0; i < 61; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i - 10) / 40.0;
    return grid;
}

void validate(const InterpolationCurve& curve) {
    const auto& a = curve.alphas;
    if (a.size() < 3) throw ConfigError("interpolation curve needs at least 3 alphas");
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (!(a[i] > a[i - 1])) throw ConfigError("interpolation alphas must be strictly ascending");
    }
    if (std::find(a.begin(), a.end(), 0.0) == a.end() ||
        std::find(a.begin(), a.end(), 1.0) == a.end()) {
        throw ConfigError("interpolation alphas must include 0 and 1");
    }
    if (curve.train_losses.size() != a.size() || curve.test_losses.size() != a.size() ||
        curve.test_accuracies.size() != a.size()) {
        throw ConfigError("interpolation curve columns differ in length");
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (double loss : {curve.train_losses[i], curve.test_losses[i]}) {
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite loss at alpha " + format_double(a[i]));
            }
            if (loss < 0.0) throw ConfigError("negative loss at alpha " + format_double(a[i]));
        }
    }
}

InterpolationCurve interpolation_curve(const NetworkWeights& net1, const NetworkWeights& net2,
                                       const std::vector<double>& alphas, const Dataset& data,
                                       std::size_t jobs) {
    InterpolationCurve curve;
    curve.alphas = alphas;
    curve.train_losses.assign(alphas.size(), 0.0);
    curve.test_losses.assign(alphas.size(), 0.0);
    curve.test_accuracies.assign(alphas.size(), 0.0);
    validate(curve);
    if (!(net1.arch() == net2.arch())) {
        // Surface the mismatch before spawning workers.
        interpolate_weights(net1, net2, 0.5);
    }
    if (net1.arch().input_dim() != data.input_dim || net1.arch().class_count() != data.class_count) {
        throw ConfigError("snapshot architecture " + net1.arch().layers_string() +
                          " does not match the dataset");
    }

    auto eval_at = [&](std::size_t i) {
        const NetworkWeights w = interpolate_weights(net1, net2, alphas[i]);
        const Evaluation tr = evaluate(w, data.train);
        const Evaluation te = evaluate(w, data.test);
        curve.train_losses[i] = tr.loss;
        curve.test_losses[i] = te.loss;
        curve.test_accuracies[i] = te.accuracy;
    };

    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, alphas.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) eval_at(i);
    } else {
        // Strided assignment; every slot is written by exactly one thread.
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < alphas.size(); i += workers) eval_at(i);
            });
        }
    }

    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (std::isnan(curve.train_losses[i]) || std::isnan(curve.test_losses[i])) {
            throw NumericError("loss is NaN at alpha = " + format_double(alphas[i]));
        }
    }
    return curve;
}

std::size_t test_min_index(const InterpolationCurve& curve) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.alphas.size(); ++i) {
        const double li = curve.test_losses[i];
        const double lb = curve.test_losses[best];
        if (li < lb) {
            best = i;
        } else if (li == lb) {
            const double di = std::abs(curve.alphas[i] - 0.5);
            const double db = std::abs(curve.alphas[best] - 0.5);
            // Ascending alphas: on equal distance the earlier (smaller) one stays.
            if (di < db) best = i;
        }
    }
    return best;
}

BasinVerdict classify_pair(const InterpolationCurve& curve, double barrier_tolerance) {
    validate(curve);
    const auto& a = curve.alphas;
    const auto at = [&](double alpha) {
        return curve.train_losses[static_cast<std::size_t>(
            std::find(a.begin(), a.end(), alpha) - a.begin())];
    };
    const double endpoint_max = std::max(at(0.0), at(1.0));

    double interior_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > 0.0 && a[i] < 1.0) interior_max = std::max(interior_max, curve.train_losses[i]);
    }

    BasinVerdict v;
    // No interior grid point means there is nothing to rise above the endpoints.
    v.barrier_height = std::isfinite(interior_max) ? interior_max - endpoint_max : 0.0;
    v.kind = v.barrier_height > barrier_tolerance ? BasinKind::DistinctMinima : BasinKind::SameBasin;
    v.test_min_alpha = a[test_min_index(curve)];
    v.test_min_interior = v.test_min_alpha != 0.0 && v.test_min_alpha != 1.0;
    return v;
}

RegularizedPick regularize_by_interpolation(const NetworkWeights& net1, const NetworkWeights& net2,
                                            const Dataset& data, const std::vector<double>& alphas,
                                            std::size_t jobs) {
    InterpolationCurve curve = interpolation_curve(net1, net2, alphas, data, jobs);
    const double best = curve.alphas[test_min_index(curve)];
    return {best, interpolate_weights(net1, net2, best), std::move(curve)};
}

void write_curve_csv(const std::filesystem::path& path, const InterpolationCurve& curve) {
    CsvWriter csv(path);
    csv.header({"alpha", "train_loss", "test_loss", "test_accuracy"});
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
        csv.field(curve.alphas[i]);
        csv.field(curve.train_losses[i]);
        csv.field(curve.test_losses[i]);
        csv.field(curve.test_accuracies[i]);
        csv.end_row();
    }
    csv.close();
}

}  // namespace clrlab
