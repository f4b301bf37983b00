#include "clrlab/rangetest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clrlab/csv.hpp"
#include "clrlab/error.hpp"

namespace clrlab {

RangeCurve range_curve_from_metrics(const std::vector<MetricsRow>& rows, std::string source) {
    RangeCurve curve;
    curve.source = std::move(source);
    for (const auto& r : rows) {
        if (!curve.lrs.empty() && !(r.lr > curve.lrs.back())) {
            throw ConfigError("range curve learning rates are not strictly ascending at iteration " +
                              std::to_string(r.iteration));
        }
        curve.lrs.push_back(r.lr);
        curve.test_accuracies.push_back(r.test_accuracy);
        curve.train_losses.push_back(r.train_loss);
    }
    return curve;
}

RangeCurve run_range_test(const TrainConfig& config, const Dataset& data, TrainResult* trace) {
    const auto* range = std::get_if<LinearRange>(&config.schedule);
    if (!range) {
        throw ConfigError("range test needs a range schedule, got '" +
                          std::string(schedule_kind(config.schedule)) + "'");
    }
    if (range->total_iters != config.total_iters) {
        throw ConfigError("range schedule total_iters must equal the training total_iters");
    }
    if (!(range->end_lr > range->start_lr)) {
        throw ConfigError("range test needs end_lr > start_lr");
    }
    TrainResult result = train(config, data);
    std::ostringstream src;
    src.precision(17);
    src << "range(" << range->start_lr << "->" << range->end_lr << ", iters=" << config.total_iters
        << ", seed=" << config.seed << ")";
    RangeCurve curve = range_curve_from_metrics(result.metrics, src.str());
    if (trace) *trace = std::move(result);
    return curve;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
    const std::size_t n = values.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= window ? i - window : 0;
        const std::size_t hi = std::min(n - 1, i + window);
        double s = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) s += values[k];
        out[i] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<Dip> detect_dip(const RangeCurve& curve, std::size_t window, double min_depth) {
    if (window < 1) throw ConfigError("dip window must be >= 1");
    const std::size_t n = curve.size();
    std::vector<Dip> dips;
    if (n <= 2 * window) return dips;

    const std::vector<double> s = moving_average(curve.test_accuracies, window);
    const double half = min_depth / 2.0;
    double running_max = s[0];
    std::size_t i = 1;
    while (i < n) {
        if (!(s[i] < running_max - half)) {
            running_max = std::max(running_max, s[i]);
            ++i;
            continue;
        }
        // Candidate run: everything still below running_max - half.
        std::size_t j = i;
        double lowest = s[i];
        while (j < n && s[j] < running_max - half) {
            lowest = std::min(lowest, s[j]);
            ++j;
        }
        if (j == n) break;  // no recovery
        const double depth = running_max - lowest;
        if (depth >= min_depth) {
            dips.push_back({i, j - 1, curve.lrs[i], curve.lrs[j - 1], depth});
        }
        i = j;
    }
    return dips;
}

std::optional<std::pair<double, double>> detect_plateau(const RangeCurve& curve, double tolerance) {
    const std::size_t n = curve.size();
    if (n == 0) throw ConfigError("plateau detection needs a non-empty curve");
    const auto& acc = curve.test_accuracies;
    const double threshold = *std::max_element(acc.begin(), acc.end()) - tolerance;

    std::size_t best_lo = 0, best_hi = 0;
    bool found = false;
    for (std::size_t i = 0; i < n;) {
        if (!(acc[i] >= threshold)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && acc[j + 1] >= threshold) ++j;
        const double width = curve.lrs[j] - curve.lrs[i];
        if (!found || width > curve.lrs[best_hi] - curve.lrs[best_lo]) {
            best_lo = i;
            best_hi = j;
            found = true;
        }
        i = j + 1;
    }
    if (!found || best_lo == best_hi) return std::nullopt;
    return std::make_pair(curve.lrs[best_lo], curve.lrs[best_hi]);
}

std::optional<double> detect_divergence(const RangeCurve& curve) {
    if (curve.size() == 0) return std::nullopt;
    const double initial = curve.train_losses[0];
    bool improved = false;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const double loss = curve.train_losses[i];
        if (improved && (std::isnan(loss) || loss > initial)) return curve.lrs[i];
        if (loss < initial) improved = true;
    }
    return std::nullopt;
}

RangeFeatures analyze_range(const RangeCurve& curve, const RangeAnalysisParams& params) {
    return {detect_dip(curve, params.window, params.min_depth),
            detect_plateau(curve, params.plateau_tolerance), detect_divergence(curve)};
}

void write_range_csv(const std::filesystem::path& path, const RangeCurve& curve) {
    CsvWriter csv(path);
    csv.header({"lr", "test_accuracy", "train_loss"});
    for (std::size_t i = 0; i < curve.size(); ++i) {
        csv.field(curve.lrs[i]);
        csv.field(curve.test_accuracies[i]);
        csv.field(curve.train_losses[i]);
        csv.end_row();
    }
    csv.close();
}

std::string format_features(const RangeFeatures& f) {
    std::ostringstream os;
    os << "dip_count = " << f.dips.size() << '\n';
    for (std::size_t k = 0; k < f.dips.size(); ++k) {
        const auto& d = f.dips[k];
        os << "dip." << k << ".lr_start = " << format_double(d.lr_start) << '\n'
           << "dip." << k << ".lr_end = " << format_double(d.lr_end) << '\n'
           << "dip." << k << ".depth = " << format_double(d.depth) << '\n';
    }
    if (f.plateau) {
        os << "plateau.lr_low = " << format_double(f.plateau->first) << '\n'
           << "plateau.lr_high = " << format_double(f.plateau->second) << '\n'
           << "plateau.width = " << format_double(f.plateau->second - f.plateau->first) << '\n';
    } else {
        os << "plateau = none\n";
    }
    os << "divergence_lr = " << (f.divergence_lr ? format_double(*f.divergence_lr) : "none") << '\n';
    return os.str();
}

void write_features_csv(const std::filesystem::path& path, const RangeFeatures& f) {
    CsvWriter csv(path);
    csv.header({"feature", "lr_start", "lr_end", "depth"});
    for (const auto& d : f.dips) {
        csv.field("dip");
        csv.field(d.lr_start);
        csv.field(d.lr_end);
        csv.field(d.depth);
        csv.end_row();
    }
    if (f.plateau) {
        csv.field("plateau");
        csv.field(f.plateau->first);
        csv.field(f.plateau->second);
        csv.field("");
        csv.end_row();
    }
    if (f.divergence_lr) {
        csv.field("divergence");
        csv.field(*f.divergence_lr);
        csv.field(*f.divergence_lr);
        csv.field("");
        csv.end_row();
    }
    csv.close();
}

}  // namespace clrlab
