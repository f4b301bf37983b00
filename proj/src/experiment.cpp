#include "clrlab/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clrlab/csv.hpp"
#include "clrlab/error.hpp"
#include "clrlab/probe.hpp"
#include "clrlab/rangetest.hpp"
#include "clrlab/snapshot.hpp"
#include "clrlab/trainer.hpp"

namespace fs = std::filesystem;

namespace clrlab {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

std::string metrics_plot(const std::string& csv, const std::string& title) {
    std::ostringstream gp;
    gp << "# gnuplot script; run: gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set multiplot layout 3,1 title '" << title << "'\n"
       << "set xlabel 'iteration'\n"
       << "set ylabel 'learning rate'\n"
       << "plot '" << csv << "' using 1:2 with lines\n"
       << "set ylabel 'loss'\n"
       << "set logscale y\n"
       << "plot '" << csv << "' using 1:3 with lines, '' using 1:4 with lines\n"
       << "unset logscale y\n"
       << "set ylabel 'test accuracy'\n"
       << "plot '" << csv << "' using 1:5 with lines\n"
       << "unset multiplot\n";
    return gp.str();
}

void write_snapshots(const fs::path& dir, const TrainResult& result) {
    for (const auto& [iter, w] : result.snapshots) save_snapshot(dir / snapshot_filename(iter), w);
}

void maybe_export(const ExperimentConfig& c, const Dataset& data) {
    if (!c.dataset.export_csv) return;
    write_split_csv(c.out_dir / "train_data.csv", data.train);
    write_split_csv(c.out_dir / "test_data.csv", data.test);
}

std::string run_train(const ExperimentConfig& c, const Dataset& data) {
    const TrainResult result = train(c.train_config(), data);
    write_metrics_csv(c.out_dir / "metrics.csv", result.metrics);
    write_snapshots(c.out_dir, result);
    write_text(c.out_dir / "plot.gp", metrics_plot("metrics.csv", "training"));

    const Evaluation tr = evaluate(result.final_weights, data.train);
    const Evaluation te = evaluate(result.final_weights, data.test);
    std::ostringstream s;
    s << "iterations = " << c.total_iters << '\n'
      << "final_train_loss = " << format_double(tr.loss) << '\n'
      << "final_train_accuracy = " << format_double(tr.accuracy) << '\n'
      << "final_test_loss = " << format_double(te.loss) << '\n'
      << "final_test_accuracy = " << format_double(te.accuracy) << '\n'
      << "diverged_at = " << (result.diverged_at ? std::to_string(*result.diverged_at) : "none") << '\n';
    write_text(c.out_dir / "summary.txt", s.str());
    return s.str();
}

std::string run_range(const ExperimentConfig& c, const Dataset& data) {
    TrainResult trace{NetworkWeights(ArchitectureSpec({1, 1}, Activation::ReLU)), {}, {}, {}};
    const RangeCurve curve = run_range_test(c.train_config(), data, &trace);
    const RangeFeatures features = analyze_range(curve, c.range);
    write_metrics_csv(c.out_dir / "metrics.csv", trace.metrics);
    write_range_csv(c.out_dir / "range.csv", curve);
    write_snapshots(c.out_dir, trace);
    const std::string report = format_features(features);
    write_text(c.out_dir / "features.txt", report);
    write_features_csv(c.out_dir / "features.csv", features);

    std::ostringstream gp;
    gp << "# gnuplot script; run: gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set multiplot layout 2,1 title 'learning rate range test'\n"
       << "set logscale x\n"
       << "set xlabel 'learning rate'\n"
       << "set ylabel 'test accuracy'\n"
       << "plot 'range.csv' using 1:2 with lines\n"
       << "set ylabel 'train loss'\n"
       << "set logscale y\n"
       << "plot 'range.csv' using 1:3 with lines\n"
       << "unset multiplot\n";
    write_text(c.out_dir / "plot.gp", gp.str());
    return report;
}

std::string run_interpolate(const ExperimentConfig& c, const Dataset& data) {
    const NetworkWeights net1 = load_snapshot(c.probe.net1);
    const NetworkWeights net2 = load_snapshot(c.probe.net2);
    RegularizedPick pick = regularize_by_interpolation(net1, net2, data, c.alpha_grid(), c.probe.jobs);
    pick.curve.net1_id = c.probe.net1;
    pick.curve.net2_id = c.probe.net2;
    const BasinVerdict v = classify_pair(pick.curve, c.probe.barrier_tolerance);

    write_curve_csv(c.out_dir / "curve.csv", pick.curve);
    save_snapshot(c.out_dir / "best.clr", pick.weights);

    const std::size_t best = test_min_index(pick.curve);
    std::ostringstream s;
    s << "net1 = " << c.probe.net1 << '\n'
      << "net2 = " << c.probe.net2 << '\n'
      << "verdict = " << to_string(v.kind) << '\n'
      << "barrier_height = " << format_double(v.barrier_height) << '\n'
      << "barrier_tolerance = " << format_double(c.probe.barrier_tolerance) << '\n'
      << "test_min_alpha = " << format_double(v.test_min_alpha) << '\n'
      << "test_min_interior = " << (v.test_min_interior ? "true" : "false") << '\n'
      << "best_alpha = " << format_double(pick.best_alpha) << '\n'
      << "best_test_loss = " << format_double(pick.curve.test_losses[best]) << '\n';
    write_text(c.out_dir / "verdict.txt", s.str());

    std::ostringstream gp;
    gp << "# gnuplot script; run: gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 'alpha (weight on net1)'\n"
       << "set ylabel 'loss'\n"
       << "set y2label 'test accuracy'\n"
       << "set y2tics\n"
       << "plot 'curve.csv' using 1:2 with lines, '' using 1:3 with lines, "
          "'' using 1:4 axes x1y2 with lines\n";
    write_text(c.out_dir / "plot.gp", gp.str());
    return s.str();
}

std::string run_compare(const ExperimentConfig& c, const Dataset& data) {
    const CompareReport report = super_convergence_compare(c.train_config(), c.baseline_config(), data);
    write_metrics_csv(c.out_dir / "metrics_clr.csv", report.clr.metrics);
    write_metrics_csv(c.out_dir / "metrics_step.csv", report.step.metrics);
    write_snapshots(c.out_dir, report.clr);

    std::ostringstream s;
    s << "clr_schedule = " << schedule_kind(*c.schedule) << '\n'
      << "clr_iterations = " << report.clr_iters << '\n'
      << "clr_test_accuracy = " << format_double(report.clr_test_accuracy) << '\n'
      << "baseline_schedule = " << schedule_kind(*c.baseline_schedule) << '\n'
      << "baseline_iterations = " << report.step_iters << '\n'
      << "baseline_test_accuracy = " << format_double(report.step_test_accuracy) << '\n'
      << "super_convergence = " << (report.super_convergence ? "true" : "false") << '\n';
    write_text(c.out_dir / "compare.txt", s.str());

    std::ostringstream gp;
    gp << "# gnuplot script; run: gnuplot -p plot.gp\n"
       << "set datafile separator ','\n"
       << "set xlabel 'iteration'\n"
       << "set ylabel 'test accuracy'\n"
       << "plot 'metrics_clr.csv' using 1:5 with lines title 'cyclical', "
          "'metrics_step.csv' using 1:5 with lines title 'baseline'\n";
    write_text(c.out_dir / "plot.gp", gp.str());
    return s.str();
}

}  // namespace

Dataset make_dataset(const DatasetConfig& d) {
    if (d.source == "moons") return make_moons(d.n, d.noise, d.seed, d.test_fraction);
    if (d.source == "blobs") return make_blobs(d.n, d.centers, d.stddev, d.seed, d.test_fraction);
    if (d.source == "idx") {
        std::optional<IdxSource> test;
        if (!d.test_images.empty()) test = IdxSource{d.test_images, d.test_labels};
        return load_idx({d.images, d.labels}, test, d.limit, d.test_fraction, d.seed);
    }
    throw ConfigError("unknown dataset source '" + d.source + "'");
}

std::string run_experiment(const ExperimentConfig& config) {
    prepare_out_dir(config.out_dir);
    write_text(config.out_dir / "config.resolved", to_ini(config));
    const Dataset data = make_dataset(config.dataset);
    maybe_export(config, data);
    switch (config.kind) {
        case ExperimentKind::Train: return run_train(config, data);
        case ExperimentKind::RangeTest: return run_range(config, data);
        case ExperimentKind::Interpolate: return run_interpolate(config, data);
        case ExperimentKind::Compare: return run_compare(config, data);
    }
    return {};
}

}  // namespace clrlab
