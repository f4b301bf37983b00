#include "clrlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "clrlab/csv.hpp"
#include "clrlab/error.hpp"
#include "clrlab/rng.hpp"

namespace clrlab {

namespace {

constexpr std::uint64_t kBatchStream = 0x6261746368ULL;  // "batch"

void check_compatible(const TrainConfig& config, const Dataset& data) {
    const auto& arch = config.arch;
    if (arch.input_dim() != data.input_dim) {
        throw ConfigError("architecture input " + std::to_string(arch.input_dim()) +
                          " does not match dataset input dimension " +
                          std::to_string(data.input_dim));
    }
    if (arch.class_count() != data.class_count) {
        throw ConfigError("architecture output " + std::to_string(arch.class_count()) +
                          " does not match dataset class count " + std::to_string(data.class_count));
    }
    if (data.train.size() == 0) throw ConfigError("dataset has an empty training split");
    if (data.test.size() == 0) throw ConfigError("dataset has an empty test split");
}

}  // namespace

void TrainConfig::validate() const {
    if (total_iters < 1) throw ConfigError("total_iters must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
        throw ConfigError("weight_decay must be finite and >= 0");
    }
    clrlab::validate(schedule);
    if (const auto* range = std::get_if<LinearRange>(&schedule)) {
        if (range->total_iters < total_iters) {
            throw ConfigError("range schedule total_iters " + std::to_string(range->total_iters) +
                              " is shorter than the training run (" + std::to_string(total_iters) +
                              ")");
        }
    }
    for (std::size_t i = 0; i < snapshot_iters.size(); ++i) {
        if (snapshot_iters[i] > total_iters) {
            throw ConfigError("snapshot iteration " + std::to_string(snapshot_iters[i]) +
                              " is beyond total_iters");
        }
        if (i > 0 && snapshot_iters[i] <= snapshot_iters[i - 1]) {
            throw ConfigError("snapshot_iters must be strictly ascending");
        }
    }
}

BatchSampler::BatchSampler(std::size_t sample_count, std::size_t batch_size, std::uint64_t seed)
    : order_(sample_count), batch_size_(batch_size), rng_(Rng::derived(seed, kBatchStream)) {
    if (sample_count == 0 || batch_size == 0) throw ConfigError("batch sampler needs samples and batch_size >= 1");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    rng_.shuffle(std::span<std::size_t>(order_));
}

std::span<const std::size_t> BatchSampler::next() {
    if (cursor_ >= order_.size()) {
        rng_.shuffle(std::span<std::size_t>(order_));
        cursor_ = 0;
    }
    const std::size_t begin = cursor_;
    cursor_ = std::min(cursor_ + batch_size_, order_.size());
    return std::span<const std::size_t>(order_).subspan(begin, cursor_ - begin);
}

void sgd_update(std::span<double> params, std::span<double> velocity,
                std::span<const double> grad, double lr, double momentum, double weight_decay) {
    if (params.size() != velocity.size() || params.size() != grad.size()) {
        throw ConfigError("sgd_update: parameter, velocity and gradient lengths differ");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = momentum * velocity[k] - lr * (grad[k] + weight_decay * params[k]);
        params[k] += velocity[k];
    }
}

std::pair<NetworkWeights, std::vector<double>> sgd_step(const NetworkWeights& w,
                                                        std::span<const double> velocity,
                                                        std::span<const double> grad, double lr,
                                                        double momentum, double weight_decay) {
    NetworkWeights next = w;
    std::vector<double> v(velocity.begin(), velocity.end());
    sgd_update(next.params(), v, grad, lr, momentum, weight_decay);
    return {std::move(next), std::move(v)};
}

TrainResult train(const TrainConfig& config, const Dataset& data) {
    config.validate();
    check_compatible(config, data);

    TrainResult result{init_weights(config.arch, config.seed), {}, {}, std::nullopt};
    NetworkWeights& w = result.final_weights;
    std::vector<double> velocity(w.size(), 0.0);

    const std::size_t dim = data.input_dim;
    BatchSampler sampler(data.train.size(), config.batch_size, config.seed);

    Batch batch;
    auto snap = config.snapshot_iters.begin();
    double min_train_loss = std::numeric_limits<double>::infinity();

    for (std::uint64_t it = 0;; ++it) {
        if (it % config.eval_every == 0 || it == config.total_iters) {
            const Evaluation tr = evaluate(w, data.train);
            const Evaluation te = evaluate(w, data.test);
            result.metrics.push_back(
                {it, lr_at(config.schedule, it), tr.loss, te.loss, te.accuracy});
            const bool blown = std::isnan(tr.loss) || tr.loss > kDivergenceRatio * min_train_loss;
            if (blown && !result.diverged_at) result.diverged_at = it;
            if (std::isfinite(tr.loss)) min_train_loss = std::min(min_train_loss, tr.loss);
        }
        if (snap != config.snapshot_iters.end() && *snap == it) {
            result.snapshots.emplace(it, w);
            ++snap;
        }
        if (it == config.total_iters) break;

        const auto idx = sampler.next();
        batch.inputs = Matrix(idx.size(), dim);
        batch.labels.resize(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto src = data.train.inputs.row(idx[r]);
            std::copy(src.begin(), src.end(), batch.inputs.row(r).begin());
            batch.labels[r] = data.train.labels[idx[r]];
        }

        const std::vector<double> grad = gradient(w, batch);
        sgd_update(w.params(), velocity, grad, lr_at(config.schedule, it), config.momentum,
                   config.weight_decay);
    }
    return result;
}

CompareReport super_convergence_compare(const TrainConfig& clr_config,
                                        const TrainConfig& step_config, const Dataset& data) {
    clr_config.validate();
    step_config.validate();
    if (!(clr_config.arch == step_config.arch)) {
        throw ConfigError("compared configurations must share one architecture");
    }
    auto clr_future = std::async(std::launch::async, [&] { return train(clr_config, data); });
    TrainResult step = train(step_config, data);
    TrainResult clr = clr_future.get();

    CompareReport report{clr.metrics.back().test_accuracy,
                         step.metrics.back().test_accuracy,
                         clr_config.total_iters,
                         step_config.total_iters,
                         false,
                         std::move(clr),
                         std::move(step)};
    report.super_convergence = report.clr_test_accuracy > report.step_test_accuracy &&
                               report.clr_iters < report.step_iters;
    return report;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows) {
    CsvWriter csv(path);
    csv.header({"iteration", "lr", "train_loss", "test_loss", "test_accuracy"});
    for (const auto& r : rows) {
        csv.field(r.iteration);
        csv.field(r.lr);
        csv.field(r.train_loss);
        csv.field(r.test_loss);
        csv.field(r.test_accuracy);
        csv.end_row();
    }
    csv.close();
}

}  // namespace clrlab
