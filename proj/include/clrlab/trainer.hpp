#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "clrlab/data.hpp"
#include "clrlab/nn.hpp"
#include "clrlab/rng.hpp"
#include "clrlab/schedule.hpp"

namespace clrlab {

struct TrainConfig {
    ArchitectureSpec arch;
    ScheduleSpec schedule;
    std::uint64_t total_iters = 1;
    std::size_t batch_size = 32;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::uint64_t seed = 0;
    std::uint64_t eval_every = 100;
    std::vector<std::uint64_t> snapshot_iters;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct MetricsRow {
    std::uint64_t iteration = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct TrainResult {
    NetworkWeights final_weights;
    std::vector<MetricsRow> metrics;
    std::map<std::uint64_t, NetworkWeights> snapshots;
    /// First evaluation iteration whose train loss exceeded 1e4 times the
    /// smallest train loss seen before it, or was NaN.
    std::optional<std::uint64_t> diverged_at;

    friend bool operator==(const TrainResult&, const TrainResult&) = default;
};

/// Seeded minibatch order: each epoch is a fresh permutation of the
/// training indices, consumed in batch_size chunks with the short last
/// chunk kept.
class BatchSampler {
public:
    BatchSampler(std::size_t sample_count, std::size_t batch_size, std::uint64_t seed);

    /// Indices of the next minibatch; valid until the following call.
    std::span<const std::size_t> next();

private:
    std::vector<std::size_t> order_;
    std::size_t batch_size_;
    std::size_t cursor_ = 0;
    Rng rng_;
};

/// Train loss above this multiple of the running minimum marks divergence.
inline constexpr double kDivergenceRatio = 1e4;

/// Momentum SGD with the velocity carrying the learning rate:
///   v' = momentum * v - lr * (grad + weight_decay * w)
///   w' = w + v'
std::pair<NetworkWeights, std::vector<double>> sgd_step(const NetworkWeights& w,
                                                        std::span<const double> velocity,
                                                        std::span<const double> grad, double lr,
                                                        double momentum, double weight_decay);

/// In-place form of sgd_step; same arithmetic.
void sgd_update(std::span<double> params, std::span<double> velocity,
                std::span<const double> grad, double lr, double momentum, double weight_decay);

/// Runs config.total_iters minibatch steps. Metrics rows are recorded at
/// iteration 0, every eval_every iterations and at total_iters; the row and
/// snapshot for iteration i describe the weights after i updates.
TrainResult train(const TrainConfig& config, const Dataset& data);

struct CompareReport {
    double clr_test_accuracy = 0.0;
    double step_test_accuracy = 0.0;
    std::uint64_t clr_iters = 0;
    std::uint64_t step_iters = 0;
    /// Cyclical run reached strictly higher accuracy in strictly fewer iterations.
    bool super_convergence = false;
    TrainResult clr;
    TrainResult step;
};

/// Trains both arms (concurrently) and evaluates the super-convergence
/// predicate on final test accuracy and iteration count.
CompareReport super_convergence_compare(const TrainConfig& clr_config,
                                        const TrainConfig& step_config, const Dataset& data);

/// Header `iteration,lr,train_loss,test_loss,test_accuracy`.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);

}  // namespace clrlab
