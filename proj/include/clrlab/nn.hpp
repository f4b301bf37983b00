#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clrlab {

enum class Activation { ReLU, Tanh };

std::string_view to_string(Activation a);
/// Accepts "relu" / "tanh" (case-insensitive); throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

/// Layer sizes (input, hidden..., classes) plus the hidden-layer activation.
/// The output layer is linear; softmax is applied inside the loss.
class ArchitectureSpec {
public:
    ArchitectureSpec(std::vector<std::size_t> layer_sizes, Activation activation);

    const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
    Activation activation() const { return activation_; }
    std::size_t input_dim() const { return layer_sizes_.front(); }
    std::size_t class_count() const { return layer_sizes_.back(); }
    std::size_t layer_count() const { return layer_sizes_.size() - 1; }
    std::size_t param_count() const { return param_count_; }

    /// Offset of layer `l`'s weight matrix (out x in, row-major) in the flat vector.
    std::size_t weight_offset(std::size_t l) const;
    /// Offset of layer `l`'s bias vector, directly after its weight matrix.
    std::size_t bias_offset(std::size_t l) const;

    /// "2,16,16,2"
    std::string layers_string() const;

    friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;

private:
    std::vector<std::size_t> layer_sizes_;
    Activation activation_;
    std::vector<std::size_t> offsets_;
    std::size_t param_count_ = 0;
};

/// Parses "2,16,16,2".
std::vector<std::size_t> parse_layer_sizes(std::string_view text);

/// Flat parameter vector bound to an architecture. Canonical order per
/// layer: weight matrix (out x in, row-major) then bias vector.
class NetworkWeights {
public:
    NetworkWeights(ArchitectureSpec arch, std::vector<double> params);
    /// All-zero parameters.
    explicit NetworkWeights(ArchitectureSpec arch);

    const ArchitectureSpec& arch() const { return arch_; }
    std::span<const double> params() const { return params_; }
    std::span<double> params() { return params_; }
    std::size_t size() const { return params_.size(); }

    bool all_finite() const;

    friend bool operator==(const NetworkWeights&, const NetworkWeights&) = default;

private:
    ArchitectureSpec arch_;
    std::vector<double> params_;
};

/// Dense row-major matrix of samples.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Inputs plus integer class labels. Also used for whole dataset splits.
struct Batch {
    Matrix inputs;
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }

    friend bool operator==(const Batch&, const Batch&) = default;
};

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// He-scaled Gaussian weights (std = sqrt(2 / fan_in)) and zero biases.
/// Draw order: layers in order, weight matrices row-major.
NetworkWeights init_weights(const ArchitectureSpec& arch, std::uint64_t seed);

/// Mean softmax cross-entropy over the batch.
double forward_loss(const NetworkWeights& w, const Batch& batch);

/// Gradient of forward_loss with respect to the flat parameter vector.
std::vector<double> gradient(const NetworkWeights& w, const Batch& batch);

/// Mean loss and top-1 accuracy over a full split. Argmax ties resolve to
/// the lowest class index.
Evaluation evaluate(const NetworkWeights& w, const Batch& split);

/// Logits for one input row.
std::vector<double> logits(const NetworkWeights& w, std::span<const double> input);

}  // namespace clrlab
