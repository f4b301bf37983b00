#include "clrlab/nn.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "clrlab/error.hpp"
#include "clrlab/rng.hpp"

namespace clrlab {

std::string_view to_string(Activation a) {
    return a == Activation::ReLU ? "relu" : "tanh";
}

Activation parse_activation(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "relu") return Activation::ReLU;
    if (lower == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + std::string(name) + "' (expected relu or tanh)");
}

ArchitectureSpec::ArchitectureSpec(std::vector<std::size_t> layer_sizes, Activation activation)
    : layer_sizes_(std::move(layer_sizes)), activation_(activation) {
    if (layer_sizes_.size() < 2) {
        throw ConfigError("architecture needs at least 2 layer sizes");
    }
    for (std::size_t s : layer_sizes_) {
        if (s == 0) throw ConfigError("architecture layer sizes must be >= 1");
    }
    offsets_.reserve(layer_sizes_.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
        offsets_.push_back(off);
        off += layer_sizes_[l] * layer_sizes_[l + 1] + layer_sizes_[l + 1];
    }
    offsets_.push_back(off);
    param_count_ = off;
}

std::size_t ArchitectureSpec::weight_offset(std::size_t l) const { return offsets_[l]; }

std::size_t ArchitectureSpec::bias_offset(std::size_t l) const {
    return offsets_[l] + layer_sizes_[l] * layer_sizes_[l + 1];
}

std::string ArchitectureSpec::layers_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < layer_sizes_.size(); ++i) {
        if (i) os << ',';
        os << layer_sizes_[i];
    }
    return os.str();
}

std::vector<std::size_t> parse_layer_sizes(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view tok = text.substr(pos, comma - pos);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
        while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw ConfigError("invalid layer size list '" + std::string(text) + "'");
        }
        out.push_back(value);
        pos = comma + 1;
    }
    return out;
}

NetworkWeights::NetworkWeights(ArchitectureSpec arch, std::vector<double> params)
    : arch_(std::move(arch)), params_(std::move(params)) {
    if (params_.size() != arch_.param_count()) {
        throw ConfigError("parameter vector has " + std::to_string(params_.size()) +
                          " entries, architecture " + arch_.layers_string() + " needs " +
                          std::to_string(arch_.param_count()));
    }
}

NetworkWeights::NetworkWeights(ArchitectureSpec arch)
    : arch_(std::move(arch)), params_(arch_.param_count(), 0.0) {}

bool NetworkWeights::all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

NetworkWeights init_weights(const ArchitectureSpec& arch, std::uint64_t seed) {
    NetworkWeights w(arch);
    Rng rng(seed);
    auto p = w.params();
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const std::size_t fan_in = arch.layer_sizes()[l];
        const std::size_t fan_out = arch.layer_sizes()[l + 1];
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        const std::size_t off = arch.weight_offset(l);
        for (std::size_t k = 0; k < fan_in * fan_out; ++k) {
            p[off + k] = scale * rng.normal();
        }
    }
    return w;
}

namespace {

void check_batch(const NetworkWeights& w, const Batch& batch) {
    const auto& arch = w.arch();
    if (batch.size() == 0) throw ConfigError("batch is empty");
    if (batch.inputs.rows != batch.size()) {
        throw ConfigError("batch has " + std::to_string(batch.inputs.rows) + " input rows but " +
                          std::to_string(batch.size()) + " labels");
    }
    if (batch.inputs.cols != arch.input_dim()) {
        throw ConfigError("input dimension " + std::to_string(batch.inputs.cols) +
                          " does not match architecture input " + std::to_string(arch.input_dim()));
    }
    for (std::size_t y : batch.labels) {
        if (y >= arch.class_count()) {
            throw DataError("label " + std::to_string(y) + " outside [0, " +
                            std::to_string(arch.class_count()) + ")");
        }
    }
}

// Per-sample forward state. pre[l] / post[l] hold layer l's pre-activation
// and output; post of the last layer is the logit vector.
struct Trace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
};

void forward_sample(const NetworkWeights& w, std::span<const double> x, Trace& t) {
    const auto& arch = w.arch();
    const auto p = w.params();
    const std::size_t L = arch.layer_count();
    t.pre.resize(L);
    t.post.resize(L);
    std::span<const double> in = x;
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t n_in = arch.layer_sizes()[l];
        const std::size_t n_out = arch.layer_sizes()[l + 1];
        const double* W = p.data() + arch.weight_offset(l);
        const double* b = p.data() + arch.bias_offset(l);
        auto& z = t.pre[l];
        auto& a = t.post[l];
        z.assign(n_out, 0.0);
        a.assign(n_out, 0.0);
        const bool hidden = l + 1 < L;
        for (std::size_t o = 0; o < n_out; ++o) {
            double s = b[o];
            for (std::size_t i = 0; i < n_in; ++i) s += W[o * n_in + i] * in[i];
            z[o] = s;
            if (!hidden) {
                a[o] = s;
            } else if (arch.activation() == Activation::ReLU) {
                a[o] = s > 0.0 ? s : 0.0;
            } else {
                a[o] = std::tanh(s);
            }
        }
        in = a;
    }
}

// Stable log-sum-exp cross-entropy; fills `probs` with softmax when non-null.
double cross_entropy(std::span<const double> z, std::size_t label, std::vector<double>* probs) {
    double m = z[0];
    for (double v : z) m = std::max(m, v);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    if (probs) {
        probs->resize(z.size());
        for (std::size_t c = 0; c < z.size(); ++c) (*probs)[c] = std::exp(z[c] - m) / sum;
    }
    return std::log(sum) - (z[label] - m);
}

std::size_t argmax(std::span<const double> z) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[best]) best = c;
    }
    return best;
}

}  // namespace

std::vector<double> logits(const NetworkWeights& w, std::span<const double> input) {
    if (input.size() != w.arch().input_dim()) {
        throw ConfigError("input dimension does not match architecture");
    }
    Trace t;
    forward_sample(w, input, t);
    return t.post.back();
}

double forward_loss(const NetworkWeights& w, const Batch& batch) {
    check_batch(w, batch);
    Trace t;
    double total = 0.0;
    for (std::size_t n = 0; n < batch.size(); ++n) {
        forward_sample(w, batch.inputs.row(n), t);
        total += cross_entropy(t.post.back(), batch.labels[n], nullptr);
    }
    return total / static_cast<double>(batch.size());
}

std::vector<double> gradient(const NetworkWeights& w, const Batch& batch) {
    check_batch(w, batch);
    const auto& arch = w.arch();
    const auto p = w.params();
    const std::size_t L = arch.layer_count();
    std::vector<double> grad(arch.param_count(), 0.0);
    Trace t;
    std::vector<double> delta, prev_delta, probs;

    for (std::size_t n = 0; n < batch.size(); ++n) {
        const auto x = batch.inputs.row(n);
        forward_sample(w, x, t);
        cross_entropy(t.post.back(), batch.labels[n], &probs);
        delta = probs;
        delta[batch.labels[n]] -= 1.0;

        for (std::size_t l = L; l-- > 0;) {
            const std::size_t n_in = arch.layer_sizes()[l];
            const std::size_t n_out = arch.layer_sizes()[l + 1];
            std::span<const double> in = l == 0 ? x : std::span<const double>(t.post[l - 1]);
            double* gW = grad.data() + arch.weight_offset(l);
            double* gb = grad.data() + arch.bias_offset(l);
            for (std::size_t o = 0; o < n_out; ++o) {
                for (std::size_t i = 0; i < n_in; ++i) gW[o * n_in + i] += delta[o] * in[i];
                gb[o] += delta[o];
            }
            if (l == 0) break;
            const double* W = p.data() + arch.weight_offset(l);
            prev_delta.assign(n_in, 0.0);
            for (std::size_t o = 0; o < n_out; ++o) {
                for (std::size_t i = 0; i < n_in; ++i) prev_delta[i] += W[o * n_in + i] * delta[o];
            }
            // Hidden activation derivative; ReLU uses 0 at the kink.
            const auto& z = t.pre[l - 1];
            const auto& a = t.post[l - 1];
            for (std::size_t i = 0; i < n_in; ++i) {
                if (arch.activation() == Activation::ReLU) {
                    prev_delta[i] = z[i] > 0.0 ? prev_delta[i] : 0.0;
                } else {
                    prev_delta[i] *= 1.0 - a[i] * a[i];
                }
            }
            delta.swap(prev_delta);
        }
    }
    const double count = static_cast<double>(batch.size());
    for (double& g : grad) g /= count;
    return grad;
}

Evaluation evaluate(const NetworkWeights& w, const Batch& split) {
    if (split.size() == 0) throw ConfigError("cannot evaluate on an empty split");
    check_batch(w, split);
    Trace t;
    double total = 0.0;
    std::size_t correct = 0;
    for (std::size_t n = 0; n < split.size(); ++n) {
        forward_sample(w, split.inputs.row(n), t);
        const auto& z = t.post.back();
        total += cross_entropy(z, split.labels[n], nullptr);
        if (argmax(z) == split.labels[n]) ++correct;
    }
    const double count = static_cast<double>(split.size());
    return {total / count, static_cast<double>(correct) / count};
}

}  // namespace clrlab
