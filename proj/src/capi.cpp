#include "clrlab/clrlab.h"

#include <cstring>
#include <new>
#include <string>

#include "clrlab/config.hpp"
#include "clrlab/data.hpp"
#include "clrlab/error.hpp"
#include "clrlab/experiment.hpp"
#include "clrlab/probe.hpp"
#include "clrlab/snapshot.hpp"

struct clr_config {
    clrlab::ConfigDocument doc;
};

struct clr_weights {
    clrlab::NetworkWeights w;
};

struct clr_dataset {
    clrlab::Dataset data;
};

namespace {

thread_local std::string last_error;

template <class F>
clr_status guarded(F&& f) {
    try {
        last_error.clear();
        f();
        return CLR_OK;
    } catch (const clrlab::Error& e) {
        last_error = e.what();
        return static_cast<clr_status>(static_cast<int>(e.kind()));
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return CLR_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return CLR_ERR_INTERNAL;
    }
}

clr_status null_arg(const char* what) {
    last_error = std::string("null argument: ") + what;
    return CLR_ERR_CONFIG;
}

void copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (buf && cap > 0) {
        const size_t n = std::min(cap - 1, text.size());
        std::memcpy(buf, text.data(), n);
        buf[n] = '\0';
    }
}

const clrlab::Batch& pick(const clr_dataset* d, clr_split split) {
    return split == CLR_SPLIT_TRAIN ? d->data.train : d->data.test;
}

}  // namespace

extern "C" {

const char* clr_version(void) { return "1.0.0"; }

const char* clr_status_name(clr_status status) {
    switch (status) {
        case CLR_OK: return "ok";
        case CLR_ERR_INTERNAL: return "internal error";
        case CLR_ERR_CONFIG: return "config error";
        case CLR_ERR_DATA: return "data error";
        case CLR_ERR_NUMERIC: return "numeric error";
        case CLR_ERR_IO: return "I/O error";
    }
    return "unknown status";
}

const char* clr_last_error(void) { return last_error.c_str(); }

clr_status clr_config_new(clr_config** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_config{}; });
}

clr_status clr_config_load(const char* path, clr_config** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_config{clrlab::ConfigDocument::load(path)}; });
}

clr_status clr_config_clone(const clr_config* config, clr_config** out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_config{config->doc}; });
}

clr_status clr_config_set(clr_config* config, const char* key, const char* value) {
    if (!config) return null_arg("config");
    if (!key) return null_arg("key");
    if (!value) return null_arg("value");
    return guarded([&] { config->doc.set(key, value); });
}

clr_status clr_config_resolved(const clr_config* config, char* buf, size_t cap, size_t* needed) {
    if (!config) return null_arg("config");
    return guarded([&] { copy_out(clrlab::to_ini(clrlab::resolve(config->doc)), buf, cap, needed); });
}

clr_status clr_config_lr_at(const clr_config* config, uint64_t iter, double* out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto c = clrlab::resolve(config->doc);
        if (!c.schedule) throw clrlab::ConfigError("config has no [schedule] section");
        *out = clrlab::lr_at(*c.schedule, iter);
    });
}

void clr_config_free(clr_config* config) { delete config; }

clr_status clr_experiment_run(const clr_config* config, char* summary, size_t cap, size_t* needed) {
    if (!config) return null_arg("config");
    return guarded([&] {
        const std::string text = clrlab::run_experiment(clrlab::resolve(config->doc));
        copy_out(text, summary, cap, needed);
    });
}

clr_status clr_weights_init(const size_t* layer_sizes, size_t layer_count, clr_activation activation,
                            uint64_t seed, clr_weights** out) {
    if (!layer_sizes) return null_arg("layer_sizes");
    if (!out) return null_arg("out");
    return guarded([&] {
        clrlab::ArchitectureSpec arch(std::vector<std::size_t>(layer_sizes, layer_sizes + layer_count),
                                      activation == CLR_TANH ? clrlab::Activation::Tanh
                                                             : clrlab::Activation::ReLU);
        *out = new clr_weights{clrlab::init_weights(arch, seed)};
    });
}

clr_status clr_weights_load(const char* path, clr_weights** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_weights{clrlab::load_snapshot(path)}; });
}

clr_status clr_weights_save(const clr_weights* weights, const char* path) {
    if (!weights) return null_arg("weights");
    if (!path) return null_arg("path");
    return guarded([&] { clrlab::save_snapshot(path, weights->w); });
}

size_t clr_weights_param_count(const clr_weights* weights) {
    return weights ? weights->w.size() : 0;
}

clr_status clr_weights_copy_params(const clr_weights* weights, double* out, size_t cap) {
    if (!weights) return null_arg("weights");
    if (!out) return null_arg("out");
    const auto p = weights->w.params();
    std::memcpy(out, p.data(), std::min(cap, p.size()) * sizeof(double));
    return CLR_OK;
}

clr_status clr_weights_interpolate(const clr_weights* net1, const clr_weights* net2, double alpha,
                                   clr_weights** out) {
    if (!net1 || !net2) return null_arg("net");
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_weights{clrlab::interpolate_weights(net1->w, net2->w, alpha)}; });
}

void clr_weights_free(clr_weights* weights) { delete weights; }

clr_status clr_dataset_moons(size_t n, double noise, uint64_t seed, double test_fraction,
                             clr_dataset** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new clr_dataset{clrlab::make_moons(n, noise, seed, test_fraction)}; });
}

clr_status clr_dataset_from_config(const clr_config* config, clr_dataset** out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new clr_dataset{clrlab::make_dataset(clrlab::resolve(config->doc).dataset)};
    });
}

size_t clr_dataset_size(const clr_dataset* data, clr_split split) {
    return data ? pick(data, split).size() : 0;
}

clr_status clr_dataset_write_csv(const clr_dataset* data, clr_split split, const char* path) {
    if (!data) return null_arg("data");
    if (!path) return null_arg("path");
    return guarded([&] { clrlab::write_split_csv(path, pick(data, split)); });
}

clr_status clr_evaluate(const clr_weights* weights, const clr_dataset* data, clr_split split,
                        double* loss, double* accuracy) {
    if (!weights) return null_arg("weights");
    if (!data) return null_arg("data");
    return guarded([&] {
        const auto e = clrlab::evaluate(weights->w, pick(data, split));
        if (loss) *loss = e.loss;
        if (accuracy) *accuracy = e.accuracy;
    });
}

void clr_dataset_free(clr_dataset* data) { delete data; }

}  // extern "C"
