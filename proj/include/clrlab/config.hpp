#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clrlab/error.hpp"
#include "clrlab/nn.hpp"
#include "clrlab/probe.hpp"
#include "clrlab/rangetest.hpp"
#include "clrlab/schedule.hpp"
#include "clrlab/trainer.hpp"

namespace clrlab {

enum class ConfigIssue { MissingFile, Syntax, UnknownKey, Invalid };

class ConfigParseError : public ConfigError {
public:
    ConfigParseError(ConfigIssue issue, const std::string& what) : ConfigError(what), issue_(issue) {}
    ConfigIssue issue() const noexcept { return issue_; }

private:
    ConfigIssue issue_;
};

/// Raw `section.key = value` entries from an INI-style file plus overrides.
///
/// Syntax: `[section]` headers, `key = value` lines, `#` or `;` comments on
/// their own line, blank lines ignored. Keys before any section header are
/// taken as-is (so `experiment.kind = train` also works at top level).
class ConfigDocument {
public:
    struct Entry {
        std::string value;
        std::string origin;  // "file:line" or "override"
        bool from_file = false;
    };

    static ConfigDocument parse(const std::string& text, const std::string& source_name);
    static ConfigDocument load(const std::filesystem::path& path);

    /// Sets `section.key`; rejects keys outside the known schema.
    void set(const std::string& key, const std::string& value, const std::string& origin = "override");
    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::map<std::string, Entry>& entries() const { return entries_; }
    /// Directory against which relative paths read from the file resolve.
    /// Override values resolve against the working directory.
    const std::filesystem::path& base_dir() const { return base_dir_; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

private:
    std::map<std::string, Entry> entries_;
    std::filesystem::path base_dir_;
};

enum class ExperimentKind { Train, RangeTest, Interpolate, Compare };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view name);

struct DatasetConfig {
    std::string source = "moons";  // moons | blobs | idx
    std::size_t n = 1000;
    double noise = 0.1;
    std::uint64_t seed = 1;
    double test_fraction = 0.2;
    std::vector<std::vector<double>> centers;
    double stddev = 0.5;
    std::string images, labels, test_images, test_labels;
    std::optional<std::size_t> limit;
    bool export_csv = false;

    friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct ProbeConfig {
    std::string net1, net2;
    std::string grid = "default";  // default | extended
    std::size_t points = 51;
    double barrier_tolerance = kDefaultBarrierTolerance;
    std::size_t jobs = 1;

    friend bool operator==(const ProbeConfig&, const ProbeConfig&) = default;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Train;
    std::filesystem::path out_dir = "out";
    DatasetConfig dataset;
    std::vector<std::size_t> layers;
    Activation activation = Activation::ReLU;
    std::optional<ScheduleSpec> schedule;
    std::uint64_t total_iters = 2000;
    std::size_t batch_size = 32;
    double momentum = 0.9;
    double weight_decay = 1e-4;
    std::uint64_t seed = 1;
    std::uint64_t eval_every = 100;
    std::vector<std::uint64_t> snapshot_iters;  // defaults to {total_iters}
    std::optional<ScheduleSpec> baseline_schedule;
    std::uint64_t baseline_total_iters = 0;
    ProbeConfig probe;
    RangeAnalysisParams range;

    /// TrainConfig for the primary (or cyclical) arm.
    TrainConfig train_config() const;
    /// TrainConfig for the compare baseline arm.
    TrainConfig baseline_config() const;
    std::vector<double> alpha_grid() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Builds and validates a typed config, applying defaults. Relative paths
/// are resolved against the document's base directory.
ExperimentConfig resolve(const ConfigDocument& doc);

/// Convenience: load + resolve.
ExperimentConfig parse_config(const std::filesystem::path& path);

/// Full INI echo of every applicable key, floats at 17 significant digits.
/// resolve(parse(to_ini(c))) == c.
std::string to_ini(const ExperimentConfig& config);

}  // namespace clrlab
