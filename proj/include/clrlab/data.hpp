#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clrlab/nn.hpp"

namespace clrlab {

struct Dataset {
    Batch train;
    Batch test;
    std::size_t class_count = 0;
    std::size_t input_dim = 0;
    /// Generator name and arguments, or source file paths.
    std::string provenance;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Two interleaved half-circles. Class 0 lies on the unit circle centred at
/// the origin (upper half), class 1 on the unit circle centred at (1, 0.5)
/// (lower half). Points are generated first, then Gaussian noise is drawn in
/// point order, then the stratified split is drawn from a separate stream.
Dataset make_moons(std::size_t n, double noise, std::uint64_t seed, double test_fraction);

/// Isotropic Gaussian clusters, one class per centre. Centre c receives
/// n / k points, with the remainder going to the first centres.
Dataset make_blobs(std::size_t n, const std::vector<std::vector<double>>& centers, double stddev,
                   std::uint64_t seed, double test_fraction);

struct IdxSource {
    std::filesystem::path images;
    std::filesystem::path labels;
};

/// Raw contents of an IDX image/label file pair, pixels scaled by 1/255.
Batch read_idx_pair(const IdxSource& source, std::optional<std::size_t> limit);

/// Loads an IDX dataset. When `test` is absent the loaded training data is
/// split with `test_fraction` (stratified, seeded by `split_seed`).
/// `limit` truncates each split in file order.
Dataset load_idx(const IdxSource& train, const std::optional<IdxSource>& test,
                 std::optional<std::size_t> limit, double test_fraction = 0.2,
                 std::uint64_t split_seed = 0);

/// Writes `x0,...,xk,label` rows with 17 significant digits.
void write_split_csv(const std::filesystem::path& path, const Batch& split);

/// Helper shared by the generators: partitions `all` into stratified
/// train/test splits. Each class contributes round(test_fraction * count)
/// samples to the test split, chosen by a seeded shuffle.
void stratified_split(const Batch& all, std::size_t class_count, double test_fraction,
                      std::uint64_t seed, Batch& train, Batch& test);

}  // namespace clrlab
