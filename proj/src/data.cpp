#include "clrlab/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "clrlab/csv.hpp"
#include "clrlab/error.hpp"
#include "clrlab/rng.hpp"

namespace clrlab {

namespace {

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;  // "split"

void check_fraction(double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test_fraction must lie strictly between 0 and 1");
    }
}

void append_row(Batch& b, std::span<const double> x, std::size_t label) {
    b.inputs.data.insert(b.inputs.data.end(), x.begin(), x.end());
    b.inputs.rows += 1;
    b.labels.push_back(label);
}

}  // namespace

void stratified_split(const Batch& all, std::size_t class_count, double test_fraction,
                      std::uint64_t seed, Batch& train, Batch& test) {
    check_fraction(test_fraction);
    const std::size_t dim = all.inputs.cols;
    train = Batch{Matrix(0, dim), {}};
    test = Batch{Matrix(0, dim), {}};

    std::vector<std::vector<std::size_t>> by_class(class_count);
    for (std::size_t i = 0; i < all.size(); ++i) by_class[all.labels[i]].push_back(i);

    std::vector<char> in_test(all.size(), 0);
    Rng rng = Rng::derived(seed, kSplitStream);
    for (auto& members : by_class) {
        const auto take = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(members.size())));
        rng.shuffle(std::span<std::size_t>(members));
        for (std::size_t k = 0; k < take && k < members.size(); ++k) in_test[members[k]] = 1;
    }
    // Keep original order within each split.
    for (std::size_t i = 0; i < all.size(); ++i) {
        append_row(in_test[i] ? test : train, all.inputs.row(i), all.labels[i]);
    }
}

Dataset make_moons(std::size_t n, double noise, std::uint64_t seed, double test_fraction) {
    if (n < 4) throw ConfigError("make_moons needs n >= 4");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be finite and >= 0");
    check_fraction(test_fraction);

    const std::size_t n_outer = n / 2;
    const std::size_t n_inner = n - n_outer;
    Batch all{Matrix(n, 2), std::vector<std::size_t>(n)};

    auto place = [&](std::size_t count, std::size_t first, std::size_t label) {
        for (std::size_t k = 0; k < count; ++k) {
            const double t = count == 1 ? 0.0
                                        : std::numbers::pi * static_cast<double>(k) /
                                              static_cast<double>(count - 1);
            auto row = all.inputs.row(first + k);
            if (label == 0) {
                row[0] = std::cos(t);
                row[1] = std::sin(t);
            } else {
                row[0] = 1.0 - std::cos(t);
                row[1] = 0.5 - std::sin(t);
            }
            all.labels[first + k] = label;
        }
    };
    place(n_outer, 0, 0);
    place(n_inner, n_outer, 1);

    if (noise > 0.0) {
        Rng rng(seed);
        for (double& v : all.inputs.data) v += noise * rng.normal();
    }

    Dataset ds;
    ds.class_count = 2;
    ds.input_dim = 2;
    std::ostringstream prov;
    prov.precision(17);
    prov << "moons(n=" << n << ",noise=" << noise << ",seed=" << seed
         << ",test_fraction=" << test_fraction << ")";
    ds.provenance = prov.str();
    stratified_split(all, 2, test_fraction, seed, ds.train, ds.test);
    return ds;
}

Dataset make_blobs(std::size_t n, const std::vector<std::vector<double>>& centers, double stddev,
                   std::uint64_t seed, double test_fraction) {
    if (centers.empty()) throw ConfigError("make_blobs needs at least one centre");
    const std::size_t k = centers.size();
    const std::size_t dim = centers.front().size();
    if (dim == 0) throw ConfigError("blob centres must have at least one coordinate");
    for (const auto& c : centers) {
        if (c.size() != dim) throw ConfigError("blob centres have differing dimensions");
    }
    if (n < 2 * k) throw ConfigError("make_blobs needs n >= 2 points per centre");
    if (!(stddev >= 0.0) || !std::isfinite(stddev)) throw ConfigError("std must be finite and >= 0");
    check_fraction(test_fraction);

    Batch all{Matrix(n, dim), std::vector<std::size_t>(n)};
    std::size_t row = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t count = n / k + (c < n % k ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i, ++row) {
            auto r = all.inputs.row(row);
            for (std::size_t d = 0; d < dim; ++d) r[d] = centers[c][d];
            all.labels[row] = c;
        }
    }
    if (stddev > 0.0) {
        Rng rng(seed);
        for (double& v : all.inputs.data) v += stddev * rng.normal();
    }

    Dataset ds;
    ds.class_count = k;
    ds.input_dim = dim;
    std::ostringstream prov;
    prov.precision(17);
    prov << "blobs(n=" << n << ",centers=" << k << ",std=" << stddev << ",seed=" << seed
         << ",test_fraction=" << test_fraction << ")";
    ds.provenance = prov.str();
    stratified_split(all, k, test_fraction, seed, ds.train, ds.test);
    return ds;
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open IDX file '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
           (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

}  // namespace

Batch read_idx_pair(const IdxSource& source, std::optional<std::size_t> limit) {
    const auto images = read_file(source.images);
    const auto labels = read_file(source.labels);
    const std::string img_name = source.images.string();
    const std::string lbl_name = source.labels.string();

    if (images.size() < 16 || be32(images, 0) != 0x00000803u) {
        throw DataError("IDX images file '" + img_name + "': bad magic (expected 0x00000803)");
    }
    if (labels.size() < 8 || be32(labels, 0) != 0x00000801u) {
        throw DataError("IDX labels file '" + lbl_name + "': bad magic (expected 0x00000801)");
    }
    const std::size_t count = be32(images, 4);
    const std::size_t rows = be32(images, 8);
    const std::size_t cols = be32(images, 12);
    const std::size_t label_count = be32(labels, 4);
    const std::size_t dim = rows * cols;

    if (images.size() != 16 + count * dim) {
        throw DataError("IDX images file '" + img_name + "': expected " +
                        std::to_string(16 + count * dim) + " bytes, found " +
                        std::to_string(images.size()));
    }
    if (labels.size() != 8 + label_count) {
        throw DataError("IDX labels file '" + lbl_name + "': expected " +
                        std::to_string(8 + label_count) + " bytes, found " +
                        std::to_string(labels.size()));
    }
    if (label_count != count) {
        throw DataError("IDX labels file '" + lbl_name + "' has " + std::to_string(label_count) +
                        " entries but images file '" + img_name + "' has " + std::to_string(count));
    }
    if (dim == 0) throw DataError("IDX images file '" + img_name + "' has zero-sized images");

    const std::size_t keep = limit ? std::min(*limit, count) : count;
    Batch out{Matrix(keep, dim), std::vector<std::size_t>(keep)};
    for (std::size_t i = 0; i < keep; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            out.inputs.data[i * dim + j] = static_cast<double>(images[16 + i * dim + j]) / 255.0;
        }
        out.labels[i] = labels[8 + i];
    }
    return out;
}

Dataset load_idx(const IdxSource& train, const std::optional<IdxSource>& test,
                 std::optional<std::size_t> limit, double test_fraction, std::uint64_t split_seed) {
    Batch train_data = read_idx_pair(train, limit);
    Dataset ds;
    ds.input_dim = train_data.inputs.cols;
    std::size_t max_label = 0;
    for (std::size_t y : train_data.labels) max_label = std::max(max_label, y);

    if (test) {
        Batch test_data = read_idx_pair(*test, limit);
        if (test_data.inputs.cols != ds.input_dim) {
            throw DataError("IDX test images '" + test->images.string() +
                            "' differ in image size from the training images");
        }
        for (std::size_t y : test_data.labels) max_label = std::max(max_label, y);
        ds.class_count = max_label + 1;
        ds.train = std::move(train_data);
        ds.test = std::move(test_data);
        ds.provenance = "idx(" + train.images.string() + "," + train.labels.string() + "," +
                        test->images.string() + "," + test->labels.string() + ")";
    } else {
        ds.class_count = max_label + 1;
        stratified_split(train_data, ds.class_count, test_fraction, split_seed, ds.train, ds.test);
        ds.provenance = "idx(" + train.images.string() + "," + train.labels.string() + ")";
    }
    if (ds.train.size() == 0) throw DataError("IDX training split is empty");
    return ds;
}

void write_split_csv(const std::filesystem::path& path, const Batch& split) {
    CsvWriter csv(path);
    std::vector<std::string> header;
    for (std::size_t j = 0; j < split.inputs.cols; ++j) header.push_back("x" + std::to_string(j));
    header.push_back("label");
    csv.header(header);
    for (std::size_t i = 0; i < split.size(); ++i) {
        for (double v : split.inputs.row(i)) csv.field(v);
        csv.field(static_cast<std::uint64_t>(split.labels[i]));
        csv.end_row();
    }
    csv.close();
}

}  // namespace clrlab
