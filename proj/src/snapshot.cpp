#include "clrlab/snapshot.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "clrlab/error.hpp"

namespace clrlab {

namespace {

constexpr std::string_view kMagic = "CLRLAB1";

}  // namespace

void write_snapshot(std::ostream& out, const NetworkWeights& w) {
    const auto& arch = w.arch();
    out << kMagic << ' ' << arch.layers_string() << ' ' << to_string(arch.activation()) << ' '
        << arch.param_count() << '\n';
    std::array<char, 8> bytes{};
    for (double v : w.params()) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
        out.write(bytes.data(), bytes.size());
    }
}

NetworkWeights read_snapshot(std::istream& in, const std::string& source_name) {
    auto fail = [&](const std::string& why) -> DataError {
        return DataError("snapshot '" + source_name + "': " + why);
    };
    std::string header;
    if (!std::getline(in, header)) throw fail("missing header line");

    std::istringstream hs(header);
    std::string magic, layers, activation, count_text, extra;
    hs >> magic >> layers >> activation >> count_text;
    if (magic != kMagic) throw fail("bad magic '" + magic + "'");
    if (count_text.empty() || (hs >> extra)) throw fail("malformed header '" + header + "'");

    std::size_t count = 0;
    auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
        throw fail("bad parameter count '" + count_text + "'");
    }

    std::optional<ArchitectureSpec> arch;
    try {
        arch.emplace(parse_layer_sizes(layers), parse_activation(activation));
    } catch (const ConfigError& e) {
        throw fail(e.what());
    }
    if (arch->param_count() != count) {
        throw fail("header declares " + count_text + " parameters, architecture needs " +
                   std::to_string(arch->param_count()));
    }

    std::vector<double> params(count);
    std::array<unsigned char, 8> bytes{};
    for (std::size_t k = 0; k < count; ++k) {
        if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
            throw fail("truncated after " + std::to_string(k) + " of " + count_text + " values");
        }
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        params[k] = std::bit_cast<double>(bits);
        if (!std::isfinite(params[k])) {
            throw fail("non-finite value at index " + std::to_string(k));
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw fail("trailing bytes after parameters");
    return NetworkWeights(std::move(*arch), std::move(params));
}

void save_snapshot(const std::filesystem::path& path, const NetworkWeights& w) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_snapshot(out, w);
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

NetworkWeights load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot '" + path.string() + "'");
    return read_snapshot(in, path.string());
}

std::string snapshot_filename(std::uint64_t iteration) {
    return "snapshot_" + std::to_string(iteration) + ".clr";
}

}  // namespace clrlab
