#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace clrlab {

/// 17 significant digits, shortest exponent form ("%.17g" equivalent).
/// Round-trips every finite double exactly.
std::string format_double(double v);

/// Comma-separated writer; floats go through format_double.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void header(const std::vector<std::string>& names);
    void field(double v);
    void field(std::uint64_t v);
    void field(std::string_view v);
    void end_row();
    /// Flushes and throws IoError if any write failed.
    void close();

private:
    void separator();

    std::filesystem::path path_;
    std::ofstream out_;
    bool row_started_ = false;
};

}  // namespace clrlab
