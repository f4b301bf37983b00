#include "clrlab/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "clrlab/error.hpp"

namespace clrlab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (const auto& n : names) field(std::string_view(n));
    end_row();
}

void CsvWriter::separator() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

void CsvWriter::field(double v) {
    separator();
    out_ << format_double(v);
}

void CsvWriter::field(std::uint64_t v) {
    separator();
    out_ << v;
}

void CsvWriter::field(std::string_view v) {
    separator();
    out_ << v;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

void CsvWriter::close() {
    out_.flush();
    if (!out_) throw IoError("failed writing '" + path_.string() + "'");
    out_.close();
}

}  // namespace clrlab
