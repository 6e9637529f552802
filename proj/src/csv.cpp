#include "wmqt/csv.hpp"

#include <charconv>

#include "wmqt/errors.hpp"

namespace wmqt {

std::string format_real(real v) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : path_{path}, columns_{columns.size()}, out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out_ << (i ? "," : "") << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::span<const real> values) {
    if (values.size() != columns_) {
        throw std::logic_error("csv row width does not match header of " + path_);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_real(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::error_sentinel(const std::string& message) {
    out_ << "#error," << message << '\n';
    out_.flush();
}

}  // namespace wmqt
