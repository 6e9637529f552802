#pragma once

#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "wmqt/state.hpp"

namespace wmqt {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_real(real v);

/// Comma-separated output with a single header line.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> columns);

    void row(std::span<const real> values);
    void row(std::initializer_list<real> values) { row(std::span<const real>(values.begin(), values.size())); }

    /// Trailing marker for outputs cut short by a failure.
    void error_sentinel(const std::string& message);

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::size_t columns_;
    std::ofstream out_;
};

}  // namespace wmqt
