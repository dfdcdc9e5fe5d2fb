// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace stt {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position by name; throws if absent.
    int column(const std::string& name) const;
};

/// Reads a header-first CSV without quoting. Throws std::runtime_error on ragged rows.
CsvTable read_csv(const std::string& path);

/// Round-trip exact text for a double; "nan" for NaN.
std::string format_double(double v);

/// Replaces separators and line breaks so the text fits in one unquoted field.
std::string csv_safe(std::string s);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace stt
