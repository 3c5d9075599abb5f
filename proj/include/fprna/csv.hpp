#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fprna {

/// Scientific notation with 17 significant digits; NaN becomes "nan".
std::string format_number(double v);

/// Writes to a temporary sibling and renames it over `path`.
void write_text_atomic(const std::string& path, const std::string& content);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Two-column key,value file.
void write_summary_csv(const std::string& path,
                       const std::vector<std::pair<std::string, double>>& entries);

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header field; throws if absent.
    std::size_t column_index(const std::string& name) const;
    /// Column parsed as doubles ("nan" gives NaN).
    std::vector<double> column(const std::string& name) const;
};

CsvData read_csv(const std::string& path);

}  // namespace fprna
