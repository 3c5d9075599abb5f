#include "fprna/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "fprna/errors.hpp"

namespace fprna {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp + " for writing");
        os << content;
        os.flush();
        if (!os) throw Error("write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp + " to " + path + ": " + ec.message());
    }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out += ',';
        out += header[k];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw InvalidParameter("CSV row width mismatch");
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += format_number(row[k]);
        }
        out += '\n';
    }
    write_text_atomic(path, out);
}

void write_summary_csv(const std::string& path,
                       const std::vector<std::pair<std::string, double>>& entries) {
    std::string out = "key,value\n";
    for (const auto& [key, value] : entries) out += key + "," + format_number(value) + "\n";
    write_text_atomic(path, out);
}

std::size_t CsvData::column_index(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw InvalidParameter("CSV has no column '" + name + "'");
}

std::vector<double> CsvData::column(const std::string& name) const {
    const std::size_t k = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& s = row.at(k);
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') {
            throw InvalidParameter("CSV field '" + s + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

CsvData read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    CsvData data;
    std::string line;
    if (!std::getline(is, line)) throw InvalidParameter(path + " is empty");
    data.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != data.header.size()) {
            throw InvalidParameter(path + ": row width does not match header");
        }
        data.rows.push_back(std::move(row));
    }
    return data;
}

}  // namespace fprna
