#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slowmotion/error.hpp"

namespace slowmotion::csv {

/// 17 significant digits, '.' decimal separator, lowercase nan/inf.
inline std::string format(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format(const std::string& s) { return s; }
inline std::string format(const char* s) { return s; }
inline std::string format(std::string_view s) { return std::string(s); }
inline std::string format(int v) { return std::to_string(v); }
inline std::string format(long v) { return std::to_string(v); }
inline std::string format(unsigned long v) { return std::to_string(v); }
inline std::string format(unsigned long long v) { return std::to_string(v); }
inline std::string format(bool v) { return v ? "true" : "false"; }

/// Writes rows with a fixed header; binary mode keeps LF line endings.
class Writer {
public:
    Writer(const std::filesystem::path& path, std::vector<std::string> header)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
        if (!out_) fail(ErrorKind::Config, "cannot open output file " + path.string());
        line(header);
    }

    template <class... Ts>
    void row(const Ts&... cells) {
        std::vector<std::string> v{format(cells)...};
        line(v);
    }

    void line(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) fail(ErrorKind::Config, "row width does not match header in " + path_.string());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j) out_ << ',';
            out_ << cells[j];
        }
        out_ << '\n';
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        fail(ErrorKind::Config, "no column " + name);
    }

    double number(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(column(name))); }
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Config, "cannot read " + path.string());
    Table t;
    std::string line;
    if (std::getline(in, line)) t.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) t.rows.push_back(split(line));
    return t;
}

}  // namespace slowmotion::csv
