#pragma once

// CSV input/output.  First row is headers; missing values are empty fields
// (or "NaN") both ways.  Output is deterministic: 12 significant digits,
// '\n' line endings, caller-stable column order.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace emm {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline double parse_cell(const std::string& field, std::size_t line_no, const std::string& path) {
    if (field.empty() || field == "NaN" || field == "nan" || field == "NA") return missing;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" + field + "'");
    return v;
}

inline bool is_time_label(const std::string& label) {
    std::string low;
    for (char c : label) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return low == "t" || low == "time" || low == "day";
}

inline std::string format_value(double v) {
    if (is_missing(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

// An in-memory table: string cells so numeric and label columns can mix.
struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_cell(double v) { return detail::format_value(v); }

inline void write_csv(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < table.headers.size(); ++j) {
        if (j) out << ',';
        out << table.headers[j];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.headers.size())
            throw DataError("csv row width " + std::to_string(row.size()) + " != header width " +
                            std::to_string(table.headers.size()));
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

// Series written side by side, optionally with a leading time column taken
// from the first series.
inline void write_series_csv(const std::string& path, const std::vector<const TimeSeries*>& series,
                             bool with_time, const std::string& time_label = "t") {
    if (series.empty()) throw DataError("write_series_csv: nothing to write");
    const std::size_t n = series.front()->size();
    for (const auto* s : series)
        if (s->size() != n) throw DataError("write_series_csv: length mismatch");

    Table t;
    if (with_time) t.headers.push_back(time_label);
    for (const auto* s : series) t.headers.push_back(s->name);
    t.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        row.reserve(t.headers.size());
        if (with_time) row.push_back(detail::format_value(series.front()->time(i)));
        for (const auto* s : series) row.push_back(detail::format_value(s->values[i]));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

// Read selected columns (all value columns when `columns` is empty) as
// TimeSeries.  dt and t0 come from a time column when one is present
// ("t"/"time"/"day", case-insensitive); gaps larger than 0.1% of dt are
// rejected.  Without a time column, dt = 1 and t0 = 0.
inline std::vector<TimeSeries> read_csv(const std::string& path,
                                        const std::vector<std::string>& columns = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto headers = detail::split_fields(line);

    std::vector<std::vector<double>> cells(headers.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        if (fields.size() != headers.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(headers.size()) + " fields, got " +
                            std::to_string(fields.size()));
        for (std::size_t j = 0; j < fields.size(); ++j)
            cells[j].push_back(detail::parse_cell(fields[j], line_no, path));
    }
    if (cells.empty() || cells[0].empty()) throw DataError(path + ": no data rows");

    // Time column (first match wins).
    double dt = 1.0, t0 = 0.0;
    long time_col = -1;
    for (std::size_t j = 0; j < headers.size(); ++j) {
        if (detail::is_time_label(headers[j])) {
            time_col = static_cast<long>(j);
            break;
        }
    }
    if (time_col >= 0) {
        const auto& t = cells[static_cast<std::size_t>(time_col)];
        for (double v : t)
            if (is_missing(v)) throw DataError(path + ": missing values in time column");
        if (t.size() >= 2) {
            dt = t[1] - t[0];
            if (!(dt > 0.0)) throw DataError(path + ": non-increasing time column");
            for (std::size_t i = 1; i < t.size(); ++i) {
                const double step = t[i] - t[i - 1];
                if (std::abs(step - dt) > 1e-3 * dt)
                    throw DataError(path + ": non-uniform time column near row " +
                                    std::to_string(i + 1));
            }
        }
        t0 = t[0];
    }

    std::vector<TimeSeries> out;
    auto push_column = [&](std::size_t j) {
        TimeSeries ts;
        ts.name = headers[j];
        ts.dt = dt;
        ts.t0 = t0;
        ts.values = cells[j];
        out.push_back(std::move(ts));
    };

    if (columns.empty()) {
        for (std::size_t j = 0; j < headers.size(); ++j)
            if (static_cast<long>(j) != time_col) push_column(j);
    } else {
        for (const auto& want : columns) {
            bool found = false;
            for (std::size_t j = 0; j < headers.size(); ++j) {
                if (headers[j] == want) {
                    push_column(j);
                    found = true;
                    break;
                }
            }
            if (!found) throw DataError(path + ": unknown column '" + want + "'");
        }
    }
    return out;
}

inline TimeSeries read_csv_column(const std::string& path, const std::string& column) {
    return read_csv(path, {column}).front();
}

}  // namespace emm
