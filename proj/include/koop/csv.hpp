#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "koop/matrix.hpp"
#include "koop/snapshot.hpp"

namespace koop {

/// Row-per-time-sample table read from CSV. A column named exactly `t` is
/// stripped on read; its median consecutive difference lands in dt_hint.
struct TimeSeriesTable {
    std::vector<std::string> column_names;
    Matrix samples; // T_rows x n_vars
    std::optional<double> dt_hint;
};

namespace detail {

inline bool parse_cell(std::string_view cell, double& out) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1); // from_chars rejects '+'
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

inline std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Strict CSV reader: comma separator, mandatory header row, numeric body,
/// LF or CRLF line endings. Throws ParseError with the 1-based row/column of
/// the first offending cell.
inline TimeSeriesTable read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> names;
    bool any_non_numeric = false;
    for (std::string_view cell : detail::split_line(line)) {
        if (cell.empty())
            throw ParseError("empty header cell", 1, names.size() + 1);
        double ignored;
        if (!detail::parse_cell(cell, ignored)) any_non_numeric = true;
        names.emplace_back(cell);
    }
    if (!any_non_numeric)
        throw ParseError("first row is numeric; a header row is required", 1);

    const std::size_t width = names.size();
    std::size_t t_col = width;
    for (std::size_t c = 0; c < width; ++c) {
        if (names[c] == "t") {
            if (t_col != width) throw ParseError("duplicate `t` column", 1, c + 1);
            t_col = c;
        }
    }

    std::vector<double> body;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break; // trailing newline
        const std::vector<std::string_view> cells = detail::split_line(line);
        if (cells.size() != width)
            throw ParseError("expected " + std::to_string(width) + " cells, found " +
                             std::to_string(cells.size()), line_no);
        for (std::size_t c = 0; c < width; ++c) {
            double v;
            if (!detail::parse_cell(cells[c], v))
                throw ParseError("cell '" + std::string(cells[c]) + "' is not numeric",
                                 line_no, c + 1);
            if (!std::isfinite(v))
                throw ParseError("non-finite value", line_no, c + 1);
            body.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw ParseError("CSV has a header but no data rows", 1);

    TimeSeriesTable table;
    const bool has_t = t_col != width;
    const std::size_t n_vars = width - (has_t ? 1 : 0);
    if (n_vars == 0) throw ParseError("CSV contains only a `t` column", 1);
    table.samples.resize(static_cast<Index>(rows), static_cast<Index>(n_vars));
    std::vector<double> t_values;
    if (has_t) t_values.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t out_c = 0;
        for (std::size_t c = 0; c < width; ++c) {
            const double v = body[r * width + c];
            if (c == t_col)
                t_values.push_back(v);
            else
                table.samples(static_cast<Index>(r), static_cast<Index>(out_c++)) = v;
        }
    }
    for (std::size_t c = 0; c < width; ++c)
        if (c != t_col) table.column_names.push_back(names[c]);

    if (has_t && rows >= 2) {
        std::vector<double> diffs(rows - 1);
        for (std::size_t r = 0; r + 1 < rows; ++r) {
            diffs[r] = t_values[r + 1] - t_values[r];
            if (!(diffs[r] > 0.0))
                throw ParseError("`t` column is not strictly increasing", r + 3, t_col + 1);
        }
        std::sort(diffs.begin(), diffs.end());
        const std::size_t n = diffs.size();
        table.dt_hint = n % 2 == 1 ? diffs[n / 2] : 0.5 * (diffs[n / 2 - 1] + diffs[n / 2]);
    }
    return table;
}

inline TimeSeriesTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in);
}

/// Write a row-per-sample table. Values are serialized with 17 significant
/// digits so a read/write round trip is exact at double precision. When
/// `dt` is given, a leading `t` column with t_i = i*dt is prepended.
inline void write_csv(std::ostream& out, const Matrix& samples,
                      const std::vector<std::string>& column_names,
                      std::optional<double> dt = std::nullopt) {
    if (static_cast<Index>(column_names.size()) != samples.cols())
        throw DimensionError("write_csv: " + std::to_string(column_names.size()) +
                             " names for " + std::to_string(samples.cols()) + " columns");
    require_finite(samples, "write_csv");
    for (const std::string& name : column_names) {
        if (name.empty() || name.find(',') != std::string::npos ||
            name.find('\n') != std::string::npos)
            throw ParameterError("write_csv: invalid column name '" + name + "'");
    }
    if (dt) out << "t";
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        if (dt || c > 0) out << ',';
        out << column_names[c];
    }
    out << '\n';
    for (Index r = 0; r < samples.rows(); ++r) {
        if (dt) out << detail::format_full(static_cast<double>(r) * *dt);
        for (Index c = 0; c < samples.cols(); ++c) {
            if (dt || c > 0) out << ',';
            out << detail::format_full(samples(r, c));
        }
        out << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, const Matrix& samples,
                      const std::vector<std::string>& column_names,
                      std::optional<double> dt = std::nullopt) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(out, samples, column_names, dt);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// Transpose a window of `length` rows starting at `start` into snapshot
/// matrices: states become columns and consecutive rows become
/// predecessor/successor pairs (length-1 of them).
inline SnapshotPair to_snapshots(const TimeSeriesTable& table, Index start, Index length) {
    if (start < 0 || length < 0 || start + length > table.samples.rows())
        throw DimensionError("to_snapshots: window [" + std::to_string(start) + ", " +
                             std::to_string(start + length) + ") out of range for " +
                             std::to_string(table.samples.rows()) + " rows");
    if (length < 2) throw DataError("to_snapshots: window must cover at least 2 rows");
    Matrix window = table.samples.middleRows(start, length).transpose();
    return snapshots_from_trajectory(window);
}

} // namespace koop
