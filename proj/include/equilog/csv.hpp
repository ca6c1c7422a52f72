#pragma once
// Minimal CSV handling for the CLI: UTF-8, comma separated, header row
// required, no quoting. Numbers are rendered with the shortest decimal
// representation that round-trips, so echoing a dataset preserves values
// exactly.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "equilog/dataset.hpp"
#include "equilog/errors.hpp"

namespace equilog {

inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ValidationError(where + ": not a number: '" + s + "'");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw ValidationError("csv: no column named '" + name + "'");
    }
    bool has_column(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in, const std::string& name = "<stream>") {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(name + ": empty file, header row required");
    t.header = detail::split_csv_line(line);
    if (t.header.size() == 1 && t.header[0].empty())
        throw ValidationError(name + ": empty header row");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != t.header.size())
            throw ValidationError(name + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " fields, expected " +
                                  std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    return read_csv(in, path);
}

inline void write_csv(std::ostream& out, const CsvTable& t) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
        out << (j ? "," : "") << t.header[j];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
}

/// Builds a Dataset from a parsed CSV: `response` names the 0/1 outcome
/// column, `group_column` (optional) is excluded from the covariates and,
/// when `group_value` is given, filters the rows. Every other column is a
/// covariate in header order; the intercept is added here and must not be
/// present in the file.
inline Dataset dataset_from_table(const CsvTable& t, const std::string& response,
                                  const std::string& group_column = "",
                                  const std::string& group_value = "") {
    const std::size_t resp_idx = t.column(response);
    std::size_t group_idx = t.header.size();
    if (!group_column.empty()) group_idx = t.column(group_column);

    std::vector<std::size_t> cov_cols;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (j == resp_idx || j == group_idx) continue;
        cov_cols.push_back(j);
        names.push_back(t.header[j]);
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (group_idx < t.header.size() && !group_value.empty() &&
            t.rows[i][group_idx] != group_value)
            continue;
        keep.push_back(i);
    }
    if (keep.empty())
        throw ValidationError("csv: no rows" + (group_value.empty()
                                                    ? std::string()
                                                    : " with " + group_column + "='" +
                                                          group_value + "'"));

    Matrix cov(keep.size(), cov_cols.size());
    std::vector<int> y(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        const auto& row = t.rows[keep[r]];
        const std::string where = "row " + std::to_string(keep[r] + 2);
        for (std::size_t c = 0; c < cov_cols.size(); ++c) {
            const double v =
                parse_double(row[cov_cols[c]], where + ", column '" + names[c] + "'");
            if (!std::isfinite(v))
                throw ValidationError(where + ", column '" + names[c] + "': non-finite value");
            cov(r, c) = v;
        }
        const double yv = parse_double(row[resp_idx], where + ", column '" + response + "'");
        if (yv != 0.0 && yv != 1.0)
            throw ValidationError(where + ": response must be 0 or 1, got '" +
                                  row[resp_idx] + "'");
        y[r] = static_cast<int>(yv);
    }
    return make_dataset(cov, y, names);
}

/// Covariates (without the intercept) plus the response, full precision.
inline CsvTable dataset_to_table(const Dataset& d, const std::string& response = "y") {
    CsvTable t;
    for (std::size_t j = 1; j < d.p(); ++j) t.header.push_back(d.feature_names[j]);
    t.header.push_back(response);
    for (std::size_t i = 0; i < d.n(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 1; j < d.p(); ++j) row.push_back(format_double(d.X(i, j)));
        row.push_back(std::to_string(d.y[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace equilog
