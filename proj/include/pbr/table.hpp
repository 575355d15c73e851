#pragma once

/**
 * @file
 * Deterministic text output: number formatting and CSV/JSON tables.
 * Numbers use 9 significant digits, switching to scientific notation below
 * 1e-4 (and from 1e9 up), always with '.' as decimal separator.
 */

#include "pbr/controller.hpp"
#include "pbr/optimizer.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace pbr {

inline std::string format_number(double v)
{
    if (v == 0.0)
        return "0";
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

struct Table
{
    std::string comment; ///< written as a leading '# ' line in CSV; empty to omit
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& out, const Table& t)
{
    if (!t.comment.empty())
        out << "# " << t.comment << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << "\n";
    }
}

/// {"comment": ..., "columns": [...], "rows": [[...], ...]} with the same number formatting.
inline void write_json(std::ostream& out, const Table& t)
{
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\')
                q += '\\';
            q += c;
        }
        return q + "\"";
    };
    auto number = [](double v) {
        const std::string s = format_number(v);
        return std::isfinite(v) ? s : "null";
    };
    out << "{\"comment\":" << quote(t.comment) << ",\"columns\":[";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << quote(t.columns[i]);
    out << "],\"rows\":[";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << (r ? ",\n" : "\n") << "[";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            out << (i ? "," : "") << number(t.rows[r][i]);
        out << "]";
    }
    out << "\n]}\n";
}

inline Table sim_table(const SimTrace& trace)
{
    Table t;
    t.columns = {"t_d", "X_g_per_m3", "D_per_d", "mu_bar_per_d", "Phi", "Pi"};
    t.rows.reserve(trace.samples.size());
    for (const auto& s : trace.samples)
        t.rows.push_back({s.t, s.X, s.D, s.mu_bar, s.Phi, s.Pi});
    return t;
}

inline Table sequence_table(const SequenceTrace& trace)
{
    Table t;
    t.columns = {"n", "X_n", "h_n", "Y_n", "Pi_n", "bottom_net_growth"};
    t.rows.reserve(trace.iterates.size());
    for (const auto& it : trace.iterates)
        t.rows.push_back({static_cast<double>(it.n), it.X, it.h, it.Y, it.Pi, it.bottom_net_growth});
    return t;
}

inline Table log_sequence_table(const LogSequenceTrace& trace)
{
    Table t;
    t.columns = {"n", "log_X_n", "log_h_n", "Y_n", "log_Pi_n", "bottom_net_growth"};
    t.rows.reserve(trace.iterates.size());
    for (const auto& it : trace.iterates)
        t.rows.push_back({static_cast<double>(it.n), it.log_X, it.log_h, it.Y, it.log_Pi, it.bottom_net_growth});
    return t;
}

} // namespace pbr
