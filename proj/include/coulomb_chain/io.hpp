#pragma once

// Serialization of results: JSON via nlohmann/json, CSV with RFC 4180 quoting.
// Numbers are written in shortest round-trip form, so parsing the text gives back
// the exact doubles. Non-finite values are refused rather than written.

#include "coulomb_chain/analysis.hpp"
#include "coulomb_chain/closed_form.hpp"
#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/model.hpp"
#include "coulomb_chain/oracle.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

namespace coulomb_chain::io {

using json = nlohmann::json;

inline double checked(double v, std::string_view what) {
    if (!std::isfinite(v))
        throw ModelError(ErrorKind::DomainError, "refusing to serialize non-finite " + std::string(what));
    return v;
}

inline json number_array(std::span<const double> values, std::string_view what) {
    json arr = json::array();
    for (double v : values) arr.push_back(checked(v, what));
    return arr;
}

inline std::string format_number(double v) {
    checked(v, "number");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw ModelError(ErrorKind::DomainError, "number formatting failed");
    return std::string(buf, end);
}

// ---------------------------------------------------------------------------
// Flat tables (sweep, converge, solve-as-CSV)

using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, double>) return format_number(v);
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return csv_escape(v);
        },
        c);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + csv_escape(t.columns[i]);
    out += "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
        out += "\r\n";
    }
    return out;
}

inline json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, double>) return checked(v, "table cell");
            else return v;
        },
        c);
}

inline json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rows.push_back(std::move(r));
    }
    return json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Model objects

inline json to_json(const ForceProfile& f) {
    switch (f.kind()) {
    case ForceKind::Constant: return {{"kind", "constant"}, {"value", checked(f.as_constant().value, "force")}};
    case ForceKind::Scaled:
        return {{"kind", "scaled"}, {"c", f.scaling().c}, {"gamma", f.scaling().gamma}};
    case ForceKind::PiecewiseLinear: {
        json bps = json::array();
        for (const auto& bp : f.as_piecewise().breakpoints)
            bps.push_back({{"position", checked(bp.position, "breakpoint")}, {"value", checked(bp.value, "breakpoint")}});
        return {{"kind", "piecewise_linear"}, {"breakpoints", std::move(bps)}};
    }
    }
    return nullptr;
}

inline json to_json(const ModelParams& p) {
    json j{{"n", p.n_gaps()}, {"length", p.length()}, {"force", to_json(p.declared_force())}};
    if (p.declared_force().is_scaled()) j["resolved_force"] = p.force().as_constant().value;
    return j;
}

inline json to_json(const FixedPointResult& r, const ModelParams& p) {
    return {{"params", to_json(p)},
            {"positions", number_array(r.config.positions(), "position")},
            {"gaps", number_array(r.config.gaps(), "gap")},
            {"pressures", number_array(r.config.pressures(), "pressure")},
            {"classification", std::string(to_string(r.classification))},
            {"max_residual", checked(r.max_residual, "residual")},
            {"residual_tolerance", checked(r.residual_tolerance, "tolerance")},
            {"delta1", checked(r.delta1, "delta1")},
            {"iterations", r.iterations}};
}

/// Per-particle rows: k, position, gap, pressure (gap and pressure empty for k = 0).
inline Table solve_table(const FixedPointResult& r) {
    Table t{{"k", "position", "gap", "pressure"}, {}};
    const auto& c = r.config;
    for (std::size_t k = 0; k <= c.n_gaps(); ++k) {
        if (k == 0)
            t.rows.push_back({std::int64_t{0}, c.position(0), std::monostate{}, std::monostate{}});
        else
            t.rows.push_back({static_cast<std::int64_t>(k), c.position(k), c.gap(k), c.pressure(k)});
    }
    return t;
}

inline json to_json(const CriticalForce& cf, std::size_t n, double length) {
    return {{"n", n}, {"length", length}, {"exact", checked(cf.exact, "critical force")},
            {"asymptotic_coefficient", cf.asymptotic_coefficient}};
}

inline json to_json(const AsymptoticDensity& d) {
    json j{{"phase", std::string(to_string(d.phase))}, {"length", d.length}, {"c", d.c}};
    if (d.phase == DensityPhase::SmoothPositive) j["b"] = d.b;
    if (d.phase == DensityPhase::Detached) j["support_left"] = d.support_left;
    return j;
}

inline json density_json(const DensityHistogram& h, const std::optional<std::vector<double>>& prediction) {
    json j{{"bin_edges", number_array(h.bin_edges, "bin edge")}, {"mass", number_array(h.mass, "mass")}};
    j["prediction"] = prediction ? number_array(*prediction, "prediction") : json(nullptr);
    return j;
}

inline Table density_table(const DensityHistogram& h, const std::optional<std::vector<double>>& prediction) {
    Table t{{"bin_left", "bin_right", "mass", "prediction"}, {}};
    for (std::size_t i = 0; i < h.n_bins(); ++i)
        t.rows.push_back({h.bin_edges[i], h.bin_edges[i + 1], h.mass[i],
                          prediction ? Cell{(*prediction)[i]} : Cell{std::monostate{}}});
    return t;
}

inline Table sweep_table(const std::vector<SweepRow>& rows, bool include_timing = false) {
    Table t{{"n", "length", "c", "gamma", "ok", "error", "classification", "detected_phase", "ambiguous",
             "terminal_position", "delta1_scaled", "gap_deviation", "sup_deviation", "iterations",
             "max_residual", "residual_tolerance"},
            {}};
    if (include_timing) t.columns.push_back("seconds");
    for (const auto& r : rows) {
        std::vector<Cell> row{static_cast<std::int64_t>(r.point.n_gaps), r.point.length, r.point.c,
                              r.point.gamma, r.ok};
        if (r.ok && r.report) {
            const auto& rep = *r.report;
            row.insert(row.end(), {std::string{}, std::string(to_string(r.classification)),
                                   std::string(to_string(rep.detected)), rep.ambiguous,
                                   rep.evidence.terminal_position, rep.evidence.delta1_scaled,
                                   rep.evidence.gap_deviation, rep.evidence.sup_deviation,
                                   static_cast<std::int64_t>(r.iterations), r.max_residual,
                                   r.residual_tolerance});
        } else {
            row.push_back(r.error_kind + ": " + r.error_message);
            row.resize(16, std::monostate{});
        }
        if (include_timing) row.push_back(r.seconds);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table convergence_table(const std::vector<ConvergenceRow>& rows) {
    Table t{{"n", "terminal_position", "delta1_scaled", "gap_deviation"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({static_cast<std::int64_t>(r.n_gaps), r.terminal_position, r.delta1_scaled,
                          r.gap_deviation});
    return t;
}

inline json to_json(const LocalMinimum& m, const ModelParams& p) {
    json j = to_json(m.result, p);
    j["energy"] = checked(m.energy, "energy");
    j["start_index"] = m.start_index;
    j["residuals_ok"] = m.residuals_ok;
    j["perturbation_ok"] = m.perturbation_ok;
    return j;
}

// ---------------------------------------------------------------------------
// Parsing

/// "x:value,x:value,..." breakpoint list.
inline ForceProfile parse_piecewise(std::string_view spec) {
    std::vector<Breakpoint> bps;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string_view item = spec.substr(pos, comma - pos);
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos)
            throw ModelError(ErrorKind::InvalidArgument, "breakpoint '" + std::string(item) + "' is not x:value");
        auto parse = [&](std::string_view s) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw ModelError(ErrorKind::InvalidArgument, "bad number '" + std::string(s) + "'");
            return v;
        };
        bps.push_back({parse(item.substr(0, colon)), parse(item.substr(colon + 1))});
        pos = comma + 1;
    }
    return ForceProfile::piecewise_linear(std::move(bps));
}

/// "N,L,c,gamma;N,L,c,gamma;..." (empty string: empty grid).
inline std::vector<SweepPoint> parse_grid(std::string_view spec) {
    std::vector<SweepPoint> grid;
    std::string text(spec);
    for (char& ch : text)
        if (ch == '\n') ch = ';';
    std::stringstream rows(text);
    std::string row;
    while (std::getline(rows, row, ';')) {
        if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream fields(row);
        std::string f;
        std::vector<std::string> parts;
        while (std::getline(fields, f, ',')) parts.push_back(f);
        if (parts.size() != 4)
            throw ModelError(ErrorKind::InvalidArgument, "grid row '" + row + "' needs N,L,c,gamma");
        try {
            grid.push_back({static_cast<std::size_t>(std::stoull(parts[0])), std::stod(parts[1]),
                            std::stod(parts[2]), std::stod(parts[3])});
        } catch (const std::logic_error&) {
            throw ModelError(ErrorKind::InvalidArgument, "grid row '" + row + "' is not numeric");
        }
    }
    return grid;
}

// ---------------------------------------------------------------------------

/// Writes through a temporary file in the same directory and renames it into place.
inline void write_atomically(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace coulomb_chain::io
