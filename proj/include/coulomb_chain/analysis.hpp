#pragma once

// Empirical densities, phase detection and parameter studies on top of the solver.
//
// Phase detection works from the solved configuration alone, in this order:
//   Uniform        N * max_k |delta_k - L/N| < 0.05
//   DeltaAtOrigin  |x_N| < 3 L / sqrt(N)
//   Detached       x_N + L > 0.01 L
//   SmoothPositive otherwise
// The thresholds are heuristics sized on the finite-N convergence rates. A report is
// flagged ambiguous when any evidence value lies within a factor 1.5 of its threshold.

#include "coulomb_chain/closed_form.hpp"
#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/model.hpp"
#include "coulomb_chain/shooting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace coulomb_chain {

struct DensityHistogram {
    std::vector<double> bin_edges; // n_bins + 1 edges from -L to 0
    std::vector<double> mass;      // fraction of the N+1 particles per bin
    std::size_t n_bins() const noexcept { return mass.size(); }
};

inline std::size_t default_bin_count(std::size_t n_gaps) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n_gaps)))));
}

/// Particle counts per bin normalized by N+1; particles on either wall land in the end bins.
inline DensityHistogram histogram(const Configuration& config, double length, std::size_t n_bins) {
    if (n_bins < 1) throw ModelError(ErrorKind::InvalidArgument, "need at least one bin");
    DensityHistogram h;
    h.bin_edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.bin_edges[i] = -length + length * static_cast<double>(i) / static_cast<double>(n_bins);
    h.bin_edges.back() = 0.0;
    std::vector<std::size_t> counts(n_bins, 0);
    const double width = length / static_cast<double>(n_bins);
    for (double x : config.positions()) {
        const double t = std::floor((x + length) / width);
        const auto bin = static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n_bins - 1)));
        ++counts[bin];
    }
    const double total = static_cast<double>(config.positions().size());
    h.mass.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) h.mass[i] = static_cast<double>(counts[i]) / total;
    return h;
}

/// Predicted fraction of particles per histogram bin.
inline std::vector<double> predicted_mass(const AsymptoticDensity& density, const DensityHistogram& h) {
    std::vector<double> out(h.n_bins());
    for (std::size_t i = 0; i < h.n_bins(); ++i) out[i] = density.mass(h.bin_edges[i], h.bin_edges[i + 1]);
    return out;
}

/// N * max_k |delta_k - L/N|.
inline double scaled_gap_deviation(const Configuration& config, double length) {
    const double n = static_cast<double>(config.n_gaps());
    const double uniform = length / n;
    double dev = 0.0;
    for (std::size_t k = 1; k <= config.n_gaps(); ++k) dev = std::max(dev, std::abs(config.gap(k) - uniform));
    return n * dev;
}

struct PhaseEvidence {
    double terminal_position = 0.0; // x_N
    double delta1_scaled = 0.0;     // delta_1 N / L
    double gap_deviation = 0.0;     // N max_k |delta_k - L/N|
    double sup_deviation = 0.0;     // max over bins of |mass - predicted mass|
};

struct PhaseThresholds {
    double uniform_gap_deviation = 0.05;
    double collapse_extent = 3.0;   // in units of L / sqrt(N)
    double detachment = 0.01;       // in units of L
    double ambiguity_factor = 1.5;
};

struct PhaseReport {
    double c = 0.0;
    double gamma = 0.0;
    DensityPhase detected = DensityPhase::Uniform;
    bool ambiguous = false;
    PhaseEvidence evidence;
    AsymptoticDensity prediction;
};

inline PhaseReport classify_phase(const ModelParams& params, const FixedPointResult& solved,
                                  std::size_t n_bins = 0, const PhaseThresholds& th = {}) {
    if (!params.declared_force().is_scaled())
        throw ModelError(ErrorKind::InvalidArgument, "phase classification needs a force declared as c N^gamma");
    const auto scaling = params.declared_force().scaling();
    const double L = params.length();
    const std::size_t n = params.n_gaps();
    if (n_bins == 0) n_bins = default_bin_count(n);

    PhaseReport r;
    r.c = scaling.c;
    r.gamma = scaling.gamma;
    r.prediction = asymptotic_density(scaling.c, scaling.gamma, L);

    const auto& cfg = solved.config;
    r.evidence.terminal_position = cfg.position(n);
    r.evidence.delta1_scaled = cfg.gap(1) / params.length_scale();
    r.evidence.gap_deviation = scaled_gap_deviation(cfg, L);
    const auto h = histogram(cfg, L, n_bins);
    const auto pred = predicted_mass(r.prediction, h);
    for (std::size_t i = 0; i < h.n_bins(); ++i)
        r.evidence.sup_deviation = std::max(r.evidence.sup_deviation, std::abs(h.mass[i] - pred[i]));

    const double collapse = th.collapse_extent * L / std::sqrt(static_cast<double>(n));
    const double extent = std::abs(r.evidence.terminal_position);
    const double detach = r.evidence.terminal_position + L;

    if (r.evidence.gap_deviation < th.uniform_gap_deviation)
        r.detected = DensityPhase::Uniform;
    else if (extent < collapse)
        r.detected = DensityPhase::DeltaAtOrigin;
    else if (detach > th.detachment * L)
        r.detected = DensityPhase::Detached;
    else
        r.detected = DensityPhase::SmoothPositive;

    auto near = [&](double value, double threshold) {
        return value > threshold / th.ambiguity_factor && value < threshold * th.ambiguity_factor;
    };
    r.ambiguous = near(r.evidence.gap_deviation, th.uniform_gap_deviation) || near(extent, collapse) ||
                  near(detach, th.detachment * L);
    return r;
}

struct SweepPoint {
    std::size_t n_gaps = 0;
    double length = 1.0;
    double c = 0.0;
    double gamma = 0.0;
};

struct SweepSettings {
    std::size_t n_bins = 0; // 0: round(sqrt(N)) per row
    SolveSettings solve{};
    std::size_t threads = 1;
};

struct SweepRow {
    SweepPoint point;
    bool ok = false;
    std::string error_kind;
    std::string error_message;
    std::optional<PhaseReport> report;
    Classification classification = Classification::BoundaryPinned;
    std::size_t iterations = 0;
    double max_residual = 0.0;
    double residual_tolerance = 0.0;
    double seconds = 0.0;
};

inline SweepRow sweep_row(const SweepPoint& pt, const SweepSettings& settings) {
    SweepRow row;
    row.point = pt;
    const auto start = std::chrono::steady_clock::now();
    try {
        ModelParams params(pt.length, pt.n_gaps, ForceProfile::scaled(pt.c, pt.gamma));
        const auto solved = solve_fixed_point(params, settings.solve);
        row.report = classify_phase(params, solved, settings.n_bins);
        row.classification = solved.classification;
        row.iterations = solved.iterations;
        row.max_residual = solved.max_residual;
        row.residual_tolerance = solved.residual_tolerance;
        row.ok = true;
    } catch (const ModelError& e) {
        row.error_kind = std::string(e.name());
        row.error_message = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

/// One row per grid point, in grid order. Failing points are recorded and skipped.
inline std::vector<SweepRow> sweep(const std::vector<SweepPoint>& grid, const SweepSettings& settings = {}) {
    std::vector<SweepRow> rows(grid.size());
    const std::size_t workers = std::clamp<std::size_t>(settings.threads, 1, std::max<std::size_t>(1, grid.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) rows[i] = sweep_row(grid[i], settings);
        return rows;
    }
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < grid.size(); i += workers) rows[i] = sweep_row(grid[i], settings);
            });
    }
    return rows;
}

struct ConvergenceRow {
    std::size_t n_gaps = 0;
    double terminal_position = 0.0;
    double delta1_scaled = 0.0;
    double gap_deviation = 0.0;
};

/// Solves the same force law (a Scaled profile is re-resolved per N) over N_list.
inline std::vector<ConvergenceRow> convergence_study(const ForceProfile& force, double length,
                                                     const std::vector<std::size_t>& n_list,
                                                     const SolveSettings& settings = {}) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (!(n_list[i] > n_list[i - 1]))
            throw ModelError(ErrorKind::InvalidArgument, "N list must be strictly increasing", i);
    std::vector<ConvergenceRow> rows;
    rows.reserve(n_list.size());
    for (std::size_t n : n_list) {
        ModelParams params(length, n, force);
        const auto solved = solve_fixed_point(params, settings);
        rows.push_back({n, solved.config.position(n), solved.config.gap(1) / params.length_scale(),
                        scaled_gap_deviation(solved.config, length)});
    }
    return rows;
}

} // namespace coulomb_chain
