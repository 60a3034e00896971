#pragma once

// Direct minimization of the energy over ordered configurations in [-L, 0].
//
// Each iteration takes a projected, curvature-scaled gradient step: particles held
// against a wall by the gradient are frozen, the free ones move along -H^-1 g with
// H a positive definite tridiagonal model of the Hessian (exact for the pair terms
// 2/delta^3, the field term clipped to its convex part, plus a small ridge). The
// step is capped at step_init, clamped to the walls and halved until the chain
// stays ordered and the energy decreases (Armijo).
//
// Walls: x_0 <= 0 and x_N >= -L are clamped after each step, the static analogue
// of completely inelastic walls.

#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/force_profile.hpp"
#include "coulomb_chain/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coulomb_chain {

struct MinimizeStep {
    std::size_t iteration;
    double energy_change; // U(after) - U(before), < 0 for every accepted step
    double projected_gradient;
};

struct MinimizeSettings {
    /// Largest displacement of any particle in one step.
    double step_init = 0.0;
    /// Stop once the max-norm of the projected gradient is at most this.
    double grad_tol = 0.0;
    std::size_t max_iter = 20000;
    std::uint64_t seed = 1;
    std::function<void(const MinimizeStep&)> on_step{};

    /// Scaled defaults: step_init = L / (2N), grad_tol = 1e-9 (N/L)^2.
    static MinimizeSettings defaults_for(const ModelParams& params) {
        MinimizeSettings s;
        s.step_init = 0.5 * params.length_scale();
        s.grad_tol = 1e-9 * params.pressure_scale();
        return s;
    }
};

namespace detail {

inline bool strictly_ordered(std::span<const double> x) {
    for (std::size_t k = 1; k < x.size(); ++k)
        if (!(x[k - 1] - x[k] > 0.0)) return false;
    return true;
}

// Solves a symmetric positive definite tridiagonal system (Thomas algorithm).
inline std::vector<double> solve_tridiagonal(std::vector<double> diag, std::vector<double> off,
                                             std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = off[i - 1] / diag[i - 1];
        diag[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - off[i] * x[i + 1]) / diag[i];
    return x;
}

// free[i] == false for particles pinned at a wall by the current gradient
inline std::vector<bool> free_mask(std::span<const double> x, std::span<const double> g, double length) {
    std::vector<bool> free(x.size(), true);
    if (x.front() >= 0.0 && g.front() < 0.0) free.front() = false;
    if (x.back() <= -length && g.back() > 0.0) free.back() = false;
    return free;
}

inline double projected_norm(std::span<const double> g, const std::vector<bool>& free) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (free[i]) m = std::max(m, std::abs(g[i]));
    return m;
}

inline std::vector<double> newton_direction(std::span<const double> x, std::span<const double> g,
                                            const std::vector<bool>& free, const ModelParams& params) {
    const std::size_t m = x.size();
    std::vector<double> diag(m, 0.0), off(m - 1, 0.0), rhs(m, 0.0);
    double diag_max = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        const double d = x[k - 1] - x[k];
        const double w = 2.0 / (d * d * d);
        diag[k - 1] += w;
        diag[k] += w;
        off[k - 1] = -w;
    }
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] += std::max(0.0, -params.force().slope(x[i]));
        diag_max = std::max(diag_max, diag[i]);
    }
    const double ridge = 1e-10 * diag_max;
    for (std::size_t i = 0; i < m; ++i) {
        diag[i] += ridge;
        rhs[i] = -g[i];
        if (!free[i]) {
            diag[i] = 1.0;
            rhs[i] = 0.0;
            if (i > 0) off[i - 1] = 0.0;
            if (i + 1 < m) off[i] = 0.0;
        }
    }
    return solve_tridiagonal(std::move(diag), std::move(off), std::move(rhs));
}

} // namespace detail

/// Local minimum of the energy reached from `start`.
inline FixedPointResult minimize(const ModelParams& params, const Configuration& start,
                                 const MinimizeSettings& settings) {
    if (!(settings.step_init > 0.0) || !(settings.grad_tol > 0.0))
        throw ModelError(ErrorKind::InvalidArgument, "step_init and grad_tol must be positive");
    if (start.n_gaps() != params.n_gaps())
        throw ModelError(ErrorKind::InvalidArgument, "start configuration has the wrong particle count");
    const double L = params.length();
    const std::size_t m = start.n_gaps() + 1;

    std::vector<double> x(start.positions().begin(), start.positions().end());
    std::vector<double> trial(m);
    std::size_t iter = 0;
    for (;; ++iter) {
        const auto g = energy_gradient(x, params);
        const auto free = detail::free_mask(x, g, L);
        const double pg = detail::projected_norm(g, free);
        if (pg <= settings.grad_tol) break;
        if (iter >= settings.max_iter)
            throw ModelError(ErrorKind::NoConvergence,
                             "projected gradient " + std::to_string(pg) + " above tolerance after " +
                                 std::to_string(settings.max_iter) + " iterations");

        auto dir = detail::newton_direction(x, g, free, params);
        double slope = 0.0;
        for (std::size_t i = 0; i < m; ++i) slope += g[i] * dir[i];
        if (!(slope < 0.0)) {
            for (std::size_t i = 0; i < m; ++i) dir[i] = free[i] ? -g[i] : 0.0;
        }
        double longest = 0.0;
        for (double d : dir) longest = std::max(longest, std::abs(d));
        double t = longest > settings.step_init ? settings.step_init / longest : 1.0;

        bool accepted = false;
        bool ever_ordered = false;
        double change = 0.0;
        for (int halvings = 0; halvings < 80; ++halvings, t *= 0.5) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = x[i] + t * dir[i];
            trial.front() = std::min(trial.front(), 0.0);
            trial.back() = std::max(trial.back(), -L);
            if (!detail::strictly_ordered(trial)) continue;
            ever_ordered = true;
            change = energy_difference(x, trial, params);
            double predicted = 0.0;
            for (std::size_t i = 0; i < m; ++i) predicted += g[i] * (trial[i] - x[i]);
            if (change < 0.0 && change <= 1e-4 * predicted) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!ever_ordered)
                throw ModelError(ErrorKind::OrderingBreach,
                                 "every step proposal crossed particles; step_init is too large");
            throw ModelError(ErrorKind::NoConvergence,
                             "line search stalled with projected gradient " + std::to_string(pg));
        }
        x.swap(trial);
        if (settings.on_step) settings.on_step(MinimizeStep{iter, change, pg});
    }

    Configuration config(std::move(x), L);
    const Residuals res = residuals(config, params);
    const Classification cls = config.position(config.n_gaps()) <= -L ? Classification::BoundaryPinned
                                                                      : Classification::Interior;
    return FixedPointResult{config, cls, config.gap(1), res.max_interior(), 10.0 * settings.grad_tol, iter};
}

/// The piecewise profile with a single peak whose fixed points are not unique:
/// F0(y) = a - 2 a y for y >= 0 and F0(y) = a + 2 b y for y <= 0 on y in [-1, 1],
/// translated to x = y - 1 in [-2, 0] and multiplied by alpha_ren.
struct NonuniquenessProfile {
    double a_slopepeak = 1.0;
    double b_slope = 2.0;

    static constexpr double length = 2.0;
    static constexpr double peak_position = -1.0;

    NonuniquenessProfile(double a, double b) : a_slopepeak(a), b_slope(b) {
        if (!(a > 0.0) || !(b > a))
            throw ModelError(ErrorKind::InvalidArgument, "nonuniqueness profile needs b > a > 0");
    }

    ForceProfile force(double alpha_ren) const {
        if (!(alpha_ren > 0.0)) throw ModelError(ErrorKind::InvalidArgument, "alpha_ren must be > 0");
        const double a = a_slopepeak, b = b_slope;
        return ForceProfile::piecewise_linear({{-2.0, alpha_ren * (a - 2.0 * b)},
                                               {-1.0, alpha_ren * a},
                                               {0.0, alpha_ren * (a - 2.0 * a)}});
    }

    /// Model with alpha_ren = c N.
    ModelParams params(std::size_t n_gaps, double c) const {
        return ModelParams(length, n_gaps, force(c * static_cast<double>(n_gaps)));
    }
};

struct LocalMinimum {
    FixedPointResult result;
    double energy = 0.0;
    /// Index of the start that produced it.
    std::size_t start_index = 0;
    bool residuals_ok = false;
    bool perturbation_ok = false;

    bool certified() const noexcept { return residuals_ok && perturbation_ok; }
};

/// Energy change when particle i alone moves by dx; nullopt when the move leaves
/// the box or breaks the ordering.
inline std::optional<double> single_particle_energy_change(std::span<const double> x, std::size_t i,
                                                           double dx, const ModelParams& params) {
    const double L = params.length();
    const double moved = x[i] + dx;
    if (moved > 0.0 || moved < -L) return std::nullopt;
    double change = -params.force().integral(x[i], moved);
    if (i > 0) {
        const double d0 = x[i - 1] - x[i], d1 = x[i - 1] - moved;
        if (!(d1 > 0.0)) return std::nullopt;
        change += dx / (d0 * d1);
    }
    if (i + 1 < x.size()) {
        const double d0 = x[i] - x[i + 1], d1 = moved - x[i + 1];
        if (!(d1 > 0.0)) return std::nullopt;
        change += -dx / (d0 * d1);
    }
    return change;
}

/// Energy rises under +-eps moves of every particle (only the inward move for
/// particles sitting on a wall).
inline bool perturbation_certificate(const Configuration& config, const ModelParams& params, double eps) {
    const auto x = config.positions();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (double dx : {eps, -eps}) {
            const auto change = single_particle_energy_change(x, i, dx, params);
            if (!change) continue; // blocked by a wall
            if (!(*change > 0.0)) return false;
        }
    }
    return true;
}

/// True when the configuration satisfies the fixed-point conditions within tol:
/// every interior balance, plus the wall alternatives at both ends.
inline bool satisfies_fixed_point(const Configuration& config, const ModelParams& params, double tol) {
    const Residuals res = residuals(config, params);
    if (res.max_interior() > tol) return false;
    const double L = params.length();
    const bool tail_on_wall = config.position(config.n_gaps()) <= -L;
    const bool head_on_wall = config.position(0) >= 0.0;
    const bool tail_ok = tail_on_wall ? res.terminal_slack >= -tol : std::abs(res.terminal_slack) <= tol;
    const bool head_ok = head_on_wall ? res.head_slack >= -tol : std::abs(res.head_slack) <= tol;
    return tail_ok && head_ok;
}

/// Runs `minimize` from n_starts stratified starts and returns the distinct local
/// minima, sorted by energy.
///
/// Start j puts m_j particles right of the profile's peak (the largest breakpoint
/// value, or the midpoint for constant profiles), with m_j spread over 1..N, and
/// jitters every particle by up to a quarter of its local spacing.
inline std::vector<LocalMinimum> multi_start_fixed_points(const ModelParams& params, std::size_t n_starts,
                                                          const MinimizeSettings& settings) {
    if (n_starts < 2) throw ModelError(ErrorKind::InvalidArgument, "need at least two starts");
    const double L = params.length();
    const std::size_t n = params.n_gaps();
    const auto& F = params.force();

    double peak = -0.5 * L;
    if (F.kind() == ForceKind::PiecewiseLinear) {
        const auto& bps = F.as_piecewise().breakpoints;
        auto best = std::max_element(bps.begin(), bps.end(),
                                     [](const Breakpoint& p, const Breakpoint& q) { return p.value < q.value; });
        peak = std::clamp(best->position, -L, 0.0);
    }

    std::mt19937_64 rng(settings.seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const double eps = 1e-6 * params.length_scale();
    const double dedup = 10.0 * std::sqrt(static_cast<double>(n)) * eps;

    std::vector<LocalMinimum> found;
    for (std::size_t j = 0; j < n_starts; ++j) {
        const std::size_t right = 1 + (j * (n - 1)) / (n_starts - 1); // 1..N particles right of the peak
        const std::size_t left = n + 1 - right;
        std::vector<double> x(n + 1);
        const double right_span = -peak, left_span = L + peak;
        for (std::size_t i = 0; i < right; ++i)
            x[i] = -right_span * (static_cast<double>(i) + 0.5 + jitter(rng)) / static_cast<double>(right);
        for (std::size_t i = 0; i < left; ++i)
            x[right + i] = peak - left_span * (static_cast<double>(i) + 0.5 + jitter(rng)) /
                                      static_cast<double>(left);
        Configuration start(std::move(x), L);

        FixedPointResult r = minimize(params, start, settings);
        LocalMinimum lm{r, energy(r.config, params), j};
        lm.residuals_ok = satisfies_fixed_point(r.config, params, r.residual_tolerance);
        lm.perturbation_ok = perturbation_certificate(r.config, params, eps);
        found.push_back(std::move(lm));
    }

    std::stable_sort(found.begin(), found.end(), [](const LocalMinimum& p, const LocalMinimum& q) {
        return p.energy < q.energy;
    });
    std::vector<LocalMinimum> distinct;
    for (auto& cand : found) {
        bool duplicate = false;
        for (const auto& kept : distinct) {
            double d2 = 0.0;
            const auto a = cand.result.config.positions(), b = kept.result.config.positions();
            for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
            if (std::sqrt(d2) <= dedup) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) distinct.push_back(std::move(cand));
    }
    return distinct;
}

} // namespace coulomb_chain
