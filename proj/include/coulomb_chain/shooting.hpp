#pragma once

// Shooting construction of the fixed point for non-negative, non-increasing force
// profiles. Given the first gap delta_1 the force balance
//
//   f_{k+1} = f_k - F(x_k),   delta_{k+1} = f_{k+1}^{-1/2},   x_{k+1} = x_k - delta_{k+1}
//
// fixes the whole chain. x_N and h = f_N - F(x_N) both decrease strictly with
// delta_1, so delta_1 is located by bisection on
//
//   P(delta_1) = [chain completes] and [x_N > -L] and [h > 0],
//
// which holds for small delta_1 and fails for large delta_1. Whichever of the two
// terminal conditions fails first at the bracket decides between a chain pinned at
// the wall (x_N = -L, f_N >= F(-L)) and a floating chain (x_N > -L, f_N = F(x_N)).

#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/force_profile.hpp"
#include "coulomb_chain/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace coulomb_chain {

struct ShootingOutcome {
    enum class Status { Complete, PressureCollapse };

    Status status = Status::Complete;
    /// Smallest k with f_k <= 0 (PressureCollapse only).
    std::size_t collapse_index = 0;
    /// x_0..x_N when Complete; x_0..x_{k-1} on collapse. May run past -L.
    std::vector<double> positions;
    /// f_1..f_N (entry k-1 holds f_k) for the computed part of the chain.
    std::vector<double> pressures;

    bool complete() const noexcept { return status == Status::Complete; }
    double terminal_position() const { return positions.back(); }
    double terminal_pressure() const { return pressures.back(); }
    double terminal_force = 0.0;
};

/// Generates the chain from delta_1 ignoring the wall at -L.
inline ShootingOutcome shoot(double delta1, const ModelParams& params) {
    if (!(delta1 > 0.0) || !std::isfinite(delta1))
        throw ModelError(ErrorKind::InvalidArgument, "delta1 must be positive and finite");
    const auto& F = params.force();
    const std::size_t n = params.n_gaps();

    ShootingOutcome out;
    out.positions.reserve(n + 1);
    out.pressures.reserve(n);
    out.positions.push_back(0.0);
    double f = 1.0 / (delta1 * delta1);
    out.pressures.push_back(f);
    out.positions.push_back(-delta1);
    for (std::size_t k = 1; k < n; ++k) {
        f -= F(out.positions[k]);
        if (!(f > 0.0)) {
            out.status = ShootingOutcome::Status::PressureCollapse;
            out.collapse_index = k + 1;
            return out;
        }
        out.pressures.push_back(f);
        out.positions.push_back(out.positions[k] - 1.0 / std::sqrt(f));
    }
    out.terminal_force = F(out.positions.back());
    return out;
}

struct SolveSettings {
    /// Bisection stops once the delta_1 bracket is narrower than tol_rel * delta_1.
    double tol_rel = 1e-12;
    std::size_t max_iter = 200;
};

/// Pressure tolerance a solve with `settings` promises for a configuration whose
/// largest pressure is f_max: tol_rel (N/L)^2 plus the rounding floor of deriving
/// gaps from stored positions (each gap carries an error of about eps * L).
inline double fixed_point_residual_tolerance(const ModelParams& params, const SolveSettings& settings,
                                             double f_max) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return settings.tol_rel * params.pressure_scale() +
           8.0 * eps * params.length() * f_max * std::sqrt(f_max);
}

namespace detail {

struct Probe {
    ShootingOutcome outcome;
    bool wall_crossed = false;   // chain complete and x_N <= -L
    bool balance_failed = false; // collapse or f_N - F(x_N) <= 0
    double wall_gap = 0.0;       // x_N + L
    double balance = 0.0;        // f_N - F(x_N)

    bool ok() const noexcept { return !wall_crossed && !balance_failed; }
};

inline Probe probe(double delta1, const ModelParams& params) {
    Probe p{shoot(delta1, params)};
    if (!p.outcome.complete()) {
        p.balance_failed = true;
        return p;
    }
    p.wall_gap = p.outcome.terminal_position() + params.length();
    p.balance = p.outcome.terminal_pressure() - p.outcome.terminal_force;
    p.wall_crossed = !(p.wall_gap > 0.0);
    p.balance_failed = !(p.balance > 0.0);
    return p;
}

inline void require_monotone_nonnegative(const ForceProfile& F) {
    if (!F.is_nonincreasing())
        throw ModelError(ErrorKind::MonotonicityViolation,
                         "force profile increases somewhere; the fixed point need not be unique");
    if (F.kind() == ForceKind::PiecewiseLinear) {
        const auto& bps = F.as_piecewise().breakpoints;
        for (std::size_t i = 0; i < bps.size(); ++i)
            if (bps[i].value < 0.0)
                throw ModelError(ErrorKind::DomainError, "force profile must be non-negative", i);
    }
}

// Linear interpolation of a monotone function between a bracket [lo, hi] with
// values of opposite sign; falls back to the midpoint on degenerate input.
inline double secant_root(double lo, double hi, double v_lo, double v_hi) {
    const double denom = v_lo - v_hi;
    if (!(denom > 0.0) || !std::isfinite(denom)) return lo + 0.5 * (hi - lo);
    const double t = std::clamp(v_lo / denom, 0.0, 1.0);
    return lo + t * (hi - lo);
}

} // namespace detail

/// The unique fixed point for a non-negative, non-increasing profile.
inline FixedPointResult solve_fixed_point(const ModelParams& params, const SolveSettings& settings = {}) {
    if (!(settings.tol_rel > 0.0))
        throw ModelError(ErrorKind::InvalidArgument, "tol_rel must be positive");
    const auto& F = params.force();
    detail::require_monotone_nonnegative(F);

    const double L = params.length();
    const std::size_t n = params.n_gaps();

    // Upper end: gaps never shrink under a non-negative force, so delta_1 > L/N
    // overshoots the wall. For constant F the positivity bound is sharper.
    double hi = params.length_scale() * (1.0 + 1e-9);
    if (F.kind() == ForceKind::Constant && n > 1 && F.as_constant().value > 0.0)
        hi = std::min(hi, 1.0 / std::sqrt(static_cast<double>(n - 1) * F.as_constant().value));
    detail::Probe p_hi = detail::probe(hi, params);
    for (std::size_t grow = 0; p_hi.ok(); ++grow) {
        if (grow > 200) throw ModelError(ErrorKind::NoConvergence, "could not bracket delta1 from above");
        hi *= 2.0;
        p_hi = detail::probe(hi, params);
    }

    double lo = hi * 1e-3;
    detail::Probe p_lo = detail::probe(lo, params);
    while (!p_lo.ok()) {
        lo *= 1e-3;
        if (lo < 1e-150) throw ModelError(ErrorKind::NoConvergence, "could not bracket delta1 from below");
        p_lo = detail::probe(lo, params);
    }

    std::size_t iterations = 0;
    bool converged = false;
    while (iterations < settings.max_iter) {
        if (hi - lo <= settings.tol_rel * lo) {
            converged = true;
            break;
        }
        const double mid = lo + 0.5 * (hi - lo);
        if (!(mid > lo) || !(mid < hi)) {
            converged = true;
            break;
        }
        ++iterations;
        detail::Probe p = detail::probe(mid, params);
        if (p.ok()) {
            lo = mid;
            p_lo = std::move(p);
        } else {
            hi = mid;
            p_hi = std::move(p);
        }
    }
    if (!converged && hi - lo <= settings.tol_rel * lo) converged = true;
    if (!converged)
        throw ModelError(ErrorKind::NoConvergence,
                         "delta1 bisection did not converge in " + std::to_string(settings.max_iter) +
                             " iterations");

    // The wall wins ties: equality at the critical force counts as pinned.
    const bool pinned = p_hi.wall_crossed;

    // One secant step inside the final bracket removes the residual bracket width
    // from the terminal condition that decided the classification.
    double delta1 = lo;
    std::vector<double> x = p_lo.outcome.positions;
    if (pinned) {
        const double d = detail::secant_root(lo, hi, p_lo.wall_gap, p_hi.wall_gap);
        auto polished = shoot(d, params);
        if (polished.complete()) {
            delta1 = d;
            x = std::move(polished.positions);
        }
    } else if (p_hi.outcome.complete()) {
        const double d = detail::secant_root(lo, hi, p_lo.balance, p_hi.balance);
        auto polished = shoot(d, params);
        if (polished.complete() && polished.terminal_position() > -L) {
            delta1 = d;
            x = std::move(polished.positions);
        }
    }

    Classification classification = pinned ? Classification::BoundaryPinned : Classification::Interior;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (classification == Classification::Interior && x.back() + L <= 4.0 * eps * L)
        classification = Classification::BoundaryPinned;
    if (classification == Classification::BoundaryPinned) {
        // x_N carries the summation noise of N gaps; spread the mismatch over all
        // gaps instead of dumping it into delta_N.
        const double scale = L / -x.back();
        for (double& xi : x) xi *= scale;
        x.back() = -L;
        delta1 = -x[1];
    }

    Configuration config(std::move(x), L);
    const Residuals res = residuals(config, params);
    double f_max = 0.0;
    for (std::size_t k = 1; k <= n; ++k) f_max = std::max(f_max, config.pressure(k));
    const double tol = fixed_point_residual_tolerance(params, settings, f_max);
    const double max_res = res.max_interior();

    if (max_res > tol)
        throw ModelError(ErrorKind::NoConvergence,
                         "fixed-point residual " + std::to_string(max_res) + " exceeds tolerance " +
                             std::to_string(tol));
    if (classification == Classification::Interior && std::abs(res.terminal_slack) > tol)
        throw ModelError(ErrorKind::NoConvergence, "terminal force balance not met");
    if (classification == Classification::BoundaryPinned && res.terminal_slack < -tol)
        throw ModelError(ErrorKind::NoConvergence, "pinned chain pulls away from the wall");

    return FixedPointResult{std::move(config), classification, delta1, max_res, tol, iterations};
}

struct WallForceSettings {
    /// Relative width of the final force bracket.
    double tol_rel = 1e-10;
    std::size_t max_iter = 200;
    SolveSettings solve{};
};

/// Numerical critical force: the constant F at which x_N leaves the wall.
/// The force magnitude stored in `params` is ignored; only N and L are used.
inline double wall_force(const ModelParams& params, const WallForceSettings& settings = {}) {
    if (params.force().kind() != ForceKind::Constant)
        throw ModelError(ErrorKind::InvalidArgument, "wall_force needs a constant force profile");
    const double L = params.length();
    const std::size_t n = params.n_gaps();
    auto pinned_at = [&](double force) {
        ModelParams p(L, n, ForceProfile::constant(force));
        return solve_fixed_point(p, settings.solve).classification == Classification::BoundaryPinned;
    };

    double lo = 0.0;
    double hi = static_cast<double>(n) / (L * L);
    for (std::size_t grow = 0; pinned_at(hi); ++grow) {
        if (grow > 200) throw ModelError(ErrorKind::NoConvergence, "could not bracket the wall force");
        lo = hi;
        hi *= 2.0;
    }
    for (std::size_t it = 0; it < settings.max_iter; ++it) {
        if (hi - lo <= settings.tol_rel * hi) return lo + 0.5 * (hi - lo);
        const double mid = lo + 0.5 * (hi - lo);
        (pinned_at(mid) ? lo : hi) = mid;
    }
    throw ModelError(ErrorKind::NoConvergence, "wall force bisection did not converge");
}

} // namespace coulomb_chain
