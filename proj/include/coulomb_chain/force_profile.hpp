#pragma once

#include "coulomb_chain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coulomb_chain {

// The library only ever sees the renormalized force F = (alpha_ext / alpha_int) F0,
// which carries units of length^-2 so that it balances the gap pressures 1/delta^2.

struct ConstantForce {
    double value = 0.0;
};

struct Breakpoint {
    double position = 0.0;
    double value = 0.0;
};

/// Linear interpolation between breakpoints; flat extrapolation outside them.
struct PiecewiseLinearForce {
    std::vector<Breakpoint> breakpoints;
};

/// F = c * N^gamma, resolved against the gap count when a model is built.
struct ScaledForce {
    double c = 0.0;
    double gamma = 0.0;
};

enum class ForceKind { Constant, PiecewiseLinear, Scaled };

class ForceProfile {
public:
    using Variant = std::variant<ConstantForce, PiecewiseLinearForce, ScaledForce>;

    ForceProfile() : kind_(ConstantForce{}) {}

    static ForceProfile constant(double value) {
        if (!std::isfinite(value) || value < 0.0)
            throw ModelError(ErrorKind::InvalidArgument,
                             "constant force must be finite and >= 0, got " + std::to_string(value));
        return ForceProfile(ConstantForce{value});
    }

    static ForceProfile piecewise_linear(std::vector<Breakpoint> breakpoints) {
        if (breakpoints.empty())
            throw ModelError(ErrorKind::InvalidArgument, "piecewise profile needs at least one breakpoint");
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (!std::isfinite(breakpoints[i].position) || !std::isfinite(breakpoints[i].value))
                throw ModelError(ErrorKind::InvalidArgument, "non-finite breakpoint", i);
            if (i > 0 && !(breakpoints[i].position > breakpoints[i - 1].position))
                throw ModelError(ErrorKind::InvalidArgument,
                                 "breakpoint positions must be strictly increasing", i);
        }
        return ForceProfile(PiecewiseLinearForce{std::move(breakpoints)});
    }

    static ForceProfile scaled(double c, double gamma) {
        if (!(c > 0.0) || !(gamma > 0.0) || !std::isfinite(c) || !std::isfinite(gamma))
            throw ModelError(ErrorKind::InvalidArgument, "scaled force needs c > 0 and gamma > 0");
        return ForceProfile(ScaledForce{c, gamma});
    }

    /// Builds the renormalized profile from a physical one: every force value
    /// (or the coefficient c) is multiplied by alpha_ext / alpha_int.
    static ForceProfile from_physical(double alpha_ext, double alpha_int, const ForceProfile& f0) {
        if (!(alpha_ext > 0.0) || !(alpha_int > 0.0))
            throw ModelError(ErrorKind::InvalidArgument, "alpha_ext and alpha_int must be positive");
        const double ratio = alpha_ext / alpha_int;
        return std::visit(
            [ratio](const auto& k) -> ForceProfile {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, ConstantForce>) {
                    return constant(ratio * k.value);
                } else if constexpr (std::is_same_v<T, PiecewiseLinearForce>) {
                    auto bps = k.breakpoints;
                    for (auto& bp : bps) bp.value *= ratio;
                    return piecewise_linear(std::move(bps));
                } else {
                    return scaled(ratio * k.c, k.gamma);
                }
            },
            f0.kind_);
    }

    ForceKind kind() const noexcept { return static_cast<ForceKind>(kind_.index()); }
    const Variant& variant() const noexcept { return kind_; }

    bool is_scaled() const noexcept { return kind() == ForceKind::Scaled; }
    const ScaledForce& scaling() const { return std::get<ScaledForce>(kind_); }
    const ConstantForce& as_constant() const { return std::get<ConstantForce>(kind_); }
    const PiecewiseLinearForce& as_piecewise() const { return std::get<PiecewiseLinearForce>(kind_); }

    /// Scaled profiles become Constant(c * n^gamma); everything else is returned unchanged.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized" // spurious on std::variant storage (GCC 11)
#endif
    ForceProfile resolved(std::size_t n_gaps) const {
        if (!is_scaled()) return *this;
        const auto [c, gamma] = scaling();
        return constant(c * std::pow(static_cast<double>(n_gaps), gamma));
    }
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

    double operator()(double x) const {
        switch (kind()) {
        case ForceKind::Constant: return as_constant().value;
        case ForceKind::PiecewiseLinear: return eval_piecewise(as_piecewise().breakpoints, x);
        case ForceKind::Scaled: break;
        }
        throw unresolved();
    }

    /// dF/dx at x (right derivative at breakpoints, zero outside the breakpoint range).
    double slope(double x) const {
        switch (kind()) {
        case ForceKind::Constant: return 0.0;
        case ForceKind::PiecewiseLinear: {
            const auto& bps = as_piecewise().breakpoints;
            if (bps.size() < 2 || x < bps.front().position || x >= bps.back().position) return 0.0;
            const std::size_t i = segment_of(bps, x);
            return (bps[i + 1].value - bps[i].value) / (bps[i + 1].position - bps[i].position);
        }
        case ForceKind::Scaled: break;
        }
        throw unresolved();
    }

    /// Exact integral of F over [a, b] (sign-reversed when b < a).
    double integral(double a, double b) const {
        if (b < a) return -integral(b, a);
        switch (kind()) {
        case ForceKind::Constant: return as_constant().value * (b - a);
        case ForceKind::PiecewiseLinear: return integrate_piecewise(as_piecewise().breakpoints, a, b);
        case ForceKind::Scaled: break;
        }
        throw unresolved();
    }

    /// True when F never increases with x. Constant always passes.
    bool is_nonincreasing() const {
        if (kind() == ForceKind::Scaled) throw unresolved();
        if (kind() == ForceKind::Constant) return true;
        const auto& bps = as_piecewise().breakpoints;
        for (std::size_t i = 1; i < bps.size(); ++i)
            if (bps[i].value - bps[i - 1].value > 0.0) return false;
        return true;
    }

    /// Minimum and maximum of F over [lo, hi]; linear pieces attain them at endpoints or breakpoints.
    std::pair<double, double> range_on(double lo, double hi) const {
        if (kind() == ForceKind::Scaled) throw unresolved();
        double mn = (*this)(lo), mx = mn;
        auto take = [&](double v) { mn = std::min(mn, v); mx = std::max(mx, v); };
        take((*this)(hi));
        if (kind() == ForceKind::PiecewiseLinear)
            for (const auto& bp : as_piecewise().breakpoints)
                if (bp.position > lo && bp.position < hi) take(bp.value);
        return {mn, mx};
    }

    /// True when the breakpoint range covers [lo, hi] (Constant always covers).
    bool covers(double lo, double hi) const {
        if (kind() != ForceKind::PiecewiseLinear) return true;
        const auto& bps = as_piecewise().breakpoints;
        return bps.front().position <= lo && bps.back().position >= hi;
    }

private:
    explicit ForceProfile(Variant v) : kind_(std::move(v)) {}

    static ModelError unresolved() {
        return ModelError(ErrorKind::InvalidArgument,
                          "scaled force must be resolved against a gap count before evaluation");
    }

    // index i with bps[i].position <= x < bps[i+1].position; requires x inside the range
    static std::size_t segment_of(const std::vector<Breakpoint>& bps, double x) {
        auto it = std::upper_bound(bps.begin(), bps.end(), x,
                                   [](double v, const Breakpoint& bp) { return v < bp.position; });
        auto i = static_cast<std::size_t>(std::distance(bps.begin(), it));
        return std::min(i == 0 ? 0 : i - 1, bps.size() - 2);
    }

    static double eval_piecewise(const std::vector<Breakpoint>& bps, double x) {
        if (x <= bps.front().position) return bps.front().value;
        if (x >= bps.back().position) return bps.back().value;
        const std::size_t i = segment_of(bps, x);
        const double t = (x - bps[i].position) / (bps[i + 1].position - bps[i].position);
        return bps[i].value + t * (bps[i + 1].value - bps[i].value);
    }

    static double integrate_piecewise(const std::vector<Breakpoint>& bps, double a, double b) {
        // Split [a, b] at the breakpoints; F is linear (or flat) on every piece, so the
        // trapezoid rule on each piece is exact.
        double total = 0.0;
        double left = a;
        auto add_piece = [&](double right) {
            if (right > left) {
                total += 0.5 * (right - left) * (eval_piecewise(bps, left) + eval_piecewise(bps, right));
                left = right;
            }
        };
        for (const auto& bp : bps) {
            if (bp.position <= a) continue;
            if (bp.position >= b) break;
            add_piece(bp.position);
        }
        add_piece(b);
        return total;
    }

    Variant kind_;
};

} // namespace coulomb_chain
