#pragma once

// Data types, the renormalized energy and the fixed-point residuals of a chain of
// N+1 equal charges on [-L, 0] with nearest-neighbour 1/|x| repulsion.
//
// Positions are ordered x_0 > x_1 > ... > x_N, x_0 = 0 side on the right.
// Gaps delta_k = x_{k-1} - x_k (k = 1..N), pressures f_k = delta_k^-2.
//
//   U / alpha_int = sum_k 1/delta_k - sum_i int_{-L}^{x_i} F(x) dx
//
// The force on particle k from the field is +F(x_k) (towards 0).

#include "coulomb_chain/errors.hpp"
#include "coulomb_chain/force_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coulomb_chain {

class ModelParams {
public:
    ModelParams(double length, std::size_t n_gaps, ForceProfile force)
        : length_(length), n_gaps_(n_gaps), declared_(std::move(force)) {
        if (!(length > 0.0) || !std::isfinite(length))
            throw ModelError(ErrorKind::InvalidArgument, "segment length must be > 0");
        if (n_gaps < 1)
            throw ModelError(ErrorKind::InvalidArgument, "need at least one gap (two particles)");
        resolved_ = declared_.resolved(n_gaps_);
        if (!resolved_.covers(-length_, 0.0))
            throw ModelError(ErrorKind::InvalidArgument,
                             "piecewise force profile must be defined on all of [-L, 0]");
    }

    double length() const noexcept { return length_; }
    std::size_t n_gaps() const noexcept { return n_gaps_; }
    std::size_t n_particles() const noexcept { return n_gaps_ + 1; }

    /// The profile as given (may be Scaled).
    const ForceProfile& declared_force() const noexcept { return declared_; }
    /// The profile every computation uses (Scaled already resolved to Constant).
    const ForceProfile& force() const noexcept { return resolved_; }

    /// L/N, the uniform gap.
    double length_scale() const noexcept { return length_ / static_cast<double>(n_gaps_); }
    /// (N/L)^2, the uniform pressure.
    double pressure_scale() const noexcept {
        const double s = 1.0 / length_scale();
        return s * s;
    }

private:
    double length_;
    std::size_t n_gaps_;
    ForceProfile declared_;
    ForceProfile resolved_;
};

/// Ordered particle positions. Gaps and pressures are always derived from the
/// stored positions.
class Configuration {
public:
    Configuration(std::vector<double> positions, double length) : positions_(std::move(positions)) {
        if (positions_.size() < 2)
            throw ModelError(ErrorKind::InvalidArgument, "a configuration needs at least two particles");
        for (std::size_t i = 0; i < positions_.size(); ++i)
            if (!std::isfinite(positions_[i]))
                throw ModelError(ErrorKind::InvalidArgument, "non-finite position", i);
        if (positions_.front() > 0.0)
            throw ModelError(ErrorKind::DomainError, "x_0 lies right of the wall at 0", 0);
        if (positions_.back() < -length)
            throw ModelError(ErrorKind::DomainError, "x_N lies left of the wall at -L",
                             positions_.size() - 1);
        for (std::size_t k = 1; k < positions_.size(); ++k)
            if (!(positions_[k - 1] - positions_[k] > 0.0))
                throw ModelError(ErrorKind::DegenerateConfiguration,
                                 "particles " + std::to_string(k - 1) + " and " + std::to_string(k) +
                                     " touch or cross",
                                 k);
    }

    std::span<const double> positions() const noexcept { return positions_; }
    double position(std::size_t i) const { return positions_.at(i); }
    std::size_t n_gaps() const noexcept { return positions_.size() - 1; }

    /// delta_k for k = 1..N.
    double gap(std::size_t k) const { return positions_.at(k - 1) - positions_.at(k); }
    /// f_k = delta_k^-2 for k = 1..N.
    double pressure(std::size_t k) const {
        const double d = gap(k);
        return 1.0 / (d * d);
    }

    /// delta_1..delta_N (0-based vector, entry k-1 holds delta_k).
    std::vector<double> gaps() const {
        std::vector<double> out(n_gaps());
        for (std::size_t k = 1; k <= n_gaps(); ++k) out[k - 1] = gap(k);
        return out;
    }
    std::vector<double> pressures() const {
        std::vector<double> out(n_gaps());
        for (std::size_t k = 1; k <= n_gaps(); ++k) out[k - 1] = pressure(k);
        return out;
    }

private:
    std::vector<double> positions_;
};

inline Configuration uniform_configuration(const ModelParams& params) {
    const std::size_t n = params.n_gaps();
    std::vector<double> x(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        x[k] = -params.length() * static_cast<double>(k) / static_cast<double>(n);
    x[n] = -params.length();
    return Configuration(std::move(x), params.length());
}

enum class Classification { BoundaryPinned, Interior };

constexpr std::string_view to_string(Classification c) {
    return c == Classification::BoundaryPinned ? "BoundaryPinned" : "Interior";
}

struct FixedPointResult {
    Configuration config;
    Classification classification;
    double delta1;
    double max_residual;
    /// The tolerance the producing solver promises max_residual respects.
    double residual_tolerance;
    std::size_t iterations;
};

/// Raw fixed-point diagnostics.
///   interior[k-1] = r_k = f_{k+1} + F(x_k) - f_k, k = 1..N-1
///   terminal_slack = f_N - F(x_N)   (0 when x_N floats, >= 0 when pinned at -L)
///   head_slack     = f_1 + F(x_0)   (0 when x_0 floats, >= 0 when pinned at 0)
struct Residuals {
    std::vector<double> interior;
    double terminal_slack = 0.0;
    double head_slack = 0.0;

    double max_interior() const {
        double m = 0.0;
        for (double r : interior) m = std::max(m, std::abs(r));
        return m;
    }
};

inline double energy(const Configuration& config, const ModelParams& params) {
    const auto x = config.positions();
    const double L = params.length();
    double interaction = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        const double d = x[k - 1] - x[k];
        if (!(d > 0.0))
            throw ModelError(ErrorKind::DegenerateConfiguration, "zero gap in energy evaluation", k);
        interaction += 1.0 / d;
    }
    const auto& F = params.force();
    double field = 0.0;
    if (F.kind() == ForceKind::Constant) {
        double sum = 0.0;
        for (double xi : x) sum += xi + L;
        field = F.as_constant().value * sum;
    } else {
        for (double xi : x) field += F.integral(-L, xi);
    }
    const double u = interaction - field;
    if (!std::isfinite(u))
        throw ModelError(ErrorKind::DegenerateConfiguration, "energy is not finite");
    return u;
}

/// U(to) - U(from), accumulated term by term so that small steps are resolved
/// far below the rounding level of U itself.
inline double energy_difference(std::span<const double> from, std::span<const double> to,
                                const ModelParams& params) {
    const auto& F = params.force();
    double diff = 0.0;
    for (std::size_t k = 1; k < from.size(); ++k) {
        const double d0 = from[k - 1] - from[k];
        const double d1 = to[k - 1] - to[k];
        if (!(d1 > 0.0) || !(d0 > 0.0))
            throw ModelError(ErrorKind::DegenerateConfiguration, "zero gap in energy difference", k);
        // 1/d1 - 1/d0 = (d0 - d1) / (d0 d1), with d0 - d1 formed from position increments
        const double change = (to[k] - from[k]) - (to[k - 1] - from[k - 1]);
        diff += change / (d0 * d1);
    }
    for (std::size_t i = 0; i < from.size(); ++i) diff -= F.integral(from[i], to[i]);
    return diff;
}

/// dU/dx_i for every particle:
///   i = 0        : -f_1 - F(x_0)
///   0 < i < N    :  f_i - f_{i+1} - F(x_i)   (= -r_i)
///   i = N        :  f_N - F(x_N)
inline std::vector<double> energy_gradient(std::span<const double> x, const ModelParams& params) {
    const auto& F = params.force();
    const std::size_t n = x.size() - 1;
    std::vector<double> g(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        const double d = x[k - 1] - x[k];
        const double f = 1.0 / (d * d);
        g[k - 1] -= f;
        g[k] += f;
    }
    for (std::size_t i = 0; i <= n; ++i) g[i] -= F(x[i]);
    return g;
}

inline std::vector<double> energy_gradient(const Configuration& config, const ModelParams& params) {
    return energy_gradient(config.positions(), params);
}

inline Residuals residuals(const Configuration& config, const ModelParams& params) {
    const auto& F = params.force();
    const std::size_t n = config.n_gaps();
    Residuals out;
    out.interior.resize(n - 1);
    double f_prev = config.pressure(1);
    for (std::size_t k = 1; k < n; ++k) {
        const double f_next = config.pressure(k + 1);
        out.interior[k - 1] = f_next + F(config.position(k)) - f_prev;
        f_prev = f_next;
    }
    out.terminal_slack = config.pressure(n) - F(config.position(n));
    out.head_slack = config.pressure(1) + F(config.position(0));
    return out;
}

} // namespace coulomb_chain
