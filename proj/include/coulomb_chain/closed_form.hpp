#pragma once

// Explicit results for a constant force F.
//
// Summing the force balance gives f_k = f_1 - (k-1) F, hence
//   delta_k = (delta_1^-2 - (k-1) F)^-1/2,
// valid while 1 - delta_1^2 (k-1) F > 0.
//
// On the half line (-inf, 0] the chain floats with f_N = F, so f_k = (N-k+1) F and
// -x_N = F^-1/2 sum_{k=1..N} k^-1/2. The chain on [-L, 0] leaves the wall exactly
// when that extent drops below L, giving
//   F_cr = (sum_{k=1..N} k^-1/2 / L)^2 ~ (4 / L^2) N.
//
// Limiting densities for F = c N^gamma (rho integrates to 1 over [-L, 0]):
//
//   gamma < 1            uniform, rho = 1/L.
//   gamma = 1, c <= c_cr delta_1 = b L/N and delta_k ~ (b L/N)(1 - s b^2 a)^-1/2 at
//                        k = aN, s = c L^2. Normalizing sum delta_k = L gives
//                        2b / (1 + sqrt(1 - s b^2)) = 1. With u(a) = sqrt(1 - s b^2 a)
//                        the position is x(a) = -(2L / (s b)) (1 - u), and the density
//                        1/(N delta) becomes rho(x) = u / (b L) = 1/(bL) + c x / 2.
//   gamma = 1, c > c_cr  the half-line chain: delta_k ~ (1/N)((1 - a) c)^-1/2, so
//                        x(a) = -(2/sqrt c)(1 - sqrt(1 - a)) and
//                        rho(x) = sqrt(c) (1 + x sqrt(c) / 2) on [-2/sqrt c, 0], zero left of it.
//   gamma > 1            all mass collapses onto x = 0.

#include "coulomb_chain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace coulomb_chain {

/// delta_1..delta_N from the first gap for a constant force.
inline std::vector<double> gaps_constant_force(double delta1, double force, std::size_t n_gaps) {
    if (!(delta1 > 0.0) || force < 0.0 || n_gaps < 1)
        throw ModelError(ErrorKind::InvalidArgument, "need delta1 > 0, F >= 0, N >= 1");
    std::vector<double> gaps(n_gaps);
    const double f1 = 1.0 / (delta1 * delta1);
    for (std::size_t k = 1; k <= n_gaps; ++k) {
        const double fk = f1 - static_cast<double>(k - 1) * force;
        if (!(fk > 0.0))
            throw ModelError(ErrorKind::DomainError,
                             "1 - delta1^2 (k-1) F <= 0 at k = " + std::to_string(k), k);
        gaps[k - 1] = 1.0 / std::sqrt(fk);
    }
    return gaps;
}

/// Gaps of the floating chain on the half line.
inline std::vector<double> aux_model_gaps(double force, std::size_t n_gaps) {
    if (!(force > 0.0) || !std::isfinite(force))
        throw ModelError(ErrorKind::InvalidArgument, "half-line model needs F > 0");
    if (n_gaps < 1) throw ModelError(ErrorKind::InvalidArgument, "need N >= 1");
    std::vector<double> gaps(n_gaps);
    for (std::size_t k = 1; k <= n_gaps; ++k)
        gaps[k - 1] = 1.0 / std::sqrt(static_cast<double>(n_gaps - k + 1) * force);
    return gaps;
}

/// sum_{k=1..n} k^-1/2, smallest terms first.
inline double inverse_sqrt_sum(std::size_t n) {
    double s = 0.0;
    for (std::size_t k = n; k >= 1; --k) s += 1.0 / std::sqrt(static_cast<double>(k));
    return s;
}

/// Extent -x_N of the half-line chain.
inline double aux_model_extent(double force, std::size_t n_gaps) {
    if (!(force > 0.0)) throw ModelError(ErrorKind::InvalidArgument, "half-line model needs F > 0");
    return inverse_sqrt_sum(n_gaps) / std::sqrt(force);
}

inline double critical_force_exact(std::size_t n_gaps, double length) {
    if (n_gaps < 1 || !(length > 0.0))
        throw ModelError(ErrorKind::InvalidArgument, "need N >= 1 and L > 0");
    const double s = inverse_sqrt_sum(n_gaps) / length;
    return s * s;
}

/// c_cr = 4 / L^2.
inline double c_critical(double length) {
    if (!(length > 0.0)) throw ModelError(ErrorKind::InvalidArgument, "need L > 0");
    return 4.0 / (length * length);
}

struct CriticalForce {
    double exact;
    double asymptotic_coefficient;
};

inline CriticalForce critical_force(std::size_t n_gaps, double length) {
    return {critical_force_exact(n_gaps, length), c_critical(length)};
}

/// Scale factor b of the first gap (delta_1 = b L / N) in the pinned, non-uniform
/// regime F = c N with 0 < c <= c_cr. Solves 2b / (1 + sqrt(1 - c L^2 b^2)) = 1 by
/// bisection on (0, min(1, 1/(L sqrt c))].
inline double phase2_scaling_factor(double c, double length) {
    if (!(length > 0.0)) throw ModelError(ErrorKind::InvalidArgument, "need L > 0");
    const double s = c * length * length;
    if (!(c > 0.0) || s > 4.0)
        throw ModelError(ErrorKind::DomainError, "phase-2 scaling needs 0 < c <= 4/L^2");
    // b * int_0^1 (1 - s b^2 a)^-1/2 da, written without cancellation
    auto normalized_length = [s](double b) {
        return 2.0 * b / (1.0 + std::sqrt(std::max(0.0, 1.0 - s * b * b)));
    };
    double lo = 0.0;
    double hi = std::min(1.0, 1.0 / std::sqrt(s));
    if (normalized_length(hi) <= 1.0) return hi;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (normalized_length(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

enum class DensityPhase { Uniform, SmoothPositive, Detached, DeltaAtOrigin };

constexpr std::string_view to_string(DensityPhase p) {
    switch (p) {
    case DensityPhase::Uniform: return "Uniform";
    case DensityPhase::SmoothPositive: return "SmoothPositive";
    case DensityPhase::Detached: return "Detached";
    case DensityPhase::DeltaAtOrigin: return "DeltaAtOrigin";
    }
    return "Unknown";
}

struct AsymptoticDensity {
    DensityPhase phase = DensityPhase::Uniform;
    double length = 1.0;
    double c = 0.0;
    /// delta_1 = b L / N (SmoothPositive only).
    double b = 1.0;
    /// Left end of the support (-L except for Detached).
    double support_left = -1.0;

    bool has_pointwise() const noexcept { return phase != DensityPhase::DeltaAtOrigin; }

    /// rho(x) on [-L, 0]; the delta phase has no pointwise value.
    double operator()(double x) const {
        switch (phase) {
        case DensityPhase::Uniform: return 1.0 / length;
        case DensityPhase::SmoothPositive: {
            // invert x(a) = -(2L/(s b))(1 - u) for u = sqrt(1 - s b^2 a); rho = u / (bL)
            const double s = c * length * length;
            const double u = 1.0 + s * b * x / (2.0 * length);
            return u / (b * length);
        }
        case DensityPhase::Detached: {
            if (x < support_left) return 0.0;
            const double rc = std::sqrt(c);
            return rc * (1.0 + 0.5 * x * rc);
        }
        case DensityPhase::DeltaAtOrigin: break;
        }
        throw ModelError(ErrorKind::DomainError, "delta density has no pointwise value");
    }

    /// Predicted fraction of particles in [lo, hi].
    double mass(double lo, double hi) const {
        if (hi < lo) std::swap(lo, hi);
        if (phase == DensityPhase::DeltaAtOrigin) return (lo <= 0.0 && 0.0 <= hi) ? 1.0 : 0.0;
        const double a = std::max(lo, support_left);
        const double z = std::min(hi, 0.0);
        if (!(z > a)) return 0.0;
        // rho is linear on its support
        return 0.5 * (z - a) * ((*this)(a) + (*this)(z));
    }
};

/// Limiting density for F = c N^gamma on [-L, 0].
inline AsymptoticDensity asymptotic_density(double c, double gamma, double length) {
    if (!(c > 0.0) || !(gamma > 0.0) || !(length > 0.0))
        throw ModelError(ErrorKind::InvalidArgument, "need c > 0, gamma > 0, L > 0");
    AsymptoticDensity d;
    d.length = length;
    d.c = c;
    d.support_left = -length;
    if (gamma < 1.0) {
        d.phase = DensityPhase::Uniform;
    } else if (gamma > 1.0) {
        d.phase = DensityPhase::DeltaAtOrigin;
        d.support_left = 0.0;
    } else if (c <= c_critical(length)) {
        d.phase = DensityPhase::SmoothPositive;
        d.b = phase2_scaling_factor(c, length);
    } else {
        d.phase = DensityPhase::Detached;
        d.support_left = -2.0 / std::sqrt(c);
    }
    return d;
}

} // namespace coulomb_chain
