// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "coulomb_chain/coulomb_chain.hpp"
#include "../oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace coulomb_chain;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Random non-negative, non-increasing profile on [-1, 0]: constant or piecewise
// linear with up to five breakpoints, sized against the critical force.
ForceProfile random_profile(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double scale = 3.0 * oracle::critical_force(n, 1.0) * u(rng);
    if (u(rng) < 0.3) return ForceProfile::constant(scale);
    const std::size_t m = 2 + static_cast<std::size_t>(u(rng) * 4);
    std::vector<double> xs{-1.0, 0.0}, vs;
    for (std::size_t i = 2; i < m; ++i) xs.push_back(-u(rng));
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i < xs.size(); ++i) vs.push_back(scale * u(rng));
    std::sort(vs.begin(), vs.end(), std::greater<>());
    std::vector<Breakpoint> bps;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (bps.empty() || xs[i] > bps.back().position) bps.push_back({xs[i], vs[i]});
    if (bps.back().position < 0.0) bps.push_back({0.0, vs.back()});
    return ForceProfile::piecewise_linear(std::move(bps));
}

Outcome criterion1() {
    const std::size_t n = 1000;
    const double bound = 1e-9 * double(n) * double(n);
    std::mt19937_64 rng(2024);
    const auto t0 = Clock::now();
    double worst = 0.0;
    int bad_class = 0, pinned = 0;
    for (int t = 0; t < 200; ++t) {
        ModelParams p(1.0, n, random_profile(rng, n));
        const auto r = solve_fixed_point(p);
        // residuals recomputed from the returned positions, not taken from the solver
        const auto res = residuals(r.config, p);
        worst = std::max(worst, res.max_interior());
        const double x_n = r.config.position(n);
        bool ok;
        if (r.classification == Classification::BoundaryPinned) {
            ++pinned;
            ok = x_n == -1.0 && res.terminal_slack >= -bound;
        } else {
            ok = x_n > -1.0 && std::abs(res.terminal_slack) <= bound;
        }
        if (p.force().kind() == ForceKind::Constant) {
            const bool floats = p.force().as_constant().value > oracle::critical_force(n, 1.0);
            ok = ok && floats == (r.classification == Classification::Interior);
        }
        bad_class += !ok;
    }
    const double secs = seconds_since(t0);
    return {worst <= bound && bad_class == 0 && secs < 10.0,
            fmt("max residual %.3g (bound %.3g), %d misclassified, %d/200 pinned, %.2f s", worst, bound, bad_class,
                pinned, secs)};
}

Outcome criterion2() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::size_t n = 2; n <= 8; ++n) {
        for (double F : {0.0, 1.0, 10.0, 1.5 * oracle::critical_force(n, 1.0)}) {
            ModelParams p(1.0, n, ForceProfile::constant(F));
            const auto direct = solve_fixed_point(p);
            const auto min = minimize(p, uniform_configuration(p), MinimizeSettings::defaults_for(p));
            for (std::size_t i = 0; i <= n; ++i)
                worst = std::max(worst, std::abs(direct.config.position(i) - min.config.position(i)));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && secs < 60.0, fmt("max |x_solver - x_oracle| = %.3g, %.2f s", worst, secs)};
}

Outcome criterion3() {
    const double w = wall_force(ModelParams(1.0, 100, ForceProfile::constant(0.0)));
    const double exact = oracle::critical_force(100, 1.0);
    const double rel = std::abs(w - exact) / exact;
    return {rel <= 1e-6 && std::abs(critical_force_exact(100, 1.0) - exact) <= 1e-9 * exact,
            fmt("wall force %.10f, sum formula %.10f, relative difference %.3g", w, exact, rel)};
}

Outcome criterion4() {
    bool ok = true;
    double prev = 1e300;
    std::ostringstream d;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        const double ratio = critical_force_exact(n, 1.0) / double(n);
        const double err = std::abs(ratio - 4.0);
        const double bound = 2.0 * 1.4604 * 2.0 / std::sqrt(double(n));
        ok = ok && err < bound && err < prev;
        prev = err;
        d << "N=" << n << ": F_cr/N=" << ratio << " (err " << err << " < " << bound << ") ";
    }
    return {ok, d.str()};
}

Outcome criterion5() {
    const auto t0 = Clock::now();
    ModelParams p(1.0, 10000, ForceProfile::scaled(16.0, 1.0));
    const auto r = solve_fixed_point(p);
    const auto rep = classify_phase(p, r);
    const auto h = histogram(r.config, 1.0, 200);
    double left = 0.0;
    for (std::size_t i = 0; i < h.n_bins(); ++i)
        if (h.bin_edges[i + 1] <= -0.55 + 1e-12) left += h.mass[i];
    const double x_n = r.config.position(10000);
    const double secs = seconds_since(t0);
    return {std::abs(x_n + 0.5) < 0.01 && rep.detected == DensityPhase::Detached && left < 0.005 && secs < 5.0,
            fmt("x_N = %.6f, detected %s, mass left of -0.55 = %.4g, %.2f s", x_n,
                std::string(to_string(rep.detected)).c_str(), left, secs)};
}

Outcome criterion6() {
    bool ok = true;
    double prev = 1e300, last = 0.0;
    std::ostringstream d;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        ModelParams p(1.0, n, ForceProfile::constant(std::sqrt(double(n))));
        const double dev = scaled_gap_deviation(solve_fixed_point(p).config, 1.0);
        ok = ok && dev < prev;
        prev = last = dev;
        d << "N=" << n << ": N*maxdev=" << dev << " ";
    }
    return {ok && last < 0.02, d.str()};
}

Outcome criterion7() {
    const std::size_t n = 10000;
    auto scaled_first_gap = [&](double c) {
        ModelParams p(1.0, n, ForceProfile::scaled(c, 1.0));
        return solve_fixed_point(p).config.gap(1) * double(n);
    };
    const double b2 = phase2_scaling_factor(2.0, 1.0), b4 = phase2_scaling_factor(4.0, 1.0);
    const double s2 = scaled_first_gap(2.0), s4 = scaled_first_gap(4.0);
    const double e2 = std::abs(s2 - b2) / b2, e4 = std::abs(s4 - 0.5) / 0.5;
    return {e2 < 0.02 && std::abs(b4 - 0.5) < 1e-9 && e4 < 0.03,
            fmt("c=2: solver %.6f vs b %.6f (%.3g%%); c=4: b %.9f, solver %.6f (%.3g%%)", s2, b2, 100 * e2, b4, s4,
                100 * e4)};
}

Outcome criterion8() {
    bool ok = true;
    double prev = 1e300;
    std::ostringstream d;
    double mass = 0.0, last = 0.0;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        ModelParams p(1.0, n, ForceProfile::scaled(1.0, 2.0));
        const auto r = solve_fixed_point(p);
        const double ext = std::abs(r.config.position(n));
        ok = ok && ext < prev;
        prev = last = ext;
        d << "N=" << n << ": |x_N|=" << ext << " ";
        if (n == 10000) {
            const auto h = histogram(r.config, 1.0, 20); // last bin is [-0.05, 0]
            mass = h.mass.back();
        }
    }
    d << "mass in [-0.05, 0] = " << mass;
    return {ok && last < 0.05 && mass > 0.99, d.str()};
}

Outcome criterion9() {
    const NonuniquenessProfile prof(1.0, 2.0);
    const std::size_t n = 51;
    std::ostringstream d;
    bool found_multiple = false, all_certified = true;
    for (double c : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        const auto p = prof.params(n, c);
        const auto minima = multi_start_fixed_points(p, 12, MinimizeSettings::defaults_for(p));
        std::size_t certified = 0;
        for (const auto& m : minima) certified += m.certified();
        all_certified = all_certified && certified == minima.size();
        found_multiple = found_multiple || certified >= 2;
        d << "c=" << c << ": " << certified << "/" << minima.size() << " certified; ";
    }
    bool unique = true;
    for (double F : {0.0, 1.0, 100.0, 1.5 * oracle::critical_force(n, 1.0)}) {
        ModelParams p(1.0, n, ForceProfile::constant(F));
        const auto minima = multi_start_fixed_points(p, 12, MinimizeSettings::defaults_for(p));
        unique = unique && minima.size() == 1;
    }
    d << (unique ? "constant F: 1 minimum each" : "constant F: more than one minimum");
    return {found_multiple && all_certified && unique, d.str()};
}

Outcome criterion10() {
    const std::size_t n = 10;
    ModelParams p(1.0, n, ForceProfile::constant(1.0));
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> w(n), x(n + 1, 0.0);
        double total = 0.0;
        for (double& wi : w) total += (wi = u(rng));
        const double span = 0.5 + 0.5 * u(rng);
        x[0] = -(1.0 - span) * u(rng);
        for (std::size_t k = 1; k <= n; ++k) x[k] = x[k - 1] - span * w[k - 1] / total;
        const auto g = energy_gradient(Configuration(x, 1.0), p);
        const auto fd = oracle::central_gradient(
            [&](const std::vector<double>& y) {
                double e = 0.0;
                for (std::size_t k = 1; k < y.size(); ++k) e += 1.0 / (y[k - 1] - y[k]);
                for (double yi : y) e -= yi + 1.0; // integral of F = 1 from -L
                return e;
            },
            x, 1e-6);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            num = std::max(num, std::abs(g[i] - fd[i]));
            den = std::max(den, std::abs(fd[i]));
        }
        worst = std::max(worst, num / den);
    }
    return {worst < 1e-5, fmt("max relative error %.3g over 100 configurations", worst)};
}

} // namespace

int main() {
    report(1, "fixed-point consistency", criterion1);
    report(2, "oracle equivalence", criterion2);
    report(3, "critical force, exact", criterion3);
    report(4, "critical coefficient", criterion4);
    report(5, "detached phase", criterion5);
    report(6, "uniform phase", criterion6);
    report(7, "smooth phase scaling", criterion7);
    report(8, "collapse phase", criterion8);
    report(9, "nonuniqueness", criterion9);
    report(10, "gradient check", criterion10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
