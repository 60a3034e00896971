#include "catch_amalgamated.hpp"

#include "coulomb_chain/closed_form.hpp"
#include "coulomb_chain/shooting.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace coulomb_chain;
using Catch::Approx;

TEST_CASE("constant-force gaps", "[closed_form]") {
    const auto g = gaps_constant_force(0.5, 1.0, 3);
    // f = 4, 3, 2
    REQUIRE(g.size() == 3);
    CHECK(g[0] == Approx(0.5));
    CHECK(g[1] == Approx(1.0 / std::sqrt(3.0)));
    CHECK(g[2] == Approx(1.0 / std::sqrt(2.0)));

    try {
        gaps_constant_force(1.0 / std::sqrt(2.5), 1.0, 10);
        FAIL("expected DomainError");
    } catch (const ModelError& e) {
        CHECK(e.kind() == ErrorKind::DomainError);
        REQUIRE(e.index());
        CHECK(*e.index() == 4);
    }
}

TEST_CASE("half-line chain", "[closed_form]") {
    const auto g = aux_model_gaps(2.0, 5);
    for (std::size_t k = 1; k <= 5; ++k) CHECK(g[k - 1] == Approx(1.0 / std::sqrt(2.0 * double(6 - k))));
    CHECK(aux_model_extent(2.0, 5) == Approx(oracle::half_line_extent(2.0, 5)).epsilon(1e-14));
}

TEST_CASE("critical force", "[closed_form]") {
    CHECK(critical_force_exact(1, 1.0) == Approx(1.0));
    CHECK(critical_force_exact(2, 1.0) == Approx(std::pow(1.0 + 1.0 / std::sqrt(2.0), 2)));
    CHECK(critical_force_exact(100, 1.0) == Approx(345.57).margin(0.01));
    for (std::size_t n : {1u, 10u, 1000u, 100000u})
        CHECK(critical_force_exact(n, 1.0) == Approx(oracle::critical_force(n, 1.0)).epsilon(1e-13));
    CHECK(critical_force_exact(50, 2.0) == Approx(critical_force_exact(50, 1.0) / 4.0).epsilon(1e-14));

    const auto cf = critical_force(100, 1.0);
    CHECK(cf.exact == critical_force_exact(100, 1.0));
    CHECK(cf.asymptotic_coefficient == 4.0);
    CHECK(c_critical(2.0) == 1.0);
}

TEST_CASE("critical force approaches 4N/L^2 from below", "[closed_form][property]") {
    double prev_err = 1e300;
    for (std::size_t n = 10; n <= 1000000; n *= 10) {
        const double ratio = critical_force_exact(n, 1.0) / double(n);
        const double err = std::abs(ratio - 4.0);
        CHECK(ratio < 4.0);
        CHECK(err < 2.0 * 2.0 * 1.4604 / std::sqrt(double(n)));
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("phase-2 scaling factor", "[closed_form]") {
    for (double c : {0.01, 0.5, 1.0, 2.0, 3.0, 3.99, 4.0})
        CHECK(phase2_scaling_factor(c, 1.0) == Approx(oracle::phase2_b(c, 1.0)).epsilon(1e-10));
    CHECK(phase2_scaling_factor(2.0, 1.0) == Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(phase2_scaling_factor(4.0, 1.0) == Approx(0.5).epsilon(1e-10));
    CHECK(phase2_scaling_factor(0.5, 2.0) == Approx(oracle::phase2_b(0.5, 2.0)).epsilon(1e-10));
    CHECK_THROWS_AS(phase2_scaling_factor(4.5, 1.0), ModelError);
    CHECK_THROWS_AS(phase2_scaling_factor(0.0, 1.0), ModelError);
}

TEST_CASE("limiting densities integrate to one", "[closed_form]") {
    const double L = 1.0;
    for (auto [c, gamma] : {std::pair{1.0, 0.5}, {2.0, 1.0}, {4.0, 1.0}, {16.0, 1.0}, {9.0, 1.0}}) {
        const auto d = asymptotic_density(c, gamma, L);
        REQUIRE(d.has_pointwise());
        CHECK(d.mass(-L, 0.0) == Approx(1.0).epsilon(1e-12));
        CHECK(oracle::simpson([&](double x) { return d(x); }, d.support_left, 0.0) == Approx(1.0).epsilon(1e-10));
        for (double x = d.support_left; x <= 0.0; x += 0.01) CHECK(d(x) >= -1e-12);
    }
}

TEST_CASE("limiting density phases", "[closed_form]") {
    CHECK(asymptotic_density(1.0, 0.5, 1.0).phase == DensityPhase::Uniform);
    CHECK(asymptotic_density(4.0, 1.0, 1.0).phase == DensityPhase::SmoothPositive);
    CHECK(asymptotic_density(4.01, 1.0, 1.0).phase == DensityPhase::Detached);
    CHECK(asymptotic_density(1.0, 2.0, 1.0).phase == DensityPhase::DeltaAtOrigin);

    SECTION("smooth phase") {
        const auto d = asymptotic_density(2.0, 1.0, 1.0);
        // rho(x) = 1/(bL) + c x / 2
        CHECK(d(0.0) == Approx(1.5));
        CHECK(d(-1.0) == Approx(0.5));
        CHECK(d(-0.3) == Approx(1.5 - 0.3));
    }
    SECTION("detached phase") {
        const auto d = asymptotic_density(16.0, 1.0, 1.0);
        CHECK(d.support_left == Approx(-0.5));
        CHECK(d(0.0) == Approx(4.0));
        CHECK(d(-0.5) == Approx(0.0).margin(1e-14));
        CHECK(d(-0.8) == 0.0);
        CHECK(d.mass(-1.0, -0.5) == 0.0);
    }
    SECTION("delta phase") {
        const auto d = asymptotic_density(1.0, 2.0, 1.0);
        CHECK_FALSE(d.has_pointwise());
        CHECK_THROWS_AS(d(-0.5), ModelError);
        CHECK(d.mass(-0.1, 0.0) == 1.0);
        CHECK(d.mass(-1.0, -0.1) == 0.0);
    }
    SECTION("continuity at the critical coefficient") {
        const auto left = asymptotic_density(4.0, 1.0, 1.0);
        const auto right = asymptotic_density(4.0 * (1 + 1e-12), 1.0, 1.0);
        for (double x : {-0.9, -0.5, -0.1, 0.0}) CHECK(left(x) == Approx(right(x)).margin(1e-5));
    }
}

TEST_CASE("critical coefficient separates pinned from floating solutions", "[closed_form][solve]") {
    const std::size_t n = 2000;
    const double fc = critical_force_exact(n, 1.0);
    CHECK(solve_fixed_point(ModelParams(1.0, n, ForceProfile::constant(0.99 * fc))).classification ==
          Classification::BoundaryPinned);
    CHECK(solve_fixed_point(ModelParams(1.0, n, ForceProfile::constant(1.01 * fc))).classification ==
          Classification::Interior);
}
