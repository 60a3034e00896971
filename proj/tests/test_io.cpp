#include "catch_amalgamated.hpp"

#include "coulomb_chain/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

using namespace coulomb_chain;
using Catch::Approx;
namespace io = coulomb_chain::io;

TEST_CASE("numbers round-trip exactly", "[io][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 41) - 20);
        CHECK(std::stod(io::format_number(v)) == v);
    }
    CHECK(io::format_number(0.5) == "0.5");
    CHECK_THROWS_AS(io::format_number(std::numeric_limits<double>::quiet_NaN()), ModelError);
    CHECK_THROWS_AS(io::format_number(std::numeric_limits<double>::infinity()), ModelError);
}

TEST_CASE("solve result round-trips through JSON", "[io]") {
    ModelParams p(1.0, 50, ForceProfile::scaled(2.0, 1.0));
    const auto r = solve_fixed_point(p);
    const auto j = io::json::parse(io::to_json(r, p).dump());
    CHECK(j["classification"] == "BoundaryPinned");
    CHECK(j["params"]["n"] == 50);
    CHECK(j["params"]["force"]["kind"] == "scaled");
    CHECK(j["params"]["resolved_force"].get<double>() == 100.0);
    const auto xs = j["positions"].get<std::vector<double>>();
    REQUIRE(xs.size() == 51);
    for (std::size_t i = 0; i <= 50; ++i) CHECK(xs[i] == r.config.position(i));
    CHECK(j["gaps"].size() == 50);
    CHECK(j["pressures"].size() == 50);
    CHECK(j["delta1"].get<double>() == r.delta1);
}

TEST_CASE("force profiles serialize by kind", "[io]") {
    CHECK(io::to_json(ForceProfile::constant(3.0)) == io::json{{"kind", "constant"}, {"value", 3.0}});
    const auto pw = io::to_json(ForceProfile::piecewise_linear({{-1.0, 2.0}, {0.0, 1.0}}));
    CHECK(pw["kind"] == "piecewise_linear");
    CHECK(pw["breakpoints"][1]["value"] == 1.0);
}

TEST_CASE("CSV quoting", "[io]") {
    CHECK(io::csv_escape("plain") == "plain");
    CHECK(io::csv_escape("a,b") == "\"a,b\"");
    CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_escape("two\nlines") == "\"two\nlines\"");
    io::Table t{{"name", "value", "flag", "empty"}, {{std::string("x,y"), 1.5, true, std::monostate{}}}};
    CHECK(io::to_csv(t) == "name,value,flag,empty\r\n\"x,y\",1.5,true,\r\n");
    const auto j = io::to_json(t);
    CHECK(j["rows"][0][3].is_null());
}

TEST_CASE("solve table", "[io]") {
    ModelParams p(1.0, 3, ForceProfile::constant(0.0));
    const auto t = io::solve_table(solve_fixed_point(p));
    REQUIRE(t.rows.size() == 4);
    CHECK(std::holds_alternative<std::monostate>(t.rows[0][2]));
    CHECK(std::get<double>(t.rows[3][1]) == -1.0);
}

TEST_CASE("sweep tables are deterministic unless timing is requested", "[io]") {
    const std::vector<SweepPoint> grid{{200, 1.0, 2.0, 1.0}, {200, 1.0, 0.0, 1.0}};
    const auto a = io::to_csv(io::sweep_table(sweep(grid)));
    const auto b = io::to_csv(io::sweep_table(sweep(grid)));
    CHECK(a == b);
    const auto t = io::sweep_table(sweep(grid));
    CHECK(t.columns.size() == 16);
    for (const auto& row : t.rows) CHECK(row.size() == 16);
    const auto timed = io::sweep_table(sweep(grid), true);
    CHECK(timed.columns.back() == "seconds");
    for (const auto& row : timed.rows) CHECK(row.size() == 17);
}

TEST_CASE("piecewise parsing", "[io]") {
    const auto f = io::parse_piecewise("-1:4,-0.5:2,0:1");
    REQUIRE(f.kind() == ForceKind::PiecewiseLinear);
    CHECK(f(-0.75) == Approx(3.0));
    CHECK_THROWS_AS(io::parse_piecewise("-1:4,0"), ModelError);
    CHECK_THROWS_AS(io::parse_piecewise("-1:x"), ModelError);
    CHECK_THROWS_AS(io::parse_piecewise("0:1,-1:2"), ModelError);
}

TEST_CASE("grid parsing", "[io]") {
    const auto g = io::parse_grid("100,1,2,1; 200,2,0.5,0.75\n300,1,16,1\n");
    REQUIRE(g.size() == 3);
    CHECK(g[1].n_gaps == 200);
    CHECK(g[1].length == 2.0);
    CHECK(g[1].gamma == 0.75);
    CHECK(io::parse_grid("").empty());
    CHECK_THROWS_AS(io::parse_grid("1,2,3"), ModelError);
    CHECK_THROWS_AS(io::parse_grid("a,1,1,1"), ModelError);
}

TEST_CASE("atomic write replaces the target", "[io]") {
    const auto path = std::filesystem::temp_directory_path() / "coulomb_chain_io_test.txt";
    io::write_atomically(path, "first");
    io::write_atomically(path, "second");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    CHECK(s == "second");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove(path);
    CHECK_THROWS(io::write_atomically("/nonexistent-dir/x.txt", "y"));
}
