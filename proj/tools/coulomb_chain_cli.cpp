// coulomb-chain: command-line front end for the fixed-point solver, the energy
// oracle and the phase analysis.
//
// Exit status: 0 success, 1 model error (JSON error object on stderr), 2 usage error.

#include "coulomb_chain/coulomb_chain.hpp"
#include "coulomb_chain/io.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace cc = coulomb_chain;
using cc::io::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::size_t n = 0;
    double length = 1.0;
    std::optional<double> force;
    std::optional<double> c;
    std::optional<double> gamma;
    std::string piecewise;
    double tol_rel = 1e-12;
    std::size_t max_iter = 200;
    std::string format = "json";
    std::string output;
};

void add_model_options(CLI::App* cmd, CommonOptions& o, bool require_n = true) {
    auto* n = cmd->add_option("--n", o.n, "Number of gaps N (N+1 particles)");
    if (require_n) n->required();
    cmd->add_option("--length", o.length, "Segment length L")->capture_default_str();
    auto* f = cmd->add_option("--force", o.force, "Constant renormalized force F");
    auto* c = cmd->add_option("--c", o.c, "Force coefficient c in F = c N^gamma");
    auto* g = cmd->add_option("--gamma", o.gamma, "Force exponent gamma in F = c N^gamma");
    auto* p = cmd->add_option("--force-piecewise", o.piecewise, "Breakpoints \"x:value,x:value,...\" on [-L, 0]");
    f->excludes(c)->excludes(g)->excludes(p);
    p->excludes(c)->excludes(g);
    c->needs(g);
    g->needs(c);
}

void add_solver_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--tol-rel", o.tol_rel, "Relative bisection tolerance on delta_1")
        ->envname("COULOMB_CHAIN_TOL_REL")
        ->capture_default_str();
    cmd->add_option("--max-iter", o.max_iter, "Bisection iteration cap")
        ->envname("COULOMB_CHAIN_MAX_ITER")
        ->capture_default_str();
}

void add_output_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    cmd->add_option("--output", o.output, "Output file (default: standard output)");
}

cc::ForceProfile force_from(const CommonOptions& o) {
    if (o.force) return cc::ForceProfile::constant(*o.force);
    if (o.c) return cc::ForceProfile::scaled(*o.c, *o.gamma);
    if (!o.piecewise.empty()) return cc::io::parse_piecewise(o.piecewise);
    throw UsageError("a force is required: --force, --c/--gamma or --force-piecewise");
}

cc::ModelParams params_from(const CommonOptions& o) { return cc::ModelParams(o.length, o.n, force_from(o)); }

cc::SolveSettings solve_settings(const CommonOptions& o) { return {o.tol_rel, o.max_iter}; }

void emit(const CommonOptions& o, const std::string& text) {
    if (o.output.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        cc::io::write_atomically(o.output, text);
    }
}

void emit(const CommonOptions& o, const json& j, const cc::io::Table& table) {
    emit(o, o.format == "csv" ? cc::io::to_csv(table) : j.dump(2) + "\n");
}

void emit_table(const CommonOptions& o, const cc::io::Table& table) {
    emit(o, o.format == "csv" ? cc::io::to_csv(table) : cc::io::to_json(table).dump(2) + "\n");
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(static_cast<std::size_t>(std::stoull(item)));
        } catch (const std::logic_error&) {
            throw UsageError("bad --n-list entry '" + item + "'");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibria of a one-dimensional nearest-neighbour Coulomb chain under an external force"};
    app.require_subcommand(1, 1);

    CommonOptions o;

    auto* solve = app.add_subcommand("solve", "Unique fixed point for a non-increasing force profile");
    add_model_options(solve, o);
    add_solver_options(solve, o);
    add_output_options(solve, o);

    bool numeric = false;
    auto* critical = app.add_subcommand("critical", "Critical force F_cr(N, L) and its asymptotic coefficient");
    critical->add_option("--n", o.n, "Number of gaps N")->required();
    critical->add_option("--length", o.length, "Segment length L")->capture_default_str();
    critical->add_flag("--numeric", numeric, "Also locate the wall force by bisection over F");
    add_output_options(critical, o);

    std::string grid_text, grid_file;
    std::size_t bins = 0, threads = 1;
    bool timing = false;
    auto* sweep = app.add_subcommand("sweep", "Phase classification over a grid of (N, L, c, gamma)");
    auto* grid_opt = sweep->add_option("--grid", grid_text, "Rows \"N,L,c,gamma;N,L,c,gamma;...\"");
    auto* grid_file_opt = sweep->add_option("--grid-file", grid_file, "File with one N,L,c,gamma row per line");
    grid_opt->excludes(grid_file_opt);
    sweep->add_option("--bins", bins, "Histogram bins (0: round(sqrt(N)))");
    sweep->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sweep->add_flag("--timing", timing, "Include per-row wall-clock seconds (breaks byte-identical output)");
    add_solver_options(sweep, o);
    add_output_options(sweep, o);

    auto* density = app.add_subcommand("density", "Empirical density histogram with the limiting prediction");
    add_model_options(density, o);
    density->add_option("--bins", bins, "Histogram bins (0: round(sqrt(N)))");
    add_solver_options(density, o);
    add_output_options(density, o);

    std::uint64_t seed = 1;
    std::string start_kind = "uniform";
    std::optional<double> grad_tol;
    std::size_t oracle_iter = 20000;
    auto* oracle = app.add_subcommand("oracle", "Direct energy minimization from a start configuration");
    add_model_options(oracle, o);
    oracle->add_option("--start", start_kind, "Start configuration")->check(CLI::IsMember({"uniform", "random"}))->capture_default_str();
    oracle->add_option("--seed", seed, "Seed for the random start")->capture_default_str();
    oracle->add_option("--grad-tol", grad_tol, "Projected gradient tolerance (default 1e-9 (N/L)^2)");
    oracle->add_option("--iterations", oracle_iter, "Iteration cap")->capture_default_str();
    add_output_options(oracle, o);

    double a_peak = 1.0, b_slope = 2.0;
    std::optional<double> c_fixed;
    std::size_t starts = 12;
    std::size_t n_nonunique = 51;
    auto* nonunique = app.add_subcommand("nonunique", "Multi-start search for distinct local minima on the single-peak profile");
    nonunique->add_option("--n", n_nonunique, "Number of gaps N")->capture_default_str();
    nonunique->add_option("--a", a_peak, "Peak force value a")->capture_default_str();
    nonunique->add_option("--b", b_slope, "Left slope parameter b (b > a)")->capture_default_str();
    nonunique->add_option("--c", c_fixed, "alpha_ren = c N (default: scan c in 2,4,8,16,32)");
    nonunique->add_option("--starts", starts, "Number of starts")->capture_default_str();
    nonunique->add_option("--seed", seed, "Seed for start jitter")->capture_default_str();
    add_output_options(nonunique, o);

    std::string n_list = "100,1000,10000";
    auto* converge = app.add_subcommand("converge", "Convergence table over increasing N");
    add_model_options(converge, o, false);
    converge->add_option("--n-list", n_list, "Comma-separated increasing N values")->capture_default_str();
    add_solver_options(converge, o);
    add_output_options(converge, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) {
            const auto params = params_from(o);
            const auto r = cc::solve_fixed_point(params, solve_settings(o));
            emit(o, cc::io::to_json(r, params), cc::io::solve_table(r));
        } else if (critical->parsed()) {
            const auto cf = cc::critical_force(o.n, o.length);
            json j = cc::io::to_json(cf, o.n, o.length);
            cc::io::Table t{{"n", "length", "exact", "asymptotic_coefficient"},
                            {{static_cast<std::int64_t>(o.n), o.length, cf.exact, cf.asymptotic_coefficient}}};
            if (numeric) {
                const double w = cc::wall_force(cc::ModelParams(o.length, o.n, cc::ForceProfile::constant(0.0)));
                j["wall_force"] = w;
                t.columns.push_back("wall_force");
                t.rows[0].push_back(w);
            }
            emit(o, j, t);
        } else if (sweep->parsed()) {
            std::vector<cc::SweepPoint> grid;
            if (!grid_file.empty()) {
                std::ifstream in(grid_file);
                if (!in) throw UsageError("cannot read " + grid_file);
                std::stringstream buf;
                buf << in.rdbuf();
                grid = cc::io::parse_grid(buf.str());
            } else {
                grid = cc::io::parse_grid(grid_text);
            }
            cc::SweepSettings settings{bins, solve_settings(o), threads};
            emit_table(o, cc::io::sweep_table(cc::sweep(grid, settings), timing));
        } else if (density->parsed()) {
            const auto params = params_from(o);
            const auto r = cc::solve_fixed_point(params, solve_settings(o));
            const auto h = cc::histogram(r.config, params.length(), bins ? bins : cc::default_bin_count(o.n));
            std::optional<std::vector<double>> prediction;
            if (params.declared_force().is_scaled()) {
                const auto s = params.declared_force().scaling();
                prediction = cc::predicted_mass(cc::asymptotic_density(s.c, s.gamma, params.length()), h);
            }
            emit(o, cc::io::density_json(h, prediction), cc::io::density_table(h, prediction));
        } else if (oracle->parsed()) {
            const auto params = params_from(o);
            auto settings = cc::MinimizeSettings::defaults_for(params);
            settings.seed = seed;
            settings.max_iter = oracle_iter;
            if (grad_tol) settings.grad_tol = *grad_tol;
            cc::Configuration start = cc::uniform_configuration(params);
            if (start_kind == "random") {
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> u(0.2, 1.0);
                std::vector<double> w(o.n);
                double total = 0.0;
                for (double& wi : w) total += (wi = u(rng));
                std::vector<double> x(o.n + 1, 0.0);
                for (std::size_t k = 1; k <= o.n; ++k) x[k] = x[k - 1] - o.length * w[k - 1] / total;
                x[o.n] = -o.length;
                start = cc::Configuration(std::move(x), o.length);
            }
            const auto r = cc::minimize(params, start, settings);
            json j = cc::io::to_json(r, params);
            j["energy"] = cc::energy(r.config, params);
            emit(o, j, cc::io::solve_table(r));
        } else if (nonunique->parsed()) {
            const cc::NonuniquenessProfile profile(a_peak, b_slope);
            std::vector<double> grid = c_fixed ? std::vector<double>{*c_fixed}
                                               : std::vector<double>{2.0, 4.0, 8.0, 16.0, 32.0};
            json scanned = json::array();
            std::vector<cc::LocalMinimum> minima;
            std::optional<cc::ModelParams> chosen;
            double chosen_c = grid.back();
            for (double c : grid) {
                auto params = profile.params(n_nonunique, c);
                auto settings = cc::MinimizeSettings::defaults_for(params);
                settings.seed = seed;
                auto found = cc::multi_start_fixed_points(params, starts, settings);
                scanned.push_back({{"c", c}, {"distinct", found.size()}});
                minima = std::move(found);
                chosen = params;
                chosen_c = c;
                if (minima.size() >= 2) break;
            }
            json list = json::array();
            cc::io::Table t{{"index", "energy", "x_0", "x_n", "residuals_ok", "perturbation_ok"}, {}};
            for (std::size_t i = 0; i < minima.size(); ++i) {
                const auto& m = minima[i];
                list.push_back(cc::io::to_json(m, *chosen));
                t.rows.push_back({static_cast<std::int64_t>(i), m.energy, m.result.config.position(0),
                                  m.result.config.position(n_nonunique), m.residuals_ok, m.perturbation_ok});
            }
            json j{{"a", a_peak}, {"b", b_slope}, {"n", n_nonunique}, {"c", chosen_c},
                   {"scanned", std::move(scanned)}, {"minima", std::move(list)}};
            emit(o, j, t);
        } else if (converge->parsed()) {
            const auto rows = cc::convergence_study(force_from(o), o.length, parse_n_list(n_list), solve_settings(o));
            emit_table(o, cc::io::convergence_table(rows));
        }
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const cc::ModelError& e) {
        json err{{"error", std::string(e.name())}, {"message", e.what()}};
        if (e.index()) err["index"] = *e.index();
        std::cerr << err.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "IoError"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
