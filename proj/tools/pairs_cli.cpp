// pairs_cli.cpp
// Command-line front end: simulate / estimate / solve / compare / backtest /
// check-conditions. Each subcommand reads a JSON config plus flags and writes
// its outputs (result.json and any data files) into --out.
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "pairs/backtest.hpp"
#include "pairs/config.hpp"
#include "pairs/errors.hpp"
#include "pairs/gmm.hpp"
#include "pairs/pde.hpp"
#include "pairs/series.hpp"
#include "pairs/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
};

void write_result(const std::string& out_dir, const json& j) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "result.json");
    if (!out) throw pairs::ValidationError("cannot write result.json under " + out_dir);
    out << j.dump(2) << "\n";
}

json lambda_to_json(const pairs::ParameterVector& p) {
    json j;
    j["mu1"] = p.mu1;
    j["sigma1"] = p.sigma1;
    j["delta1"] = p.delta1;
    j["theta1"] = p.theta1;
    j["mu2"] = p.mu2;
    j["sigma2"] = p.sigma2;
    j["delta2"] = p.delta2;
    j["theta2"] = p.theta2;
    j["rho"] = p.rho;
    j["a"] = p.a;
    j["b"] = p.b;
    j["beta"] = p.beta;
    return j;
}

pairs::Grid grid_from_config(const pairs::RunConfig& cfg) {
    if (!cfg.grid) throw pairs::ValidationError("config is missing the \"grid\" section");
    return pairs::build_grid(*cfg.grid, cfg.model.horizon);
}

int run_simulate(const CommonArgs& args, int steps, double dt, int paths, std::uint64_t seed,
                 double x0, double y0, const std::string& start_date) {
    const pairs::RunConfig cfg = pairs::load_config_file(args.config_path);
    pairs::require_valid(cfg.model);
    const auto sims = pairs::simulate_paths(cfg.model, steps, dt, paths, seed, x0, y0);

    fs::create_directories(args.out_dir);
    json files = json::array();
    char name[64];
    for (std::size_t p = 0; p < sims.size(); ++p) {
        if (sims.size() == 1)
            std::snprintf(name, sizeof name, "path.csv");
        else
            std::snprintf(name, sizeof name, "path_%03zu.csv", p);
        const std::string file = (fs::path(args.out_dir) / name).string();
        pairs::save_csv(file, pairs::series_from_path(sims[p], start_date));
        files.push_back({{"file", name}, {"path_seed", sims[p].seed}});
    }

    json j;
    j["command"] = "simulate";
    j["steps"] = steps;
    j["dt"] = dt;
    j["paths"] = paths;
    j["seed"] = seed;
    j["outputs"] = files;
    write_result(args.out_dir, j);
    std::cout << "simulated " << paths << " path(s) of " << steps << " steps into " << args.out_dir
              << "\n";
    return 0;
}

int run_estimate(const CommonArgs& args, const std::string& csv_path, double dt,
                 const pairs::GmmSettings& settings) {
    const pairs::PriceSeries series = pairs::load_csv(csv_path, dt);
    const pairs::GmmResult res = pairs::estimate(series, dt, settings);

    json j = lambda_to_json(res.lambda);
    j["j_value"] = res.j_value;
    j["mode"] = pairs::to_string(res.mode);
    j["converged"] = res.converged;
    j["nw_lag"] = res.nw_lag;
    j["iterations"] = res.iterations;
    j["weight_regularized"] = res.weight_regularized;
    j["warnings"] = res.warnings;
    write_result(args.out_dir, j);

    for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "estimated " << pairs::to_string(res.mode) << " J = " << res.j_value
              << " (converged: " << (res.converged ? "yes" : "no") << ")\n";
    return 0;
}

int run_solve(const CommonArgs& args) {
    const pairs::RunConfig cfg = pairs::load_config_file(args.config_path);
    const pairs::Grid grid = grid_from_config(cfg);

    const auto start = std::chrono::steady_clock::now();
    const pairs::PdeSolution sol = pairs::solve(cfg.model, grid);
    const pairs::StrategySurface surf = pairs::extract_controls(sol, cfg.model);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    fs::create_directories(args.out_dir);
    const std::string csv = (fs::path(args.out_dir) / "surface.csv").string();
    const std::string meta = (fs::path(args.out_dir) / "surface.meta.json").string();
    pairs::write_surface_csv(csv, meta, sol, surf);

    json j;
    j["command"] = "solve";
    j["grid"] = {{"I", grid.nx}, {"J", grid.ny}, {"K", grid.nt},
                 {"dx", grid.dx}, {"dy", grid.dy}, {"dt", grid.dt}};
    j["runtime_seconds"] = seconds;
    j["surface_csv"] = "surface.csv";
    write_result(args.out_dir, j);
    std::cout << "solved " << grid.nx << "x" << grid.ny << " grid, " << grid.nt << " steps in "
              << seconds << " s\n";
    return 0;
}

int run_compare(const CommonArgs& args) {
    const pairs::RunConfig cfg = pairs::load_config_file(args.config_path);
    if (cfg.model.theta1 != 0.0 || cfg.model.theta2 != 0.0)
        throw pairs::ValidationError(
            "compare needs theta1 = theta2 = 0 (exact solution exists only there)");
    const pairs::Grid grid = grid_from_config(cfg);

    const pairs::PdeSolution sol = pairs::solve(cfg.model, grid);
    const std::vector<double> reference = pairs::closed_form_phi_field(cfg.model, grid);
    const pairs::LinfError err = pairs::linf_error(sol, reference);

    json j;
    j["command"] = "compare";
    j["linf_error"] = err.value;
    j["argmax"] = {{"k", err.k}, {"i", err.i}, {"j", err.j}};
    j["argmax_on_edge"] = err.on_edge;
    write_result(args.out_dir, j);
    std::cout << "L-inf error = " << err.value << " at level " << err.k << ", node (" << err.i
              << "," << err.j << ")" << (err.on_edge ? " [domain edge]" : "") << "\n";
    return 0;
}

int run_backtest(const CommonArgs& args, const std::string& csv_path) {
    const pairs::RunConfig cfg = pairs::load_config_file(args.config_path);
    const pairs::Grid grid = grid_from_config(cfg);
    const pairs::PriceSeries series = pairs::load_csv(csv_path, cfg.backtest.dt);

    const pairs::PdeSolution sol = pairs::solve(cfg.model, grid);
    const pairs::StrategySurface surf = pairs::extract_controls(sol, cfg.model);
    const pairs::BacktestReport rep =
        pairs::run_backtest(series, cfg.model, sol, surf, cfg.backtest.w0);

    fs::create_directories(args.out_dir);
    pairs::write_pnl_csv((fs::path(args.out_dir) / "pnl.csv").string(), series, rep);

    json j;
    j["command"] = "backtest";
    j["terminal_pnl"] = rep.terminal_pnl;
    j["steps"] = rep.returns.size();
    j["bankrupt"] = rep.bankrupt;
    j["boundary_warnings"] = rep.boundary_warnings;
    write_result(args.out_dir, j);
    std::cout << "terminal P&L " << rep.terminal_pnl * 100.0 << "% over " << rep.returns.size()
              << " steps (" << rep.boundary_warnings << " boundary warnings)\n";
    return 0;
}

int run_check_conditions(const CommonArgs& args, double t, int grid_points) {
    const pairs::RunConfig cfg = pairs::load_config_file(args.config_path);
    pairs::require_valid(cfg.model);
    if (cfg.model.utility != pairs::Utility::Power)
        throw pairs::ValidationError("check-conditions applies to power utility");
    const pairs::DerivedQuantities dq = pairs::derive_quantities(cfg.model);

    std::vector<double> t_grid(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k)
        t_grid[static_cast<std::size_t>(k)] =
            cfg.model.horizon * static_cast<double>(k) / (grid_points - 1);
    const pairs::OdeCoefficients coeffs = pairs::power_coefficients(cfg.model, dq, t_grid);
    const pairs::VerificationConditions v =
        pairs::check_theorem_conditions(cfg.model, dq, coeffs, t);

    json j;
    j["command"] = "check-conditions";
    j["t"] = t;
    j["rhs"] = v.rhs;
    j["condition1"] = {{"holds", v.holds1}, {"lhs", v.lhs1}};
    j["condition2"] = {{"holds", v.holds2}, {"lhs", v.lhs2}};
    j["condition3"] = {{"holds", v.holds3}, {"lhs", v.lhs3}};
    j["all_hold"] = v.all();
    write_result(args.out_dir, j);
    std::cout << "conditions at t = " << t << ": " << (v.holds1 ? "1:yes" : "1:no") << " "
              << (v.holds2 ? "2:yes" : "2:no") << " " << (v.holds3 ? "3:yes" : "3:no")
              << " (rhs = " << v.rhs << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal pairs-trading toolkit: co-integrated two-asset strategies under "
                 "constant and CEV volatility"};
    app.require_subcommand(1);

    CommonArgs args;
    int steps = 251, paths = 1, grid_points = 252;
    double dt = 1.0 / 251.0, x0 = 3.0, y0 = 3.0, t_check = 0.0;
    std::uint64_t seed = 0;
    std::string csv_path, start_date = "2013-01-02";

    auto* sim = app.add_subcommand("simulate", "Generate co-integrated price paths as CSV");
    sim->add_option("--config", args.config_path, "JSON config with a model section")->required();
    sim->add_option("--out", args.out_dir, "Output directory");
    sim->add_option("--steps", steps, "Number of time steps");
    sim->add_option("--dt", dt, "Step size in years");
    sim->add_option("--paths", paths, "Number of independent paths");
    sim->add_option("--seed", seed, "Base seed");
    sim->add_option("--x0", x0, "Initial log price, asset 1");
    sim->add_option("--y0", y0, "Initial log price, asset 2");
    sim->add_option("--start-date", start_date, "ISO date of the first observation");

    auto* est = app.add_subcommand("estimate", "Fit model parameters to a price CSV by GMM");
    est->add_option("--config", args.config_path, "JSON config (gmm section optional)");
    est->add_option("--csv", csv_path, "Input CSV (date,s1,s2)")->required();
    est->add_option("--out", args.out_dir, "Output directory");
    est->add_option("--dt", dt, "Observation spacing in years");
    std::string mode_flag, weights_flag;
    int lag_flag = -2;
    std::uint64_t est_seed = 0;
    bool est_seed_set = false;
    est->add_option("--mode", mode_flag, "just or two-step");
    est->add_option("--nw-lag", lag_flag, "Newey-West lag");
    est->add_option("--nw-weights", weights_flag, "narrow or standard");
    est->add_option("--seed", est_seed, "Restart seed")->each([&](const std::string&) {
        est_seed_set = true;
    });

    auto* sol = app.add_subcommand("solve", "Solve the strategy PDE and export the surface");
    sol->add_option("--config", args.config_path, "JSON config with model and grid")->required();
    sol->add_option("--out", args.out_dir, "Output directory");

    auto* cmp = app.add_subcommand("compare",
                                   "Max-norm distance between the solver and the exact solution");
    cmp->add_option("--config", args.config_path, "JSON config with model (theta = 0) and grid")
        ->required();
    cmp->add_option("--out", args.out_dir, "Output directory");

    auto* bt = app.add_subcommand("backtest", "Trade a price CSV with the computed strategy");
    bt->add_option("--config", args.config_path, "JSON config with model, grid, backtest")
        ->required();
    bt->add_option("--csv", csv_path, "Input CSV (date,s1,s2)")->required();
    bt->add_option("--out", args.out_dir, "Output directory");

    auto* chk = app.add_subcommand("check-conditions",
                                   "Evaluate the value-function verification conditions");
    chk->add_option("--config", args.config_path, "JSON config with a model section")->required();
    chk->add_option("--out", args.out_dir, "Output directory");
    chk->add_option("--t", t_check, "Time at which to evaluate (default 0)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return run_simulate(args, steps, dt, paths, seed, x0, y0, start_date);
        if (est->parsed()) {
            // Flags override the config-derived settings.
            pairs::GmmSettings settings;
            if (!args.config_path.empty()) settings = pairs::load_config_file(args.config_path).gmm;
            if (!mode_flag.empty()) settings.mode = pairs::gmm_mode_from_string(mode_flag);
            if (lag_flag != -2) settings.nw_lag = lag_flag;
            if (!weights_flag.empty()) {
                if (weights_flag == "narrow")
                    settings.nw_weights = pairs::NwWeights::Narrow;
                else if (weights_flag == "standard")
                    settings.nw_weights = pairs::NwWeights::Standard;
                else
                    throw pairs::ValidationError("--nw-weights must be narrow or standard");
            }
            if (est_seed_set) settings.seed = est_seed;
            return run_estimate(args, csv_path, dt, settings);
        }
        if (sol->parsed()) return run_solve(args);
        if (cmp->parsed()) return run_compare(args);
        if (bt->parsed()) return run_backtest(args, csv_path);
        if (chk->parsed()) return run_check_conditions(args, t_check, grid_points);
    } catch (const pairs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pairs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
