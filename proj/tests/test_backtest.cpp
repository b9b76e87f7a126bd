#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "pairs/backtest.hpp"
#include "pairs/errors.hpp"
#include "pairs/pde.hpp"
#include "pairs/series.hpp"
#include "pairs/simulate.hpp"

#include "oracles.hpp"

using namespace pairs;

namespace {

namespace fs = std::filesystem;

std::string write_temp(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p.string();
}

struct Solved {
    Grid grid;
    PdeSolution sol;
    StrategySurface surf;
};

const Solved& solved_reference() {
    static const Solved s = [] {
        const ModelParams p = oracles::reference_params();
        GridSpec spec;
        spec.nx = 21;
        spec.ny = 21;
        spec.nt = 251;
        Solved out;
        out.grid = build_grid(spec, p.horizon);
        out.sol = solve(p, out.grid);
        out.surf = extract_controls(out.sol, p);
        return out;
    }();
    return s;
}

PriceSeries simulated_series(std::uint64_t seed, int steps = 250) {
    const ModelParams p = oracles::reference_params();
    const auto paths = simulate_paths(p, steps, 1.0 / 251.0, 1, seed, 3.0, 3.0);
    return series_from_path(paths[0]);
}

}  // namespace

TEST_CASE("load_csv accepts a minimal file and applies the default spacing") {
    const std::string path =
        write_temp("bt_min.csv", "date,s1,s2\n2013-01-02,10.0,20.0\n2013-01-03,10.1,19.9\n");
    const PriceSeries s = load_csv(path);
    REQUIRE(s.size() == 2);
    CHECK(s.dt == doctest::Approx(1.0 / 251.0));
    CHECK(s.s1[1] == 10.1);
    CHECK(s.dates[0] == "2013-01-02");
}

TEST_CASE("load_csv errors carry the line number") {
    const std::string bad_price = write_temp("bt_badprice.csv",
                                             "date,s1,s2\n"
                                             "2013-01-02,1,2\n2013-01-03,1,2\n2013-01-04,1,2\n"
                                             "2013-01-05,1,2\n2013-01-06,1,2\n"
                                             "2013-01-07,0.0,2\n2013-01-08,1,2\n");
    try {
        load_csv(bad_price);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }

    const std::string bad_header = write_temp("bt_badhdr.csv", "time,a,b\n2013-01-02,1,2\n");
    CHECK_THROWS_AS(load_csv(bad_header), ValidationError);

    const std::string bad_date =
        write_temp("bt_baddate.csv", "date,s1,s2\n2013-01-02,1,2\n2013-01-02,1,2\n");
    CHECK_THROWS_AS(load_csv(bad_date), ValidationError);

    const std::string bad_fields =
        write_temp("bt_badfields.csv", "date,s1,s2\n2013-01-02,1\n");
    CHECK_THROWS_AS(load_csv(bad_fields), ValidationError);

    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), ValidationError);
}

TEST_CASE("a 251-row file spans one year under the default spacing") {
    std::string content = "date,s1,s2\n";
    std::string date = "2013-01-02";
    for (int i = 0; i < 251; ++i) {
        content += date + ",10,20\n";
        date = add_days(date, 1);
    }
    // strictly increasing prices are not required, equal prices are fine
    const PriceSeries s = load_csv(write_temp("bt_year.csv", content));
    CHECK(s.size() == 251);
    CHECK(s.span() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simulate -> save -> load round trip preserves prices") {
    const PriceSeries s = simulated_series(17);
    const fs::path path = fs::temp_directory_path() / "bt_roundtrip.csv";
    save_csv(path.string(), s);
    const PriceSeries r = load_csv(path.string());
    REQUIRE(r.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(r.s1[i] - s.s1[i]) <= 1e-12 * s.s1[i]);
        CHECK(std::abs(r.s2[i] - s.s2[i]) <= 1e-12 * s.s2[i]);
        CHECK(r.dates[i] == s.dates[i]);
    }
}

TEST_CASE("zero surface earns exactly the risk-free compounding") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    StrategySurface zero = s.surf;
    std::fill(zero.pi1.begin(), zero.pi1.end(), 0.0);
    std::fill(zero.pi2.begin(), zero.pi2.end(), 0.0);

    const PriceSeries series = simulated_series(23);
    const BacktestReport rep = run_backtest(series, p, s.sol, zero, 1.0);
    const std::size_t n = series.size() - 1;
    CHECK(rep.terminal_pnl ==
          doctest::Approx(std::pow(1.0 + p.r * series.dt, n) - 1.0).epsilon(1e-12));
    CHECK(rep.boundary_warnings == 0);
}

TEST_CASE("fractional P&L does not depend on initial capital") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    const PriceSeries series = simulated_series(29);
    const BacktestReport a = run_backtest(series, p, s.sol, s.surf, 1.0);
    const BacktestReport b = run_backtest(series, p, s.sol, s.surf, 100.0);
    REQUIRE(a.cum_pnl.size() == b.cum_pnl.size());
    for (std::size_t i = 0; i < a.cum_pnl.size(); ++i)
        CHECK(std::abs(a.cum_pnl[i] - b.cum_pnl[i]) <=
              1e-12 * std::max(1.0, std::abs(a.cum_pnl[i])));
}

TEST_CASE("backtests are deterministic and P&L compounds the returns") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    const PriceSeries series = simulated_series(31);
    const BacktestReport a = run_backtest(series, p, s.sol, s.surf, 1.0);
    const BacktestReport b = run_backtest(series, p, s.sol, s.surf, 1.0);
    REQUIRE(a.returns.size() == b.returns.size());
    for (std::size_t i = 0; i < a.returns.size(); ++i) {
        CHECK(a.returns[i] == b.returns[i]);
        CHECK(a.pi1[i] == b.pi1[i]);
    }
    double w = 1.0;
    for (std::size_t i = 0; i < a.returns.size(); ++i) {
        w *= 1.0 + a.returns[i];
        CHECK(std::abs(a.cum_pnl[i] - (w - 1.0)) <= 1e-12 * std::max(1.0, std::abs(w)));
    }
}

TEST_CASE("observations exactly on grid nodes use node values") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    const Grid& g = s.grid;

    PriceSeries series;
    series.dt = g.dt;  // one observation per time level
    std::string date = "2013-01-02";
    const int i = 10, j = 8;
    for (int n = 0; n < 5; ++n) {
        series.dates.push_back(date);
        series.s1.push_back(std::exp(g.x(i)));
        series.s2.push_back(std::exp(g.y(j)));
        date = add_days(date, 1);
    }
    const BacktestReport rep = run_backtest(series, p, s.sol, s.surf, 1.0);
    for (int n = 0; n < 4; ++n) {
        const int level = g.nt - n;
        // log(exp(x)) costs at most an ulp, so node lookups are exact to fp noise
        CHECK(rep.pi1[static_cast<std::size_t>(n)] ==
              doctest::Approx(s.surf.pi1_at(level, i, j)).epsilon(1e-12));
        CHECK(rep.pi2[static_cast<std::size_t>(n)] ==
              doctest::Approx(s.surf.pi2_at(level, i, j)).epsilon(1e-12));
    }
}

TEST_CASE("out-of-grid observations clamp with a warning; all-clamped fails") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();

    PriceSeries series;
    series.dt = 1.0 / 251.0;
    std::string date = "2013-01-02";
    for (int n = 0; n < 12; ++n) {
        series.dates.push_back(date);
        series.s1.push_back(std::exp(n == 0 ? 5.05 : 3.0));  // first point just outside
        series.s2.push_back(std::exp(3.0));
        date = add_days(date, 1);
    }
    const BacktestReport rep = run_backtest(series, p, s.sol, s.surf, 1.0);
    CHECK(rep.boundary_warnings == 1);

    PriceSeries far;
    far.dt = 1.0 / 251.0;
    std::string far_date = "2013-01-02";
    for (int n = 0; n < 5; ++n) {
        far.dates.push_back(far_date);
        far.s1.push_back(1000.0);
        far.s2.push_back(2000.0);
        far_date = add_days(far_date, 1);
    }
    CHECK_THROWS_AS(run_backtest(far, p, s.sol, s.surf, 1.0), ValidationError);
}

TEST_CASE("a series longer than the horizon is rejected") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    const PriceSeries series = simulated_series(41, 400);  // 400 steps > 251
    CHECK_THROWS_AS(run_backtest(series, p, s.sol, s.surf, 1.0), ValidationError);
}

TEST_CASE("simulate-then-backtest round trip under local volatility") {
    const ModelParams p = oracles::cev_params();
    GridSpec spec;
    spec.nx = 13;
    spec.ny = 13;
    spec.nt = 60;
    const Grid g = build_grid(spec, p.horizon);
    const PdeSolution sol = solve(p, g);
    const StrategySurface surf = extract_controls(sol, p);

    const auto paths = simulate_paths(p, 200, 1.0 / 251.0, 1, 47, 3.0, 3.0);
    const fs::path csv = fs::temp_directory_path() / "bt_cev_roundtrip.csv";
    save_csv(csv.string(), series_from_path(paths[0]));
    const PriceSeries series = load_csv(csv.string());

    const BacktestReport rep = run_backtest(series, p, sol, surf, 1.0);
    CHECK(rep.boundary_warnings == 0);
    CHECK_FALSE(rep.bankrupt);
    CHECK(rep.returns.size() == series.size() - 1);
    CHECK(std::isfinite(rep.terminal_pnl));
}

TEST_CASE("pnl csv has a row per executed step") {
    const ModelParams p = oracles::reference_params();
    const Solved& s = solved_reference();
    const PriceSeries series = simulated_series(43, 30);
    const BacktestReport rep = run_backtest(series, p, s.sol, s.surf, 1.0);
    const fs::path path = fs::temp_directory_path() / "bt_pnl.csv";
    write_pnl_csv(path.string(), series, rep);

    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    CHECK(line == "date,pi1,pi2,return,cum_pnl");
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == rep.returns.size());
}
