// backtest.hpp
// Applies a computed strategy surface to an observed price series: each
// observation is mapped to the matching time level and looked up by bilinear
// interpolation in (log S1, log S2); wealth compounds through the per-step
// returns. Observations outside the grid are clamped and counted.

#pragma once

#include <string>
#include <vector>

#include "pairs/pde.hpp"
#include "pairs/series.hpp"

namespace pairs {

struct BacktestReport {
    std::vector<double> pi1;      // per step, aligned with returns
    std::vector<double> pi2;
    std::vector<double> returns;  // fractional return of each step
    std::vector<double> cum_pnl;  // cumulative fractional P&L after each step
    double terminal_pnl = 0.0;
    bool bankrupt = false;
    int boundary_warnings = 0;  // observations clamped to the grid edge
};

BacktestReport run_backtest(const PriceSeries& series, const ModelParams& params,
                            const PdeSolution& sol, const StrategySurface& surface, double w0);

// pnl.csv: date, pi1, pi2, return, cum_pnl (one row per executed step).
void write_pnl_csv(const std::string& path, const PriceSeries& series,
                   const BacktestReport& report);

}  // namespace pairs
