#include "pairs/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pairs/errors.hpp"

namespace pairs {

namespace {

struct Lookup {
    double value;
    bool clamped;
};

Lookup bilinear(const Grid& g, const std::vector<double>& field, int level, double x, double y) {
    bool clamped = false;
    if (x < g.xmin || x > g.xmax) {
        x = std::clamp(x, g.xmin, g.xmax);
        clamped = true;
    }
    if (y < g.ymin || y > g.ymax) {
        y = std::clamp(y, g.ymin, g.ymax);
        clamped = true;
    }
    const double u = (x - g.xmin) / g.dx;
    const double v = (y - g.ymin) / g.dy;
    const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, g.nx - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(v)), 0, g.ny - 2);
    const double fx = std::clamp(u - i0, 0.0, 1.0);
    const double fy = std::clamp(v - j0, 0.0, 1.0);

    const double v00 = field[g.field_index(level, i0, j0)];
    const double v10 = field[g.field_index(level, i0 + 1, j0)];
    const double v01 = field[g.field_index(level, i0, j0 + 1)];
    const double v11 = field[g.field_index(level, i0 + 1, j0 + 1)];
    const double val = (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 +
                       (1.0 - fx) * fy * v01 + fx * fy * v11;
    return {val, clamped};
}

}  // namespace

BacktestReport run_backtest(const PriceSeries& series, const ModelParams& params,
                            const PdeSolution& sol, const StrategySurface& surface, double w0) {
    const Grid& g = sol.grid;
    if (surface.pi1.size() != sol.phi.size())
        throw ValidationError("run_backtest: surface/solution shape mismatch");
    if (!(w0 > 0.0)) throw ValidationError("run_backtest: initial wealth must be positive");
    if (series.size() < 2) throw ValidationError("run_backtest: series too short");

    const std::size_t steps = series.size() - 1;
    const double dt = series.dt;
    if (static_cast<double>(steps) * dt > g.T * (1.0 + 1e-9))
        throw ValidationError("run_backtest: horizon shorter than the data span");

    BacktestReport rep;
    rep.pi1.reserve(steps);
    rep.pi2.reserve(steps);
    rep.returns.reserve(steps);
    rep.cum_pnl.reserve(steps);

    int clamped_obs = 0;
    double w = w0;
    for (std::size_t n = 0; n < steps; ++n) {
        // Observation n sits at physical time n*dt; the surface stores tau
        // levels, so remaining time T - n*dt selects level nt - round(n*dt/dt_pde).
        const int k_phys = static_cast<int>(std::llround(static_cast<double>(n) * dt / g.dt));
        const int level = std::clamp(g.nt - k_phys, 0, g.nt);

        const double x = std::log(series.s1[n]);
        const double y = std::log(series.s2[n]);
        const Lookup p1 = bilinear(g, surface.pi1, level, x, y);
        const Lookup p2 = bilinear(g, surface.pi2, level, x, y);
        if (p1.clamped) ++clamped_obs;

        const double ret1 = series.s1[n + 1] / series.s1[n] - 1.0;
        const double ret2 = series.s2[n + 1] / series.s2[n] - 1.0;
        const double step_ret = params.r * dt + p1.value * (ret1 - params.r * dt) +
                                p2.value * (ret2 - params.r * dt);

        rep.pi1.push_back(p1.value);
        rep.pi2.push_back(p2.value);
        rep.returns.push_back(step_ret);

        const double next = w * (1.0 + step_ret);
        if (!(next > 0.0)) {
            rep.bankrupt = true;
            rep.cum_pnl.push_back(next / w0 - 1.0);
            break;
        }
        w = next;
        rep.cum_pnl.push_back(w / w0 - 1.0);
    }

    rep.boundary_warnings = clamped_obs;
    if (static_cast<std::size_t>(clamped_obs) == steps)
        throw ValidationError("run_backtest: every observation falls outside the grid");
    rep.terminal_pnl = rep.cum_pnl.empty() ? 0.0 : rep.cum_pnl.back();
    return rep;
}

void write_pnl_csv(const std::string& path, const PriceSeries& series,
                   const BacktestReport& report) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << "date,pi1,pi2,return,cum_pnl\n";
    char buf[160];
    for (std::size_t n = 0; n < report.returns.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g\n", series.dates[n].c_str(),
                      report.pi1[n], report.pi2[n], report.returns[n], report.cum_pnl[n]);
        out << buf;
    }
    if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace pairs
