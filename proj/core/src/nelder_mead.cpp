#include "pairs/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairs/errors.hpp"

namespace pairs {

// Standard Nelder-Mead with reflection 1, expansion 2, contraction 1/2,
// shrink 1/2, and the fminsearch-style initial simplex.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw ValidationError("nelder_mead: empty starting point");

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        double& xi = simplex[i + 1][i];
        xi = (xi != 0.0) ? xi * (1.0 + opts.initial_step_rel) : opts.initial_step_abs;
    }

    NelderMeadResult res;
    std::vector<double> fv(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) fv[i] = (++evals, f(simplex[i]));

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&fv](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[n - 1];

        if (fv[worst] - fv[best] < opts.spread_tol) {
            res.converged = true;
            break;
        }
        if (evals >= opts.max_evals) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t d = 0; d < n; ++d) xr[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
        const double fr = (++evals, f(xr));

        if (fr < fv[best]) {
            for (std::size_t d = 0; d < n; ++d)
                xe[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
            const double fe = (++evals, f(xe));
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside) {
                for (std::size_t d = 0; d < n; ++d)
                    xc[d] = centroid[d] + 0.5 * (xr[d] - centroid[d]);
            } else {
                for (std::size_t d = 0; d < n; ++d)
                    xc[d] = centroid[d] - 0.5 * (centroid[d] - simplex[worst][d]);
            }
            const double fc = (++evals, f(xc));
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    fv[i] = (++evals, f(simplex[i]));
                    if (evals >= opts.max_evals) break;
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.fx = fv[best];
    res.evals = evals;
    return res;
}

}  // namespace pairs
