// nelder_mead.hpp
// Derivative-free simplex minimizer used by the moment estimator.

#pragma once

#include <functional>
#include <vector>

namespace pairs {

struct NelderMeadOptions {
    int max_evals = 50000;
    double spread_tol = 1e-12;       // stop when max_i f_i - f_best < tol
    double initial_step_rel = 0.05;  // simplex edge: 5% of |x0_i|
    double initial_step_abs = 0.00025;  // used where x0_i == 0
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evals = 0;
    bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, const NelderMeadOptions& opts = {});

}  // namespace pairs
