// closed_form.hpp
// Exact solutions for the constant-volatility pairs problem: the Riccati-type
// coefficient f2, the quadrature-based f1 and f0, the optimal fractions of
// wealth for power utility, the exponential-utility counterparts, and the
// sufficient-condition checker for the candidate value function.

#pragma once

#include <functional>
#include <vector>

#include "pairs/model.hpp"

namespace pairs {

// Fractions of wealth invested in assets 1 and 2.
struct ControlPair {
    double pi1 = 0.0;
    double pi2 = 0.0;
};

// f2, f1, f0 sampled on an ascending time grid over [0, T]. The value
// function ansatz is phi(t,z) = exp(f2 z^2 + f1 z + f0) for power utility and
// h(t,z) = exp(f2 z^2 + f1 z + f0) for exponential utility.
struct OdeCoefficients {
    std::vector<double> t_grid;
    std::vector<double> f2;
    std::vector<double> f1;
    std::vector<double> f0;
    Utility utility = Utility::Power;

    double horizon() const { return t_grid.back(); }
    // Piecewise-linear evaluation, exact on grid nodes.
    double eval_f2(double t) const;
    double eval_f1(double t) const;
    double eval_f0(double t) const;
};

// --- power utility -----------------------------------------------------

// Exact f2(t); the branch is selected by the sign of c0. Throws
// NumericalError if the trigonometric branch blows up inside [t, T]
// (horizon too long), reporting the earliest blow-up time.
double f2_closed(double t, const DerivedQuantities& dq, double T);

// f1(t) = int_t^T b1(s) exp(int_t^s a1(u) du) ds with
// a1 = -alpha/(1-gamma) + 2 c1 f2. Trapezoid on a uniform grid; f2 is
// injectable so tests can substitute an independent integrator.
double f1_quadrature(double t, const DerivedQuantities& dq, const ModelParams& params,
                     const std::function<double(double)>& f2_of_t, double T,
                     int intervals = 2000);

double f0_quadrature(double t, const DerivedQuantities& dq, const ModelParams& params,
                     const std::function<double(double)>& f1_of_t,
                     const std::function<double(double)>& f2_of_t, double T,
                     int intervals = 2000);

// Convenience single-point evaluations backed by f2_closed.
double f1_closed(double t, const ModelParams& params, const DerivedQuantities& dq, double T,
                 int intervals = 2000);
double f0_closed(double t, const ModelParams& params, const DerivedQuantities& dq, double T,
                 int intervals = 2000);

// All three coefficients on a uniform ascending grid ending at T. Shares one
// refined quadrature grid across all nodes; t_grid.back() is the horizon.
OdeCoefficients power_coefficients(const ModelParams& params, const DerivedQuantities& dq,
                                   const std::vector<double>& t_grid, int min_intervals = 2000);

// Optimal fractions of wealth (Merton-style first two components plus the
// time-dependent unwinding component 2 f2 z + f1 scaled by (1, beta)).
ControlPair power_controls(double t, double z, const ModelParams& params,
                           const OdeCoefficients& coeffs);

// u(t,w,x,y) = w^gamma / (gamma (1-gamma)) * exp((1-gamma)(f2 z^2 + f1 z + f0)).
// Rejects w < 0.
double power_value_function(double t, double w, double x, double y, const ModelParams& params,
                            const OdeCoefficients& coeffs);

// Sufficient conditions for the candidate solution at time t; each takes the
// form lhs(t) < alpha / (2 sigma_beta^2) with sigma_beta as defined (no
// correlation cross term).
struct VerificationConditions {
    bool holds1 = false, holds2 = false, holds3 = false;
    double lhs1 = 0.0, lhs2 = 0.0, lhs3 = 0.0;
    double rhs = 0.0;
    bool all() const { return holds1 && holds2 && holds3; }
};

VerificationConditions check_theorem_conditions(const ModelParams& params,
                                                const DerivedQuantities& dq,
                                                const OdeCoefficients& coeffs, double t);

// --- exponential utility ------------------------------------------------

struct ExponentialCoefficients {
    double f2 = 0.0;
    double f1 = 0.0;
    double f0 = 0.0;
};

// Closed polynomial-in-(T-t) forms; all three vanish at t = T.
ExponentialCoefficients exponential_coefficients(double t, const ModelParams& params, double T);

OdeCoefficients exponential_coefficients_grid(const ModelParams& params,
                                              const std::vector<double>& t_grid);

// Dollar positions scaled by wealth: controls are inversely proportional to w
// and carry the e^{-r(T-t)} discount. Rejects w <= 0.
ControlPair exponential_controls(double t, double w, double z, const ModelParams& params);

}  // namespace pairs
