#include "pairs/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pairs/errors.hpp"

namespace pairs {

namespace {

// delta1^2/sigma1^2 + delta2^2/sigma2^2 - 2 rho delta1 delta2 / (sigma1 sigma2)
double quad_form_delta(const ModelParams& p) {
    return p.delta1 * p.delta1 / (p.sigma1 * p.sigma1) +
           p.delta2 * p.delta2 / (p.sigma2 * p.sigma2) -
           2.0 * p.rho * p.delta1 * p.delta2 / (p.sigma1 * p.sigma2);
}

// (mu1-r)^2/sigma1^2 + (mu2-r)^2/sigma2^2 - 2 rho (mu1-r)(mu2-r)/(sigma1 sigma2)
double quad_form_mu(const ModelParams& p) {
    const double e1 = p.mu1 - p.r;
    const double e2 = p.mu2 - p.r;
    return e1 * e1 / (p.sigma1 * p.sigma1) + e2 * e2 / (p.sigma2 * p.sigma2) -
           2.0 * p.rho * e1 * e2 / (p.sigma1 * p.sigma2);
}

double a1_coefficient(double f2, const ModelParams& p, const DerivedQuantities& dq) {
    return -dq.alpha / (1.0 - p.gamma) + 2.0 * dq.c1 * f2;
}

// Constant term of the f1 equation, i.e. the z-coefficient of the quadratic
// form in the reduced PDE: gamma/((1-g)^2 (1-rho^2)) (A + B - rho C) with
// A = (mu1-r) d1/s1^2, B = (mu2-r) d2/s2^2, C = (d1(mu2-r)+d2(mu1-r))/(s1 s2).
double b1_coefficient(double f2, const ModelParams& p) {
    const double g = p.gamma;
    const double omg = 1.0 - g;
    const double drift_term =
        g / (omg * omg * (1.0 - p.rho * p.rho)) *
        ((p.mu1 - p.r) * p.delta1 / (p.sigma1 * p.sigma1) +
         (p.mu2 - p.r) * p.delta2 / (p.sigma2 * p.sigma2) -
         p.rho * (p.delta1 * (p.mu2 - p.r) + p.delta2 * (p.mu1 - p.r)) / (p.sigma1 * p.sigma2));
    const double f2_term = 2.0 * p.b - 2.0 * p.r * g * (1.0 + p.beta) / omg +
                           2.0 * (p.mu1 + p.beta * p.mu2) / omg -
                           (p.sigma1 * p.sigma1 + p.beta * p.sigma2 * p.sigma2);
    return drift_term + f2_term * f2;
}

// Integrand of f0 apart from the constant-in-time pieces.
double f0_integrand(double f1, double f2, const ModelParams& p, const DerivedQuantities& dq) {
    const double omg = 1.0 - p.gamma;
    return (p.mu1 + p.beta * p.mu2) / omg * f1 + p.b * f1 -
           0.5 * (p.sigma1 * p.sigma1 + p.beta * p.sigma2 * p.sigma2) * f1 -
           p.r * p.gamma * (1.0 + p.beta) / omg * f1 + 0.5 * dq.c1 * f1 * f1 + dq.c1 * f2;
}

double f0_constant_rate(const ModelParams& p) {
    const double omg = 1.0 - p.gamma;
    return p.gamma / (2.0 * omg * omg * (1.0 - p.rho * p.rho)) * quad_form_mu(p) -
           p.r * p.gamma / omg;
}

double f0_terminal(const ModelParams& p) {
    return std::log(1.0 - p.gamma) / (1.0 - p.gamma);
}

}  // namespace

double f2_closed(double t, const DerivedQuantities& dq, double T) {
    const double tau = T - t;
    if (tau < 0.0) throw ValidationError("f2_closed: t beyond horizon");
    if (tau == 0.0) return 0.0;

    const double c0 = dq.c0, c1 = dq.c1, c2 = dq.c2;
    if (c0 > 0.0) {
        const double omega = std::sqrt(2.0 * c1 * c0);
        const double kappa = std::sqrt(c0 / (2.0 * c1));
        const double sh = std::sinh(omega * tau);
        const double ch = std::cosh(omega * tau);
        return (c2 * c2 - c0 / (2.0 * c1)) * sh / (c2 * sh + kappa * ch);
    }
    if (c0 < 0.0) {
        const double omega = std::sqrt(-2.0 * c1 * c0);
        const double kappa = std::sqrt(-c0 / (2.0 * c1));
        auto denom = [&](double s) { return c2 * std::sin(omega * s) + kappa * std::cos(omega * s); };
        // Finite-time blow-up: the denominator starts at kappa > 0 and may
        // cross zero before tau. Scan for the first sign change.
        const int scan = 2000;
        double prev = denom(0.0);
        for (int i = 1; i <= scan; ++i) {
            const double s = tau * static_cast<double>(i) / scan;
            const double d = denom(s);
            if (d <= 0.0) {
                const double s_prev = tau * static_cast<double>(i - 1) / scan;
                const double root = s_prev + prev / (prev - d) * (s - s_prev);
                std::ostringstream msg;
                msg << "f2 blows up at t = " << (T - root)
                    << " (horizon too long for these parameters)";
                throw NumericalError(msg.str());
            }
            prev = d;
        }
        return (c2 * c2 - c0 / (2.0 * c1)) * std::sin(omega * tau) / denom(tau);
    }
    // c0 == 0, rational branch; with c2 = 0 this is identically zero.
    return c2 + c2 / (-2.0 * c1 * c2 * tau - 1.0);
}

double f1_quadrature(double t, const DerivedQuantities& dq, const ModelParams& params,
                     const std::function<double(double)>& f2_of_t, double T, int intervals) {
    const double tau = T - t;
    if (tau < 0.0) throw ValidationError("f1_quadrature: t beyond horizon");
    if (tau == 0.0) return 0.0;
    const int m = std::max(intervals, 1);
    const double h = tau / m;

    std::vector<double> a1(m + 1), b1(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double f2 = f2_of_t(t + h * j);
        a1[j] = a1_coefficient(f2, params, dq);
        b1[j] = b1_coefficient(f2, params);
    }
    // A(s_j) = int_t^{s_j} a1, cumulative trapezoid.
    double acc = 0.0;
    double sum = 0.0;
    double prev_term = b1[0] * std::exp(0.0);
    for (int j = 1; j <= m; ++j) {
        acc += 0.5 * h * (a1[j - 1] + a1[j]);
        const double term = b1[j] * std::exp(acc);
        sum += 0.5 * h * (prev_term + term);
        prev_term = term;
    }
    return sum;
}

double f0_quadrature(double t, const DerivedQuantities& dq, const ModelParams& params,
                     const std::function<double(double)>& f1_of_t,
                     const std::function<double(double)>& f2_of_t, double T, int intervals) {
    const double tau = T - t;
    if (tau < 0.0) throw ValidationError("f0_quadrature: t beyond horizon");
    if (tau == 0.0) return f0_terminal(params);
    const int m = std::max(intervals, 1);
    const double h = tau / m;

    double sum = 0.0;
    double prev = f0_integrand(f1_of_t(t), f2_of_t(t), params, dq);
    for (int j = 1; j <= m; ++j) {
        const double s = t + h * j;
        const double cur = f0_integrand(f1_of_t(s), f2_of_t(s), params, dq);
        sum += 0.5 * h * (prev + cur);
        prev = cur;
    }
    return sum + f0_constant_rate(params) * tau + f0_terminal(params);
}

double f1_closed(double t, const ModelParams& params, const DerivedQuantities& dq, double T,
                 int intervals) {
    return f1_quadrature(
        t, dq, params, [&](double s) { return f2_closed(s, dq, T); }, T, intervals);
}

namespace {

// Shared-grid evaluation of f1 and f0 over [t0, T]: one pass computes both on
// every quadrature node via the integrating-factor identity
//   f1(s_j) = (G_m - G_j) / E_j,  E_j = exp(int_{t0}^{s_j} a1),
//   G_j = int_{t0}^{s_j} b1 E.
struct CoefficientProfile {
    std::vector<double> s, f2, f1, f0;
};

CoefficientProfile power_profile(double t0, const ModelParams& p, const DerivedQuantities& dq,
                                 double T, int m) {
    CoefficientProfile prof;
    const double tau = T - t0;
    const double h = tau / m;
    prof.s.resize(m + 1);
    prof.f2.resize(m + 1);
    prof.f1.resize(m + 1);
    prof.f0.resize(m + 1);

    std::vector<double> a1(m + 1), b1(m + 1), bigE(m + 1), bigG(m + 1);
    for (int j = 0; j <= m; ++j) {
        prof.s[j] = (j == m) ? T : t0 + h * j;
        prof.f2[j] = f2_closed(prof.s[j], dq, T);
        a1[j] = a1_coefficient(prof.f2[j], p, dq);
        b1[j] = b1_coefficient(prof.f2[j], p);
    }
    bigE[0] = 1.0;
    bigG[0] = 0.0;
    double acc = 0.0;
    for (int j = 1; j <= m; ++j) {
        acc += 0.5 * h * (a1[j - 1] + a1[j]);
        bigE[j] = std::exp(acc);
        bigG[j] = bigG[j - 1] + 0.5 * h * (b1[j - 1] * bigE[j - 1] + b1[j] * bigE[j]);
    }
    for (int j = 0; j <= m; ++j) prof.f1[j] = (bigG[m] - bigG[j]) / bigE[j];

    // f0 by backward cumulative trapezoid of its integrand.
    std::vector<double> bigH(m + 1);
    bigH[0] = 0.0;
    double prev = f0_integrand(prof.f1[0], prof.f2[0], p, dq);
    for (int j = 1; j <= m; ++j) {
        const double cur = f0_integrand(prof.f1[j], prof.f2[j], p, dq);
        bigH[j] = bigH[j - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double rate = f0_constant_rate(p);
    const double f0T = f0_terminal(p);
    for (int j = 0; j <= m; ++j) {
        const double remaining = T - prof.s[j];
        prof.f0[j] = (bigH[m] - bigH[j]) + rate * remaining + f0T;
    }
    return prof;
}

}  // namespace

double f0_closed(double t, const ModelParams& params, const DerivedQuantities& dq, double T,
                 int intervals) {
    if (T - t == 0.0) return f0_terminal(params);
    const CoefficientProfile prof = power_profile(t, params, dq, T, std::max(intervals, 1));
    return prof.f0.front();
}

OdeCoefficients power_coefficients(const ModelParams& params, const DerivedQuantities& dq,
                                   const std::vector<double>& t_grid, int min_intervals) {
    if (t_grid.empty()) throw ValidationError("power_coefficients: empty time grid");
    const double T = t_grid.back();
    OdeCoefficients out;
    out.t_grid = t_grid;
    out.utility = Utility::Power;
    const std::size_t n = t_grid.size();
    out.f2.resize(n);
    out.f1.resize(n);
    out.f0.resize(n);

    if (n == 1) {
        out.f2[0] = 0.0;
        out.f1[0] = 0.0;
        out.f0[0] = f0_terminal(params);
        return out;
    }
    // The grid must be uniform so quadrature nodes can refine it exactly.
    const double step = (t_grid.back() - t_grid.front()) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(t_grid[k + 1] - t_grid[k] - step) > 1e-9 * std::max(1.0, T))
            throw ValidationError("power_coefficients: time grid must be uniform and ascending");
    }
    const int refine = std::max(1, (min_intervals + static_cast<int>(n) - 2) / (static_cast<int>(n) - 1));
    const int m = refine * static_cast<int>(n - 1);
    const CoefficientProfile prof = power_profile(t_grid.front(), params, dq, T, m);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = k * static_cast<std::size_t>(refine);
        out.f2[k] = prof.f2[j];
        out.f1[k] = prof.f1[j];
        out.f0[k] = prof.f0[j];
    }
    return out;
}

namespace {

double interp(const std::vector<double>& grid, const std::vector<double>& vals, double t) {
    if (t <= grid.front()) return vals.front();
    if (t >= grid.back()) return vals.back();
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    if (grid[hi] == t) return vals[hi];
    const std::size_t lo = hi - 1;
    const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
    return vals[lo] + w * (vals[hi] - vals[lo]);
}

}  // namespace

double OdeCoefficients::eval_f2(double t) const { return interp(t_grid, f2, t); }
double OdeCoefficients::eval_f1(double t) const { return interp(t_grid, f1, t); }
double OdeCoefficients::eval_f0(double t) const { return interp(t_grid, f0, t); }

ControlPair power_controls(double t, double z, const ModelParams& p, const OdeCoefficients& coeffs) {
    if (coeffs.utility != Utility::Power)
        throw ValidationError("power_controls requires power-utility coefficients");
    const double omg = 1.0 - p.gamma;
    const double orr = 1.0 - p.rho * p.rho;
    const double e1 = p.mu1 - p.r + p.delta1 * z;
    const double e2 = p.mu2 - p.r + p.delta2 * z;
    const double unwind = 2.0 * coeffs.eval_f2(t) * z + coeffs.eval_f1(t);
    ControlPair c;
    c.pi1 = e1 / (p.sigma1 * p.sigma1 * omg * orr) - p.rho * e2 / (p.sigma1 * p.sigma2 * omg * orr) +
            unwind;
    c.pi2 = e2 / (p.sigma2 * p.sigma2 * omg * orr) - p.rho * e1 / (p.sigma1 * p.sigma2 * omg * orr) +
            p.beta * unwind;
    return c;
}

double power_value_function(double t, double w, double x, double y, const ModelParams& p,
                            const OdeCoefficients& coeffs) {
    if (w < 0.0) throw ValidationError("power_value_function: negative wealth");
    if (coeffs.utility != Utility::Power)
        throw ValidationError("power_value_function requires power-utility coefficients");
    if (w == 0.0) return 0.0;
    const double z = p.z_value(t, x, y);
    const double quad =
        coeffs.eval_f2(t) * z * z + coeffs.eval_f1(t) * z + coeffs.eval_f0(t);
    return std::pow(w, p.gamma) / (p.gamma * (1.0 - p.gamma)) * std::exp((1.0 - p.gamma) * quad);
}

VerificationConditions check_theorem_conditions(const ModelParams& p, const DerivedQuantities& dq,
                                                const OdeCoefficients& coeffs, double t) {
    const double T = coeffs.horizon();
    const double tau = T - t;
    const double f2 = coeffs.eval_f2(t);
    const double g = p.gamma;
    const double omg = 1.0 - g;
    const double orr = 1.0 - p.rho * p.rho;
    const double sb2 = dq.sigma_beta * dq.sigma_beta;

    VerificationConditions v;
    v.rhs = dq.alpha / (2.0 * sb2);
    v.lhs1 = omg * f2 * (std::exp(2.0 * dq.alpha * tau) - 1.0);
    v.lhs2 = 32.0 * g * g *
             ((p.rho * p.rho + 1.0) / (omg * omg * orr * orr) *
                  (p.delta1 * p.delta1 / (p.sigma1 * p.sigma1) +
                   p.delta2 * p.delta2 / (p.sigma2 * p.sigma2)) -
              4.0 * p.rho * p.delta1 * p.delta2 / (p.sigma1 * p.sigma2 * omg * omg * orr * orr) +
              4.0 * f2 * f2 * (p.sigma1 * p.sigma1 + p.beta * p.beta * p.sigma2 * p.sigma2) +
              4.0 * f2 / (omg * orr) *
                  (-dq.alpha - p.rho * (p.delta2 * p.sigma1 / p.sigma2 +
                                        p.beta * p.delta1 * p.sigma2 / p.sigma1))) *
             tau;
    v.lhs3 = 4.0 * g / (omg * orr) * quad_form_delta(p) * tau - 8.0 * g * dq.alpha * f2 * tau;
    v.holds1 = v.lhs1 < v.rhs;
    v.holds2 = v.lhs2 < v.rhs;
    v.holds3 = v.lhs3 < v.rhs;
    return v;
}

ExponentialCoefficients exponential_coefficients(double t, const ModelParams& p, double T) {
    const double tau = T - t;
    if (tau < 0.0) throw ValidationError("exponential_coefficients: t beyond horizon");
    const double orr = 1.0 - p.rho * p.rho;
    const double qd = quad_form_delta(p);
    const double qm = quad_form_mu(p);
    const double carry = p.r * (1.0 + p.beta) + p.b -
                         0.5 * (p.sigma1 * p.sigma1 + p.beta * p.sigma2 * p.sigma2);
    const double lin =
        -1.0 / orr *
        ((p.mu1 - p.r) * p.delta1 / (p.sigma1 * p.sigma1) +
         (p.mu2 - p.r) * p.delta2 / (p.sigma2 * p.sigma2) -
         p.rho * (p.delta2 * (p.mu1 - p.r) + p.delta1 * (p.mu2 - p.r)) / (p.sigma1 * p.sigma2));
    const double quad = 1.0 / orr * qd * (-carry);
    const double c1 = p.sigma1 * p.sigma1 + p.beta * p.beta * p.sigma2 * p.sigma2 +
                      2.0 * p.beta * p.rho * p.sigma1 * p.sigma2;

    ExponentialCoefficients f;
    f.f2 = -qd / (2.0 * orr) * tau;
    f.f1 = lin * tau + quad * tau * tau / 2.0;
    f.f0 = -qm / (2.0 * orr) * tau + carry * (lin * tau * tau / 2.0 + quad * tau * tau * tau / 6.0) +
           c1 * (-qd / (2.0 * orr)) * tau * tau / 2.0;
    return f;
}

OdeCoefficients exponential_coefficients_grid(const ModelParams& p,
                                              const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw ValidationError("exponential_coefficients_grid: empty time grid");
    OdeCoefficients out;
    out.t_grid = t_grid;
    out.utility = Utility::Exponential;
    const double T = t_grid.back();
    out.f2.reserve(t_grid.size());
    out.f1.reserve(t_grid.size());
    out.f0.reserve(t_grid.size());
    for (double t : t_grid) {
        const ExponentialCoefficients f = exponential_coefficients(t, p, T);
        out.f2.push_back(f.f2);
        out.f1.push_back(f.f1);
        out.f0.push_back(f.f0);
    }
    return out;
}

ControlPair exponential_controls(double t, double w, double z, const ModelParams& p) {
    if (w <= 0.0) throw ValidationError("exponential_controls: wealth must be positive");
    const double T = p.horizon;
    const ExponentialCoefficients f = exponential_coefficients(t, p, T);
    const double disc = std::exp(-p.r * (T - t));
    const double orr = 1.0 - p.rho * p.rho;
    const double wg = w * p.gamma;
    const double e1 = p.mu1 - p.r + p.delta1 * z;
    const double e2 = p.mu2 - p.r + p.delta2 * z;
    const double unwind = 2.0 * f.f2 * z + f.f1;
    ControlPair c;
    c.pi1 = disc * (e1 / (p.sigma1 * p.sigma1 * wg * orr) -
                    p.rho * e2 / (p.sigma1 * p.sigma2 * wg * orr) + unwind / wg);
    c.pi2 = disc * (e2 / (p.sigma2 * p.sigma2 * wg * orr) -
                    p.rho * e1 / (p.sigma1 * p.sigma2 * wg * orr) + p.beta * unwind / wg);
    return c;
}

}  // namespace pairs
