// model.hpp
// Market/model parameters for a two-asset co-integrated pair with CEV local
// volatility, the constants derived from them, and validation.

#pragma once

#include <string>
#include <vector>

namespace pairs {

enum class Utility { Power, Exponential };

// All inputs are annualized: drifts and rates per year, volatilities per
// sqrt-year. theta1 = theta2 = 0 recovers the constant-volatility model.
struct ModelParams {
    double mu1 = 0.0;     // drift, asset 1
    double mu2 = 0.0;     // drift, asset 2
    double sigma1 = 0.0;  // volatility scale, asset 1 (> 0)
    double sigma2 = 0.0;  // volatility scale, asset 2 (> 0)
    double delta1 = 0.0;  // co-integration loading, asset 1
    double delta2 = 0.0;  // co-integration loading, asset 2
    double theta1 = 0.0;  // CEV exponent, asset 1, in (-1, 0]
    double theta2 = 0.0;  // CEV exponent, asset 2, in (-1, 0]
    double a = 0.0;       // co-integration intercept
    double b = 0.0;       // co-integration trend
    double beta = 0.0;    // co-integration weight on asset 2
    double rho = 0.0;     // instantaneous correlation, in (-1, 1)
    double r = 0.0;       // risk-free rate
    double gamma = 0.0;   // risk aversion; Power utility requires gamma in (0, 1)
    Utility utility = Utility::Power;
    double horizon = 1.0;  // T, years

    // Local volatility sigma_i * exp(theta_i * logprice).
    double sigma1_at(double x) const;
    double sigma2_at(double y) const;
    // Co-integration value z = a + b t + x + beta y.
    double z_value(double t, double x, double y) const;
};

struct DerivedQuantities {
    double alpha;       // mean-reversion speed -delta1 - beta*delta2
    double eta;         // equilibrium level of z (NaN when alpha == 0)
    double sigma_beta;  // sqrt(sigma1^2 + beta^2 sigma2^2), no cross term
    double c1;          // sigma1^2 + beta^2 sigma2^2 + 2 beta rho sigma1 sigma2
    double c2;          // alpha / (2 (1-gamma) c1)
    double c0;          // constant-coefficient combination, sign selects the f2 branch
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

// Pure; total even on invalid inputs so the validator can report alpha.
DerivedQuantities derive_quantities(const ModelParams& params);

// Collects every violated invariant; never throws.
ValidationReport validate(const ModelParams& params);

// Throwing convenience used at module entry points.
void require_valid(const ModelParams& params);

// JSON parameter file, keys exactly the field names above plus "utility" and
// "horizon". Unknown keys are an error; only theta1/theta2 may be omitted.
ModelParams params_from_json_text(const std::string& text);
ModelParams load_params_file(const std::string& path);
std::string params_to_json_text(const ModelParams& params);

std::string to_string(Utility u);
Utility utility_from_string(const std::string& s);

}  // namespace pairs
