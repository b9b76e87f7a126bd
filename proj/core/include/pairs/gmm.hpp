// gmm.hpp
// Generalized Method of Moments estimation of the 12 model parameters from
// discrete two-asset price data. Five residual-based moment functions crossed
// with four instruments (1, t, ln S1, ln S2) give 20 moment conditions;
// just-identified mode minimizes over a 12-component selection with identity
// weight, two-step mode re-weights all 20 by the inverse Newey-West matrix.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairs/model.hpp"
#include "pairs/series.hpp"

namespace pairs {

// Estimation target, in reporting order.
struct ParameterVector {
    double mu1 = 0.0, sigma1 = 0.0, delta1 = 0.0, theta1 = 0.0;
    double mu2 = 0.0, sigma2 = 0.0, delta2 = 0.0, theta2 = 0.0;
    double rho = 0.0, a = 0.0, b = 0.0, beta = 0.0;

    std::array<double, 12> to_array() const;
    static ParameterVector from_array(const std::array<double, 12>& v);
    static ParameterVector from_model(const ModelParams& p);
    void apply_to(ModelParams& p) const;
};

// Smooth reparameterization keeping sigma > 0, rho in (-1,1), theta in (-1,0].
std::array<double, 12> to_unconstrained(const ParameterVector& lambda);
ParameterVector to_constrained(const std::array<double, 12>& u);

enum class GmmMode { JustIdentified, TwoStepEfficient };
enum class NwWeights {
    Narrow,    // 1 - j/(k-1), support closes at lag k-1; undefined for k = 1
    Standard,  // Bartlett, 1 - j/(k+1)
};

struct MomentSpec {
    // 1-based indices into the 20-component moment vector.
    std::vector<int> selection;
    static MomentSpec just_identified_default();  // {1..8, 10, 12, 14, 16}
    static MomentSpec all();                      // {1..20}
};

struct GmmSettings {
    GmmMode mode = GmmMode::JustIdentified;
    std::vector<int> selection = MomentSpec::just_identified_default().selection;
    int nw_lag = -1;  // -1: floor(4 (n/100)^{2/9})
    NwWeights nw_weights = NwWeights::Narrow;
    std::uint64_t seed = 0;   // kept for config compatibility; fits are deterministic
    int restarts = 5;         // > 1 enables the deterministic multistart grid
    int max_evals = 50000;    // budget for the simplex polish stage
    double spread_tol = 1e-12;
};

struct GmmResult {
    ParameterVector lambda;
    double j_value = 0.0;
    GmmMode mode = GmmMode::JustIdentified;
    Eigen::MatrixXd weight;
    int iterations = 0;
    bool converged = false;
    int nw_lag = -1;
    bool weight_regularized = false;
    std::vector<std::string> warnings;
};

// Residual pairs, one per transition.
std::pair<std::vector<double>, std::vector<double>> residuals(const PriceSeries& series,
                                                              const ParameterVector& lambda,
                                                              double dt);

// Per-transition 20-component moment records, base-major ordering.
std::vector<std::array<double, 20>> moment_vector(const PriceSeries& series,
                                                  const ParameterVector& lambda, double dt);

// g_T = (1/T) sum_t f_t over all 20 components.
Eigen::VectorXd sample_moments(const PriceSeries& series, const ParameterVector& lambda,
                               double dt);

// J = g' W g over the selected components; an empty weight means identity.
double objective(const PriceSeries& series, const ParameterVector& lambda,
                 const Eigen::MatrixXd& weight, const std::vector<int>& selection, double dt);

// Newey-West long-run covariance of the 20 moment components at lag k.
Eigen::MatrixXd newey_west(const PriceSeries& series, const ParameterVector& lambda, int lag,
                           double dt, NwWeights weights = NwWeights::Narrow);

int default_nw_lag(std::size_t transitions);

// Data-driven starting point: sample volatilities/correlation of log returns,
// beta from the log-price regression slope, zero drifts.
ParameterVector default_initial_guess(const PriceSeries& series, double dt);

GmmResult estimate(const PriceSeries& series, double dt, const GmmSettings& settings = {},
                   std::optional<ParameterVector> initial_guess = std::nullopt);

std::string to_string(GmmMode mode);
GmmMode gmm_mode_from_string(const std::string& s);

}  // namespace pairs
