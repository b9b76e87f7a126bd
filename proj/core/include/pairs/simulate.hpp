// simulate.hpp
// Monte Carlo generation of co-integrated CEV log-price paths, the
// volatility-corrected mean-reverting process z', and wealth evolution under
// a given strategy.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pairs/closed_form.hpp"
#include "pairs/model.hpp"

namespace pairs {

// Deterministic seed derivation: path p of a run with base seed s draws from
// a generator seeded with splitmix64(s + (p+1) * 0x9E3779B97F4A7C15), so
// multi-path runs reproduce regardless of scheduling order.
std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index);

// Standard normal draws via Box-Muller on 53-bit uniforms from mt19937_64;
// bitwise reproducible for a fixed seed on any platform.
class NormalRng {
  public:
    explicit NormalRng(std::uint64_t seed) : gen_(seed) {}
    double next();

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct PricePath {
    double dt = 0.0;
    std::vector<double> x;  // log price, asset 1
    std::vector<double> y;  // log price, asset 2
    std::vector<double> z;  // a + b t + x + beta y at each index
    std::uint64_t seed = 0;  // the derived per-path seed actually used
};

struct WealthPath {
    std::vector<double> w;        // strictly positive; truncated at bankruptcy
    std::vector<double> returns;  // per-step fractional returns
    bool bankrupt = false;
};

// Euler-Maruyama in log-price space with volatilities frozen at the left
// endpoint and correlated Gaussian increments.
std::vector<PricePath> simulate_paths(const ModelParams& params, int n_steps, double dt,
                                      int n_paths, std::uint64_t seed, double x0 = 3.0,
                                      double y0 = 3.0);

// z'_s = z_s + int e^{alpha(u-s)} (sigma1^2(u)/2 + beta sigma2^2(u)/2) du,
// left Riemann sum on the path grid starting at t_start.
std::vector<double> z_prime(const PricePath& path, const ModelParams& params,
                            double t_start = 0.0);

// Compounds w through per-step returns r dt + pi1 (dS1/S1 - r dt) +
// pi2 (dS2/S2 - r dt) computed from simple price returns. Truncates with a
// flag if wealth would become nonpositive.
WealthPath wealth_path(const PricePath& path, std::span<const ControlPair> strategy, double w0,
                       double r, double dt);

}  // namespace pairs
