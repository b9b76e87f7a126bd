#include "pairs/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "pairs/errors.hpp"

namespace pairs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index) {
    return splitmix64(base_seed + (path_index + 1) * 0x9E3779B97F4A7C15ULL);
}

double NormalRng::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 53-bit uniforms in (0,1); offsetting by 0.5 ulp keeps log() finite.
    const double u1 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return radius * std::cos(kTwoPi * u2);
}

std::vector<PricePath> simulate_paths(const ModelParams& p, int n_steps, double dt, int n_paths,
                                      std::uint64_t seed, double x0, double y0) {
    if (!(dt > 0.0)) throw ValidationError("simulate_paths: dt must be positive");
    if (n_steps < 0 || n_paths < 1) throw ValidationError("simulate_paths: bad step/path count");

    const double sqdt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);

    std::vector<PricePath> paths(static_cast<std::size_t>(n_paths));
    for (int pi = 0; pi < n_paths; ++pi) {
        PricePath& path = paths[static_cast<std::size_t>(pi)];
        path.dt = dt;
        path.seed = path_seed(seed, static_cast<std::uint64_t>(pi));
        NormalRng rng(path.seed);

        path.x.resize(static_cast<std::size_t>(n_steps) + 1);
        path.y.resize(static_cast<std::size_t>(n_steps) + 1);
        path.z.resize(static_cast<std::size_t>(n_steps) + 1);
        double x = x0, y = y0;
        path.x[0] = x;
        path.y[0] = y;
        path.z[0] = p.z_value(0.0, x, y);
        for (int n = 0; n < n_steps; ++n) {
            const double t = dt * n;
            const double z = p.z_value(t, x, y);
            const double s1 = p.sigma1_at(x);
            const double s2 = p.sigma2_at(y);
            const double g1 = rng.next();
            const double g2 = p.rho * g1 + rho_c * rng.next();
            x += (p.mu1 - 0.5 * s1 * s1 + p.delta1 * z) * dt + s1 * sqdt * g1;
            y += (p.mu2 - 0.5 * s2 * s2 + p.delta2 * z) * dt + s2 * sqdt * g2;
            path.x[static_cast<std::size_t>(n) + 1] = x;
            path.y[static_cast<std::size_t>(n) + 1] = y;
            path.z[static_cast<std::size_t>(n) + 1] = p.z_value(dt * (n + 1), x, y);
        }
    }
    return paths;
}

std::vector<double> z_prime(const PricePath& path, const ModelParams& p, double t_start) {
    const DerivedQuantities dq = derive_quantities(p);
    const double dt = path.dt;
    const std::size_t n = path.z.size();
    const std::size_t start =
        static_cast<std::size_t>(std::llround(std::max(0.0, t_start) / dt));

    std::vector<double> zp(path.z);
    const double decay = std::exp(-dq.alpha * dt);
    double correction = 0.0;
    for (std::size_t i = start; i + 1 < n; ++i) {
        const double s1 = p.sigma1_at(path.x[i]);
        const double s2 = p.sigma2_at(path.y[i]);
        // Left Riemann sum, pushed forward one step at a time.
        correction = decay * (correction + (0.5 * s1 * s1 + 0.5 * p.beta * s2 * s2) * dt);
        zp[i + 1] = path.z[i + 1] + correction;
    }
    return zp;
}

WealthPath wealth_path(const PricePath& path, std::span<const ControlPair> strategy, double w0,
                       double r, double dt) {
    if (!(w0 > 0.0)) throw ValidationError("wealth_path: initial wealth must be positive");
    const std::size_t n_steps = path.x.empty() ? 0 : path.x.size() - 1;
    if (strategy.size() < n_steps)
        throw ValidationError("wealth_path: strategy shorter than the path");

    WealthPath out;
    out.w.reserve(n_steps + 1);
    out.returns.reserve(n_steps);
    double w = w0;
    out.w.push_back(w);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double ret1 = std::expm1(path.x[n + 1] - path.x[n]);
        const double ret2 = std::expm1(path.y[n + 1] - path.y[n]);
        const double step_ret = r * dt + strategy[n].pi1 * (ret1 - r * dt) +
                                strategy[n].pi2 * (ret2 - r * dt);
        out.returns.push_back(step_ret);
        const double next = w * (1.0 + step_ret);
        if (!(next > 0.0)) {
            out.bankrupt = true;
            break;
        }
        w = next;
        out.w.push_back(w);
    }
    return out;
}

}  // namespace pairs
