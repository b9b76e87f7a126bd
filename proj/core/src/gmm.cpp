#include "pairs/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pairs/errors.hpp"
#include "pairs/nelder_mead.hpp"

namespace pairs {

std::array<double, 12> ParameterVector::to_array() const {
    return {mu1, sigma1, delta1, theta1, mu2, sigma2, delta2, theta2, rho, a, b, beta};
}

ParameterVector ParameterVector::from_array(const std::array<double, 12>& v) {
    ParameterVector p;
    p.mu1 = v[0];
    p.sigma1 = v[1];
    p.delta1 = v[2];
    p.theta1 = v[3];
    p.mu2 = v[4];
    p.sigma2 = v[5];
    p.delta2 = v[6];
    p.theta2 = v[7];
    p.rho = v[8];
    p.a = v[9];
    p.b = v[10];
    p.beta = v[11];
    return p;
}

ParameterVector ParameterVector::from_model(const ModelParams& m) {
    ParameterVector p;
    p.mu1 = m.mu1;
    p.sigma1 = m.sigma1;
    p.delta1 = m.delta1;
    p.theta1 = m.theta1;
    p.mu2 = m.mu2;
    p.sigma2 = m.sigma2;
    p.delta2 = m.delta2;
    p.theta2 = m.theta2;
    p.rho = m.rho;
    p.a = m.a;
    p.b = m.b;
    p.beta = m.beta;
    return p;
}

void ParameterVector::apply_to(ModelParams& m) const {
    m.mu1 = mu1;
    m.sigma1 = sigma1;
    m.delta1 = delta1;
    m.theta1 = theta1;
    m.mu2 = mu2;
    m.sigma2 = sigma2;
    m.delta2 = delta2;
    m.theta2 = theta2;
    m.rho = rho;
    m.a = a;
    m.b = b;
    m.beta = beta;
}

namespace {

double atanh_clamped(double v) {
    const double lim = 1.0 - 1e-15;
    return std::atanh(std::clamp(v, -lim, lim));
}

}  // namespace

std::array<double, 12> to_unconstrained(const ParameterVector& p) {
    std::array<double, 12> u = p.to_array();
    u[1] = std::log(p.sigma1);
    u[5] = std::log(p.sigma2);
    u[8] = atanh_clamped(p.rho);
    u[3] = atanh_clamped(2.0 * p.theta1 + 1.0);
    u[7] = atanh_clamped(2.0 * p.theta2 + 1.0);
    return u;
}

ParameterVector to_constrained(const std::array<double, 12>& u) {
    // tanh saturates to exactly +-1 for |u| > ~19; keep the open bounds open.
    const double hi = std::nextafter(1.0, 0.0);
    auto open_tanh = [hi](double v) { return std::clamp(std::tanh(v), -hi, hi); };
    ParameterVector p = ParameterVector::from_array(u);
    p.sigma1 = std::exp(u[1]);
    p.sigma2 = std::exp(u[5]);
    p.rho = open_tanh(u[8]);
    p.theta1 = -1.0 + (1.0 + open_tanh(u[3])) / 2.0;
    p.theta2 = -1.0 + (1.0 + open_tanh(u[7])) / 2.0;
    return p;
}

MomentSpec MomentSpec::just_identified_default() {
    return MomentSpec{{1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 14, 16}};
}

MomentSpec MomentSpec::all() {
    MomentSpec s;
    s.selection.resize(20);
    std::iota(s.selection.begin(), s.selection.end(), 1);
    return s;
}

int default_nw_lag(std::size_t transitions) {
    return static_cast<int>(
        std::floor(4.0 * std::pow(static_cast<double>(transitions) / 100.0, 2.0 / 9.0)));
}

namespace {

// Per-series arrays reused across objective evaluations.
struct Workspace {
    std::vector<double> l1, l2;    // log prices at t (transitions entries)
    std::vector<double> dl1, dl2;  // log increments
    std::vector<double> ty;        // instrument t in years
    double dt = 0.0;
    std::size_t n = 0;

    Workspace(const PriceSeries& s, double dt_in) {
        if (s.size() < 2) throw ValidationError("gmm: series needs at least 2 observations");
        if (!(dt_in > 0.0)) throw ValidationError("gmm: dt must be positive");
        n = s.size() - 1;
        dt = dt_in;
        l1.resize(n);
        l2.resize(n);
        dl1.resize(n);
        dl2.resize(n);
        ty.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            if (!(s.s1[t] > 0.0) || !(s.s2[t] > 0.0) || !(s.s1[t + 1] > 0.0) ||
                !(s.s2[t + 1] > 0.0))
                throw ValidationError("gmm: nonpositive price in series");
            l1[t] = std::log(s.s1[t]);
            l2[t] = std::log(s.s2[t]);
            dl1[t] = std::log(s.s1[t + 1]) - l1[t];
            dl2[t] = std::log(s.s2[t + 1]) - l2[t];
            ty[t] = static_cast<double>(t) * dt;
        }
    }

    void record(std::size_t t, const ParameterVector& p, std::array<double, 20>& f) const {
        const double e2t1 = std::exp(2.0 * p.theta1 * l1[t]);
        const double e2t2 = std::exp(2.0 * p.theta2 * l2[t]);
        const double z = p.a + p.b * ty[t] + l1[t] + p.beta * l2[t];
        const double eps1 =
            dl1[t] - (p.mu1 - 0.5 * p.sigma1 * p.sigma1 * e2t1 + p.delta1 * z) * dt;
        const double eps2 =
            dl2[t] - (p.mu2 - 0.5 * p.sigma2 * p.sigma2 * e2t2 + p.delta2 * z) * dt;

        const double base[5] = {
            eps1,
            eps2,
            eps1 * eps1 - p.sigma1 * p.sigma1 * e2t1 * dt,
            eps2 * eps2 - p.sigma2 * p.sigma2 * e2t2 * dt,
            eps1 * eps2 - p.rho * p.sigma1 * p.sigma2 * std::sqrt(e2t1 * e2t2) * dt,
        };
        const double instr[4] = {1.0, ty[t], l1[t], l2[t]};
        for (int b = 0; b < 5; ++b)
            for (int q = 0; q < 4; ++q) f[static_cast<std::size_t>(4 * b + q)] = base[b] * instr[q];
    }

    Eigen::VectorXd mean_moments(const ParameterVector& p) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(20);
        std::array<double, 20> f{};
        for (std::size_t t = 0; t < n; ++t) {
            record(t, p, f);
            for (int c = 0; c < 20; ++c) g[c] += f[static_cast<std::size_t>(c)];
        }
        g /= static_cast<double>(n);
        return g;
    }
};

void check_selection(const std::vector<int>& sel) {
    if (sel.empty()) throw ValidationError("gmm: empty moment selection");
    for (int idx : sel)
        if (idx < 1 || idx > 20)
            throw ValidationError("gmm: moment selection index out of range 1..20");
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> residuals(const PriceSeries& series,
                                                              const ParameterVector& lambda,
                                                              double dt) {
    const Workspace ws(series, dt);
    std::vector<double> r1(ws.n), r2(ws.n);
    std::array<double, 20> f{};
    for (std::size_t t = 0; t < ws.n; ++t) {
        ws.record(t, lambda, f);
        r1[t] = f[0];
        r2[t] = f[4];
    }
    return {std::move(r1), std::move(r2)};
}

std::vector<std::array<double, 20>> moment_vector(const PriceSeries& series,
                                                  const ParameterVector& lambda, double dt) {
    const Workspace ws(series, dt);
    std::vector<std::array<double, 20>> out(ws.n);
    for (std::size_t t = 0; t < ws.n; ++t) ws.record(t, lambda, out[t]);
    return out;
}

Eigen::VectorXd sample_moments(const PriceSeries& series, const ParameterVector& lambda,
                               double dt) {
    return Workspace(series, dt).mean_moments(lambda);
}

double objective(const PriceSeries& series, const ParameterVector& lambda,
                 const Eigen::MatrixXd& weight, const std::vector<int>& selection, double dt) {
    check_selection(selection);
    const Eigen::VectorXd g = sample_moments(series, lambda, dt);
    Eigen::VectorXd gs(static_cast<int>(selection.size()));
    for (std::size_t s = 0; s < selection.size(); ++s)
        gs[static_cast<int>(s)] = g[selection[s] - 1];
    if (weight.size() == 0) return gs.squaredNorm();
    if (weight.rows() != gs.size() || weight.cols() != gs.size())
        throw ValidationError("gmm objective: weight dimension does not match selection");
    return gs.dot(weight * gs);
}

Eigen::MatrixXd newey_west(const PriceSeries& series, const ParameterVector& lambda, int lag,
                           double dt, NwWeights weights) {
    const Workspace ws(series, dt);
    if (lag < 0) throw ValidationError("newey_west: lag must be nonnegative");
    if (static_cast<std::size_t>(lag) >= ws.n)
        throw ValidationError("newey_west: lag must be smaller than the sample length");
    if (weights == NwWeights::Narrow && lag == 1)
        throw ValidationError("newey_west: lag 1 is undefined under 1 - j/(k-1) weights");

    std::vector<std::array<double, 20>> f(ws.n);
    for (std::size_t t = 0; t < ws.n; ++t) ws.record(t, lambda, f[t]);

    auto outer_sum = [&f, &ws](int j) {
        Eigen::MatrixXd s = Eigen::MatrixXd::Zero(20, 20);
        for (std::size_t t = static_cast<std::size_t>(j); t < ws.n; ++t) {
            const auto& ft = f[t];
            const auto& fl = f[t - static_cast<std::size_t>(j)];
            for (int r = 0; r < 20; ++r)
                for (int c = 0; c < 20; ++c)
                    s(r, c) += ft[static_cast<std::size_t>(r)] * fl[static_cast<std::size_t>(c)];
        }
        return Eigen::MatrixXd(s / static_cast<double>(ws.n));
    };

    Eigen::MatrixXd st = outer_sum(0);
    for (int j = 1; j <= lag; ++j) {
        const double w = weights == NwWeights::Narrow
                             ? 1.0 - static_cast<double>(j) / (static_cast<double>(lag) - 1.0)
                             : 1.0 - static_cast<double>(j) / (static_cast<double>(lag) + 1.0);
        const Eigen::MatrixXd sj = outer_sum(j);
        st += w * (sj + sj.transpose());
    }
    return st;
}

namespace {

// Deterministic co-integration prefit: regressing each asset's log-return
// rate on (1, t, l1 + beta l2) places delta, b and mu near the basin of the
// moment-system root, away from the flat delta = 0 plateau.
ParameterVector ols_prefit(const Workspace& ws, ParameterVector base) {
    Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
    Eigen::Vector3d xty1 = Eigen::Vector3d::Zero();
    Eigen::Vector3d xty2 = Eigen::Vector3d::Zero();
    double e1bar = 0.0, e2bar = 0.0;
    for (std::size_t t = 0; t < ws.n; ++t) {
        const Eigen::Vector3d row(1.0, ws.ty[t], ws.l1[t] + base.beta * ws.l2[t]);
        xtx += row * row.transpose();
        xty1 += row * (ws.dl1[t] / ws.dt);
        xty2 += row * (ws.dl2[t] / ws.dt);
        e1bar += std::exp(2.0 * base.theta1 * ws.l1[t]);
        e2bar += std::exp(2.0 * base.theta2 * ws.l2[t]);
    }
    e1bar /= static_cast<double>(ws.n);
    e2bar /= static_cast<double>(ws.n);

    const Eigen::FullPivLU<Eigen::Matrix3d> lu(xtx);
    if (!lu.isInvertible()) return base;
    const Eigen::Vector3d c1 = lu.solve(xty1);
    const Eigen::Vector3d c2 = lu.solve(xty2);
    if (!c1.allFinite() || !c2.allFinite()) return base;

    ParameterVector p = base;
    p.delta1 = c1[2];
    p.delta2 = c2[2];
    const double lead = std::abs(p.delta1) >= std::abs(p.delta2) ? p.delta1 : p.delta2;
    const double trend = std::abs(p.delta1) >= std::abs(p.delta2) ? c1[1] : c2[1];
    if (std::abs(lead) > 1e-8) p.b = trend / lead;
    p.mu1 = c1[0] + 0.5 * p.sigma1 * p.sigma1 * e1bar - p.delta1 * p.a;
    p.mu2 = c2[0] + 0.5 * p.sigma2 * p.sigma2 * e2bar - p.delta2 * p.a;
    return p;
}

}  // namespace

ParameterVector default_initial_guess(const PriceSeries& series, double dt) {
    const Workspace ws(series, dt);
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    const double m1 = mean(ws.dl1), m2 = mean(ws.dl2);
    double v1 = 0.0, v2 = 0.0, cov = 0.0;
    for (std::size_t t = 0; t < ws.n; ++t) {
        v1 += (ws.dl1[t] - m1) * (ws.dl1[t] - m1);
        v2 += (ws.dl2[t] - m2) * (ws.dl2[t] - m2);
        cov += (ws.dl1[t] - m1) * (ws.dl2[t] - m2);
    }
    v1 /= static_cast<double>(ws.n);
    v2 /= static_cast<double>(ws.n);
    cov /= static_cast<double>(ws.n);

    // Regression slope of ln S1 on ln S2 fixes the co-integration weight sign.
    const double ml1 = mean(ws.l1), ml2 = mean(ws.l2);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t t = 0; t < ws.n; ++t) {
        sxy += (ws.l2[t] - ml2) * (ws.l1[t] - ml1);
        sxx += (ws.l2[t] - ml2) * (ws.l2[t] - ml2);
    }

    ParameterVector p;
    p.sigma1 = std::sqrt(std::max(v1 / dt, 1e-12));
    p.sigma2 = std::sqrt(std::max(v2 / dt, 1e-12));
    p.rho = (v1 > 0.0 && v2 > 0.0) ? std::clamp(cov / std::sqrt(v1 * v2), -0.99, 0.99) : 0.0;
    p.theta1 = -0.1;
    p.theta2 = -0.1;
    p.beta = sxx > 0.0 ? -(sxy / sxx) : -1.0;
    return p;
}

GmmResult estimate(const PriceSeries& series, double dt, const GmmSettings& settings,
                   std::optional<ParameterVector> initial_guess) {
    if (series.size() < 100)
        throw ValidationError("gmm estimate: need at least 100 observations");
    check_selection(settings.selection);

    GmmResult result;
    result.mode = settings.mode;

    std::vector<int> selection = settings.selection;
    if (settings.mode == GmmMode::JustIdentified) {
        if (selection.size() != 12)
            throw ValidationError("gmm estimate: just-identified mode needs exactly 12 moments");
        bool has_cross = false;
        for (int idx : selection) has_cross = has_cross || idx >= 17;
        if (!has_cross)
            result.warnings.push_back(
                "selection contains no cross moment (components 17-20); rho is not identified");
    } else {
        selection = MomentSpec::all().selection;
    }

    const ParameterVector guess =
        initial_guess ? *initial_guess : default_initial_guess(series, dt);
    const Workspace ws(series, dt);
    const ParameterVector prefit = ols_prefit(ws, guess);

    // The (sigma, theta) split is weakly identified: sigma e^{theta L} is
    // pinned by the data while theta moves along a long curved valley. The
    // deterministic multistart walks that valley: each start fixes a theta
    // pair and matches the observed effective volatility, with the loadings
    // taken from the co-integration prefit.
    std::vector<std::array<double, 12>> starts{to_unconstrained(guess)};
    if (prefit.to_array() != guess.to_array()) starts.push_back(to_unconstrained(prefit));
    if (settings.restarts > 1) {
        double lbar1 = 0.0, lbar2 = 0.0;
        for (std::size_t t = 0; t < ws.n; ++t) {
            lbar1 += ws.l1[t];
            lbar2 += ws.l2[t];
        }
        lbar1 /= static_cast<double>(ws.n);
        lbar2 /= static_cast<double>(ws.n);
        const double eff1 = guess.sigma1 * std::exp(guess.theta1 * lbar1);
        const double eff2 = guess.sigma2 * std::exp(guess.theta2 * lbar2);
        for (double th1 : {-0.02, -0.12, -0.25, -0.4})
            for (double th2 : {-0.02, -0.12, -0.25, -0.4}) {
                ParameterVector v = prefit;
                v.theta1 = th1;
                v.theta2 = th2;
                // sigma^2 e^{2 theta Lbar} is invariant along these starts,
                // so the prefit drifts stay consistent.
                v.sigma1 = eff1 / std::exp(th1 * lbar1);
                v.sigma2 = eff2 / std::exp(th2 * lbar2);
                starts.push_back(to_unconstrained(v));
            }
    }

    using Resid = std::function<Eigen::VectorXd(const std::array<double, 12>&)>;

    struct StageResult {
        std::array<double, 12> u{};
        double fx = 0.0;
        int evals = 0;
        bool converged = false;
    };

    // Damped Gauss-Newton on the weighted moment residuals with a central
    // finite-difference Jacobian.
    auto lm_minimize = [](const Resid& resid, std::array<double, 12> u, int max_iter) {
        StageResult out;
        Eigen::VectorXd r = resid(u);
        double damping = 1e-3;
        int evals = 1;
        const int m = static_cast<int>(r.size());
        Eigen::MatrixXd jac(m, 12);
        for (int it = 0; it < max_iter; ++it) {
            for (int d = 0; d < 12; ++d) {
                auto up = u, um = u;
                const double h = 1e-6 * (1.0 + std::abs(u[static_cast<std::size_t>(d)]));
                up[static_cast<std::size_t>(d)] += h;
                um[static_cast<std::size_t>(d)] -= h;
                jac.col(d) = (resid(up) - resid(um)) / (2.0 * h);
                evals += 2;
            }
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd jtr = jac.transpose() * r;
            const double before = r.squaredNorm();
            bool moved = false;
            for (int tries = 0; tries < 14; ++tries) {
                Eigen::MatrixXd a = jtj + damping * Eigen::MatrixXd(jtj.diagonal().asDiagonal());
                a += 1e-14 * Eigen::MatrixXd::Identity(12, 12);
                const Eigen::VectorXd step = a.ldlt().solve(jtr);
                auto trial = u;
                for (int d = 0; d < 12; ++d) trial[static_cast<std::size_t>(d)] -= step[d];
                const Eigen::VectorXd rt = resid(trial);
                ++evals;
                if (rt.squaredNorm() < before) {
                    u = trial;
                    r = rt;
                    damping = std::max(damping / 3.0, 1e-12);
                    moved = true;
                    break;
                }
                damping *= 4.0;
            }
            if (!moved || r.norm() < 1e-13 || before - r.squaredNorm() < 1e-10 * before) {
                out.converged = true;
                break;
            }
        }
        out.u = u;
        out.fx = r.squaredNorm();
        out.evals = evals;
        return out;
    };

    // chol_w has chol_w^T chol_w = W so that ||chol_w g||^2 = g' W g; an empty
    // matrix means identity weight.
    auto run_stage = [&](const std::vector<int>& sel, const Eigen::MatrixXd& chol_w,
                         const std::vector<std::array<double, 12>>& stage_starts) {
        Resid resid = [&ws, &sel, &chol_w](const std::array<double, 12>& u) {
            const Eigen::VectorXd g = ws.mean_moments(to_constrained(u));
            Eigen::VectorXd gs(static_cast<int>(sel.size()));
            for (std::size_t s = 0; s < sel.size(); ++s)
                gs[static_cast<int>(s)] = g[sel[s] - 1];
            return chol_w.size() == 0 ? gs : Eigen::VectorXd(chol_w * gs);
        };

        StageResult best;
        best.fx = std::numeric_limits<double>::infinity();
        int total_evals = 0;
        for (const auto& start : stage_starts) {
            const StageResult run = lm_minimize(resid, start, 150);
            total_evals += run.evals;
            if (run.fx < best.fx) best = run;
        }

        // Simplex polish of the incumbent within the evaluation budget.
        auto fu = [&resid](const std::vector<double>& uv) {
            std::array<double, 12> ua;
            std::copy_n(uv.begin(), 12, ua.begin());
            return resid(ua).squaredNorm();
        };
        NelderMeadOptions nm;
        nm.max_evals = std::min(settings.max_evals, 8000);
        nm.spread_tol = settings.spread_tol;
        const NelderMeadResult polish =
            nelder_mead(fu, std::vector<double>(best.u.begin(), best.u.end()), nm);
        total_evals += polish.evals;
        if (polish.fx < best.fx) {
            std::copy_n(polish.x.begin(), 12, best.u.begin());
            best.fx = polish.fx;
            best.converged = best.converged || polish.converged;
        }
        best.evals = total_evals;
        return best;
    };

    // Per-moment standardization at the initial guess: the raw moments differ
    // in scale by orders of magnitude (means vs variance conditions), which
    // makes the plain identity form numerically blind to the conditions that
    // pin sigma and theta. In just-identified mode any positive-definite
    // reweighting keeps the same roots; the reported J keeps the
    // identity-weight definition.
    auto standardizing_chol = [&](const std::vector<int>& sel) {
        const std::vector<std::array<double, 20>> recs = moment_vector(series, guess, dt);
        const Eigen::VectorXd g0 = ws.mean_moments(guess);
        Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(static_cast<int>(sel.size()),
                                                     static_cast<int>(sel.size()));
        for (std::size_t s = 0; s < sel.size(); ++s) {
            const int c = sel[s] - 1;
            double var = 0.0;
            for (const auto& rec : recs)
                var += rec[static_cast<std::size_t>(c)] * rec[static_cast<std::size_t>(c)];
            var = var / static_cast<double>(recs.size()) - g0[c] * g0[c];
            chol(static_cast<int>(s), static_cast<int>(s)) = 1.0 / std::sqrt(std::max(var, 1e-16));
        }
        return chol;
    };

    if (settings.mode == GmmMode::JustIdentified) {
        const StageResult run = run_stage(selection, standardizing_chol(selection), starts);
        result.lambda = to_constrained(run.u);
        result.j_value = objective(series, result.lambda, Eigen::MatrixXd(), selection, dt);
        result.iterations = run.evals;
        result.converged = run.converged;
        result.weight =
            Eigen::MatrixXd::Identity(static_cast<int>(selection.size()),
                                      static_cast<int>(selection.size()));
        if (!run.converged)
            result.warnings.push_back("optimizer hit the evaluation budget before converging");
        return result;
    }

    // Two-step efficient mode: a standardized first pass over all 20 moments
    // seeds the Newey-West weight, which defines the efficient second pass.
    const StageResult stage1 = run_stage(selection, standardizing_chol(selection), starts);
    const ParameterVector lambda1 = to_constrained(stage1.u);

    const int lag = settings.nw_lag >= 0 ? settings.nw_lag : default_nw_lag(ws.n);
    Eigen::MatrixXd st = newey_west(series, lambda1, lag, dt, settings.nw_weights);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (st + st.transpose()));
    const double max_eig = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig <= 1e-12 * max_eig) {
        st += (1e-10 * max_eig - std::min(min_eig, 0.0)) * Eigen::MatrixXd::Identity(20, 20);
        result.weight_regularized = true;
        result.warnings.push_back("near-singular spectral density matrix, ridge added");
    }
    Eigen::MatrixXd w = st.ldlt().solve(Eigen::MatrixXd::Identity(20, 20));
    const Eigen::MatrixXd wt = w.transpose();
    w = 0.5 * (w + wt);

    // g' W g = ||L^T g||^2 with W = L L^T.
    Eigen::LLT<Eigen::MatrixXd> llt(w + 1e-14 * w.diagonal().maxCoeff() *
                                            Eigen::MatrixXd::Identity(20, 20));
    const Eigen::MatrixXd chol_w = Eigen::MatrixXd(llt.matrixL()).transpose();

    const StageResult stage2 = run_stage(selection, chol_w, {stage1.u});
    result.lambda = to_constrained(stage2.u);
    result.j_value = objective(series, result.lambda, w, selection, dt);
    result.iterations = stage1.evals + stage2.evals;
    result.converged = stage2.converged;
    result.nw_lag = lag;
    result.weight = w;
    if (!stage2.converged)
        result.warnings.push_back("optimizer hit the evaluation budget before converging");
    return result;
}

std::string to_string(GmmMode mode) {
    return mode == GmmMode::JustIdentified ? "just" : "two-step";
}

GmmMode gmm_mode_from_string(const std::string& s) {
    if (s == "just") return GmmMode::JustIdentified;
    if (s == "two-step") return GmmMode::TwoStepEfficient;
    throw ValidationError("unknown gmm mode \"" + s + "\" (expected just or two-step)");
}

}  // namespace pairs
