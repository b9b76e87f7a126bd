#include "pairs/pde.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "pairs/closed_form.hpp"
#include "pairs/errors.hpp"

#include "json.hpp"

namespace pairs {

std::vector<double> Grid::ascending_times() const {
    std::vector<double> t(static_cast<std::size_t>(nt) + 1);
    for (int j = 0; j <= nt; ++j) t[static_cast<std::size_t>(j)] = (j == nt) ? T : dt * j;
    return t;
}

Grid build_grid(const GridSpec& spec, double T) {
    if (!(spec.xmax > spec.xmin) || !(spec.ymax > spec.ymin))
        throw ValidationError("build_grid: degenerate spatial domain");
    if (spec.nx < 4 || spec.ny < 4)
        throw ValidationError(
            "build_grid: need at least 4 nodes per axis for the stencil and boundary rows");
    if (spec.nt < 0) throw ValidationError("build_grid: negative time-step count");
    if (!(T > 0.0)) throw ValidationError("build_grid: horizon must be positive");

    Grid g;
    g.xmin = spec.xmin;
    g.xmax = spec.xmax;
    g.ymin = spec.ymin;
    g.ymax = spec.ymax;
    g.nx = spec.nx;
    g.ny = spec.ny;
    g.nt = spec.nt;
    g.dx = (spec.xmax - spec.xmin) / (spec.nx - 1);
    g.dy = (spec.ymax - spec.ymin) / (spec.ny - 1);
    // nt = 0 is the degenerate "initial condition only" grid
    g.dt = spec.nt > 0 ? T / spec.nt : T;
    g.T = T;
    return g;
}

Eigen::SparseMatrix<double> assemble_implicit_system(int level, const Grid& g,
                                                     const ModelParams& p,
                                                     const AssemblyOptions& opts) {
    const double t_phys = g.time_at_level(level);
    const double gam = p.gamma;
    const double gm1 = gam - 1.0;
    const double orr = 1.0 - p.rho * p.rho;
    const double quad_scale = gam / (2.0 * gm1 * gm1 * orr);
    const double growth_r = p.r * gam / (1.0 - gam);
    const double dt = g.dt;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.nodes() * 9);

    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const int row = g.node(i, j);
            if (g.constrained(i, j)) {
                // Reflection equations phi_row = phi_neighbor kept explicitly in
                // the system: rows 0 and 1 chain up to row 2 on the low sides,
                // the outermost high-side row copies its inner neighbor.
                int ni = i, nj = j;
                if (i == 0)
                    ni = 1;
                else if (i == 1)
                    ni = 2;
                else if (i == g.nx - 1)
                    ni = g.nx - 2;
                else if (j == 0)
                    nj = 1;
                else if (j == 1)
                    nj = 2;
                else
                    nj = g.ny - 2;
                trip.emplace_back(row, row, 1.0);
                trip.emplace_back(row, g.node(ni, nj), -1.0);
                continue;
            }

            const double xi = g.x(i);
            const double yj = g.y(j);
            const double z = p.z_value(t_phys, xi, yj);
            const double s1 = p.sigma1_at(xi);
            const double s2 = p.sigma2_at(yj);
            const double s1sq = s1 * s1;
            const double s2sq = s2 * s2;
            const double e1 = p.mu1 - p.r + p.delta1 * z;
            const double e2 = p.mu2 - p.r + p.delta2 * z;

            double diag = 1.0;
            if (opts.include_zero_order) {
                const double quad =
                    quad_scale *
                    (e1 * e1 / s1sq + e2 * e2 / s2sq - 2.0 * p.rho * e1 * e2 / (s1 * s2));
                diag -= dt * (quad + growth_r);
            }

            // Upwinded first derivatives on the combined drift coefficient.
            const double ax = (p.mu1 + p.delta1 * z - p.r * gam) / gm1 + 0.5 * s1sq;
            const double ay = (p.mu2 + p.delta2 * z - p.r * gam) / gm1 + 0.5 * s2sq;
            const double axp = std::max(ax, 0.0), axm = std::max(-ax, 0.0);
            const double ayp = std::max(ay, 0.0), aym = std::max(-ay, 0.0);

            const double dxc = 0.5 * s1sq / (g.dx * g.dx);
            const double dyc = 0.5 * s2sq / (g.dy * g.dy);
            const double cross = p.rho * s1 * s2;
            const double cw = std::abs(cross) * dt / (2.0 * g.dx * g.dy);

            diag += dt * ((axp + axm) / g.dx + (ayp + aym) / g.dy + 2.0 * (dxc + dyc)) -
                    2.0 * cw;

            trip.emplace_back(row, row, diag);
            trip.emplace_back(row, g.node(i - 1, j), dt * (-axp / g.dx - dxc) + cw);
            trip.emplace_back(row, g.node(i + 1, j), dt * (-axm / g.dx - dxc) + cw);
            trip.emplace_back(row, g.node(i, j - 1), dt * (-ayp / g.dy - dyc) + cw);
            trip.emplace_back(row, g.node(i, j + 1), dt * (-aym / g.dy - dyc) + cw);
            if (cross != 0.0) {
                if (p.rho >= 0.0) {
                    trip.emplace_back(row, g.node(i + 1, j + 1), -cw);
                    trip.emplace_back(row, g.node(i - 1, j - 1), -cw);
                } else {
                    trip.emplace_back(row, g.node(i + 1, j - 1), -cw);
                    trip.emplace_back(row, g.node(i - 1, j + 1), -cw);
                }
            }
        }
    }

    Eigen::SparseMatrix<double> M(static_cast<int>(g.nodes()), static_cast<int>(g.nodes()));
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

Eigen::VectorXd implicit_rhs(const Grid& g, const std::vector<double>& phi_prev) {
    if (phi_prev.size() != g.nodes())
        throw ValidationError("implicit_rhs: field size does not match the grid");
    Eigen::VectorXd rhs(static_cast<int>(g.nodes()));
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            rhs[g.node(i, j)] =
                g.constrained(i, j) ? 0.0 : phi_prev[static_cast<std::size_t>(g.node(i, j))];
    return rhs;
}

Eigen::VectorXd step(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& rhs,
                     const Eigen::VectorXd& guess) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(1e-10);
    solver.setMaxIterations(10 * M.rows());
    solver.compute(M);
    if (solver.info() != Eigen::Success)
        throw NumericalError("implicit step: preconditioner/decomposition failed (singular system?)");
    Eigen::VectorXd sol = solver.solveWithGuess(rhs, guess);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "implicit step: linear solver did not converge (residual " << solver.error()
            << " after " << solver.iterations() << " iterations)";
        throw NumericalError(msg.str());
    }
    return sol;
}

std::vector<double> step(int next_level, const Grid& g, const ModelParams& p,
                         const std::vector<double>& phi_prev) {
    const Eigen::SparseMatrix<double> M = assemble_implicit_system(next_level, g, p);
    const Eigen::VectorXd rhs = implicit_rhs(g, phi_prev);
    Eigen::VectorXd guess(static_cast<int>(g.nodes()));
    for (std::size_t n = 0; n < g.nodes(); ++n) guess[static_cast<int>(n)] = phi_prev[n];
    const Eigen::VectorXd next = step(M, rhs, guess);
    return std::vector<double>(next.data(), next.data() + next.size());
}

PdeSolution solve(const ModelParams& p, const Grid& g) {
    require_valid(p);
    if (p.utility != Utility::Power)
        throw ValidationError("pde solve: only power utility is supported");

    PdeSolution sol;
    sol.grid = g;
    const std::size_t per_level = g.nodes();
    sol.phi.resize(per_level * (static_cast<std::size_t>(g.nt) + 1));
    sol.z_field.resize(sol.phi.size());

    const double phi0 = std::pow(1.0 - p.gamma, 1.0 / (1.0 - p.gamma));
    std::vector<double> current(per_level, phi0);
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                sol.z_field[g.field_index(k, i, j)] = p.z_value(g.time_at_level(k), g.x(i), g.y(j));

    std::copy(current.begin(), current.end(), sol.phi.begin());
    for (int k = 1; k <= g.nt; ++k) {
        try {
            current = step(k, g, p, current);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << e.what() << " at time level " << k;
            throw NumericalError(msg.str());
        }
        std::copy(current.begin(), current.end(), sol.phi.begin() + per_level * k);
    }
    return sol;
}

StrategySurface extract_controls(const PdeSolution& sol, const ModelParams& p) {
    const Grid& g = sol.grid;
    StrategySurface surf;
    surf.grid = g;
    surf.pi1.resize(sol.phi.size());
    surf.pi2.resize(sol.phi.size());

    const double omg = 1.0 - p.gamma;
    const double orr = 1.0 - p.rho * p.rho;

    for (int k = 0; k <= g.nt; ++k) {
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny; ++j) {
                const std::size_t idx = g.field_index(k, i, j);
                const double phi = sol.phi[idx];
                if (!(phi > 0.0)) {
                    std::ostringstream msg;
                    msg << "extract_controls: nonpositive phi at level " << k << ", node (" << i
                        << "," << j << ")";
                    throw NumericalError(msg.str());
                }
                // Centered differences inside, one-sided on the boundary.
                double phi_x, phi_y;
                if (i == 0)
                    phi_x = (sol.phi_at(k, 1, j) - sol.phi_at(k, 0, j)) / g.dx;
                else if (i == g.nx - 1)
                    phi_x = (sol.phi_at(k, i, j) - sol.phi_at(k, i - 1, j)) / g.dx;
                else
                    phi_x = (sol.phi_at(k, i + 1, j) - sol.phi_at(k, i - 1, j)) / (2.0 * g.dx);
                if (j == 0)
                    phi_y = (sol.phi_at(k, i, 1) - sol.phi_at(k, i, 0)) / g.dy;
                else if (j == g.ny - 1)
                    phi_y = (sol.phi_at(k, i, j) - sol.phi_at(k, i, j - 1)) / g.dy;
                else
                    phi_y = (sol.phi_at(k, i, j + 1) - sol.phi_at(k, i, j - 1)) / (2.0 * g.dy);

                const double z = sol.z_field[idx];
                const double s1 = p.sigma1_at(g.x(i));
                const double s2 = p.sigma2_at(g.y(j));
                const double e1 = p.mu1 - p.r + p.delta1 * z;
                const double e2 = p.mu2 - p.r + p.delta2 * z;
                surf.pi1[idx] = e1 / (s1 * s1 * omg * orr) - p.rho * e2 / (s1 * s2 * omg * orr) +
                                phi_x / phi;
                surf.pi2[idx] = e2 / (s2 * s2 * omg * orr) - p.rho * e1 / (s1 * s2 * omg * orr) +
                                phi_y / phi;
            }
        }
    }
    return surf;
}

LinfError linf_error(const PdeSolution& sol, const std::vector<double>& reference) {
    if (reference.size() != sol.phi.size())
        throw ValidationError("linf_error: reference field shape mismatch");
    const Grid& g = sol.grid;
    LinfError best;
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const std::size_t idx = g.field_index(k, i, j);
                const double err = std::abs(sol.phi[idx] - reference[idx]);
                if (err > best.value) {
                    best.value = err;
                    best.k = k;
                    best.i = i;
                    best.j = j;
                }
            }
    best.on_edge = g.on_spatial_boundary(best.i, best.j);
    return best;
}

std::vector<double> closed_form_phi_field(const ModelParams& p, const Grid& g) {
    const DerivedQuantities dq = derive_quantities(p);
    const OdeCoefficients coeffs = power_coefficients(p, dq, g.ascending_times());

    std::vector<double> field(g.nodes() * (static_cast<std::size_t>(g.nt) + 1));
    for (int k = 0; k <= g.nt; ++k) {
        // tau level k is physical time index nt - k on the ascending grid.
        const std::size_t ti = static_cast<std::size_t>(g.nt - k);
        const double f2 = coeffs.f2[ti];
        const double f1 = coeffs.f1[ti];
        const double f0 = coeffs.f0[ti];
        const double t_phys = g.time_at_level(k);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double z = p.z_value(t_phys, g.x(i), g.y(j));
                field[g.field_index(k, i, j)] = std::exp(f2 * z * z + f1 * z + f0);
            }
    }
    return field;
}

void write_surface_csv(const std::string& csv_path, const std::string& meta_path,
                       const PdeSolution& sol, const StrategySurface& surface) {
    const Grid& g = sol.grid;
    if (surface.pi1.size() != sol.phi.size())
        throw ValidationError("write_surface_csv: surface/solution shape mismatch");

    std::ofstream out(csv_path);
    if (!out) throw ValidationError("cannot open " + csv_path + " for writing");
    out << "k,i,j,x,y,z,phi,pi1,pi2\n";
    char buf[256];
    for (int k = 0; k <= g.nt; ++k)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const std::size_t idx = g.field_index(k, i, j);
                std::snprintf(buf, sizeof buf,
                              "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, i, j, g.x(i),
                              g.y(j), sol.z_field[idx], sol.phi[idx], surface.pi1[idx],
                              surface.pi2[idx]);
                out << buf;
            }
    if (!out) throw ValidationError("write failed for " + csv_path);

    nlohmann::json meta;
    meta["xmin"] = g.xmin;
    meta["xmax"] = g.xmax;
    meta["ymin"] = g.ymin;
    meta["ymax"] = g.ymax;
    meta["I"] = g.nx;
    meta["J"] = g.ny;
    meta["K"] = g.nt;
    meta["dx"] = g.dx;
    meta["dy"] = g.dy;
    meta["dt"] = g.dt;
    meta["T"] = g.T;
    meta["boundary_nodes_low_confidence"] = true;
    std::ofstream mout(meta_path);
    if (!mout) throw ValidationError("cannot open " + meta_path + " for writing");
    mout << meta.dump(2) << "\n";
}

SurfaceTable read_surface_csv(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ValidationError("cannot open surface CSV " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty surface CSV " + csv_path);

    SurfaceTable t;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int k, i, j;
        double x, y, z, phi, pi1, pi2;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lg,%lg,%lg,%lg,%lg,%lg", &k, &i, &j, &x, &y, &z,
                        &phi, &pi1, &pi2) != 9) {
            std::ostringstream msg;
            msg << "surface CSV line " << line_no << ": malformed row";
            throw ValidationError(msg.str());
        }
        t.k.push_back(k);
        t.i.push_back(i);
        t.j.push_back(j);
        t.x.push_back(x);
        t.y.push_back(y);
        t.z.push_back(z);
        t.phi.push_back(phi);
        t.pi1.push_back(pi1);
        t.pi2.push_back(pi2);
    }
    return t;
}

}  // namespace pairs
