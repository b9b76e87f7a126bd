// pde.hpp
// Fully implicit monotone finite-difference solver for the linear degenerate
// parabolic equation satisfied by phi(tau, x, y) on a rectangular log-price
// grid, with Neumann boundaries, marching in tau = T - t from the constant
// initial state phi = (1-gamma)^{1/(1-gamma)}. First derivatives are upwinded
// on the sign of the combined drift coefficient; the correlation cross term
// sits on a 7-point stencil whose diagonal flips with the sign of rho.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "pairs/model.hpp"

namespace pairs {

struct GridSpec {
    double xmin = 1.0, xmax = 5.0;
    double ymin = 1.0, ymax = 5.0;
    int nx = 41;  // nodes along x (I)
    int ny = 41;  // nodes along y (J)
    int nt = 251; // time steps (K)
};

struct Grid {
    double xmin, xmax, ymin, ymax;
    int nx, ny, nt;
    double dx, dy, dt;
    double T;

    double x(int i) const { return xmin + dx * i; }
    double y(int j) const { return ymin + dy * j; }
    // tau level k corresponds to physical time T - k dt.
    double time_at_level(int k) const { return T - dt * k; }
    int node(int i, int j) const { return i * ny + j; }
    std::size_t nodes() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t field_index(int k, int i, int j) const {
        return (static_cast<std::size_t>(k) * nx + i) * ny + j;
    }
    bool on_spatial_boundary(int i, int j) const {
        return i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
    }
    // Nodes carrying reflection equations instead of the scheme: the two
    // low-side rows/columns and the outermost high-side ones.
    bool constrained(int i, int j) const {
        return i <= 1 || i == nx - 1 || j <= 1 || j == ny - 1;
    }
    // Ascending physical times {0, dt, ..., T}; index j maps to level nt - j.
    std::vector<double> ascending_times() const;
};

Grid build_grid(const GridSpec& spec, double T);

struct PdeSolution {
    Grid grid;
    std::vector<double> phi;      // (nt+1) * nx * ny, tau-level major
    std::vector<double> z_field;  // z at each (k, i, j)

    double phi_at(int k, int i, int j) const { return phi[grid.field_index(k, i, j)]; }
    double z_at(int k, int i, int j) const { return z_field[grid.field_index(k, i, j)]; }
};

struct StrategySurface {
    Grid grid;
    std::vector<double> pi1;  // (nt+1) * nx * ny
    std::vector<double> pi2;

    double pi1_at(int k, int i, int j) const { return pi1[grid.field_index(k, i, j)]; }
    double pi2_at(int k, int i, int j) const { return pi2[grid.field_index(k, i, j)]; }
    // Values over the reflected boundary strip carry one-sided/flattened
    // gradients; treat as low confidence.
    bool low_confidence(int i, int j) const { return grid.constrained(i, j); }
};

struct AssemblyOptions {
    bool include_zero_order = true;  // disabled only by consistency tests
};

// System matrix for the implicit step onto tau level `level` (coefficients
// evaluated at physical time T - level*dt). Interior rows carry the upwind
// scheme; boundary rows carry the discrete Neumann equations.
Eigen::SparseMatrix<double> assemble_implicit_system(int level, const Grid& grid,
                                                     const ModelParams& params,
                                                     const AssemblyOptions& opts = {});

// Right-hand side for the same step: phi^k at interior rows, 0 at boundary rows.
Eigen::VectorXd implicit_rhs(const Grid& grid, const std::vector<double>& phi_prev);

// One implicit step: solves M phi_next = rhs by BiCGSTAB with an incomplete-LU
// preconditioner (relative tolerance 1e-10, at most 10*nx*ny iterations).
// Throws NumericalError on breakdown or non-convergence.
Eigen::VectorXd step(const Eigen::SparseMatrix<double>& M, const Eigen::VectorXd& rhs,
                     const Eigen::VectorXd& guess);

// Convenience single-step on plain fields.
std::vector<double> step(int next_level, const Grid& grid, const ModelParams& params,
                         const std::vector<double>& phi_prev);

// March all nt steps from the exact constant initial state.
PdeSolution solve(const ModelParams& params, const Grid& grid);

// Optimal fractions of wealth on every node of every level: closed first two
// components plus centered (one-sided at the boundary) phi-gradient terms.
// Requires phi > 0 everywhere.
StrategySurface extract_controls(const PdeSolution& sol, const ModelParams& params);

struct LinfError {
    double value = 0.0;
    int k = 0, i = 0, j = 0;
    bool on_edge = false;
};

// Max-norm distance to a reference field of identical shape, with argmax.
LinfError linf_error(const PdeSolution& sol, const std::vector<double>& reference);

// Constant-volatility phi built from the exact coefficients on the PDE time
// levels, for direct comparison with the finite-difference field.
std::vector<double> closed_form_phi_field(const ModelParams& params, const Grid& grid);

// Line-oriented CSV export (columns k,i,j,x,y,z,phi,pi1,pi2) plus a JSON
// sidecar with the grid geometry. Round-trips through read_surface_csv to
// 1e-15 relative.
void write_surface_csv(const std::string& csv_path, const std::string& meta_path,
                       const PdeSolution& sol, const StrategySurface& surface);

struct SurfaceTable {
    std::vector<int> k, i, j;
    std::vector<double> x, y, z, phi, pi1, pi2;
    std::size_t rows() const { return phi.size(); }
};

SurfaceTable read_surface_csv(const std::string& csv_path);

}  // namespace pairs
