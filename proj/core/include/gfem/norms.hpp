#ifndef GFEM_NORMS_HPP
#define GFEM_NORMS_HPP

#include <span>
#include <vector>

#include "gfem/assembly.hpp"

namespace gfem {

/// Exact representation of a coarse P1 function on a nested finer mesh.
/// fine_mesh must descend from coarse.mesh through refine() calls.
FeFunction prolongate(const FeFunction& coarse, MeshPtr fine_mesh);

/// |v|_H1: exact, from the constant per-element gradients.
double h1_seminorm(const FeFunction& v);

/// ||v||_L2: exact, via the P1 element mass matrix (area/12 * [[2,1,1],...]).
double l2_norm(const FeFunction& v);

struct ErrorPair {
    double h1 = 0.0; // H1 seminorm
    double l2 = 0.0;
};

/// Norms of (u_fine - prolongate(u_coarse)), computed exactly on the fine
/// mesh.
ErrorPair error_between_levels(const FeFunction& u_fine, const FeFunction& u_coarse);

/// Element-wise quadrature of |u - u_h|^2 and |grad u - grad u_h|^2 against
/// a user-supplied exact solution and its gradient.
ErrorPair error_vs_exact(const FeFunction& u_h, const expr::Expr& u, const expr::Expr& du_dx,
                         const expr::Expr& du_dy, int quad_order = 3);

/// Rate indicator: R_j = log2(e_j / e_{j+1}); output has size(errors) - 1.
std::vector<double> convergence_rate(const std::vector<double>& errors);

/// Corner weight rho(x) = product of distances to the given corners.
double rho(Point x, std::span<const Point> corners);

/// Weighted K^1_a norm: quadrature of rho^(-2a) v^2 + rho^(2-2a) |grad v|^2.
double weighted_k1_norm(const FeFunction& v, double a, std::span<const Point> corners);

/// Attainable order theta' for a graded family: min(max(theta, beta0), 1)
/// when the grading came from (theta, a); otherwise, per singular vertex i,
/// min over i of beta0_i * log2(1/kappa_i), clamped to 1.
double expected_theta_prime(const PolygonDomain& polygon, const GradingSpec& grading);

/// Per-refinement-level errors and rates (the machine form of the
/// convergence tables): one row per level, NaN marking undefined cells.
struct StudyLevelRow {
    int level = 0;
    long nodes = 0;
    long triangles = 0;
    double h = 1.0;
    double h1_err, l2_err, h1_rate, l2_rate;                         // successive differences
    double h1_err_exact, l2_err_exact, h1_rate_exact, l2_rate_exact; // vs exact solution
    int cg_iterations = 0;
    double cg_rel_residual = 0.0;      // recurrence residual at exit
    double cg_true_rel_residual = 0.0; // recomputed ||b - A xi|| / ||b||
    double galerkin_residual_max = 0.0;
    double load_norm = 0.0;
    StudyLevelRow();
};

struct StudyReport {
    std::vector<StudyLevelRow> rows; // levels 0..J
    double expected_h1_rate = 1.0;   // theta'
    double expected_l2_rate = 2.0;   // min(2 theta', theta' + 1)
    bool has_exact = false;
};

} // namespace gfem

#endif
