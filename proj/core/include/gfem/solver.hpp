#ifndef GFEM_SOLVER_HPP
#define GFEM_SOLVER_HPP

#include <vector>

#include "gfem/assembly.hpp"

namespace gfem {

struct CgOptions {
    double rel_tol = 1e-12;
    int max_iter = 0; // 0 -> 20*sqrt(n) + 1000
    // When set, receives xi'A xi - 2 b'xi after every iteration.
    std::vector<double>* energy_log = nullptr;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double rel_residual = 0.0;      // recurrence residual at exit / ||b||
    double true_rel_residual = 0.0; // recomputed ||b - A x|| / ||b||
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients. Throws on a non-positive
/// diagonal (preconditioner error) and when p'Ap <= 0 exposes an indefinite
/// matrix; reports non-convergence through CgResult.
CgResult cg_solve(const SparseSpd& a, const std::vector<double>& b, const CgOptions& opt = {},
                  const std::vector<double>* x0 = nullptr);

struct PoissonOptions {
    int quad_order = 2;
    CgOptions cg;
    // Optional warm start (typically the prolongated coarse solution).
    const FeFunction* initial_guess = nullptr;
};

struct PoissonResult {
    FeFunction u; // boundary values exactly 0
    int cg_iterations = 0;
    double cg_rel_residual = 0.0;
    double cg_true_rel_residual = 0.0;
    double load_norm = 0.0;             // ||b||_2 over interior dofs
    double galerkin_residual_max = 0.0; // max_i |(grad u_h, grad phi_i) - (f, phi_i)|
};

/// Assemble, solve and expand; verifies the Galerkin residual bound
/// 10 * rel_tol * ||b|| per interior basis function.
PoissonResult solve_poisson(MeshPtr mesh, const expr::Expr& f, const PoissonOptions& opt = {});

} // namespace gfem

#endif
