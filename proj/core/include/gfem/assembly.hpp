#ifndef GFEM_ASSEMBLY_HPP
#define GFEM_ASSEMBLY_HPP

#include <array>
#include <vector>

#include "gfem/expr.hpp"
#include "gfem/mesh.hpp"

namespace gfem {

/// Symmetric positive-definite sparse matrix in CSR form, over interior
/// degrees of freedom. Column indices are sorted within each row.
struct SparseSpd {
    int n = 0;
    std::vector<int> row_ptr; // size n+1
    std::vector<int> col;
    std::vector<double> val;

    void multiply(const double* x, double* y) const; // y = A x
    std::vector<double> multiply(const std::vector<double>& x) const;
    double& coeff(int r, int c); // existing entry only
    double max_asymmetry() const;
};

/// Interior-node numbering (homogeneous Dirichlet by elimination).
struct InteriorMap {
    std::vector<int> node_to_dof; // -1 for boundary nodes
    std::vector<int> dof_to_node;
    int count() const { return static_cast<int>(dof_to_node.size()); }
};

InteriorMap interior_map(const TriMesh& mesh);

/// P1 element stiffness: K_ij = area * grad(phi_i) . grad(phi_j).
/// Rows sum to zero; rejects non-positive-area triangles.
std::array<std::array<double, 3>, 3> local_stiffness(Point p0, Point p1, Point p2);

/// Global stiffness over interior nodes. Accumulation runs in element order,
/// so repeated assembly is bitwise identical.
std::pair<SparseSpd, InteriorMap> assemble_stiffness(const TriMesh& mesh);

/// Load vector over all nodes (before Dirichlet elimination):
/// b_i = sum_T area_T * sum_q w_q f(x_q) phi_i(x_q).
std::vector<double> assemble_load_full(const TriMesh& mesh, const expr::Expr& f, int quad_order);

/// Load vector restricted to interior nodes.
std::vector<double> assemble_load(const TriMesh& mesh, const expr::Expr& f, int quad_order,
                                  const InteriorMap& interior);

/// P1 finite element function: one value per mesh node.
struct FeFunction {
    MeshPtr mesh;
    std::vector<double> values;
};

/// Spread an interior-dof vector to a full nodal vector (boundary = 0).
FeFunction expand_interior(MeshPtr mesh, const InteriorMap& interior,
                           const std::vector<double>& dof_values);

} // namespace gfem

#endif
