#ifndef GFEM_REFINE_HPP
#define GFEM_REFINE_HPP

#include <vector>

#include "gfem/mesh.hpp"

namespace gfem {

enum class SingularEnd { none, a, b };

/// New node on edge AB: the midpoint when neither endpoint is a singular
/// vertex, otherwise the point at distance kappa*|AB| from the singular
/// endpoint. kappa must lie in (0, 1/2].
Point place_edge_node(Point a, Point b, SingularEnd singular_at, double kappa);

/// One graded refinement sweep: every triangle is decomposed into four by
/// connecting the per-edge new nodes. Conformity is preserved because each
/// undirected edge gets exactly one new node; new node ids follow the sorted
/// edge-key order, so identical inputs give bitwise-identical meshes.
MeshPtr refine(MeshPtr mesh, const GradingSpec& grading);

/// Mesh layers around one singular vertex: layer[t] = -1 for triangles not
/// descended from an initial triangle attached to the corner, otherwise the
/// layer index in {0, ..., n}; the triangle containing the corner has layer n.
struct LayerMap {
    int corner = -1; // polygon vertex id
    int level = 0;
    std::vector<int> layer; // per triangle
};

LayerMap compute_layers(const TriMesh& mesh, int corner_vertex);

/// h = 2^(-n)
double mesh_size_param(int n);

} // namespace gfem

#endif
