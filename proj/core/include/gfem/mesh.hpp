#ifndef GFEM_MESH_HPP
#define GFEM_MESH_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gfem/geometry.hpp"

namespace gfem {

struct TriangleRecord {
    std::array<int, 3> v{-1, -1, -1}; // node ids, CCW
    int root_id = -1;                 // index of the ancestor triangle in T0
    int generation = 0;               // refinement depth
    int attached_corner = -1;         // singular polygon vertex id, or -1
    // -1 while the triangle still contains its attached corner ("on the
    // corner chain"); otherwise the mesh layer index at which its ancestor
    // chain left the corner.
    int layer_break = -1;
};

/// Conforming triangulation. Immutable after construction; share via
/// std::shared_ptr<const TriMesh>.
struct TriMesh {
    std::vector<Point> nodes;
    std::vector<std::uint8_t> node_boundary; // 1 = on domain boundary
    std::vector<TriangleRecord> tris;
    int level = 0; // number of global refinements applied to T0

    // Generating polygon; null for meshes loaded from text (no ancestry).
    std::shared_ptr<const PolygonDomain> polygon;
    std::vector<int> corner_nodes; // polygon vertex id -> node id

    // Refinement lineage. For every node, (parent_a, parent_b, parent_s)
    // give node = (1-s)*nodes[a] + s*nodes[b] on the parent mesh; nodes
    // inherited from the parent have a = b = own id, s = 0.
    std::shared_ptr<const TriMesh> parent;
    std::vector<int> parent_a, parent_b;
    std::vector<double> parent_s;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(tris.size()); }
    bool has_ancestry() const { return polygon != nullptr; }

    double signed_area(int t) const {
        const TriangleRecord& tr = tris[static_cast<std::size_t>(t)];
        const Point a = nodes[static_cast<std::size_t>(tr.v[0])];
        const Point b = nodes[static_cast<std::size_t>(tr.v[1])];
        const Point c = nodes[static_cast<std::size_t>(tr.v[2])];
        return 0.5 * cross(b - a, c - a);
    }
    double total_area() const;
    /// Node id of a singular polygon vertex, or -1.
    int corner_node(int polygon_vertex) const;
    /// True if node id coincides with a singular polygon vertex.
    bool is_singular_node(int node) const;
};

using MeshPtr = std::shared_ptr<const TriMesh>;

struct MeshEdge {
    int a = -1, b = -1;   // node ids, a < b
    int t0 = -1, t1 = -1; // incident triangles, t1 = -1 on the boundary
    bool boundary() const { return t1 < 0; }
};

/// Undirected edges sorted by (a, b). Throws if any edge has more than two
/// incident triangles.
std::vector<MeshEdge> build_edges(const TriMesh& mesh);

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
    std::string str() const;
};

/// Checks every TriMesh invariant (orientation, conformity, boundary flags,
/// boundary geometry, ancestry counts) and reports all violations.
ValidationReport validate(const TriMesh& mesh);

/// Initial triangulation T0 of a polygon: ear clipping, a separation pass
/// so that no triangle carries two singular vertices, then local edge
/// flips/splits until the minimum angle reaches 15 degrees.
MeshPtr triangulate_initial(const PolygonDomain& polygon);

/// Plain-text round-trip ("nodes N" / "triangles M" blocks). Ancestry and
/// polygon metadata are not part of the format.
std::string save_mesh(const TriMesh& mesh);
MeshPtr load_mesh(const std::string& text);

} // namespace gfem

#endif
