#include "gfem/refine.hpp"

#include <algorithm>
#include <cmath>

namespace gfem {

Point place_edge_node(Point a, Point b, SingularEnd singular_at, double kappa) {
    if (a.x == b.x && a.y == b.y) throw Error("place_edge_node: endpoints coincide");
    if (!(kappa > 0.0 && kappa <= 0.5))
        throw Error("place_edge_node: kappa must lie in (0, 1/2], got " + std::to_string(kappa));
    switch (singular_at) {
    case SingularEnd::none:
        return 0.5 * (a + b);
    case SingularEnd::a:
        return a + kappa * (b - a);
    case SingularEnd::b:
        return b + kappa * (a - b);
    }
    throw Error("place_edge_node: bad singular_at");
}

MeshPtr refine(MeshPtr mesh, const GradingSpec& grading) {
    if (!mesh) throw Error("refine: null mesh");
    if (!mesh->polygon)
        throw Error("refine: mesh has no generating polygon (ancestry metadata missing)");
    if (grading.kappa.size() != mesh->polygon->size())
        throw Error("refine: grading spec does not match the polygon");
    {
        ValidationReport rep = validate(*mesh);
        if (!rep.ok()) throw Error("refine: input mesh is invalid: " + rep.str());
    }

    const TriMesh& m = *mesh;
    const int old_nodes = m.node_count();

    // node id -> singular polygon vertex id (or -1)
    std::vector<int> singular_vertex_of(std::size_t(old_nodes), -1);
    for (int pv : m.polygon->singular_vertices()) {
        const int node = m.corner_nodes[std::size_t(pv)];
        singular_vertex_of[std::size_t(node)] = pv;
    }

    const std::vector<MeshEdge> edges = build_edges(m); // sorted by (a, b)

    auto out = std::make_shared<TriMesh>();
    out->level = m.level + 1;
    out->polygon = m.polygon;
    out->corner_nodes = m.corner_nodes;
    out->parent = mesh;

    out->nodes = m.nodes;
    out->node_boundary = m.node_boundary;
    out->parent_a.resize(std::size_t(old_nodes));
    out->parent_b.resize(std::size_t(old_nodes));
    out->parent_s.assign(std::size_t(old_nodes), 0.0);
    for (int i = 0; i < old_nodes; ++i)
        out->parent_a[std::size_t(i)] = out->parent_b[std::size_t(i)] = i;

    // One new node per edge, in sorted edge order.
    for (const MeshEdge& e : edges) {
        const int sa = singular_vertex_of[std::size_t(e.a)];
        const int sb = singular_vertex_of[std::size_t(e.b)];
        if (sa >= 0 && sb >= 0)
            throw Error("refine: edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                        ") joins two singular vertices");
        const Point A = m.nodes[std::size_t(e.a)];
        const Point B = m.nodes[std::size_t(e.b)];
        Point d;
        double s; // d = (1-s)*A + s*B
        if (sa >= 0) {
            s = grading.kappa[std::size_t(sa)];
            d = place_edge_node(A, B, SingularEnd::a, s);
        } else if (sb >= 0) {
            const double kappa = grading.kappa[std::size_t(sb)];
            d = place_edge_node(A, B, SingularEnd::b, kappa);
            s = 1.0 - kappa;
        } else {
            d = place_edge_node(A, B, SingularEnd::none, 0.5);
            s = 0.5;
        }
        out->nodes.push_back(d);
        const bool bnd = e.boundary() && m.node_boundary[std::size_t(e.a)] &&
                         m.node_boundary[std::size_t(e.b)];
        out->node_boundary.push_back(bnd ? 1 : 0);
        out->parent_a.push_back(e.a);
        out->parent_b.push_back(e.b);
        out->parent_s.push_back(s);
    }

    auto edge_node = [&](int u, int v) -> int {
        if (u > v) std::swap(u, v);
        auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{u, v},
                                   [](const MeshEdge& e, const std::pair<int, int>& k) {
                                       return std::tie(e.a, e.b) < std::tie(k.first, k.second);
                                   });
        return old_nodes + static_cast<int>(it - edges.begin());
    };

    out->tris.reserve(m.tris.size() * 4);
    for (const TriangleRecord& t : m.tris) {
        const int v0 = t.v[0], v1 = t.v[1], v2 = t.v[2];
        const int m01 = edge_node(v0, v1);
        const int m12 = edge_node(v1, v2);
        const int m20 = edge_node(v2, v0);

        const int corner_node = t.attached_corner >= 0
                                    ? m.corner_nodes[std::size_t(t.attached_corner)]
                                    : -1;
        auto child = [&](int a, int b, int c) {
            TriangleRecord r;
            r.v = {a, b, c};
            r.root_id = t.root_id;
            r.generation = t.generation + 1;
            r.attached_corner = t.attached_corner;
            if (t.attached_corner < 0) {
                r.layer_break = -1;
            } else if (t.layer_break >= 0) {
                r.layer_break = t.layer_break; // already inside a fixed layer
            } else {
                // parent is T_(g) at the corner; only the corner child stays
                // on the chain, the other three tile layer L_g
                r.layer_break = (a == corner_node) ? -1 : t.generation;
            }
            out->tris.push_back(r);
        };
        child(v0, m01, m20);
        child(v1, m12, m01);
        child(v2, m20, m12);
        child(m01, m12, m20);
    }
    return out;
}

LayerMap compute_layers(const TriMesh& mesh, int corner_vertex) {
    if (!mesh.polygon)
        throw Error("compute_layers: mesh has no ancestry metadata");
    const auto& info = mesh.polygon->vertex_info();
    if (corner_vertex < 0 || std::size_t(corner_vertex) >= info.size())
        throw Error("compute_layers: vertex index " + std::to_string(corner_vertex) +
                    " out of range");
    if (!info[std::size_t(corner_vertex)].is_singular)
        throw Error("compute_layers: vertex " + std::to_string(corner_vertex) +
                    " is not a singular vertex");

    LayerMap lm;
    lm.corner = corner_vertex;
    lm.level = mesh.level;
    lm.layer.assign(mesh.tris.size(), -1);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const TriangleRecord& tr = mesh.tris[t];
        if (tr.attached_corner != corner_vertex) continue;
        lm.layer[t] = tr.layer_break < 0 ? mesh.level : tr.layer_break;
    }
    return lm;
}

double mesh_size_param(int n) {
    if (n < 0) throw Error("mesh_size_param: n must be >= 0");
    return std::exp2(-n);
}

} // namespace gfem
