#include "gfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace gfem {

namespace {

constexpr double kMinAngleDeg = 15.0;

double tri_angle_at(Point a, Point b, Point c) {
    // angle at vertex a of triangle (a, b, c)
    return std::atan2(std::abs(cross(b - a, c - a)), dot(b - a, c - a));
}

double tri_min_angle(Point a, Point b, Point c) {
    return std::min({tri_angle_at(a, b, c), tri_angle_at(b, c, a), tri_angle_at(c, a, b)});
}

double signed_area2(Point a, Point b, Point c) { return cross(b - a, c - a); }

bool point_in_triangle(Point p, Point a, Point b, Point c, double tol) {
    const double d0 = signed_area2(a, b, p);
    const double d1 = signed_area2(b, c, p);
    const double d2 = signed_area2(c, a, p);
    return d0 >= -tol && d1 >= -tol && d2 >= -tol;
}

// Mutable triangulation used only while building T0.
struct Scratch {
    std::vector<Point> nodes;
    std::vector<std::uint8_t> boundary;
    std::vector<std::array<int, 3>> tris;
    std::vector<std::uint8_t> singular; // per node

    bool two_singular(int i, int j, int k) const {
        return int(singular[std::size_t(i)]) + int(singular[std::size_t(j)]) +
                   int(singular[std::size_t(k)]) >= 2;
    }
    Point pt(int i) const { return nodes[std::size_t(i)]; }
    double min_angle(const std::array<int, 3>& t) const {
        return tri_min_angle(pt(t[0]), pt(t[1]), pt(t[2]));
    }
    double worst_angle() const {
        double w = std::numbers::pi;
        for (const auto& t : tris) w = std::min(w, min_angle(t));
        return w;
    }
};

struct EdgeUse {
    int a, b;       // a < b
    int tri, slot;  // tris[tri] has the edge at cyclic position slot
};

std::vector<EdgeUse> edge_uses(const std::vector<std::array<int, 3>>& tris) {
    std::vector<EdgeUse> uses;
    uses.reserve(tris.size() * 3);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        for (int s = 0; s < 3; ++s) {
            int u = tris[t][std::size_t(s)];
            int v = tris[t][std::size_t((s + 1) % 3)];
            if (u > v) std::swap(u, v);
            uses.push_back({u, v, static_cast<int>(t), s});
        }
    }
    std::sort(uses.begin(), uses.end(), [](const EdgeUse& l, const EdgeUse& r) {
        return std::tie(l.a, l.b, l.tri) < std::tie(r.a, r.b, r.tri);
    });
    return uses;
}

// Split edge (a, b) at point m (appended as a new node), preserving CCW in
// both incident triangles. Conformity is kept because every triangle on the
// edge is split.
void split_edge(Scratch& s, int a, int b, Point m, bool m_on_boundary) {
    const int mid = static_cast<int>(s.nodes.size());
    s.nodes.push_back(m);
    s.boundary.push_back(m_on_boundary ? 1 : 0);
    s.singular.push_back(0);
    std::vector<std::array<int, 3>> out;
    out.reserve(s.tris.size() + 2);
    for (const auto& t : s.tris) {
        int slot = -1;
        for (int k = 0; k < 3; ++k) {
            const int u = t[std::size_t(k)], v = t[std::size_t((k + 1) % 3)];
            if ((u == a && v == b) || (u == b && v == a)) slot = k;
        }
        if (slot < 0) {
            out.push_back(t);
            continue;
        }
        const int p = t[std::size_t(slot)];
        const int q = t[std::size_t((slot + 1) % 3)];
        const int w = t[std::size_t((slot + 2) % 3)];
        out.push_back({p, mid, w});
        out.push_back({mid, q, w});
    }
    s.tris = std::move(out);
}

int edge_incidence(const std::vector<EdgeUse>& uses, int a, int b) {
    if (a > b) std::swap(a, b);
    auto lo = std::lower_bound(uses.begin(), uses.end(), std::pair{a, b},
                               [](const EdgeUse& e, const std::pair<int, int>& k) {
                                   return std::tie(e.a, e.b) < std::tie(k.first, k.second);
                               });
    int count = 0;
    for (auto it = lo; it != uses.end() && it->a == a && it->b == b; ++it) ++count;
    return count;
}

// Lawson-style local improvement: flip an interior edge whenever it raises
// the pairwise minimum angle. Flips that would put two singular vertices
// into one triangle are refused.
bool flip_pass(Scratch& s) {
    bool changed = false;
    for (;;) {
        auto uses = edge_uses(s.tris);
        bool flipped = false;
        for (std::size_t i = 0; i + 1 < uses.size(); ++i) {
            const EdgeUse& e0 = uses[i];
            const EdgeUse& e1 = uses[i + 1];
            if (e0.a != e1.a || e0.b != e1.b) continue;
            const auto& t0 = s.tris[std::size_t(e0.tri)];
            const auto& t1 = s.tris[std::size_t(e1.tri)];
            const int p = t0[std::size_t(e0.slot)];
            const int q = t0[std::size_t((e0.slot + 1) % 3)];
            const int c = t0[std::size_t((e0.slot + 2) % 3)];
            const int d = t1[std::size_t((e1.slot + 2) % 3)];
            if (c == d) continue;
            if (edge_incidence(uses, c, d) > 0) continue;
            const Point P = s.pt(p), Q = s.pt(q), C = s.pt(c), D = s.pt(d);
            const double scale = std::max({norm(Q - P), norm(C - P), norm(D - P)});
            const double eps = 1e-12 * scale * scale;
            if (signed_area2(P, D, C) <= eps || signed_area2(D, Q, C) <= eps) continue;
            const double old_q = std::min(tri_min_angle(P, Q, C), tri_min_angle(Q, P, D));
            const double new_q = std::min(tri_min_angle(P, D, C), tri_min_angle(D, Q, C));
            if (new_q <= old_q + 1e-12) continue;
            if (s.two_singular(p, d, c) || s.two_singular(d, q, c)) continue;
            s.tris[std::size_t(e0.tri)] = {p, d, c};
            s.tris[std::size_t(e1.tri)] = {d, q, c};
            flipped = changed = true;
            break; // edge structure is stale; rebuild
        }
        if (!flipped) break;
    }
    return changed;
}

} // namespace

double TriMesh::total_area() const {
    double a = 0.0;
    for (int t = 0; t < triangle_count(); ++t) a += signed_area(t);
    return a;
}

int TriMesh::corner_node(int polygon_vertex) const {
    if (polygon_vertex < 0 || std::size_t(polygon_vertex) >= corner_nodes.size()) return -1;
    return corner_nodes[std::size_t(polygon_vertex)];
}

bool TriMesh::is_singular_node(int node) const {
    if (!polygon) return false;
    for (int pv : polygon->singular_vertices())
        if (corner_nodes[std::size_t(pv)] == node) return true;
    return false;
}

std::vector<MeshEdge> build_edges(const TriMesh& mesh) {
    auto uses = edge_uses([&] {
        std::vector<std::array<int, 3>> t(mesh.tris.size());
        for (std::size_t i = 0; i < mesh.tris.size(); ++i) t[i] = mesh.tris[i].v;
        return t;
    }());
    std::vector<MeshEdge> edges;
    edges.reserve(uses.size() / 2 + 1);
    for (std::size_t i = 0; i < uses.size();) {
        std::size_t j = i;
        while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) ++j;
        const std::size_t count = j - i;
        if (count > 2)
            throw Error("edge (" + std::to_string(uses[i].a) + "," + std::to_string(uses[i].b) +
                        ") has " + std::to_string(count) + " incident triangles");
        edges.push_back({uses[i].a, uses[i].b, uses[i].tri, count == 2 ? uses[i + 1].tri : -1});
        i = j;
    }
    return edges;
}

std::string ValidationReport::str() const {
    std::string s = issues.empty() ? "valid" : "invalid:";
    for (const auto& i : issues) s += "\n  " + i;
    return s;
}

ValidationReport validate(const TriMesh& mesh) {
    ValidationReport rep;
    auto complain = [&rep](std::string msg) { rep.issues.push_back(std::move(msg)); };

    const int nn = mesh.node_count();
    const int nt = mesh.triangle_count();
    for (int i = 0; i < nn; ++i) {
        const Point p = mesh.nodes[std::size_t(i)];
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            complain("node " + std::to_string(i) + ": non-finite coordinates");
    }
    for (int t = 0; t < nt; ++t) {
        const auto& v = mesh.tris[std::size_t(t)].v;
        bool in_range = true;
        for (int k = 0; k < 3; ++k)
            if (v[std::size_t(k)] < 0 || v[std::size_t(k)] >= nn) {
                complain("triangle " + std::to_string(t) + ": node index out of range");
                in_range = false;
            }
        if (!in_range) continue;
        if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
            complain("triangle " + std::to_string(t) + ": repeated node");
        else if (mesh.signed_area(t) <= 0.0)
            complain("triangle " + std::to_string(t) +
                     ": non-positive signed area (clockwise or degenerate)");
    }
    if (!rep.ok()) return rep; // edge analysis needs sane connectivity

    // Edge incidence: interior edges twice, boundary edges once.
    std::vector<std::array<int, 3>> conn(mesh.tris.size());
    for (std::size_t i = 0; i < mesh.tris.size(); ++i) conn[i] = mesh.tris[i].v;
    auto uses = edge_uses(conn);
    std::vector<std::uint8_t> on_boundary_edge(std::size_t(nn), 0);
    const double diam = [&] {
        if (mesh.polygon) return mesh.polygon->diameter();
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (const Point& p : mesh.nodes) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        return std::hypot(hi_x - lo_x, hi_y - lo_y);
    }();

    for (std::size_t i = 0; i < uses.size();) {
        std::size_t j = i;
        while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) ++j;
        const std::size_t count = j - i;
        const int a = uses[i].a, b = uses[i].b;
        if (count > 2) {
            complain("edge (" + std::to_string(a) + "," + std::to_string(b) + ") shared by " +
                     std::to_string(count) + " triangles");
        } else if (count == 1) {
            on_boundary_edge[std::size_t(a)] = on_boundary_edge[std::size_t(b)] = 1;
            if (mesh.polygon) {
                const Point m = 0.5 * (mesh.nodes[std::size_t(a)] + mesh.nodes[std::size_t(b)]);
                if (mesh.polygon->boundary_distance(m) > 1e-12 * diam)
                    complain("conformity violation at edge (" + std::to_string(a) + "," +
                             std::to_string(b) +
                             "): single incident triangle but edge is interior");
            }
        }
        i = j;
    }

    for (int i = 0; i < nn; ++i) {
        const bool flagged = mesh.node_boundary[std::size_t(i)] != 0;
        const bool incident = on_boundary_edge[std::size_t(i)] != 0;
        if (flagged != incident)
            complain("node " + std::to_string(i) + ": boundary flag " +
                     (flagged ? "set" : "clear") + " but node " +
                     (incident ? "lies on" : "does not lie on") + " a boundary edge");
        if (flagged && mesh.polygon &&
            mesh.polygon->boundary_distance(mesh.nodes[std::size_t(i)]) > 1e-12 * diam)
            complain("boundary node " + std::to_string(i) + " is not on the domain boundary");
    }

    // Geometric hanging-node scan; quadratic, so only at unit-test scale.
    if (nn <= 2000) {
        for (std::size_t i = 0; i < uses.size();) {
            std::size_t j = i;
            while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) ++j;
            const Point A = mesh.nodes[std::size_t(uses[i].a)];
            const Point B = mesh.nodes[std::size_t(uses[i].b)];
            const double len = distance(A, B);
            for (int v = 0; v < nn; ++v) {
                if (v == uses[i].a || v == uses[i].b) continue;
                const Point P = mesh.nodes[std::size_t(v)];
                const double t = dot(P - A, B - A) / (len * len);
                if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
                if (std::abs(cross(B - A, P - A)) / len <= 1e-12 * diam)
                    complain("conformity violation: node " + std::to_string(v) +
                             " dangles on edge (" + std::to_string(uses[i].a) + "," +
                             std::to_string(uses[i].b) + ")");
            }
            i = j;
        }
    }

    if (mesh.polygon) {
        for (int t = 0; t < nt; ++t) {
            const auto& v = mesh.tris[std::size_t(t)].v;
            int n_sing = 0;
            for (int k = 0; k < 3; ++k) n_sing += mesh.is_singular_node(v[std::size_t(k)]) ? 1 : 0;
            if (n_sing >= 2)
                complain("triangle " + std::to_string(t) + " touches " + std::to_string(n_sing) +
                         " singular vertices");
        }
        // |T_n| = |T_0| * 4^n
        int n_roots = 0;
        for (const auto& tr : mesh.tris) n_roots = std::max(n_roots, tr.root_id + 1);
        const long expected = static_cast<long>(n_roots) * (1L << (2 * mesh.level));
        if (expected != static_cast<long>(nt))
            complain("triangle count " + std::to_string(nt) + " != |T0|*4^n = " +
                     std::to_string(expected));
    }
    return rep;
}

MeshPtr triangulate_initial(const PolygonDomain& polygon) {
    const std::size_t n = polygon.size();
    Scratch s;
    s.nodes = polygon.vertices();
    s.boundary.assign(n, 1);
    s.singular.assign(n, 0);
    for (int idx : polygon.singular_vertices()) s.singular[std::size_t(idx)] = 1;

    // Ear clipping; at each step clip the ear with the best minimum angle.
    std::vector<int> ring(n);
    for (std::size_t i = 0; i < n; ++i) ring[i] = static_cast<int>(i);
    const double diam = polygon.diameter();
    const double area_eps = 1e-12 * diam * diam;
    while (ring.size() > 3) {
        int best = -1;
        double best_quality = -1.0;
        const std::size_t m = ring.size();
        for (std::size_t i = 0; i < m; ++i) {
            const int h = ring[(i + m - 1) % m], c = ring[i], j = ring[(i + 1) % m];
            const Point A = s.pt(h), B = s.pt(c), C = s.pt(j);
            if (signed_area2(A, B, C) <= area_eps) continue; // reflex or flat
            bool blocked = false;
            for (std::size_t k = 0; k < m && !blocked; ++k) {
                const int w = ring[k];
                if (w == h || w == c || w == j) continue;
                if (point_in_triangle(s.pt(w), A, B, C, area_eps)) blocked = true;
            }
            if (blocked) continue;
            const double q = tri_min_angle(A, B, C);
            if (q > best_quality) {
                best_quality = q;
                best = static_cast<int>(i);
            }
        }
        if (best < 0)
            throw Error("ear clipping failed: no valid ear (polygon may be non-simple)");
        const std::size_t i = static_cast<std::size_t>(best);
        s.tris.push_back({ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]});
        ring.erase(ring.begin() + best);
    }
    if (signed_area2(s.pt(ring[0]), s.pt(ring[1]), s.pt(ring[2])) <= area_eps)
        throw Error("ear clipping failed: final triangle is degenerate");
    s.tris.push_back({ring[0], ring[1], ring[2]});

    // Separation pass: no mesh edge may join two singular vertices
    // (Their shared edge is split at its midpoint; the midpoint is not
    // singular, so each split strictly reduces the number of such edges.)
    for (;;) {
        auto uses = edge_uses(s.tris);
        int ea = -1, eb = -1, count = 0;
        for (std::size_t i = 0; i < uses.size() && ea < 0;) {
            std::size_t j = i;
            while (j < uses.size() && uses[j].a == uses[i].a && uses[j].b == uses[i].b) ++j;
            if (s.singular[std::size_t(uses[i].a)] && s.singular[std::size_t(uses[i].b)]) {
                ea = uses[i].a;
                eb = uses[i].b;
                count = static_cast<int>(j - i);
            }
            i = j;
        }
        if (ea < 0) break;
        const Point m = 0.5 * (s.pt(ea) + s.pt(eb));
        split_edge(s, ea, eb, m, /*m_on_boundary=*/count == 1);
    }

    // Local quality repair: flips first, then midpoint splits of the longest
    // edge of any triangle still below the angle floor.
    const double floor_rad = kMinAngleDeg * std::numbers::pi / 180.0;
    for (int round = 0; round < 4 && s.worst_angle() < floor_rad; ++round) {
        flip_pass(s);
        if (s.worst_angle() >= floor_rad) break;
        if (round == 3) break;
        // split the longest edge of the worst triangle
        double worst = std::numbers::pi;
        int worst_t = -1;
        for (std::size_t t = 0; t < s.tris.size(); ++t) {
            const double q = s.min_angle(s.tris[t]);
            if (q < worst) {
                worst = q;
                worst_t = static_cast<int>(t);
            }
        }
        const auto& t = s.tris[std::size_t(worst_t)];
        int la = t[0], lb = t[1];
        double longest = -1.0;
        for (int k = 0; k < 3; ++k) {
            const int u = t[std::size_t(k)], v = t[std::size_t((k + 1) % 3)];
            const double len = distance(s.pt(u), s.pt(v));
            if (len > longest) {
                longest = len;
                la = u;
                lb = v;
            }
        }
        auto uses = edge_uses(s.tris);
        const bool bnd = edge_incidence(uses, la, lb) == 1;
        split_edge(s, la, lb, 0.5 * (s.pt(la) + s.pt(lb)), bnd);
    }
    if (s.worst_angle() < floor_rad) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "initial triangulation quality too low: min angle %.2f deg < %.0f deg",
                      s.worst_angle() * 180.0 / std::numbers::pi, kMinAngleDeg);
        throw Error(buf);
    }

    auto mesh = std::make_shared<TriMesh>();
    mesh->nodes = std::move(s.nodes);
    mesh->node_boundary = std::move(s.boundary);
    mesh->tris.resize(s.tris.size());
    mesh->polygon = std::make_shared<PolygonDomain>(polygon);
    mesh->corner_nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) mesh->corner_nodes[i] = static_cast<int>(i);
    for (std::size_t t = 0; t < s.tris.size(); ++t) {
        TriangleRecord& tr = mesh->tris[t];
        tr.v = s.tris[t];
        tr.root_id = static_cast<int>(t);
        tr.generation = 0;
        tr.attached_corner = -1;
        tr.layer_break = -1;
        for (int k = 0; k < 3; ++k)
            if (s.singular[std::size_t(tr.v[std::size_t(k)])])
                tr.attached_corner = tr.v[std::size_t(k)];
    }
    const int nn = mesh->node_count();
    mesh->parent_a.resize(std::size_t(nn));
    mesh->parent_b.resize(std::size_t(nn));
    mesh->parent_s.assign(std::size_t(nn), 0.0);
    for (int i = 0; i < nn; ++i) mesh->parent_a[std::size_t(i)] = mesh->parent_b[std::size_t(i)] = i;

    ValidationReport rep = validate(*mesh);
    if (!rep.ok()) throw Error("initial triangulation is invalid: " + rep.str());
    return mesh;
}

std::string save_mesh(const TriMesh& mesh) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "nodes %d\n", mesh.node_count());
    out += buf;
    for (int i = 0; i < mesh.node_count(); ++i) {
        const Point p = mesh.nodes[std::size_t(i)];
        std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", p.x, p.y,
                      mesh.node_boundary[std::size_t(i)] ? 1 : 0);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "triangles %d\n", mesh.triangle_count());
    out += buf;
    for (const auto& t : mesh.tris) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", t.v[0], t.v[1], t.v[2]);
        out += buf;
    }
    return out;
}

MeshPtr load_mesh(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& msg) -> Error {
        return Error("mesh parse error at line " + std::to_string(lineno) + ": " + msg);
    };

    auto mesh = std::make_shared<TriMesh>();
    if (!next_line()) throw fail("empty input, expected 'nodes N'");
    long nn = -1;
    if (std::sscanf(line.c_str(), "nodes %ld", &nn) != 1 || nn < 0)
        throw fail("expected 'nodes N', got '" + line + "'");
    mesh->nodes.reserve(std::size_t(nn));
    for (long i = 0; i < nn; ++i) {
        if (!next_line()) throw fail("expected " + std::to_string(nn) + " node lines");
        double x, y;
        int flag;
        if (std::sscanf(line.c_str(), "%lf %lf %d", &x, &y, &flag) != 3)
            throw fail("expected 'x y boundary_flag', got '" + line + "'");
        if (!std::isfinite(x) || !std::isfinite(y)) throw fail("non-finite coordinate");
        if (flag != 0 && flag != 1) throw fail("boundary flag must be 0 or 1");
        mesh->nodes.push_back({x, y});
        mesh->node_boundary.push_back(static_cast<std::uint8_t>(flag));
    }
    if (!next_line()) throw fail("expected 'triangles M'");
    long nt = -1;
    if (std::sscanf(line.c_str(), "triangles %ld", &nt) != 1 || nt < 0)
        throw fail("expected 'triangles M', got '" + line + "'");
    mesh->tris.reserve(std::size_t(nt));
    for (long t = 0; t < nt; ++t) {
        if (!next_line()) throw fail("expected " + std::to_string(nt) + " triangle lines");
        int i, j, k;
        if (std::sscanf(line.c_str(), "%d %d %d", &i, &j, &k) != 3)
            throw fail("expected 'i j k', got '" + line + "'");
        for (int idx : {i, j, k})
            if (idx < 0 || idx >= static_cast<int>(nn))
                throw fail("node index " + std::to_string(idx) + " out of range [0," +
                           std::to_string(nn) + ")");
        TriangleRecord tr;
        tr.v = {i, j, k};
        tr.root_id = static_cast<int>(t);
        mesh->tris.push_back(tr);
    }
    const int count = mesh->node_count();
    mesh->parent_a.resize(std::size_t(count));
    mesh->parent_b.resize(std::size_t(count));
    mesh->parent_s.assign(std::size_t(count), 0.0);
    for (int i = 0; i < count; ++i)
        mesh->parent_a[std::size_t(i)] = mesh->parent_b[std::size_t(i)] = i;
    return mesh;
}

} // namespace gfem
