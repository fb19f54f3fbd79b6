#include "gfem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "gfem/quadrature.hpp"

namespace gfem {

void SparseSpd::multiply(const double* x, double* y) const {
    for (int r = 0; r < n; ++r) {
        double sum = 0.0;
        const int end = row_ptr[std::size_t(r) + 1];
        for (int k = row_ptr[std::size_t(r)]; k < end; ++k)
            sum += val[std::size_t(k)] * x[col[std::size_t(k)]];
        y[r] = sum;
    }
}

std::vector<double> SparseSpd::multiply(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<std::size_t>(n));
    multiply(x.data(), y.data());
    return y;
}

double& SparseSpd::coeff(int r, int c) {
    const auto begin = col.begin() + row_ptr[std::size_t(r)];
    const auto end = col.begin() + row_ptr[std::size_t(r) + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c)
        throw Error("matrix entry (" + std::to_string(r) + "," + std::to_string(c) +
                    ") is not in the sparsity pattern");
    return val[std::size_t(it - col.begin())];
}

double SparseSpd::max_asymmetry() const {
    double worst = 0.0;
    SparseSpd& self = const_cast<SparseSpd&>(*this);
    for (int r = 0; r < n; ++r) {
        for (int k = row_ptr[std::size_t(r)]; k < row_ptr[std::size_t(r) + 1]; ++k) {
            const int c = col[std::size_t(k)];
            worst = std::max(worst, std::abs(val[std::size_t(k)] - self.coeff(c, r)));
        }
    }
    return worst;
}

InteriorMap interior_map(const TriMesh& mesh) {
    InteriorMap im;
    im.node_to_dof.assign(mesh.nodes.size(), -1);
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.node_boundary[std::size_t(i)]) continue;
        im.node_to_dof[std::size_t(i)] = im.count();
        im.dof_to_node.push_back(i);
    }
    return im;
}

std::array<std::array<double, 3>, 3> local_stiffness(Point p0, Point p1, Point p2) {
    const double area2 = cross(p1 - p0, p2 - p0); // twice the signed area
    const double scale = std::max({norm(p1 - p0), norm(p2 - p1), norm(p0 - p2)});
    if (area2 <= 1e-14 * scale * scale)
        throw Error("local_stiffness: degenerate or clockwise triangle");
    // grad(phi_i) = rot(-90)(p_{i+1} - p_{i+2}) / (2A)
    const Point e[3] = {p1 - p2, p2 - p0, p0 - p1};
    Point g[3];
    for (int i = 0; i < 3; ++i) g[i] = {e[i].y / area2, -e[i].x / area2};
    std::array<std::array<double, 3>, 3> k{};
    const double area = 0.5 * area2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k[std::size_t(i)][std::size_t(j)] = area * dot(g[i], g[j]);
    return k;
}

std::pair<SparseSpd, InteriorMap> assemble_stiffness(const TriMesh& mesh) {
    InteriorMap im = interior_map(mesh);
    const int n = im.count();
    if (n == 0)
        throw Error("assemble_stiffness: mesh has no interior nodes; refine it first");

    SparseSpd a;
    a.n = n;
    a.row_ptr.assign(std::size_t(n) + 1, 0);

    const std::vector<MeshEdge> edges = build_edges(mesh);
    auto dof = [&](int node) { return im.node_to_dof[std::size_t(node)]; };

    for (int r = 0; r < n; ++r) a.row_ptr[std::size_t(r) + 1] = 1; // diagonal
    for (const MeshEdge& e : edges) {
        const int da = dof(e.a), db = dof(e.b);
        if (da >= 0 && db >= 0) {
            ++a.row_ptr[std::size_t(da) + 1];
            ++a.row_ptr[std::size_t(db) + 1];
        }
    }
    for (int r = 0; r < n; ++r) a.row_ptr[std::size_t(r) + 1] += a.row_ptr[std::size_t(r)];
    a.col.assign(std::size_t(a.row_ptr[std::size_t(n)]), -1);

    std::vector<int> cursor(a.row_ptr.begin(), a.row_ptr.end() - 1);
    for (int r = 0; r < n; ++r) a.col[std::size_t(cursor[std::size_t(r)]++)] = r;
    for (const MeshEdge& e : edges) {
        const int da = dof(e.a), db = dof(e.b);
        if (da >= 0 && db >= 0) {
            a.col[std::size_t(cursor[std::size_t(da)]++)] = db;
            a.col[std::size_t(cursor[std::size_t(db)]++)] = da;
        }
    }
    for (int r = 0; r < n; ++r)
        std::sort(a.col.begin() + a.row_ptr[std::size_t(r)],
                  a.col.begin() + a.row_ptr[std::size_t(r) + 1]);
    a.val.assign(a.col.size(), 0.0);

    for (const TriangleRecord& t : mesh.tris) {
        const auto k = local_stiffness(mesh.nodes[std::size_t(t.v[0])],
                                       mesh.nodes[std::size_t(t.v[1])],
                                       mesh.nodes[std::size_t(t.v[2])]);
        for (int i = 0; i < 3; ++i) {
            const int di = dof(t.v[std::size_t(i)]);
            if (di < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int dj = dof(t.v[std::size_t(j)]);
                if (dj < 0) continue;
                a.coeff(di, dj) += k[std::size_t(i)][std::size_t(j)];
            }
        }
    }
    return {std::move(a), std::move(im)};
}

std::vector<double> assemble_load_full(const TriMesh& mesh, const expr::Expr& f, int quad_order) {
    const auto rule = triangle_rule(quad_order);
    std::vector<double> b(mesh.nodes.size(), 0.0);
    for (std::size_t t = 0; t < mesh.tris.size(); ++t) {
        const auto& v = mesh.tris[t].v;
        const Point p0 = mesh.nodes[std::size_t(v[0])];
        const Point p1 = mesh.nodes[std::size_t(v[1])];
        const Point p2 = mesh.nodes[std::size_t(v[2])];
        const double area = 0.5 * cross(p1 - p0, p2 - p0);
        double local[3] = {0.0, 0.0, 0.0};
        for (const QuadPoint& q : rule) {
            const Point x = q.b0 * p0 + q.b1 * p1 + q.b2 * p2;
            double fx;
            try {
                fx = eval(f, x.x, x.y);
            } catch (const expr::EvalError& err) {
                throw Error("load assembly failed in element " + std::to_string(t) + ": " +
                            err.what());
            }
            const double wf = q.w * fx;
            local[0] += wf * q.b0;
            local[1] += wf * q.b1;
            local[2] += wf * q.b2;
        }
        for (int i = 0; i < 3; ++i) b[std::size_t(v[std::size_t(i)])] += area * local[i];
    }
    return b;
}

std::vector<double> assemble_load(const TriMesh& mesh, const expr::Expr& f, int quad_order,
                                  const InteriorMap& interior) {
    const std::vector<double> full = assemble_load_full(mesh, f, quad_order);
    std::vector<double> b(std::size_t(interior.count()));
    for (int d = 0; d < interior.count(); ++d)
        b[std::size_t(d)] = full[std::size_t(interior.dof_to_node[std::size_t(d)])];
    return b;
}

FeFunction expand_interior(MeshPtr mesh, const InteriorMap& interior,
                           const std::vector<double>& dof_values) {
    FeFunction u;
    u.mesh = mesh;
    u.values.assign(mesh->nodes.size(), 0.0);
    for (int d = 0; d < interior.count(); ++d)
        u.values[std::size_t(interior.dof_to_node[std::size_t(d)])] = dof_values[std::size_t(d)];
    return u;
}

} // namespace gfem
