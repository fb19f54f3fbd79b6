#include "gfem/norms.hpp"

#include <cmath>
#include <limits>

#include "gfem/quadrature.hpp"

namespace gfem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// values of the three P1 gradients on a triangle
struct ElementGrads {
    Point g[3];
    double area;
};

ElementGrads element_grads(const TriMesh& mesh, const TriangleRecord& t) {
    const Point p0 = mesh.nodes[std::size_t(t.v[0])];
    const Point p1 = mesh.nodes[std::size_t(t.v[1])];
    const Point p2 = mesh.nodes[std::size_t(t.v[2])];
    const double area2 = cross(p1 - p0, p2 - p0);
    const Point e[3] = {p1 - p2, p2 - p0, p0 - p1};
    ElementGrads eg;
    eg.area = 0.5 * area2;
    for (int i = 0; i < 3; ++i) eg.g[i] = {e[i].y / area2, -e[i].x / area2};
    return eg;
}

} // namespace

StudyLevelRow::StudyLevelRow()
    : h1_err(kNaN), l2_err(kNaN), h1_rate(kNaN), l2_rate(kNaN), h1_err_exact(kNaN),
      l2_err_exact(kNaN), h1_rate_exact(kNaN), l2_rate_exact(kNaN) {}

FeFunction prolongate(const FeFunction& coarse, MeshPtr fine_mesh) {
    if (!coarse.mesh || !fine_mesh) throw Error("prolongate: null mesh");
    if (coarse.values.size() != coarse.mesh->nodes.size())
        throw Error("prolongate: value count does not match the coarse mesh");
    if (fine_mesh.get() == coarse.mesh.get()) return coarse;
    if (!fine_mesh->parent)
        throw Error("prolongate: meshes are not nested");
    // walk down one refinement at a time
    const FeFunction on_parent = prolongate(coarse, fine_mesh->parent);
    FeFunction out;
    out.mesh = fine_mesh;
    out.values.resize(fine_mesh->nodes.size());
    for (std::size_t i = 0; i < fine_mesh->nodes.size(); ++i) {
        const double s = fine_mesh->parent_s[i];
        const double va = on_parent.values[std::size_t(fine_mesh->parent_a[i])];
        const double vb = on_parent.values[std::size_t(fine_mesh->parent_b[i])];
        out.values[i] = (1.0 - s) * va + s * vb;
    }
    return out;
}

double h1_seminorm(const FeFunction& v) {
    const TriMesh& m = *v.mesh;
    double sum = 0.0;
    for (const TriangleRecord& t : m.tris) {
        const ElementGrads eg = element_grads(m, t);
        Point g{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const double vi = v.values[std::size_t(t.v[std::size_t(i)])];
            g.x += vi * eg.g[i].x;
            g.y += vi * eg.g[i].y;
        }
        sum += eg.area * (g.x * g.x + g.y * g.y);
    }
    return std::sqrt(sum);
}

double l2_norm(const FeFunction& v) {
    const TriMesh& m = *v.mesh;
    double sum = 0.0;
    for (const TriangleRecord& t : m.tris) {
        const double v0 = v.values[std::size_t(t.v[0])];
        const double v1 = v.values[std::size_t(t.v[1])];
        const double v2 = v.values[std::size_t(t.v[2])];
        const double area = 0.5 * cross(m.nodes[std::size_t(t.v[1])] - m.nodes[std::size_t(t.v[0])],
                                        m.nodes[std::size_t(t.v[2])] - m.nodes[std::size_t(t.v[0])]);
        // v' M v with M = area/12 * [[2,1,1],[1,2,1],[1,1,2]]
        sum += area / 12.0 *
               (2.0 * (v0 * v0 + v1 * v1 + v2 * v2) + 2.0 * (v0 * v1 + v1 * v2 + v2 * v0));
    }
    return std::sqrt(sum);
}

ErrorPair error_between_levels(const FeFunction& u_fine, const FeFunction& u_coarse) {
    const FeFunction lifted = prolongate(u_coarse, u_fine.mesh);
    FeFunction diff;
    diff.mesh = u_fine.mesh;
    diff.values.resize(u_fine.values.size());
    for (std::size_t i = 0; i < diff.values.size(); ++i)
        diff.values[i] = u_fine.values[i] - lifted.values[i];
    return {h1_seminorm(diff), l2_norm(diff)};
}

ErrorPair error_vs_exact(const FeFunction& u_h, const expr::Expr& u, const expr::Expr& du_dx,
                         const expr::Expr& du_dy, int quad_order) {
    const TriMesh& m = *u_h.mesh;
    const auto rule = triangle_rule(quad_order);
    double l2 = 0.0, h1 = 0.0;
    for (const TriangleRecord& t : m.tris) {
        const ElementGrads eg = element_grads(m, t);
        const Point p0 = m.nodes[std::size_t(t.v[0])];
        const Point p1 = m.nodes[std::size_t(t.v[1])];
        const Point p2 = m.nodes[std::size_t(t.v[2])];
        const double v0 = u_h.values[std::size_t(t.v[0])];
        const double v1 = u_h.values[std::size_t(t.v[1])];
        const double v2 = u_h.values[std::size_t(t.v[2])];
        Point gh{0.0, 0.0};
        gh.x = v0 * eg.g[0].x + v1 * eg.g[1].x + v2 * eg.g[2].x;
        gh.y = v0 * eg.g[0].y + v1 * eg.g[1].y + v2 * eg.g[2].y;
        double acc_l2 = 0.0, acc_h1 = 0.0;
        for (const QuadPoint& q : rule) {
            const Point x = q.b0 * p0 + q.b1 * p1 + q.b2 * p2;
            const double uh = q.b0 * v0 + q.b1 * v1 + q.b2 * v2;
            const double du = eval(u, x.x, x.y) - uh;
            const double gx = eval(du_dx, x.x, x.y) - gh.x;
            const double gy = eval(du_dy, x.x, x.y) - gh.y;
            acc_l2 += q.w * du * du;
            acc_h1 += q.w * (gx * gx + gy * gy);
        }
        l2 += eg.area * acc_l2;
        h1 += eg.area * acc_h1;
    }
    return {std::sqrt(h1), std::sqrt(l2)};
}

std::vector<double> convergence_rate(const std::vector<double>& errors) {
    if (errors.size() < 2)
        throw Error("convergence_rate: need at least 2 errors, got " +
                    std::to_string(errors.size()));
    for (double e : errors)
        if (!(e > 0.0)) throw Error("convergence_rate: errors must be positive");
    std::vector<double> rates(errors.size() - 1);
    for (std::size_t j = 0; j + 1 < errors.size(); ++j)
        rates[j] = std::log2(errors[j] / errors[j + 1]);
    return rates;
}

double rho(Point x, std::span<const Point> corners) {
    double p = 1.0;
    for (const Point& q : corners) p *= distance(x, q);
    return p;
}

double weighted_k1_norm(const FeFunction& v, double a, std::span<const Point> corners) {
    const TriMesh& m = *v.mesh;
    const auto rule = triangle_rule(3);
    double sum = 0.0;
    for (const TriangleRecord& t : m.tris) {
        const ElementGrads eg = element_grads(m, t);
        const Point p0 = m.nodes[std::size_t(t.v[0])];
        const Point p1 = m.nodes[std::size_t(t.v[1])];
        const Point p2 = m.nodes[std::size_t(t.v[2])];
        const double v0 = v.values[std::size_t(t.v[0])];
        const double v1 = v.values[std::size_t(t.v[1])];
        const double v2 = v.values[std::size_t(t.v[2])];
        Point gh;
        gh.x = v0 * eg.g[0].x + v1 * eg.g[1].x + v2 * eg.g[2].x;
        gh.y = v0 * eg.g[0].y + v1 * eg.g[1].y + v2 * eg.g[2].y;
        const double grad2 = gh.x * gh.x + gh.y * gh.y;
        double acc = 0.0;
        for (const QuadPoint& q : rule) {
            const Point x = q.b0 * p0 + q.b1 * p1 + q.b2 * p2;
            const double w = rho(x, corners);
            const double uh = q.b0 * v0 + q.b1 * v1 + q.b2 * v2;
            acc += q.w * (std::pow(w, -2.0 * a) * uh * uh +
                          std::pow(w, 2.0 - 2.0 * a) * grad2);
        }
        sum += eg.area * acc;
    }
    return std::sqrt(sum);
}

double expected_theta_prime(const PolygonDomain& polygon, const GradingSpec& grading) {
    const double beta0 = polygon.regularity_index();
    if (grading.theta_given)
        return std::min(std::max(grading.theta, beta0), 1.0);
    double tp = 1.0;
    for (int i : polygon.singular_vertices()) {
        const double beta0_i = polygon.vertex_info()[std::size_t(i)].beta_threshold;
        const double kappa = grading.kappa[std::size_t(i)];
        tp = std::min(tp, beta0_i * std::log2(1.0 / kappa));
    }
    return tp;
}

} // namespace gfem
