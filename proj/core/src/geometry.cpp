#include "gfem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gfem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSingularTol = 1e-12;
constexpr double kDegenerateAngle = 1e-9;

double signed_area(const std::vector<Point>& v) {
    double s = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % n];
        s += cross(p, q);
    }
    return 0.5 * s;
}

// Proper or improper intersection of segments [a,b] and [c,d], excluding
// shared endpoints of adjacent edges (handled by the caller).
bool segments_intersect(Point a, Point b, Point c, Point d) {
    auto orient = [](Point p, Point q, Point r) { return cross(q - p, r - p); };
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Point p, Point q, Point r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + t * ab);
}

} // namespace

std::vector<double> interior_angles(const std::vector<Point>& vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw Error("polygon needs at least 3 vertices, got " + std::to_string(n));

    double diam = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            diam = std::max(diam, distance(vertices[i], vertices[j]));
    if (diam == 0.0) throw Error("polygon is degenerate: all vertices coincide");

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        if (distance(vertices[i], vertices[j]) <= 1e-14 * diam)
            throw Error("repeated vertex at index " + std::to_string(j));
    }

    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point prev = vertices[(i + n - 1) % n];
        const Point next = vertices[(i + 1) % n];
        const Point a = next - vertices[i];
        const Point b = prev - vertices[i];
        // CCW polygon keeps the interior on the left of a; the interior
        // angle is the CCW rotation taking a onto b.
        double ang = std::atan2(cross(a, b), dot(a, b));
        if (ang <= 0.0) ang += kTwoPi;
        if (ang <= kDegenerateAngle)
            throw Error("degenerate (zero) interior angle at vertex " + std::to_string(i));
        if (ang >= kTwoPi - kDegenerateAngle)
            throw Error("crack-like interior angle (~2*pi) at vertex " + std::to_string(i) +
                        " is not supported");
        angles[i] = ang;
    }
    return angles;
}

PolygonDomain::PolygonDomain(std::vector<Point> vertices) : verts_(std::move(vertices)) {
    const std::size_t n = verts_.size();
    std::vector<double> angles = interior_angles(verts_); // validates degeneracies

    if (signed_area(verts_) <= 0.0)
        throw Error("polygon must be counter-clockwise (signed area > 0)");

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(verts_[i], verts_[(i + 1) % n], verts_[j],
                                   verts_[(j + 1) % n]))
                throw Error("polygon is not simple: edges " + std::to_string(i) + " and " +
                            std::to_string(j) + " intersect");
        }
    }

    double ext_sum = 0.0;
    for (double a : angles) ext_sum += std::numbers::pi - a;
    if (std::abs(ext_sum - kTwoPi) > 1e-10)
        throw Error("exterior angle sum is " + std::to_string(ext_sum) +
                    ", expected 2*pi; polygon is invalid");

    info_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        info_[i].interior_angle = angles[i];
        info_[i].is_singular = angles[i] > std::numbers::pi + kSingularTol;
        info_[i].beta_threshold = std::numbers::pi / angles[i];
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            diameter_ = std::max(diameter_, distance(verts_[i], verts_[j]));
}

double PolygonDomain::regularity_index() const {
    double beta = 1.0;
    for (const VertexInfo& v : info_) beta = std::min(beta, v.beta_threshold);
    return beta;
}

std::vector<int> PolygonDomain::singular_vertices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < info_.size(); ++i)
        if (info_[i].is_singular) out.push_back(static_cast<int>(i));
    return out;
}

double PolygonDomain::boundary_distance(Point p) const {
    double d = std::numeric_limits<double>::max();
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_distance(p, verts_[i], verts_[(i + 1) % n]));
    return d;
}

bool PolygonDomain::contains(Point p) const {
    if (boundary_distance(p) <= 1e-12 * diameter_) return true;
    // Crossing number along the +x ray.
    bool inside = false;
    const std::size_t n = verts_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = verts_[i];
        const Point& b = verts_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

GradingSpec GradingSpec::uniform(const PolygonDomain& poly) {
    GradingSpec g;
    g.theta = 1.0;
    g.a.assign(poly.size(), 1.0);
    g.kappa.assign(poly.size(), 0.5);
    return g;
}

GradingSpec GradingSpec::from_theta_a(const PolygonDomain& poly, double theta,
                                      const std::map<int, double>& a_per_vertex) {
    if (!(theta > 0.0) || theta > 1.0)
        throw Error("grading: theta must lie in (0, 1], got " + std::to_string(theta));
    GradingSpec g = uniform(poly);
    g.theta = theta;
    g.theta_given = true;
    g.a.assign(poly.size(), theta); // a = theta at convex vertices -> kappa = 1/2
    for (const auto& [idx, ai] : a_per_vertex) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= poly.size())
            throw Error("grading: vertex index " + std::to_string(idx) + " out of range");
        const VertexInfo& info = poly.vertex_info()[static_cast<std::size_t>(idx)];
        if (!info.is_singular)
            throw Error("grading: vertex " + std::to_string(idx) +
                        " is not singular; grading applies to singular vertices only");
        if (!(ai > 0.0))
            throw Error("grading: a must be positive at vertex " + std::to_string(idx));
        if (ai >= info.beta_threshold)
            throw Error("grading: a = " + std::to_string(ai) + " at vertex " +
                        std::to_string(idx) + " must be < beta0 = " +
                        std::to_string(info.beta_threshold));
        if (ai > theta)
            throw Error("grading: need a <= theta <= 1, got a = " + std::to_string(ai) +
                        ", theta = " + std::to_string(theta));
        g.a[static_cast<std::size_t>(idx)] = ai;
        g.kappa[static_cast<std::size_t>(idx)] = std::exp2(-theta / ai);
    }
    return g;
}

GradingSpec GradingSpec::from_kappa(const PolygonDomain& poly, double kappa) {
    std::map<int, double> per_vertex;
    for (int idx : poly.singular_vertices()) per_vertex[idx] = kappa;
    if (per_vertex.empty() && !(kappa > 0.0 && kappa <= 0.5))
        throw Error("grading: kappa must lie in (0, 1/2], got " + std::to_string(kappa));
    return from_kappa_map(poly, per_vertex);
}

GradingSpec GradingSpec::from_kappa_map(const PolygonDomain& poly,
                                        const std::map<int, double>& kappa_per_vertex) {
    GradingSpec g = uniform(poly);
    for (const auto& [idx, k] : kappa_per_vertex) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= poly.size())
            throw Error("grading: vertex index " + std::to_string(idx) + " out of range");
        const VertexInfo& info = poly.vertex_info()[static_cast<std::size_t>(idx)];
        if (!info.is_singular)
            throw Error("grading: vertex " + std::to_string(idx) +
                        " is not singular; kappa applies to singular vertices only");
        if (!(k > 0.0 && k <= 0.5))
            throw Error("grading: kappa must lie in (0, 1/2], got " + std::to_string(k) +
                        " at vertex " + std::to_string(idx));
        g.kappa[static_cast<std::size_t>(idx)] = k;
        // Stored (theta, a) equivalent with theta = 1: kappa = 2^(-1/a).
        g.a[static_cast<std::size_t>(idx)] = (k == 0.5) ? 1.0 : -1.0 / std::log2(k);
    }
    return g;
}

} // namespace gfem
