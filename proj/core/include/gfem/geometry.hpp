#ifndef GFEM_GEOMETRY_HPP
#define GFEM_GEOMETRY_HPP

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfem {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Interior angles of a simple CCW polygon, one per vertex, in (0, 2*pi).
/// Throws on degenerate vertices (zero angle, repeated vertex) and on
/// crack-like vertices (angle within 1e-9 of 2*pi), naming the vertex.
std::vector<double> interior_angles(const std::vector<Point>& vertices);

struct VertexInfo {
    double interior_angle = 0.0; // radians
    bool is_singular = false;    // interior_angle > pi + 1e-12
    double beta_threshold = 0.0; // pi / interior_angle
};

/// Simple counter-clockwise polygon with per-vertex singularity metadata.
class PolygonDomain {
public:
    /// Validates: >= 3 vertices, simple, CCW, no degenerate vertices.
    explicit PolygonDomain(std::vector<Point> vertices);

    std::size_t size() const { return verts_.size(); }
    const std::vector<Point>& vertices() const { return verts_; }
    Point vertex(int i) const { return verts_[static_cast<std::size_t>(i)]; }
    const std::vector<VertexInfo>& vertex_info() const { return info_; }

    /// beta = min_i(pi / alpha_i, 1); equals 1 iff the polygon is convex.
    double regularity_index() const;
    std::vector<int> singular_vertices() const;
    bool is_convex() const { return singular_vertices().empty(); }

    double diameter() const { return diameter_; }
    /// Distance from p to the polygon boundary.
    double boundary_distance(Point p) const;
    /// True if p lies inside the polygon or on its boundary.
    bool contains(Point p) const;

private:
    std::vector<Point> verts_;
    std::vector<VertexInfo> info_;
    double diameter_ = 0.0;
};

/// Per-vertex grading parameters for the graded refinement.
/// kappa is canonical; convex vertices always use the midpoint rule
/// (kappa = 1/2). kappa_i = 2^(-theta/a_i).
struct GradingSpec {
    double theta = 1.0;
    bool theta_given = false;  // true when built from (theta, a)
    std::vector<double> a;     // per vertex
    std::vector<double> kappa; // per vertex, in (0, 1/2]

    /// Uniform midpoint refinement at every vertex (kappa = 1/2).
    static GradingSpec uniform(const PolygonDomain& poly);

    /// From (theta, a_i) per singular vertex. Requires 0 < a_i < beta0_i
    /// and a_i <= theta <= 1 for every singular vertex.
    static GradingSpec from_theta_a(const PolygonDomain& poly, double theta,
                                    const std::map<int, double>& a_per_vertex);

    /// Single kappa applied at every singular vertex; kappa in (0, 1/2].
    static GradingSpec from_kappa(const PolygonDomain& poly, double kappa);

    /// Per-singular-vertex kappa values; entries for convex vertices are
    /// rejected.
    static GradingSpec from_kappa_map(const PolygonDomain& poly,
                                      const std::map<int, double>& kappa_per_vertex);
};

/// make_grading per the (theta, a) parameterization.
inline GradingSpec make_grading(const PolygonDomain& poly, double theta,
                                const std::map<int, double>& a_per_vertex) {
    return GradingSpec::from_theta_a(poly, theta, a_per_vertex);
}

} // namespace gfem

#endif
