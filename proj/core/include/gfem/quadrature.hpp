#ifndef GFEM_QUADRATURE_HPP
#define GFEM_QUADRATURE_HPP

#include <span>

#include "gfem/geometry.hpp"

namespace gfem {

struct QuadPoint {
    double b0, b1, b2; // barycentric coordinates (interior points only)
    double w;          // weights sum to 1; scale by triangle area
};

/// Gauss rules on triangles by requested order: 1 -> centroid (1 point),
/// 2 -> 3-point rule, 3 -> 7-point rule (degree-5 exact). Other orders are
/// rejected.
std::span<const QuadPoint> triangle_rule(int order);

/// Integrate f over the triangle (p0, p1, p2) with the given rule.
template <class F>
double integrate_triangle(std::span<const QuadPoint> rule, Point p0, Point p1, Point p2, F&& f) {
    const double area = 0.5 * std::abs(cross(p1 - p0, p2 - p0));
    double sum = 0.0;
    for (const QuadPoint& q : rule) {
        const Point p = q.b0 * p0 + q.b1 * p1 + q.b2 * p2;
        sum += q.w * f(p);
    }
    return area * sum;
}

} // namespace gfem

#endif
