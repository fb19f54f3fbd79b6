#include "gfem/quadrature.hpp"

#include <array>
#include <cmath>

namespace gfem {

namespace {

const std::array<QuadPoint, 1>& rule1() {
    static const std::array<QuadPoint, 1> r = {{{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0}}};
    return r;
}

const std::array<QuadPoint, 3>& rule2() {
    static const std::array<QuadPoint, 3> r = {{
        {2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 2.0 / 3, 1.0 / 6, 1.0 / 3},
        {1.0 / 6, 1.0 / 6, 2.0 / 3, 1.0 / 3},
    }};
    return r;
}

// Radon's 7-point rule, degree-5 exact.
const std::array<QuadPoint, 7>& rule3() {
    static const std::array<QuadPoint, 7> r = [] {
        const double s15 = std::sqrt(15.0);
        const double b1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
        const double b2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
        const double a1 = 1.0 - 2.0 * b1, a2 = 1.0 - 2.0 * b2;
        return std::array<QuadPoint, 7>{{
            {1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40},
            {a1, b1, b1, w1},
            {b1, a1, b1, w1},
            {b1, b1, a1, w1},
            {a2, b2, b2, w2},
            {b2, a2, b2, w2},
            {b2, b2, a2, w2},
        }};
    }();
    return r;
}

} // namespace

std::span<const QuadPoint> triangle_rule(int order) {
    switch (order) {
    case 1: return rule1();
    case 2: return rule2();
    case 3: return rule3();
    default:
        throw Error("quadrature order must be 1, 2 or 3, got " + std::to_string(order));
    }
}

} // namespace gfem
