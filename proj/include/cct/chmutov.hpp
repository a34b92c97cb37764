#pragma once

#include "cct/geometry.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace cct {

// The fixed degree-4 contour field
//
//   F(x,y,z) = 8(x^4 + y^4 + z^4) - 8(x^2 + y^2 + z^2) + 3,
//
// a sum of degree-4 Chebyshev polynomials, one per coordinate.  It is
// invariant under all 48 signed coordinate permutations.  Level sets S(c)
// are smooth for c outside the critical values {3, 1, -1, -3}.
struct ContourField {
    static constexpr int degree = 4;

    static double eval(const Vec3& p) {
        double s = 3.0;
        for (int i = 0; i < 3; ++i) {
            const double t2 = p[i] * p[i];
            s += 8.0 * t2 * t2 - 8.0 * t2;
        }
        return s;
    }

    static Vec3 gradient(const Vec3& p) {
        Vec3 g;
        for (int i = 0; i < 3; ++i) g[i] = 32.0 * p[i] * p[i] * p[i] - 16.0 * p[i];
        return g;
    }
};

inline double field(const Vec3& p) { return ContourField::eval(p); }
inline Vec3 field_gradient(const Vec3& p) { return ContourField::gradient(p); }

// A singular point of a contour surface: grad F = 0, F = value.
struct Node {
    Vec3 position;
    double value = 0.0;
};

// All critical points of F with critical value c.  Per coordinate the only
// critical parameters are {0, +-1/sqrt(2)} with values 0 and -2, so a
// critical point with k coordinates at +-1/sqrt(2) has value 3 - 2k.
// Nonempty only for c in {3, 1, -1, -3}.
inline std::vector<Node> find_nodes(double c) {
    std::vector<Node> nodes;
    const double t = 1.0 / std::sqrt(2.0);
    for (int k = 0; k <= 3; ++k) {
        const double value = 3.0 - 2.0 * k;
        if (value != c) continue;
        // choose which k coordinates are nonzero, then their signs
        for (int mask = 0; mask < 8; ++mask) {
            if ((mask & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1) != k) continue;
            const int nsigns = 1 << k;
            for (int s = 0; s < nsigns; ++s) {
                Vec3 p = Vec3::Zero();
                int bit = 0;
                for (int i = 0; i < 3; ++i) {
                    if (mask & (1 << i)) {
                        p[i] = ((s >> bit) & 1) ? -t : t;
                        ++bit;
                    }
                }
                nodes.push_back({p, value});
            }
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
        if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
        if (a.position.y() != b.position.y()) return a.position.y() < b.position.y();
        return a.position.z() < b.position.z();
    });
    return nodes;
}

// Rotation axes of the cube, as unnormalized directions through the origin.
enum class Axis { face, edge, vertex };

inline Vec3 axis_direction(Axis axis) {
    switch (axis) {
        case Axis::face: return Vec3(1, 0, 0);
        case Axis::edge: return Vec3(1, 1, 0);
        default: return Vec3(1, 1, 1);
    }
}

// Positive parameters t with F(t * d) = c along the unnormalized axis
// direction d.  The restriction of F to the axis is a * t^4 - a * t^2 + 3
// with a = 8, 16, 24 for face, edge, vertex; solve as a quadratic in t^2.
// Empty when there is no real intersection.
inline std::vector<double> axis_intersections(double c, Axis axis) {
    if (!(c > -1.0 && c < 1.0)) throw Error("axis_intersections: c must lie in (-1, 1)");
    const double a = axis == Axis::face ? 8.0 : (axis == Axis::edge ? 16.0 : 24.0);
    const double disc = a * a - 4.0 * a * (3.0 - c);
    if (disc < 0.0) return {};
    const double root = std::sqrt(disc);
    std::vector<double> out;
    for (const double s : {(a - root) / (2.0 * a), (a + root) / (2.0 * a)})
        if (s > 0.0) out.push_back(std::sqrt(s));
    std::sort(out.begin(), out.end());
    return out;
}

class ProjectionError : public Error {
public:
    ProjectionError(const std::string& what, const Vec3& last)
        : Error(what), last_iterate(last) {}
    Vec3 last_iterate;
};

// Damped Newton projection of p onto S(c) along the gradient line.
// Throws ProjectionError (carrying the last iterate) on a vanishing
// gradient or non-convergence.
inline Vec3 project_to_contour(Vec3 p, double c, double tol = 1e-12, int max_iters = 50) {
    for (int it = 0; it < max_iters; ++it) {
        const double f = field(p) - c;
        if (std::abs(f) < tol) return p;
        const Vec3 g = field_gradient(p);
        const double g2 = g.squaredNorm();
        if (g2 < 1e-18)
            throw ProjectionError("project_to_contour: vanishing gradient", p);
        Vec3 step = -(f / g2) * g;
        // damp: never move farther than one unit in a single step
        const double n = step.norm();
        if (n > 1.0) step *= 1.0 / n;
        p += step;
    }
    if (std::abs(field(p) - c) < tol) return p;
    throw ProjectionError("project_to_contour: no convergence", p);
}

// The 27 critical points of F regardless of level, with Morse index
// (number of negative Hessian eigenvalues).  Used for Euler characteristic
// cross-checks: chi(S(c)) = 2 * sum_{value < c} (-1)^index.
struct CriticalClass {
    int index = 0;       // Morse index
    int count = 0;       // number of critical points in the class
    double value = 0.0;  // critical value
};

inline std::array<CriticalClass, 4> critical_classes() {
    // k nonzero coordinates -> index 3 - k, count C(3,k) * 2^k, value 3 - 2k
    return {{{3, 1, 3.0}, {2, 6, 1.0}, {1, 12, -1.0}, {0, 8, -3.0}}};
}

inline int euler_characteristic_of_contour(double c) {
    int chi_sublevel = 0;
    for (const auto& cc : critical_classes())
        if (cc.value < c) chi_sublevel += (cc.index % 2 == 0 ? cc.count : -cc.count);
    return 2 * chi_sublevel;
}

} // namespace cct
