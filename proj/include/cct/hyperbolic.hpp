#pragma once

#include "cct/geometry.hpp"

#include <array>

namespace cct {

class TriangleInequalityError : public Error {
public:
    TriangleInequalityError(double a, double b, double c)
        : Error("hyperbolic triangle inequality violated: (" + std::to_string(a) + ", " +
                std::to_string(b) + ", " + std::to_string(c) + ")"),
          sides{a, b, c} {}
    std::array<double, 3> sides;
};

inline bool hyp_triangle_inequality(double a, double b, double c) {
    return a > 0 && b > 0 && c > 0 && a + b > c && b + c > a && a + c > b;
}

// Angles of the hyperbolic triangle with side lengths (a, b, c); the first
// angle is opposite side a:  cos(alpha) = (cosh b cosh c - cosh a) / (sinh b sinh c).
inline std::array<double, 3> hyp_triangle_angles(double a, double b, double c) {
    if (!hyp_triangle_inequality(a, b, c)) throw TriangleInequalityError(a, b, c);
    const double cha = std::cosh(a), chb = std::cosh(b), chc = std::cosh(c);
    const double sha = std::sinh(a), shb = std::sinh(b), shc = std::sinh(c);
    return {std::acos(clamp_unit((chb * chc - cha) / (shb * shc))),
            std::acos(clamp_unit((chc * cha - chb) / (shc * sha))),
            std::acos(clamp_unit((cha * chb - chc) / (sha * shb)))};
}

// Side opposite alpha of the hyperbolic triangle with angles (alpha, beta, gamma):
// cosh a = (cos alpha + cos beta cos gamma) / (sin beta sin gamma).
inline double hyp_side_from_angles(double alpha, double beta, double gamma) {
    const double x = (std::cos(alpha) + std::cos(beta) * std::cos(gamma)) /
                     (std::sin(beta) * std::sin(gamma));
    return std::acosh(std::max(1.0, x));
}

// Point at distance d from `from`, along the geodesic whose initial unit
// tangent at `from` is `dir` (<from,dir> = 0, <dir,dir> = 1).
inline Vec3 hyp_exp(const Vec3& from, const Vec3& dir, double d) {
    return std::cosh(d) * from + std::sinh(d) * dir;
}

// Unit tangent at p pointing toward q.
inline Vec3 hyp_tangent(const Vec3& p, const Vec3& q) {
    Vec3 t = q + minkowski_dot(p, q) * p;
    return t / std::sqrt(std::max(1e-300, minkowski_dot(t, t)));
}

// Angle at p between geodesics toward q and toward r.
inline double hyp_angle(const Vec3& p, const Vec3& q, const Vec3& r) {
    const Vec3 u = hyp_tangent(p, q), v = hyp_tangent(p, r);
    return std::acos(clamp_unit(minkowski_dot(u, v)));
}

// Point on the geodesic from p to q at arc-length parameter s in [0, d(p,q)].
inline Vec3 hyp_interpolate(const Vec3& p, const Vec3& q, double s) {
    const double d = hyperbolic_distance(p, q);
    if (d < 1e-15) return p;
    return (std::sinh(d - s) * p + std::sinh(s) * q) / std::sinh(d);
}

// Reflection across the geodesic with spacelike normal n.
inline Vec3 hyp_reflect(const Vec3& p, const Vec3& n) {
    return p - 2.0 * (minkowski_dot(p, n) / minkowski_dot(n, n)) * n;
}

// Spacelike normal of the geodesic through two hyperboloid points.
inline Vec3 geodesic_normal(const Vec3& p, const Vec3& q) {
    return spacelike_normalize(minkowski_cross(p, q));
}

// Place the apex of a triangle over the oriented segment p -> q: the
// returned point is at distance dp from p and dq from q, on the side of
// the geodesic p-q where <x, mcross(p,q)> has the requested sign.
inline Vec3 hyp_place_third(const Vec3& p, const Vec3& q, double dp, double dq,
                            bool positive_side) {
    const double g = minkowski_dot(p, q);  // = -cosh d(p,q)
    const double det = 1.0 - g * g;        // = -sinh^2 < 0
    if (det >= 0.0) throw Error("hyp_place_third: coincident base points");
    const double c1 = std::cosh(dp), c2 = std::cosh(dq);
    // <R,p> = -c1, <R,q> = -c2 with R = alpha p + beta q + gamma n
    const double beta = (c2 + g * c1) / det;
    const double alpha = c1 + g * beta;
    const Vec3 n = minkowski_cross(p, q);
    const double nn = minkowski_dot(n, n);
    // <R,R> = -1 fixes gamma up to sign
    double gamma2 = (alpha * alpha + beta * beta - 2.0 * alpha * beta * g - 1.0) / nn;
    if (gamma2 < 0.0) gamma2 = 0.0;  // roundoff: degenerate was rejected upstream
    const double gamma = std::sqrt(gamma2) * (positive_side ? 1.0 : -1.0);
    return hyperboloid_normalize(alpha * p + beta * q + gamma * n);
}

} // namespace cct
