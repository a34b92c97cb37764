#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cct {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

// Base class for all domain errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.14159265358979323846;

// Minkowski form of signature (+,+,-) used by the hyperboloid model
// H^2 = { p : <p,p> = -1, p.z > 0 }.
inline double minkowski_dot(const Vec3& a, const Vec3& b) {
    return a.x() * b.x() + a.y() * b.y() - a.z() * b.z();
}

// Minkowski cross product: <mcross(a,b), a> = <mcross(a,b), b> = 0.
inline Vec3 minkowski_cross(const Vec3& a, const Vec3& b) {
    Vec3 c = a.cross(b);
    c.z() = -c.z();
    return c;
}

// Rescale a timelike vector onto the hyperboloid sheet t > 0.
inline Vec3 hyperboloid_normalize(const Vec3& p) {
    const double q = -minkowski_dot(p, p);
    if (q <= 0.0) throw Error("hyperboloid_normalize: vector is not timelike");
    Vec3 r = p / std::sqrt(q);
    if (r.z() < 0.0) r = -r;
    return r;
}

// Unit spacelike normal (geodesic plane normal).
inline Vec3 spacelike_normalize(const Vec3& n) {
    const double q = minkowski_dot(n, n);
    if (q <= 0.0) throw Error("spacelike_normalize: vector is not spacelike");
    return n / std::sqrt(q);
}

inline double hyperbolic_distance(const Vec3& p, const Vec3& q) {
    const double c = -minkowski_dot(p, q);
    return std::acosh(std::max(1.0, c));
}

// Poincare disk projection of a hyperboloid point.
inline Vec2 poincare_disk(const Vec3& p) {
    return Vec2(p.x() / (1.0 + p.z()), p.y() / (1.0 + p.z()));
}

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

} // namespace cct
