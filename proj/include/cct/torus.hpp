#pragma once

#include "cct/trimesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace cct {

// Torus of revolution about the z-axis: major radius R, minor radius r.
// Implicit form (sqrt(x^2 + y^2) - R)^2 + z^2 = r^2; embedding
// ((R + r cos th) cos ph, (R + r cos th) sin ph, r sin th).
struct TorusSpec {
    double R = 2.0;
    double r = 1.0;
};

inline void validate(const TorusSpec& spec) {
    if (!(spec.R > spec.r && spec.r > 0.0))
        throw Error("TorusSpec: requires R > r > 0");
}

inline double torus_implicit(const TorusSpec& spec, const Vec3& p) {
    const double rho = std::sqrt(p.x() * p.x() + p.y() * p.y());
    return (rho - spec.R) * (rho - spec.R) + p.z() * p.z() - spec.r * spec.r;
}

inline Vec3 torus_point(const TorusSpec& spec, double theta, double phi) {
    const double rho = spec.R + spec.r * std::cos(theta);
    return Vec3(rho * std::cos(phi), rho * std::sin(phi), spec.r * std::sin(theta));
}

namespace torus_detail {

// adaptive Simpson quadrature
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, m, fa, flm, fm);
    const double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, 48);
}

} // namespace torus_detail

// Conformal coordinate u(theta) = integral of r / (R + r cos t) dt, by
// adaptive Simpson quadrature.
inline double torus_u_of_theta(const TorusSpec& spec, double theta) {
    if (theta == 0.0) return 0.0;
    return torus_detail::integrate(
        [&](double t) { return spec.r / (spec.R + spec.r * std::cos(t)); }, 0.0, theta);
}

// Inverse of u(theta) by bisection on [0, 2*pi].
inline double torus_theta_of_u(const TorusSpec& spec, double u) {
    const double total = torus_u_of_theta(spec, 2.0 * kPi);
    double lo = 0.0, hi = 2.0 * kPi;
    double wrap = 0.0;
    while (u < 0.0) { u += total; wrap -= 2.0 * kPi; }
    while (u > total) { u -= total; wrap += 2.0 * kPi; }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (torus_u_of_theta(spec, mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) + wrap;
}

inline double modulus_closed_form(const TorusSpec& spec) {
    return spec.r / std::sqrt(spec.R * spec.R - spec.r * spec.r);
}

inline double modulus_quadrature(const TorusSpec& spec) {
    return torus_u_of_theta(spec, 2.0 * kPi) / (2.0 * kPi);
}

// Conformal modulus mu = r / sqrt(R^2 - r^2); evaluated both in closed form
// and by quadrature, cross-checked to 1e-10.
inline double conformal_modulus(const TorusSpec& spec) {
    validate(spec);
    const double closed = modulus_closed_form(spec);
    const double quad = modulus_quadrature(spec);
    if (std::abs(closed - quad) > 1e-10)
        throw Error("conformal_modulus: closed form and quadrature disagree");
    return closed;
}

// The R with mu(R, r) = 1, found by bisection and cross-checked against
// R = r * sqrt(2) to 1e-10.
inline TorusSpec solve_square_torus(double r) {
    if (!(r > 0.0)) throw Error("solve_square_torus: r must be > 0");
    double lo = r * (1.0 + 1e-12), hi = 10.0 * r;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        // mu decreases in R
        (modulus_closed_form({mid, r}) > 1.0 ? lo : hi) = mid;
        if (hi - lo < 1e-14 * r) break;
    }
    const double R = 0.5 * (lo + hi);
    if (std::abs(R - r * std::sqrt(2.0)) > 1e-10)
        throw Error("solve_square_torus: bisection disagrees with closed form");
    return {R, r};
}

struct Circle3 {
    Vec3 center;
    double radius = 0.0;
    Vec3 normal;  // unit plane normal
};

// The two circles cut by the bitangent plane through the origin containing
// the y-axis, tilted by sin(alpha) = r/R.  Both have radius R, centers at
// (0, +-r, 0).  Every returned circle is verified against the implicit
// equation at 64 sample points.
inline std::array<Circle3, 2> villarceau_circles(const TorusSpec& spec) {
    validate(spec);
    const double sa = spec.r / spec.R;
    const double ca = std::sqrt(1.0 - sa * sa);
    const Vec3 normal(sa, 0.0, -ca);
    std::array<Circle3, 2> out{Circle3{Vec3(0, spec.r, 0), spec.R, normal},
                               Circle3{Vec3(0, -spec.r, 0), spec.R, normal}};
    for (const Circle3& c : out) {
        // in-plane frame
        const Vec3 e1(ca, 0.0, sa);
        const Vec3 e2(0.0, 1.0, 0.0);
        for (int s = 0; s < 64; ++s) {
            const double t = 2.0 * kPi * s / 64.0;
            const Vec3 p = c.center + c.radius * (std::cos(t) * e1 + std::sin(t) * e2);
            if (std::abs(torus_implicit(spec, p)) > 1e-10 * spec.R * spec.R)
                throw Error("villarceau_circles: verification failed");
        }
    }
    return out;
}

namespace torus_detail {

// Intersections of two circles lying in distinct planes through the origin.
inline std::vector<Vec3> circle_circle_intersections(const Circle3& a, const Circle3& b) {
    const Vec3 d = a.normal.cross(b.normal);
    if (d.norm() < 1e-12) return {};
    const Vec3 dir = d.normalized();
    // points s * dir with |s * dir - a.center| = a.radius
    const double pb = dir.dot(a.center);
    const double disc = pb * pb - (a.center.squaredNorm() - a.radius * a.radius);
    if (disc < 0.0) return {};
    std::vector<Vec3> out;
    for (const double s : {pb - std::sqrt(disc), pb + std::sqrt(disc)}) {
        const Vec3 p = s * dir;
        if (std::abs((p - b.center).norm() - b.radius) < 1e-9 * (1.0 + b.radius))
            out.push_back(p);
    }
    return out;
}

inline Vec3 rotate_z(const Vec3& v, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
}

inline Circle3 rotate_z(const Circle3& c, double phi) {
    return {rotate_z(c.center, phi), c.radius, rotate_z(c.normal, phi)};
}

inline Circle3 mirror_family(const Circle3& c) {
    // reflect the plane in z -> -z: the other Villarceau family
    return {c.center, c.radius, Vec3(c.normal.x(), c.normal.y(), -c.normal.z())};
}

// Angle at p between the two circles, with both tangents oriented toward
// increasing azimuth.
inline double oriented_angle_deg(const Circle3& a, const Circle3& b, const Vec3& p) {
    const Vec3 e_phi = Vec3(-p.y(), p.x(), 0.0).normalized();
    Vec3 ta = a.normal.cross(p - a.center).normalized();
    Vec3 tb = b.normal.cross(p - b.center).normalized();
    if (ta.dot(e_phi) < 0) ta = -ta;
    if (tb.dot(e_phi) < 0) tb = -tb;
    return std::acos(clamp_unit(ta.dot(tb))) * 180.0 / kPi;
}

} // namespace torus_detail

struct VillarceauAngleReport {
    double angle_deg = 0.0;
    double spread_deg = 0.0;      // max - min over the measured configurations
    int configurations = 0;
    double closed_form_deg = 0.0; // acos(1 - 2 r^2 / R^2), derived cross-check
};

// Intersection angle between the two Villarceau families, measured from
// tangent vectors at numerically intersected configurations.  Constancy over
// the configurations is verified (spread < 1e-6 degrees), and the measured
// angle is cross-checked against the closed-form candidate to 1e-8.
inline VillarceauAngleReport villarceau_angle_report(const TorusSpec& spec) {
    validate(spec);
    const auto base = villarceau_circles(spec);
    VillarceauAngleReport rep;
    double lo = 1e300, hi = -1e300, sum = 0.0;
    for (int k = 0; k < 16; ++k) {
        const double phi = 2.0 * kPi * k / 16.0;
        for (const Circle3& a : base) {
            for (const Circle3& bb : base) {
                const Circle3 b = torus_detail::rotate_z(torus_detail::mirror_family(bb), phi);
                for (const Vec3& p : torus_detail::circle_circle_intersections(a, b)) {
                    const double ang = torus_detail::oriented_angle_deg(a, b, p);
                    lo = std::min(lo, ang);
                    hi = std::max(hi, ang);
                    sum += ang;
                    ++rep.configurations;
                }
            }
        }
    }
    if (rep.configurations < 16)
        throw Error("villarceau_angle: too few intersection configurations");
    rep.angle_deg = sum / rep.configurations;
    rep.spread_deg = hi - lo;
    if (rep.spread_deg > 1e-6)
        throw Error("villarceau_angle: angle not constant across configurations");
    rep.closed_form_deg =
        std::acos(clamp_unit(1.0 - 2.0 * spec.r * spec.r / (spec.R * spec.R))) * 180.0 / kPi;
    if (std::abs(rep.angle_deg - rep.closed_form_deg) > 1e-8)
        throw Error("villarceau_angle: closed-form cross-check failed");
    return rep;
}

inline double villarceau_angle(const TorusSpec& spec) {
    return villarceau_angle_report(spec).angle_deg;
}

// Angle between the closing conformal diagonal and the meridian direction,
// sampled on the embedded surface.
inline double meridian_diagonal_angle_deg(const TorusSpec& spec, int samples = 100) {
    validate(spec);
    const double mu = conformal_modulus(spec);
    double sum = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double theta = 2.0 * kPi * (s + 0.25) / samples;
        const double rho = spec.R + spec.r * std::cos(theta);
        // X_theta direction has length r, X_phi has length rho; the diagonal
        // advances du : dphi = mu : 1, i.e. dtheta = mu * rho / r per dphi
        const Vec3 xt = Vec3(-spec.r * std::sin(theta) * 1.0, 0.0, spec.r * std::cos(theta));
        const Vec3 xp = Vec3(0.0, rho, 0.0);  // at phi = 0
        const Vec3 diag = (mu * rho / spec.r) * xt + xp;
        sum += std::acos(clamp_unit(diag.normalized().dot(xt.normalized()))) * 180.0 / kPi;
    }
    return sum / samples;
}

// ---------------------------------------------------------------------------
// Conformally correct checker tiling of the torus.
// ---------------------------------------------------------------------------

// Build the (2,4,4) tiling mesh: an n x round(n*mu) grid of conformal
// squares, each split by both diagonals into four (90,45,45) triangles,
// mapped onto the embedded torus.  Each tiling triangle is subdivided into
// 16 mesh faces.  Requires even grid counts (checker closure) and a modulus
// commensurate with the grid.
inline TiledSurface tile_torus(const TorusSpec& spec, int n) {
    validate(spec);
    if (n < 2) throw Error("tile_torus: n must be >= 2");
    const double mu = conformal_modulus(spec);
    const int nu = static_cast<int>(std::llround(n * mu));
    if (std::abs(n * mu - nu) > 1e-6 * n || nu < 2)
        throw Error("tile_torus: incommensurate modulus (n*mu = " + std::to_string(n * mu) + ")");
    if (n % 2 != 0 || nu % 2 != 0)
        throw Error("tile_torus: checker closure needs even grid counts");

    const double total_u = torus_u_of_theta(spec, 2.0 * kPi);
    // lattice of 32nds of a cell in each direction, wrapped
    const int LU = 32 * nu, LP = 32 * n;
    std::unordered_map<std::uint64_t, int> vertex_of;
    TiledSurface out;
    std::vector<double> theta_of_row(LU, 0.0);
    std::vector<char> row_done(LU, 0);

    const auto vertex_id = [&](int iu, int ip) {
        iu = ((iu % LU) + LU) % LU;
        ip = ((ip % LP) + LP) % LP;
        const std::uint64_t key = (static_cast<std::uint64_t>(iu) << 32) | static_cast<std::uint32_t>(ip);
        auto it = vertex_of.find(key);
        if (it != vertex_of.end()) return it->second;
        if (!row_done[iu]) {
            theta_of_row[iu] = torus_theta_of_u(spec, total_u * iu / LU);
            row_done[iu] = 1;
        }
        const double phi = 2.0 * kPi * ip / LP;
        const int idx = out.mesh.vertex_count();
        out.mesh.vertices.push_back(torus_point(spec, theta_of_row[iu], phi));
        vertex_of.emplace(key, idx);
        return idx;
    };

    // subdivide triangle (a, b, c) in lattice coordinates into 4^2 faces
    const auto emit_subdivided = [&](std::array<std::array<int, 2>, 3> tri, int tile, int color) {
        constexpr int K = 4;
        for (int i = 0; i < K; ++i) {
            for (int j = 0; i + j < K; ++j) {
                const auto at = [&](int bi, int bj) {
                    const int bk = K - bi - bj;
                    return std::array<int, 2>{
                        (tri[0][0] * bi + tri[1][0] * bj + tri[2][0] * bk) / K,
                        (tri[0][1] * bi + tri[1][1] * bj + tri[2][1] * bk) / K};
                };
                const auto p00 = at(i, j), p10 = at(i + 1, j), p01 = at(i, j + 1);
                out.mesh.faces.push_back({vertex_id(p00[0], p00[1]),
                                          vertex_id(p10[0], p10[1]),
                                          vertex_id(p01[0], p01[1])});
                out.tile.push_back(tile);
                out.color.push_back(static_cast<std::uint8_t>(color));
                if (i + j < K - 1) {
                    const auto p11 = at(i + 1, j + 1);
                    out.mesh.faces.push_back({vertex_id(p10[0], p10[1]),
                                              vertex_id(p11[0], p11[1]),
                                              vertex_id(p01[0], p01[1])});
                    out.tile.push_back(tile);
                    out.color.push_back(static_cast<std::uint8_t>(color));
                }
            }
        }
    };

    int tile_id = 0;
    for (int ju = 0; ju < nu; ++ju) {
        for (int jp = 0; jp < n; ++jp) {
            const int u0 = 32 * ju, u1 = 32 * (ju + 1);
            const int p0 = 32 * jp, p1 = 32 * (jp + 1);
            const std::array<int, 2> c{u0 + 16, p0 + 16};
            // four triangles around the center; bottom/top use s = 0,
            // left/right s = 1; color = (ju + jp + s) mod 2
            const std::array<std::array<std::array<int, 2>, 3>, 4> tris{{
                {{{u0, p0}, {u1, p0}, c}},   // phi = p0 side
                {{{u1, p0}, {u1, p1}, c}},   // u = u1 side
                {{{u1, p1}, {u0, p1}, c}},   // phi = p1 side
                {{{u0, p1}, {u0, p0}, c}},   // u = u0 side
            }};
            const std::array<int, 4> s{0, 1, 0, 1};
            for (int k = 0; k < 4; ++k)
                emit_subdivided(tris[k], tile_id + k, (ju + jp + s[k]) % 2);
            tile_id += 4;
        }
    }
    out.genus = 1;

    // orient consistently: outward normals (positive signed volume)
    if (signed_volume(out.mesh) < 0)
        for (auto& t : out.mesh.faces) std::swap(t[1], t[2]);
    return out;
}

// Maximum distance of the mapped conformal diagonal from its best-fit
// circle, plus the fitted radius.  The diagonal wraps once around both
// directions: (u, phi) = (total_u * t, 2*pi * t).
struct CircleFitReport {
    double max_residual = 0.0;
    double radius = 0.0;
    Vec3 center;
    Vec3 normal;
};

inline CircleFitReport diagonal_circle_fit(const TorusSpec& spec, int samples = 256,
                                           bool anti = false) {
    validate(spec);
    const double total_u = torus_u_of_theta(spec, 2.0 * kPi);
    std::vector<Vec3> pts;
    pts.reserve(samples);
    for (int s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) / samples;
        const double theta = torus_theta_of_u(spec, total_u * t);
        const double phi = 2.0 * kPi * t * (anti ? -1.0 : 1.0);
        pts.push_back(torus_point(spec, theta, phi));
    }
    // plane through centroid by least squares
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());
    Eigen::MatrixXd A(pts.size(), 3);
    for (size_t i = 0; i < pts.size(); ++i) A.row(i) = (pts[i] - centroid).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
    const Vec3 normal = svd.matrixV().col(2);
    Vec3 e1 = svd.matrixV().col(0), e2 = svd.matrixV().col(1);

    // algebraic in-plane circle fit (Kasa)
    Eigen::MatrixXd M(pts.size(), 3);
    Eigen::VectorXd rhs(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec3 d = pts[i] - centroid;
        const double x = d.dot(e1), y = d.dot(e2);
        M(i, 0) = 2.0 * x;
        M(i, 1) = 2.0 * y;
        M(i, 2) = 1.0;
        rhs(i) = x * x + y * y;
    }
    const Eigen::Vector3d sol = M.colPivHouseholderQr().solve(rhs);
    const double cx = sol(0), cy = sol(1);
    CircleFitReport rep;
    rep.radius = std::sqrt(std::max(0.0, sol(2) + cx * cx + cy * cy));
    rep.center = centroid + cx * e1 + cy * e2;
    rep.normal = normal;
    for (const Vec3& p : pts) {
        const Vec3 d = p - rep.center;
        const double in_plane = std::hypot(d.dot(e1), d.dot(e2));
        const double off_plane = d.dot(normal);
        rep.max_residual = std::max(rep.max_residual,
                                    std::hypot(in_plane - rep.radius, off_plane));
    }
    return rep;
}

} // namespace cct
