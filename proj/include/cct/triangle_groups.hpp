#pragma once

#include "cct/hyperbolic.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace cct {

struct Signature {
    int p = 2, q = 2, r = 2;
};

enum class TileGeometry { sphere, euclidean, hyperbolic };

// Classification by the angle sum pi/p + pi/q + pi/r vs pi, done exactly
// on integers: qr + pr + pq compared with pqr.
inline TileGeometry classify(const Signature& sig) {
    if (sig.p < 2 || sig.q < 2 || sig.r < 2)
        throw Error("classify: signature entries must be >= 2");
    const long long s = static_cast<long long>(sig.q) * sig.r +
                        static_cast<long long>(sig.p) * sig.r +
                        static_cast<long long>(sig.p) * sig.q;
    const long long t = static_cast<long long>(sig.p) * sig.q * sig.r;
    if (s > t) return TileGeometry::sphere;
    if (s == t) return TileGeometry::euclidean;
    return TileGeometry::hyperbolic;
}

// One triangle of a reflection tiling.  Vertices live in the geometry's
// model: unit sphere, z = 0 plane, or unit hyperboloid.
struct Tile {
    std::array<Vec3, 3> verts;
    std::uint8_t color = 1;  // 1 white seed, flips per reflection
    int generation = 0;      // reflection word length
};

namespace tiling_detail {

inline Vec3 sph_tangent(const Vec3& p, const Vec3& q) {
    Vec3 t = q - p.dot(q) * p;
    return t.normalized();
}

inline double tile_angle(const Tile& t, int corner, TileGeometry geo) {
    const Vec3& a = t.verts[corner];
    const Vec3& b = t.verts[(corner + 1) % 3];
    const Vec3& c = t.verts[(corner + 2) % 3];
    switch (geo) {
        case TileGeometry::sphere: {
            const Vec3 u = sph_tangent(a, b), v = sph_tangent(a, c);
            return std::acos(clamp_unit(u.dot(v)));
        }
        case TileGeometry::euclidean: {
            const Vec3 u = (b - a).normalized(), v = (c - a).normalized();
            return std::acos(clamp_unit(u.dot(v)));
        }
        default:
            return hyp_angle(a, b, c);
    }
}

inline double side_length(const Vec3& a, const Vec3& b, TileGeometry geo) {
    switch (geo) {
        case TileGeometry::sphere: return std::acos(clamp_unit(a.dot(b)));
        case TileGeometry::euclidean: return (a - b).norm();
        default: return hyperbolic_distance(a, b);
    }
}

inline Vec3 reflect_point(const Vec3& p, const Vec3& ea, const Vec3& eb, TileGeometry geo) {
    switch (geo) {
        case TileGeometry::sphere: {
            const Vec3 n = ea.cross(eb).normalized();
            return p - 2.0 * p.dot(n) * n;
        }
        case TileGeometry::euclidean: {
            const Vec3 d = (eb - ea).normalized();
            const Vec3 v = p - ea;
            Vec3 r = ea + 2.0 * v.dot(d) * d - v;
            r.z() = 0.0;
            return r;
        }
        default:
            return hyp_reflect(p, minkowski_cross(ea, eb));
    }
}

// Incenter with trigonometric barycentric weights; the canonical point used
// for deduplication.
inline Vec3 incenter(const Tile& t, TileGeometry geo) {
    const double a = side_length(t.verts[1], t.verts[2], geo);
    const double b = side_length(t.verts[0], t.verts[2], geo);
    const double c = side_length(t.verts[0], t.verts[1], geo);
    switch (geo) {
        case TileGeometry::sphere:
            return (std::sin(a) * t.verts[0] + std::sin(b) * t.verts[1] +
                    std::sin(c) * t.verts[2]).normalized();
        case TileGeometry::euclidean:
            return (a * t.verts[0] + b * t.verts[1] + c * t.verts[2]) / (a + b + c);
        default:
            return hyperboloid_normalize(std::sinh(a) * t.verts[0] +
                                         std::sinh(b) * t.verts[1] +
                                         std::sinh(c) * t.verts[2]);
    }
}

struct PointKey {
    std::int64_t x, y, z;
    bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
    size_t operator()(const PointKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (const std::int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

inline PointKey round_key(const Vec3& p, double quantum = 1e-7) {
    return {static_cast<std::int64_t>(std::llround(p.x() / quantum)),
            static_cast<std::int64_t>(std::llround(p.y() / quantum)),
            static_cast<std::int64_t>(std::llround(p.z() / quantum))};
}

inline Vec3 edge_midpoint(const Vec3& a, const Vec3& b, TileGeometry geo) {
    switch (geo) {
        case TileGeometry::sphere: return (a + b).normalized();
        case TileGeometry::euclidean: return 0.5 * (a + b);
        default: return hyperboloid_normalize(a + b);
    }
}

} // namespace tiling_detail

// Canonical seed triangle with angles (pi/p, pi/q, pi/r).  Hyperbolic and
// spherical sides follow the dual law of cosines; the euclidean triangle is
// scaled so its shortest side has length 1.
inline Tile base_triangle(const Signature& sig) {
    const TileGeometry geo = classify(sig);
    const double alpha = kPi / sig.p, beta = kPi / sig.q, gamma = kPi / sig.r;
    Tile t;
    switch (geo) {
        case TileGeometry::hyperbolic: {
            const double b = hyp_side_from_angles(beta, gamma, alpha);   // opposite beta
            const double c = hyp_side_from_angles(gamma, alpha, beta);   // opposite gamma
            t.verts[0] = Vec3(0, 0, 1);
            t.verts[1] = Vec3(std::sinh(c), 0, std::cosh(c));
            t.verts[2] = Vec3(std::sinh(b) * std::cos(alpha),
                              std::sinh(b) * std::sin(alpha), std::cosh(b));
            break;
        }
        case TileGeometry::sphere: {
            const auto side = [](double a0, double b0, double g0) {
                return std::acos(clamp_unit((std::cos(a0) + std::cos(b0) * std::cos(g0)) /
                                            (std::sin(b0) * std::sin(g0))));
            };
            const double b = side(beta, gamma, alpha), c = side(gamma, alpha, beta);
            t.verts[0] = Vec3(0, 0, 1);
            t.verts[1] = Vec3(std::sin(c), 0, std::cos(c));
            t.verts[2] = Vec3(std::sin(b) * std::cos(alpha),
                              std::sin(b) * std::sin(alpha), std::cos(b));
            break;
        }
        default: {
            // euclidean: sides proportional to the opposite sines
            const double sa = std::sin(alpha), sb = std::sin(beta), sg = std::sin(gamma);
            const double scale = 1.0 / std::min({sa, sb, sg});
            const double b = sb * scale, c = sg * scale;
            t.verts[0] = Vec3(0, 0, 0);
            t.verts[1] = Vec3(c, 0, 0);
            t.verts[2] = Vec3(b * std::cos(alpha), b * std::sin(alpha), 0);
            break;
        }
    }
    return t;
}

// Breadth-first reflection tiling up to the given word length.  Duplicates
// are removed by the rounded incenter key; colors flip with every
// reflection.  Throws when the tile cap is exceeded.
inline std::vector<Tile> generate_tiling(const Signature& sig, int depth,
                                         std::size_t tile_cap = 1000000) {
    if (depth < 0) throw Error("generate_tiling: depth must be >= 0");
    const TileGeometry geo = classify(sig);
    std::vector<Tile> tiles;
    std::unordered_map<tiling_detail::PointKey, int, tiling_detail::PointKeyHash> seen;

    Tile seed = base_triangle(sig);
    seen.emplace(tiling_detail::round_key(tiling_detail::incenter(seed, geo)), 0);
    tiles.push_back(seed);
    std::size_t head = 0;
    while (head < tiles.size()) {
        const Tile cur = tiles[head++];
        if (cur.generation == depth) continue;
        for (int e = 0; e < 3; ++e) {
            const Vec3& ea = cur.verts[e];
            const Vec3& eb = cur.verts[(e + 1) % 3];
            Tile nxt;
            for (int s = 0; s < 3; ++s)
                nxt.verts[s] = tiling_detail::reflect_point(cur.verts[s], ea, eb, geo);
            nxt.color = cur.color ^ 1;
            nxt.generation = cur.generation + 1;
            const auto key = tiling_detail::round_key(tiling_detail::incenter(nxt, geo));
            if (seen.contains(key)) continue;
            if (tiles.size() >= tile_cap)
                throw Error("generate_tiling: tile cap exceeded");
            seen.emplace(key, static_cast<int>(tiles.size()));
            tiles.push_back(std::move(nxt));
        }
    }
    return tiles;
}

// Histogram of tile counts per breadth-first distance from the seed over
// the edge-adjacency graph.
inline std::vector<int> ring_counts(const std::vector<Tile>& tiles) {
    if (tiles.empty()) return {};
    const TileGeometry geo = [&] {
        // infer the model from the seed's vertex norms
        const double n = tiles[0].verts[0].norm();
        const double m = minkowski_dot(tiles[0].verts[0], tiles[0].verts[0]);
        if (std::abs(m + 1.0) < 1e-9 && tiles[0].verts[0].z() >= 1.0) return TileGeometry::hyperbolic;
        if (std::abs(n - 1.0) < 1e-9) return TileGeometry::sphere;
        return TileGeometry::euclidean;
    }();

    std::unordered_map<tiling_detail::PointKey, std::vector<int>, tiling_detail::PointKeyHash>
        edge_tiles;
    for (size_t i = 0; i < tiles.size(); ++i)
        for (int e = 0; e < 3; ++e)
            edge_tiles[tiling_detail::round_key(tiling_detail::edge_midpoint(
                            tiles[i].verts[e], tiles[i].verts[(e + 1) % 3], geo))]
                .push_back(static_cast<int>(i));

    std::vector<std::vector<int>> adj(tiles.size());
    for (const auto& [key, ids] : edge_tiles)
        for (const int a : ids)
            for (const int b : ids)
                if (a != b) adj[a].push_back(b);

    std::vector<int> dist(tiles.size(), -1);
    std::deque<int> queue{0};
    dist[0] = 0;
    int max_d = 0;
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (const int j : adj[i])
            if (dist[j] < 0) {
                dist[j] = dist[i] + 1;
                max_d = std::max(max_d, dist[j]);
                queue.push_back(j);
            }
    }
    std::vector<int> counts(max_d + 1, 0);
    for (const int d : dist)
        if (d >= 0) ++counts[d];
    return counts;
}

// Spherical area by angular excess; exact closure check for (2,3,q).
inline double spherical_tiling_area(const std::vector<Tile>& tiles) {
    double total = 0.0;
    for (const Tile& t : tiles) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) s += tiling_detail::tile_angle(t, c, TileGeometry::sphere);
        total += s - kPi;
    }
    return total;
}

// SVG export: Poincare disk for hyperbolic tiles, plane for euclidean,
// orthographic projection for spherical (back hemisphere drawn first).
inline void export_tiling_svg(const std::vector<Tile>& tiles, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    const auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.6f", x);
        return std::string(buf);
    };
    if (tiles.empty()) {
        f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1 -1 2 2\"/>\n";
        return;
    }
    const TileGeometry geo = [&] {
        const double m = minkowski_dot(tiles[0].verts[0], tiles[0].verts[0]);
        if (std::abs(m + 1.0) < 1e-9 && tiles[0].verts[0].z() >= 1.0) return TileGeometry::hyperbolic;
        if (std::abs(tiles[0].verts[0].norm() - 1.0) < 1e-9) return TileGeometry::sphere;
        return TileGeometry::euclidean;
    }();

    const int segments = 16;
    std::vector<std::pair<double, std::string>> polys;  // (depth order, svg text)
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const Tile& t : tiles) {
        std::string pts;
        double depth = 0.0;
        for (int e = 0; e < 3; ++e) {
            const Vec3& a = t.verts[e];
            const Vec3& b = t.verts[(e + 1) % 3];
            for (int s = 0; s < segments; ++s) {
                const double w = static_cast<double>(s) / segments;
                Vec2 p;
                switch (geo) {
                    case TileGeometry::hyperbolic: {
                        const double d = hyperbolic_distance(a, b);
                        const Vec3 m = (d < 1e-14) ? a : hyp_interpolate(a, b, w * d);
                        p = poincare_disk(m);
                        break;
                    }
                    case TileGeometry::sphere: {
                        const Vec3 m = ((1.0 - w) * a + w * b).normalized();
                        p = Vec2(m.x(), m.y());
                        depth += m.z();
                        break;
                    }
                    default: {
                        const Vec3 m = (1.0 - w) * a + w * b;
                        p = Vec2(m.x(), m.y());
                        break;
                    }
                }
                lo_x = std::min(lo_x, p.x()); hi_x = std::max(hi_x, p.x());
                lo_y = std::min(lo_y, -p.y()); hi_y = std::max(hi_y, -p.y());
                pts += num(p.x()) + "," + num(-p.y()) + " ";
            }
        }
        const std::string fill = t.color ? "#e6e6e6" : "#1e1e1e";
        polys.emplace_back(depth, "<polygon points=\"" + pts + "\" fill=\"" + fill +
                                      "\" stroke=\"#606060\" stroke-width=\"0.003\"/>\n");
    }
    if (geo == TileGeometry::sphere)
        std::stable_sort(polys.begin(), polys.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    if (geo != TileGeometry::euclidean) { lo_x = -1.02; lo_y = -1.02; hi_x = 1.02; hi_y = 1.02; }
    const double mx = 0.02 * (hi_x - lo_x), my = 0.02 * (hi_y - lo_y);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
      << num(lo_x - mx) << " " << num(lo_y - my) << " "
      << num(hi_x - lo_x + 2 * mx) << " " << num(hi_y - lo_y + 2 * my) << "\">\n";
    if (geo == TileGeometry::hyperbolic)
        f << "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#404040\" "
             "stroke-width=\"0.004\"/>\n";
    for (const auto& [depth, poly] : polys) f << poly;
    f << "</svg>\n";
}

inline double tile_angle(const Tile& t, int corner, TileGeometry geo) {
    return tiling_detail::tile_angle(t, corner, geo);
}

} // namespace cct
