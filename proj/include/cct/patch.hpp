#pragma once

#include "cct/chmutov.hpp"
#include "cct/trimesh.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

namespace cct {

// Wall planes of the fundamental wedge {x >= y >= z >= 0}, as a bitmask.
enum PlaneBit : std::uint8_t {
    plane_xy = 1,  // x = y
    plane_yz = 2,  // y = z
    plane_z0 = 4,  // z = 0
};

enum class Side { top = 0, bottom = 1, left = 2, right = 3 };

// Mesh of the patch Q(c) = S(c) intersected with the wedge.  Corners V1/V2
// sit on the vertex diagonal x = y = z (60-degree corners), E1/E2 on the
// edge diagonal x = y, z = 0 (90-degree corners).  V1 is the vertex corner
// closer to the origin; LEFT is the x = y side through V1 and E1.
struct PatchMesh {
    TriMesh mesh;
    double contour_value = 0.0;
    int v1 = -1, v2 = -1, e1 = -1, e2 = -1;
    std::array<std::vector<int>, 4> sides;  // indexed by Side; chains include endpoints
    std::vector<std::uint8_t> planes;       // per-vertex wall bitmask

    const std::vector<int>& side(Side s) const { return sides[static_cast<int>(s)]; }
    bool is_corner(int v) const { return v == v1 || v == v2 || v == e1 || v == e2; }
};

class TopologyError : public Error {
public:
    using Error::Error;
};

namespace patch_detail {

inline Vec3 plane_normal(std::uint8_t bit) {
    switch (bit) {
        case plane_xy: return Vec3(1, -1, 0) / std::sqrt(2.0);
        case plane_yz: return Vec3(0, 1, -1) / std::sqrt(2.0);
        default: return Vec3(0, 0, 1);
    }
}

// Re-impose wall-plane membership exactly.
inline void snap_to_planes(Vec3& p, std::uint8_t mask) {
    if (mask & plane_xy) { const double m = 0.5 * (p.x() + p.y()); p.x() = m; p.y() = m; }
    if (mask & plane_yz) { const double m = 0.5 * (p.y() + p.z()); p.y() = m; p.z() = m; }
    if (mask & plane_z0) p.z() = 0.0;
    for (int i = 0; i < 3; ++i) p[i] += 0.0;  // normalize -0.0
}

// Newton projection onto {F = c} restricted to the vertex's wall planes.
inline void project_constrained(Vec3& p, double c, std::uint8_t mask, double tol = 1e-12) {
    for (int it = 0; it < 60; ++it) {
        const double f = field(p) - c;
        if (std::abs(f) < tol) break;
        Vec3 g = field_gradient(p);
        if (mask & plane_xy) { const Vec3 n = plane_normal(plane_xy); g -= g.dot(n) * n; }
        if (mask & plane_yz) { const Vec3 n = plane_normal(plane_yz); g -= g.dot(n) * n; }
        if (mask & plane_z0) g.z() = 0.0;
        const double g2 = g.squaredNorm();
        if (g2 < 1e-18) break;
        p -= (f / g2) * g;
        snap_to_planes(p, mask);
    }
}

// ---------------------------------------------------------------------------
// Contouring over the wedge.
//
// The wedge {x >= y >= z >= 0} becomes the positive octant in coordinates
// (a, b, c) = (x - y, y - z, z), so a regular lattice there has its boundary
// faces exactly on the wedge walls.  Marching tetrahedra on the (sheared)
// lattice then produces boundary vertices that lie exactly in the walls and
// corner vertices exactly on the diagonal axes.
// ---------------------------------------------------------------------------

struct RawPatch {
    TriMesh mesh;
    std::vector<std::uint8_t> planes;
    std::vector<int> v_corners, e_corners;
};

inline RawPatch march_wedge(double c, double cell) {
    const double extent = 1.2;  // surface coordinates stay below ~1.1 for c in (-1,1)
    const double ha = cell, hb = cell / std::sqrt(2.0), hc = cell / std::sqrt(3.0);
    const int na = static_cast<int>(std::ceil(extent / ha));
    const int nb = static_cast<int>(std::ceil(extent / hb));
    const int nc = static_cast<int>(std::ceil(extent / hc));

    const auto node_id = [&](int i, int j, int k) {
        return (i * (nb + 1) + j) * (nc + 1) + k;
    };
    const auto node_pos = [&](int i, int j, int k) {
        const double a = i * ha, b = j * hb, z = k * hc;
        return Vec3(a + b + z, b + z, z);
    };

    std::vector<double> val(static_cast<size_t>((na + 1) * (nb + 1)) * (nc + 1));
    for (int i = 0; i <= na; ++i)
        for (int j = 0; j <= nb; ++j)
            for (int k = 0; k <= nc; ++k) {
                double v = field(node_pos(i, j, k)) - c;
                if (std::abs(v) < 1e-13) v = 1e-13;  // keep crossings off lattice nodes
                val[node_id(i, j, k)] = v;
            }

    RawPatch out;
    std::unordered_map<std::uint64_t, int> edge_vertex;
    const double t_clamp = 0.05;

    // decode node id -> (i, j, k) for wall membership
    const auto wall_mask = [&](int n0, int n1) -> std::uint8_t {
        const int i0 = n0 / ((nb + 1) * (nc + 1)), i1 = n1 / ((nb + 1) * (nc + 1));
        const int r0 = n0 % ((nb + 1) * (nc + 1)), r1 = n1 % ((nb + 1) * (nc + 1));
        const int j0 = r0 / (nc + 1), j1 = r1 / (nc + 1);
        const int k0 = r0 % (nc + 1), k1 = r1 % (nc + 1);
        std::uint8_t m = 0;
        if (i0 == 0 && i1 == 0) m |= plane_xy;
        if (j0 == 0 && j1 == 0) m |= plane_yz;
        if (k0 == 0 && k1 == 0) m |= plane_z0;
        return m;
    };
    const auto node_xyz = [&](int n) {
        const int i = n / ((nb + 1) * (nc + 1));
        const int r = n % ((nb + 1) * (nc + 1));
        return node_pos(i, r / (nc + 1), r % (nc + 1));
    };

    const auto crossing = [&](int n0, int n1) {
        if (n0 > n1) std::swap(n0, n1);
        const std::uint64_t key = (static_cast<std::uint64_t>(n0) << 32) | static_cast<std::uint32_t>(n1);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double f0 = val[n0], f1 = val[n1];
        double t = f0 / (f0 - f1);
        t = std::clamp(t, t_clamp, 1.0 - t_clamp);
        Vec3 p = (1.0 - t) * node_xyz(n0) + t * node_xyz(n1);
        const std::uint8_t mask = wall_mask(n0, n1);
        snap_to_planes(p, mask);
        const int idx = out.mesh.vertex_count();
        out.mesh.vertices.push_back(p);
        out.planes.push_back(mask);
        edge_vertex.emplace(key, idx);
        return idx;
    };

    // Kuhn decomposition: one tetrahedron per permutation of axis insertions
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    std::array<int, 4> tet;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j)
            for (int k = 0; k < nc; ++k) {
                bool any_pos = false, any_neg = false;
                for (int d = 0; d < 8; ++d) {
                    const double v = val[node_id(i + (d & 1), j + ((d >> 1) & 1), k + (d >> 2))];
                    (v > 0 ? any_pos : any_neg) = true;
                }
                if (!any_pos || !any_neg) continue;
                for (const auto& perm : perms) {
                    int ci = i, cj = j, ck = k;
                    tet[0] = node_id(ci, cj, ck);
                    for (int s = 0; s < 3; ++s) {
                        if (perm[s] == 0) ++ci;
                        else if (perm[s] == 1) ++cj;
                        else ++ck;
                        tet[s + 1] = node_id(ci, cj, ck);
                    }
                    int pos[4], neg[4], np = 0, nn = 0;
                    for (int s = 0; s < 4; ++s)
                        (val[tet[s]] > 0 ? pos[np++] : neg[nn++]) = tet[s];
                    if (np == 0 || np == 4) continue;
                    if (np == 1 || np == 3) {
                        const int apex = (np == 1) ? pos[0] : neg[0];
                        const int* base = (np == 1) ? neg : pos;
                        out.mesh.faces.push_back({crossing(apex, base[0]),
                                                  crossing(apex, base[1]),
                                                  crossing(apex, base[2])});
                    } else {
                        const int q0 = crossing(pos[0], neg[0]);
                        const int q1 = crossing(pos[0], neg[1]);
                        const int q2 = crossing(pos[1], neg[1]);
                        const int q3 = crossing(pos[1], neg[0]);
                        out.mesh.faces.push_back({q0, q1, q2});
                        out.mesh.faces.push_back({q0, q2, q3});
                    }
                }
            }

    // drop zero-area duplicates that the clamp may have produced
    // (distinct indices are guaranteed by the per-edge vertex map)

    // orient every face so its normal points along the field gradient
    for (auto& t : out.mesh.faces) {
        const Vec3 cen = (out.mesh.vertices[t[0]] + out.mesh.vertices[t[1]] +
                          out.mesh.vertices[t[2]]) / 3.0;
        const Vec3 n = (out.mesh.vertices[t[1]] - out.mesh.vertices[t[0]])
                           .cross(out.mesh.vertices[t[2]] - out.mesh.vertices[t[0]]);
        if (n.dot(field_gradient(cen)) < 0) std::swap(t[1], t[2]);
    }

    // corner vertices: on two walls at once
    for (int v = 0; v < out.mesh.vertex_count(); ++v) {
        const std::uint8_t m = out.planes[v];
        if ((m & plane_xy) && (m & plane_yz)) out.v_corners.push_back(v);
        else if ((m & plane_xy) && (m & plane_z0)) out.e_corners.push_back(v);
        else if ((m & plane_yz) && (m & plane_z0))
            throw TopologyError("mesh_patch: contour touches the face axis");
    }
    return out;
}

// Snap the corner candidates to the exact axis intersections.
inline void snap_corners(RawPatch& raw, double c) {
    const auto vr = axis_intersections(c, Axis::vertex);
    const auto er = axis_intersections(c, Axis::edge);
    if (raw.v_corners.size() != 2 || raw.e_corners.size() != 2 ||
        vr.size() != 2 || er.size() != 2)
        throw TopologyError("mesh_patch: expected 2 corners per diagonal axis, found " +
                            std::to_string(raw.v_corners.size()) + " vertex-axis and " +
                            std::to_string(raw.e_corners.size()) + " edge-axis");
    for (const int v : raw.v_corners) {
        const double t = raw.mesh.vertices[v].x();
        const double ts = (std::abs(vr[0] - t) < std::abs(vr[1] - t)) ? vr[0] : vr[1];
        raw.mesh.vertices[v] = Vec3(ts, ts, ts);
    }
    for (const int v : raw.e_corners) {
        const double t = raw.mesh.vertices[v].x();
        const double ts = (std::abs(er[0] - t) < std::abs(er[1] - t)) ? er[0] : er[1];
        raw.mesh.vertices[v] = Vec3(ts, ts, 0.0);
    }
}

// ---------------------------------------------------------------------------
// Quality: guarded short-edge collapse + tangential smoothing.
// ---------------------------------------------------------------------------

inline double min_face_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
    const double m = std::max({la, lb, lc});
    if (m <= 0) return 0.0;
    // smallest angle is opposite the shortest side
    const double s = std::min({la, lb, lc});
    double cosv;
    if (s == la) cosv = (lb * lb + lc * lc - la * la) / (2 * lb * lc);
    else if (s == lb) cosv = (la * la + lc * lc - lb * lb) / (2 * la * lc);
    else cosv = (la * la + lb * lb - lc * lc) / (2 * la * lb);
    return std::acos(clamp_unit(cosv));
}

// One pass of midpoint splits of edges longer than `threshold`.
// Returns the number of splits performed.
inline int split_long_edges(TriMesh& mesh, std::vector<std::uint8_t>& planes, double c,
                            double threshold) {
    MeshEdges es = build_edges(mesh);
    struct Cand { double len; int id; };
    std::vector<Cand> cands;
    const std::vector<double> lens = edge_lengths(mesh, es);
    for (size_t e = 0; e < es.edges.size(); ++e)
        if (lens[e] > threshold) cands.push_back({lens[e], static_cast<int>(e)});
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.len != y.len) return x.len > y.len;
        return x.id < y.id;
    });
    std::vector<char> dirty(mesh.face_count(), 0);
    int done = 0;
    for (const Cand& cd : cands) {
        const Edge& e = es.edges[cd.id];
        if (dirty[e.f0] || (e.f1 >= 0 && dirty[e.f1])) continue;
        const std::uint8_t mask = e.boundary()
            ? static_cast<std::uint8_t>(planes[e.a] & planes[e.b]) : std::uint8_t{0};
        Vec3 m = 0.5 * (mesh.vertices[e.a] + mesh.vertices[e.b]);
        snap_to_planes(m, mask);
        project_constrained(m, c, mask);
        const int mid = mesh.vertex_count();
        mesh.vertices.push_back(m);
        planes.push_back(mask);
        for (const int f : {e.f0, e.f1}) {
            if (f < 0) continue;
            dirty[f] = 1;
            auto& t = mesh.faces[f];
            // locate the directed edge within the face
            for (int s = 0; s < 3; ++s) {
                const int u = t[s], v = t[(s + 1) % 3];
                if ((u == e.a && v == e.b) || (u == e.b && v == e.a)) {
                    std::array<int, 3> second = t;
                    t[(s + 1) % 3] = mid;          // (u, mid, w)
                    second[s] = mid;               // (mid, v, w)
                    mesh.faces.push_back(second);
                    dirty.push_back(1);
                    break;
                }
            }
        }
        ++done;
    }
    return done;
}

// One pass of guarded collapses of edges shorter than `threshold`.
// Returns the number of collapses performed.
inline int collapse_short_edges(TriMesh& mesh, std::vector<std::uint8_t>& planes,
                                const std::vector<char>& is_corner, double c,
                                double threshold) {
    const int nv = mesh.vertex_count();
    std::vector<std::vector<int>> v2f(nv);
    for (int f = 0; f < mesh.face_count(); ++f)
        for (const int v : mesh.faces[f]) v2f[v].push_back(f);

    struct Cand { double len; int a, b; };
    std::vector<Cand> cands;
    {
        MeshEdges es = build_edges(mesh);
        for (const Edge& e : es.edges) {
            const double len = (mesh.vertices[e.a] - mesh.vertices[e.b]).norm();
            if (len < threshold) cands.push_back({len, e.a, e.b});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.len != y.len) return x.len < y.len;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });

    std::vector<char> locked(nv, 0), face_dead(mesh.face_count(), 0);
    int done = 0;
    for (const Cand& cd : cands) {
        int a = cd.a, b = cd.b;
        if (locked[a] || locked[b]) continue;
        if (is_corner[a] && is_corner[b]) continue;
        // keep the more-constrained endpoint
        int keep, kill;
        if (is_corner[a]) { keep = a; kill = b; }
        else if (is_corner[b]) { keep = b; kill = a; }
        else {
            const int ca = __builtin_popcount(planes[a]), cb = __builtin_popcount(planes[b]);
            if (ca >= cb) { keep = a; kill = b; }
            else { keep = b; kill = a; }
        }
        // the vanishing vertex's walls must be a subset of the kept vertex's
        if ((planes[kill] & ~planes[keep]) != 0) continue;

        // link condition: shared neighbors must be exactly the opposite
        // vertices of the faces along this edge
        std::vector<int> shared_faces;
        for (const int f : v2f[a])
            if (!face_dead[f])
                for (const int v : mesh.faces[f])
                    if (v == b) { shared_faces.push_back(f); break; }
        if (shared_faces.empty() || shared_faces.size() > 2) continue;
        auto ring = [&](int v) {
            std::vector<int> r;
            for (const int f : v2f[v])
                if (!face_dead[f])
                    for (const int w : mesh.faces[f])
                        if (w != a && w != b) r.push_back(w);
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            return r;
        };
        const auto ra = ring(a), rb = ring(b);
        std::vector<int> common;
        std::set_intersection(ra.begin(), ra.end(), rb.begin(), rb.end(),
                              std::back_inserter(common));
        std::vector<int> opp;
        for (const int f : shared_faces)
            for (const int v : mesh.faces[f])
                if (v != a && v != b) opp.push_back(v);
        std::sort(opp.begin(), opp.end());
        if (common != opp) continue;

        // new position for the kept vertex
        Vec3 np = mesh.vertices[keep];
        if (!is_corner[keep] && planes[keep] == planes[kill]) {
            np = 0.5 * (mesh.vertices[keep] + mesh.vertices[kill]);
            snap_to_planes(np, planes[keep]);
            project_constrained(np, c, planes[keep]);
        }

        // simulate the new one-ring; reject flips, slivers and wall-flat faces
        bool ok = true;
        double old_min = kPi;
        for (const int v : {a, b})
            for (const int f : v2f[v]) {
                if (face_dead[f]) continue;
                const auto& t = mesh.faces[f];
                old_min = std::min(old_min, min_face_angle(mesh.vertices[t[0]],
                                                           mesh.vertices[t[1]],
                                                           mesh.vertices[t[2]]));
            }
        std::vector<int> new_faces;
        for (const int v : {a, b})
            for (const int f : v2f[v]) {
                if (face_dead[f]) continue;
                bool has_both = false;
                for (const int w : mesh.faces[f]) has_both |= (w == (v == a ? b : a));
                if (has_both) continue;  // dies with the collapse
                new_faces.push_back(f);
            }
        std::sort(new_faces.begin(), new_faces.end());
        new_faces.erase(std::unique(new_faces.begin(), new_faces.end()), new_faces.end());
        for (const int f : new_faces) {
            std::array<int, 3> t = mesh.faces[f];
            std::array<Vec3, 3> p;
            std::uint8_t common_mask = 0xff;
            for (int s = 0; s < 3; ++s) {
                if (t[s] == kill) t[s] = keep;
                p[s] = (t[s] == keep) ? np : mesh.vertices[t[s]];
                common_mask &= planes[t[s]];
            }
            if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) { ok = false; break; }
            if (common_mask != 0) { ok = false; break; }  // face flattened into a wall
            const Vec3 n = (p[1] - p[0]).cross(p[2] - p[0]);
            if (n.norm() < 1e-14 ||
                n.dot(field_gradient((p[0] + p[1] + p[2]) / 3.0)) <= 0) { ok = false; break; }
            const double mn = min_face_angle(p[0], p[1], p[2]);
            if (mn < old_min && mn < 14.0 * kPi / 180.0) { ok = false; break; }
        }
        if (!ok) continue;

        // apply
        for (const int f : v2f[kill]) {
            if (face_dead[f]) continue;
            auto& t = mesh.faces[f];
            bool has_keep = false;
            for (const int w : t) has_keep |= (w == keep);
            if (has_keep) { face_dead[f] = 1; continue; }
            for (int& w : t)
                if (w == kill) w = keep;
            v2f[keep].push_back(f);
        }
        mesh.vertices[keep] = np;
        locked[keep] = locked[kill] = 1;
        for (const int v : ra) if (v < nv) locked[v] = 1;
        for (const int v : rb) if (v < nv) locked[v] = 1;
        ++done;
    }

    if (done > 0) {
        // compact faces and vertices
        std::vector<std::array<int, 3>> nf;
        nf.reserve(mesh.faces.size());
        for (int f = 0; f < mesh.face_count(); ++f)
            if (!face_dead[f]) nf.push_back(mesh.faces[f]);
        mesh.faces = std::move(nf);
        std::vector<int> remap(nv, -1);
        TriMesh compact;
        std::vector<std::uint8_t> nplanes;
        for (auto& t : mesh.faces)
            for (int& v : t) {
                if (remap[v] < 0) {
                    remap[v] = compact.vertex_count();
                    compact.vertices.push_back(mesh.vertices[v]);
                    nplanes.push_back(planes[v]);
                }
                v = remap[v];
            }
        compact.faces = std::move(mesh.faces);
        mesh = std::move(compact);
        planes = std::move(nplanes);
    }
    return done;
}

// Tangential Laplacian smoothing with constrained reprojection.  Boundary
// vertices relax along their wall curve; corners stay fixed.
inline void smooth(TriMesh& mesh, const std::vector<std::uint8_t>& planes,
                   const std::vector<char>& is_corner, double c, int iterations) {
    MeshEdges es = build_edges(mesh);
    const int nv = mesh.vertex_count();
    std::vector<std::vector<int>> nbr(nv);
    std::vector<std::array<int, 2>> bnbr(nv, {-1, -1});
    for (const Edge& e : es.edges) {
        nbr[e.a].push_back(e.b);
        nbr[e.b].push_back(e.a);
        if (e.boundary()) {
            for (auto [u, v] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
                if (bnbr[u][0] < 0) bnbr[u][0] = v;
                else bnbr[u][1] = v;
            }
        }
    }
    const double lambda = 0.5;  // damped steps: full steps oscillate near the walls
    std::vector<Vec3> next(nv);
    for (int it = 0; it < iterations; ++it) {
        for (int v = 0; v < nv; ++v) {
            next[v] = mesh.vertices[v];
            if (is_corner[v]) continue;
            if (planes[v] != 0) {
                if (bnbr[v][0] < 0 || bnbr[v][1] < 0) continue;
                const Vec3 cen = 0.5 * (mesh.vertices[bnbr[v][0]] + mesh.vertices[bnbr[v][1]]);
                next[v] = mesh.vertices[v] + lambda * (cen - mesh.vertices[v]);
            } else {
                Vec3 cen = Vec3::Zero();
                for (const int w : nbr[v]) cen += mesh.vertices[w];
                cen /= static_cast<double>(nbr[v].size());
                const Vec3 d = lambda * (cen - mesh.vertices[v]);
                Vec3 g = field_gradient(mesh.vertices[v]);
                const double gn = g.norm();
                if (gn > 1e-12) g /= gn;
                next[v] = mesh.vertices[v] + (d - d.dot(g) * g);
            }
        }
        mesh.vertices.swap(next);
        for (int v = 0; v < nv; ++v) {
            if (is_corner[v]) continue;
            snap_to_planes(mesh.vertices[v], planes[v]);
            project_constrained(mesh.vertices[v], c, planes[v]);
        }
    }
}

// Local hill-climb for the few faces a global pass leaves below the angle
// floor: move each incident vertex tangentially to maximize the worst angle
// of its one-ring.
inline void polish_low_angle_faces(TriMesh& mesh, const std::vector<std::uint8_t>& planes,
                                   const std::vector<char>& is_corner, double c,
                                   double angle_floor) {
    const int nv = mesh.vertex_count();
    std::vector<std::vector<int>> v2f(nv);
    for (int f = 0; f < mesh.face_count(); ++f)
        for (const int v : mesh.faces[f]) v2f[v].push_back(f);

    const auto ring_min = [&](int v) {
        double m = kPi;
        for (const int f : v2f[v]) {
            const auto& t = mesh.faces[f];
            m = std::min(m, min_face_angle(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                           mesh.vertices[t[2]]));
        }
        return m;
    };

    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& tri = mesh.faces[f];
        if (min_face_angle(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                           mesh.vertices[tri[2]]) >= angle_floor)
            continue;
        double scale = 0.0;
        for (int s = 0; s < 3; ++s)
            scale = std::max(scale, (mesh.vertices[tri[s]] -
                                     mesh.vertices[tri[(s + 1) % 3]]).norm());
        for (const int v : mesh.faces[f]) {
            if (is_corner[v]) continue;
            for (int step = 0; step < 24; ++step) {
                const double cur = ring_min(v);
                if (cur >= angle_floor) break;
                Vec3 g = field_gradient(mesh.vertices[v]);
                g.normalize();
                // tangential frame
                Vec3 t1 = g.cross(Vec3(1, 0, 0));
                if (t1.norm() < 0.1) t1 = g.cross(Vec3(0, 1, 0));
                t1.normalize();
                const Vec3 t2 = g.cross(t1);
                Vec3 best_pos = mesh.vertices[v];
                double best = cur;
                for (const double radius : {0.4, 0.2, 0.1, 0.05}) {
                    for (int dir = 0; dir < 8; ++dir) {
                        const double a = 2.0 * kPi * dir / 8.0;
                        Vec3 cand = mesh.vertices[v] +
                                    radius * scale * (std::cos(a) * t1 + std::sin(a) * t2);
                        snap_to_planes(cand, planes[v]);
                        project_constrained(cand, c, planes[v]);
                        const Vec3 keep = mesh.vertices[v];
                        mesh.vertices[v] = cand;
                        const double got = ring_min(v);
                        mesh.vertices[v] = keep;
                        if (got > best) { best = got; best_pos = cand; }
                    }
                }
                if (best <= cur + 1e-12) break;
                mesh.vertices[v] = best_pos;
            }
        }
    }
}

} // namespace patch_detail

// ---------------------------------------------------------------------------
// Classification: derive corners and labeled side chains from geometry.
// Works on freshly meshed and on reloaded patches alike.
// ---------------------------------------------------------------------------

inline PatchMesh classify_patch(TriMesh mesh, double c, double tol = 1e-9) {
    validate_mesh(mesh);
    MeshEdges es = build_edges(mesh);
    if (euler_characteristic(mesh, es) != 1)
        throw TopologyError("classify_patch: patch is not a disk (V - E + F != 1)");
    const auto loops = boundary_loops(mesh, es);
    if (loops.size() != 1)
        throw TopologyError("classify_patch: expected a single boundary loop, found " +
                            std::to_string(loops.size()));

    PatchMesh patch;
    patch.contour_value = c;
    patch.planes.assign(mesh.vertices.size(), 0);
    std::vector<char> on_boundary(mesh.vertices.size(), 0);
    for (const int v : loops[0]) on_boundary[v] = 1;
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (!on_boundary[v]) continue;
        const Vec3& p = mesh.vertices[v];
        std::uint8_t m = 0;
        if (std::abs(p.x() - p.y()) < tol) m |= plane_xy;
        if (std::abs(p.y() - p.z()) < tol) m |= plane_yz;
        if (std::abs(p.z()) < tol) m |= plane_z0;
        if (m == 0)
            throw Error("classify_patch: boundary vertex " + std::to_string(v) +
                        " lies on no wall plane");
        patch.planes[v] = m;
    }

    std::vector<int> v_corners, e_corners;
    for (const int v : loops[0]) {
        const std::uint8_t m = patch.planes[v];
        if ((m & plane_yz) && (m & plane_z0))
            throw TopologyError("classify_patch: boundary vertex " + std::to_string(v) +
                                " lies on the face axis");
        if ((m & plane_xy) && (m & plane_yz)) v_corners.push_back(v);
        else if ((m & plane_xy) && (m & plane_z0)) e_corners.push_back(v);
    }
    if (v_corners.size() != 2 || e_corners.size() != 2)
        throw TopologyError("classify_patch: expected 2 + 2 corners, found " +
                            std::to_string(v_corners.size()) + " vertex-axis and " +
                            std::to_string(e_corners.size()) + " edge-axis");

    patch.v1 = mesh.vertices[v_corners[0]].x() < mesh.vertices[v_corners[1]].x()
                   ? v_corners[0] : v_corners[1];
    patch.v2 = (patch.v1 == v_corners[0]) ? v_corners[1] : v_corners[0];

    // residual check
    for (const auto& p : mesh.vertices)
        if (std::abs(field(p) - c) > 1e-9)
            throw Error("classify_patch: vertex residual exceeds 1e-9");

    // split the loop at the corners into 4 chains
    const std::vector<int>& loop = loops[0];
    std::vector<int> corner_pos;
    for (size_t i = 0; i < loop.size(); ++i)
        if (loop[i] == patch.v1 || loop[i] == patch.v2 ||
            loop[i] == e_corners[0] || loop[i] == e_corners[1])
            corner_pos.push_back(static_cast<int>(i));
    if (corner_pos.size() != 4)
        throw TopologyError("classify_patch: corners are not distinct on the loop");

    std::array<std::vector<int>, 4> chains;
    for (int s = 0; s < 4; ++s) {
        const int a = corner_pos[s], b = corner_pos[(s + 1) % 4];
        std::vector<int>& ch = chains[s];
        for (int i = a;; i = (i + 1) % static_cast<int>(loop.size())) {
            ch.push_back(loop[i]);
            if (i == b) break;
        }
    }

    const auto chain_plane = [&](const std::vector<int>& ch) -> std::uint8_t {
        if (ch.size() < 3)
            throw TopologyError("classify_patch: side with no interior vertices "
                                "(resolution too coarse)");
        std::uint8_t m = 0xff;
        for (size_t i = 1; i + 1 < ch.size(); ++i) {
            const std::uint8_t pm = patch.planes[ch[i]];
            if (__builtin_popcount(pm) != 1)
                throw Error("classify_patch: ambiguous plane membership at vertex " +
                            std::to_string(ch[i]));
            m &= pm;
        }
        if (__builtin_popcount(m) != 1)
            throw Error("classify_patch: side spans multiple wall planes");
        return m;
    };

    bool have[4] = {false, false, false, false};
    for (auto& ch : chains) {
        const std::uint8_t pm = chain_plane(ch);
        Side side;
        if (pm == plane_yz) side = Side::top;
        else if (pm == plane_z0) side = Side::bottom;
        else {
            const bool has_v1 = (ch.front() == patch.v1 || ch.back() == patch.v1);
            side = has_v1 ? Side::left : Side::right;
        }
        if (have[static_cast<int>(side)])
            throw TopologyError("classify_patch: duplicate side classification");
        have[static_cast<int>(side)] = true;
        patch.sides[static_cast<int>(side)] = std::move(ch);
    }
    for (const bool h : have)
        if (!h) throw TopologyError("classify_patch: missing side");

    // canonical chain directions: TOP V1->V2, BOTTOM E1->E2, LEFT V1->E1, RIGHT V2->E2
    auto& top = patch.sides[static_cast<int>(Side::top)];
    if (top.back() == patch.v1) std::reverse(top.begin(), top.end());
    auto& left = patch.sides[static_cast<int>(Side::left)];
    if (left.back() == patch.v1) std::reverse(left.begin(), left.end());
    patch.e1 = left.back();
    patch.e2 = (patch.e1 == e_corners[0]) ? e_corners[1] : e_corners[0];
    auto& bottom = patch.sides[static_cast<int>(Side::bottom)];
    if (bottom.back() == patch.e1) std::reverse(bottom.begin(), bottom.end());
    auto& right = patch.sides[static_cast<int>(Side::right)];
    if (right.back() == patch.v2) std::reverse(right.begin(), right.end());

    if (top.front() != patch.v1 || top.back() != patch.v2 ||
        bottom.front() != patch.e1 || bottom.back() != patch.e2 ||
        left.front() != patch.v1 || left.back() != patch.e1 ||
        right.front() != patch.v2 || right.back() != patch.e2)
        throw TopologyError("classify_patch: side endpoints do not match corners");

    patch.mesh = std::move(mesh);
    return patch;
}

// The four labeled boundary chains of a patch, re-derived from geometry.
inline std::array<std::vector<int>, 4> side_chains(const PatchMesh& patch) {
    return classify_patch(patch.mesh, patch.contour_value).sides;
}

struct MeshPatchOptions {
    double target_edge_length = 0.02;
    int smoothing_iterations = 10;
    int quality_rounds = 8;            // split+collapse+smooth rounds
    double min_angle_deg = 15.0;
};

// Mesh the patch Q(c).  Throws TopologyError when the contour cannot be
// resolved as a disk at this resolution (near the pinch levels).
inline PatchMesh mesh_patch(double c, const MeshPatchOptions& opt) {
    if (!(c > -1.0 && c < 1.0)) throw Error("mesh_patch: c must lie in (-1, 1)");
    if (!(opt.target_edge_length > 0)) throw Error("mesh_patch: target edge length must be > 0");
    const double cell = 1.75 * opt.target_edge_length;

    patch_detail::RawPatch raw = patch_detail::march_wedge(c, cell);
    patch_detail::snap_corners(raw, c);

    std::vector<char> is_corner(raw.mesh.vertices.size(), 0);
    std::vector<int> corner_ids = raw.v_corners;
    corner_ids.insert(corner_ids.end(), raw.e_corners.begin(), raw.e_corners.end());
    for (const int v : corner_ids) is_corner[v] = 1;

    for (int v = 0; v < raw.mesh.vertex_count(); ++v)
        if (!is_corner[v])
            patch_detail::project_constrained(raw.mesh.vertices[v], c, raw.planes[v]);

    const auto current_min_angle = [&]() {
        double m = kPi;
        for (const auto& t : raw.mesh.faces)
            m = std::min(m, patch_detail::min_face_angle(raw.mesh.vertices[t[0]],
                                                         raw.mesh.vertices[t[1]],
                                                         raw.mesh.vertices[t[2]]));
        return m;
    };
    const auto rebuild_corner_flags = [&]() {
        is_corner.assign(raw.mesh.vertices.size(), 0);
        for (int v = 0; v < raw.mesh.vertex_count(); ++v) {
            const std::uint8_t m = raw.planes[v];
            if (((m & plane_xy) && (m & plane_yz)) || ((m & plane_xy) && (m & plane_z0)))
                is_corner[v] = 1;
        }
    };

    // isotropic remeshing toward the equilibrium length (splits and collapses
    // only, no flips), interleaved with tangential smoothing; the equilibrium
    // runs slightly finer than the requested target so that marching
    // artifacts collapse away without coarsening the mesh
    const double eq = 0.70 * opt.target_edge_length;
    for (int round = 0; round < opt.quality_rounds; ++round) {
        const int split = patch_detail::split_long_edges(raw.mesh, raw.planes, c, 1.4 * eq);
        if (split > 0) rebuild_corner_flags();
        const int collapsed = patch_detail::collapse_short_edges(
            raw.mesh, raw.planes, is_corner, c, 0.8 * eq);
        if (collapsed > 0) rebuild_corner_flags();
        patch_detail::smooth(raw.mesh, raw.planes, is_corner, c, opt.smoothing_iterations);
        if (split == 0 && collapsed == 0 &&
            current_min_angle() >= opt.min_angle_deg * kPi / 180.0)
            break;
    }
    // settle: remove the short edges the last smoothing round may have left
    for (int k = 0; k < 4; ++k) {
        const int collapsed = patch_detail::collapse_short_edges(
            raw.mesh, raw.planes, is_corner, c, 0.8 * eq);
        if (collapsed > 0) rebuild_corner_flags();
        if (collapsed == 0 && current_min_angle() >= opt.min_angle_deg * kPi / 180.0) break;
        patch_detail::smooth(raw.mesh, raw.planes, is_corner, c, 3);
    }
    if (current_min_angle() < opt.min_angle_deg * kPi / 180.0)
        patch_detail::polish_low_angle_faces(raw.mesh, raw.planes, is_corner, c,
                                             opt.min_angle_deg * kPi / 180.0);

    const double min_angle = current_min_angle();
    if (min_angle < opt.min_angle_deg * kPi / 180.0)
        throw Error("mesh_patch: minimum triangle angle " +
                    std::to_string(min_angle * 180.0 / kPi) + " deg below " +
                    std::to_string(opt.min_angle_deg) + " deg");

    return classify_patch(std::move(raw.mesh), c);
}

inline PatchMesh mesh_patch(double c, double target_edge_length = 0.02) {
    MeshPatchOptions opt;
    opt.target_edge_length = target_edge_length;
    return mesh_patch(c, opt);
}

// Deterministic quality statistics for a patch.
struct QualityReport {
    double min_angle_deg = 0.0;
    double median_angle_deg = 0.0;
    double median_edge_length = 0.0;
    double min_edge_length = 0.0;
    double max_edge_length = 0.0;
    std::array<int, 16> edge_length_histogram{};  // bins over [min, max]
    double max_residual = 0.0;
    int degenerate_faces = 0;
};

inline QualityReport mesh_quality(const PatchMesh& patch) {
    QualityReport q;
    const TriMesh& mesh = patch.mesh;
    std::vector<double> angles;
    angles.reserve(mesh.faces.size());
    q.min_angle_deg = 180.0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& t = mesh.faces[f];
        const double a = patch_detail::min_face_angle(
            mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) * 180.0 / kPi;
        angles.push_back(a);
        q.min_angle_deg = std::min(q.min_angle_deg, a);
        if (face_area(mesh, f) <= 1e-14) ++q.degenerate_faces;
    }
    std::sort(angles.begin(), angles.end());
    if (!angles.empty()) q.median_angle_deg = angles[angles.size() / 2];

    MeshEdges es = build_edges(mesh);
    std::vector<double> lens = edge_lengths(mesh, es);
    std::vector<double> sorted = lens;
    std::sort(sorted.begin(), sorted.end());
    if (!sorted.empty()) {
        q.min_edge_length = sorted.front();
        q.max_edge_length = sorted.back();
        q.median_edge_length = sorted[sorted.size() / 2];
        const double span = std::max(1e-300, q.max_edge_length - q.min_edge_length);
        for (const double l : lens) {
            int bin = static_cast<int>(16.0 * (l - q.min_edge_length) / span);
            q.edge_length_histogram[std::clamp(bin, 0, 15)]++;
        }
    }
    for (const auto& p : mesh.vertices)
        q.max_residual = std::max(q.max_residual, std::abs(field(p) - patch.contour_value));
    return q;
}

} // namespace cct
