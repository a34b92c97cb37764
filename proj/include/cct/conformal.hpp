#pragma once

#include "cct/hyperbolic.hpp"
#include "cct/patch.hpp"
#include "cct/trimesh.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <queue>
#include <vector>

namespace cct {

// Prescribed angle sums: 2*pi at interior vertices, pi along geodesic
// boundary, pi/3 at the vertex-axis corners and pi/2 at the edge-axis ones.
struct AngleTargets {
    std::vector<double> theta;
};

inline AngleTargets target_angles(const PatchMesh& patch) {
    AngleTargets t;
    t.theta.assign(patch.mesh.vertices.size(), 2.0 * kPi);
    for (int v = 0; v < patch.mesh.vertex_count(); ++v)
        if (patch.planes[v] != 0) t.theta[v] = kPi;
    t.theta[patch.v1] = kPi / 3.0;
    t.theta[patch.v2] = kPi / 3.0;
    t.theta[patch.e1] = kPi / 2.0;
    t.theta[patch.e2] = kPi / 2.0;
    return t;
}

// Hyperbolic edge lengths induced by log conformal factors u:
//   l~_ij = 2 asinh((l_ij / 2) * exp((u_i + u_j) / 2)).
// |u| is capped at 40; beyond that the solve has diverged.
inline std::vector<double> conformal_lengths(const std::vector<double>& euclidean,
                                             const std::vector<std::array<int, 2>>& edges,
                                             const std::vector<double>& u) {
    for (const double ui : u)
        if (!(std::abs(ui) <= 40.0))
            throw Error("conformal_lengths: |u| exceeds 40 (diverged)");
    std::vector<double> out(edges.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        const double s = 0.5 * (u[edges[e][0]] + u[edges[e][1]]);
        out[e] = 2.0 * std::asinh(0.5 * euclidean[e] * std::exp(s));
    }
    return out;
}

struct FlattenOptions {
    double tolerance = 1e-10;   // max |theta_hat - theta|
    int max_iterations = 100;
    int max_halvings = 30;
    bool fd_hessian = false;    // assemble the Hessian by finite differences
    std::vector<double> initial_u;  // empty = zeros
};

// Result of the uniformization: log factors, hyperbolic metric, layout.
struct FlattenedPatch {
    std::vector<double> u;
    std::vector<std::array<int, 2>> edges;          // canonical edge list
    std::vector<double> euclidean_lengths;          // per edge
    std::vector<double> hyperbolic_lengths;         // per edge
    std::vector<Vec3> layout;                       // hyperboloid points (after layout())
    double residual = 0.0;                          // max |theta_hat - theta| achieved
    int iterations = 0;
    std::vector<double> residual_history;
    double area = 0.0;                              // sum of (pi - alpha - beta - gamma)

    int edge_index(int a, int b) const {
        if (a > b) std::swap(a, b);
        auto it = edge_lookup.find((static_cast<std::uint64_t>(a) << 32) |
                                   static_cast<std::uint32_t>(b));
        if (it == edge_lookup.end()) throw Error("FlattenedPatch: unknown edge");
        return it->second;
    }
    std::unordered_map<std::uint64_t, int> edge_lookup;
};

namespace conformal_detail {

struct TriangleData {
    std::array<double, 3> angle;     // at local vertex slots
    std::array<double, 3> opp_len;   // hyperbolic length opposite each slot
};

// Angle sums and per-face angles for the metric defined by `lengths`.
// Returns false if any face violates the triangle inequality.
inline bool compute_angles(const TriMesh& mesh,
                           const std::vector<std::array<int, 3>>& face_edges,
                           const std::vector<double>& lengths,
                           std::vector<TriangleData>& tris,
                           std::vector<double>& theta_hat) {
    const int nf = mesh.face_count();
    tris.resize(nf);
    std::fill(theta_hat.begin(), theta_hat.end(), 0.0);
    for (int f = 0; f < nf; ++f) {
        const double a = lengths[face_edges[f][0]];
        const double b = lengths[face_edges[f][1]];
        const double c = lengths[face_edges[f][2]];
        if (!hyp_triangle_inequality(a, b, c)) return false;
        const auto ang = hyp_triangle_angles(a, b, c);
        tris[f].angle = ang;
        tris[f].opp_len = {a, b, c};
        for (int s = 0; s < 3; ++s) theta_hat[mesh.faces[f][s]] += ang[s];
    }
    return true;
}

// Per-triangle 3x3 block of d(theta_hat)/du.  With sides a, b, c opposite
// the local slots and t(x) = tanh(x/2):
//   d(alpha)/da =  sinh a / D,  d(alpha)/db = -sinh a cos(gamma) / D,
//   d(alpha)/dc = -sinh a cos(beta) / D,   D = sin(alpha) sinh b sinh c,
// and dl~/du = t(l~) at each endpoint.  The assembled matrix is symmetric.
inline void accumulate_jacobian(const TriMesh& mesh, const std::vector<TriangleData>& tris,
                                std::vector<Eigen::Triplet<double>>& trips) {
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& td = tris[f];
        const auto& vtx = mesh.faces[f];
        std::array<double, 3> sh, th, cs;
        for (int s = 0; s < 3; ++s) {
            sh[s] = std::sinh(td.opp_len[s]);
            th[s] = std::tanh(0.5 * td.opp_len[s]);
            cs[s] = std::cos(td.angle[s]);
        }
        for (int s = 0; s < 3; ++s) {
            const int j = (s + 1) % 3, k = (s + 2) % 3;
            const double D = std::sin(td.angle[s]) * sh[j] * sh[k];
            if (D < 1e-300) throw Error("flatten: degenerate triangle in Jacobian");
            const double da = sh[s] / D;
            const double db = -sh[s] * cs[k] / D;
            const double dc = -sh[s] * cs[j] / D;
            const double dii = db * th[j] + dc * th[k];
            const double dij = da * th[s] + dc * th[k];
            const double dik = da * th[s] + db * th[j];
            trips.emplace_back(vtx[s], vtx[s], dii);
            trips.emplace_back(vtx[s], vtx[j], dij);
            trips.emplace_back(vtx[s], vtx[k], dik);
        }
    }
}

} // namespace conformal_detail

// Uniformize the patch: find u with prescribed angle sums, by damped Newton
// on the residual theta_hat(u) - theta.  The system matrix is the (negated)
// angle-sum Jacobian, symmetric positive definite in the hyperbolic setting;
// solved densely up to 3000 vertices and by preconditioned conjugate
// gradients above.
inline FlattenedPatch flatten(const PatchMesh& patch, const AngleTargets& targets,
                              const FlattenOptions& opt = {}) {
    const TriMesh& mesh = patch.mesh;
    const int nv = mesh.vertex_count();
    if (static_cast<int>(targets.theta.size()) != nv)
        throw Error("flatten: target size mismatch");

    FlattenedPatch out;
    MeshEdges es = build_edges(mesh);
    out.edges.reserve(es.edges.size());
    for (const Edge& e : es.edges) out.edges.push_back({e.a, e.b});
    for (size_t i = 0; i < out.edges.size(); ++i)
        out.edge_lookup.emplace((static_cast<std::uint64_t>(out.edges[i][0]) << 32) |
                                    static_cast<std::uint32_t>(out.edges[i][1]),
                                static_cast<int>(i));
    out.euclidean_lengths = edge_lengths(mesh, es);

    std::vector<std::array<int, 3>> face_edges(mesh.face_count());
    for (int f = 0; f < mesh.face_count(); ++f)
        for (int s = 0; s < 3; ++s)
            face_edges[f][s] = out.edge_index(mesh.faces[f][(s + 1) % 3],
                                              mesh.faces[f][(s + 2) % 3]);

    std::vector<double> u = opt.initial_u.empty() ? std::vector<double>(nv, 0.0)
                                                  : opt.initial_u;
    if (static_cast<int>(u.size()) != nv) throw Error("flatten: initial u size mismatch");

    std::vector<conformal_detail::TriangleData> tris;
    std::vector<double> theta_hat(nv, 0.0);

    std::vector<double> lengths = conformal_lengths(out.euclidean_lengths, out.edges, u);
    if (!conformal_detail::compute_angles(mesh, face_edges, lengths, tris, theta_hat))
        throw TriangleInequalityError(0, 0, 0);

    Eigen::VectorXd residual(nv);
    const auto fill_residual = [&]() {
        for (int v = 0; v < nv; ++v) residual[v] = theta_hat[v] - targets.theta[v];
    };
    fill_residual();

    const bool dense = nv <= 3000;
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        const double res_max = residual.lpNorm<Eigen::Infinity>();
        out.residual_history.push_back(res_max);
        out.iterations = iter;
        if (res_max <= opt.tolerance) break;
        if (iter == opt.max_iterations - 1)
            throw Error("flatten: residual " + std::to_string(res_max) +
                        " not below tolerance after " + std::to_string(opt.max_iterations) +
                        " iterations");

        // assemble H = -d(theta_hat)/du, SPD
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(mesh.face_count() * 9);
        if (opt.fd_hessian) {
            const double h = 1e-6;
            std::vector<double> up = u;
            std::vector<conformal_detail::TriangleData> tmp;
            std::vector<double> tp(nv), tm(nv);
            for (int j = 0; j < nv; ++j) {
                up[j] = u[j] + h;
                auto lp = conformal_lengths(out.euclidean_lengths, out.edges, up);
                if (!conformal_detail::compute_angles(mesh, face_edges, lp, tmp, tp))
                    throw TriangleInequalityError(0, 0, 0);
                up[j] = u[j] - h;
                lp = conformal_lengths(out.euclidean_lengths, out.edges, up);
                if (!conformal_detail::compute_angles(mesh, face_edges, lp, tmp, tm))
                    throw TriangleInequalityError(0, 0, 0);
                up[j] = u[j];
                for (int i = 0; i < nv; ++i) {
                    const double d = (tp[i] - tm[i]) / (2.0 * h);
                    if (d != 0.0) trips.emplace_back(i, j, d);
                }
            }
        } else {
            conformal_detail::accumulate_jacobian(mesh, tris, trips);
        }
        Eigen::SparseMatrix<double> jac(nv, nv);
        jac.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseMatrix<double> sys = -0.5 * (Eigen::SparseMatrix<double>(jac.transpose()) + jac);

        Eigen::VectorXd dir(nv);
        if (dense) {
            Eigen::MatrixXd dsys = Eigen::MatrixXd(sys);
            dir = dsys.ldlt().solve(residual);
        } else {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                     Eigen::Lower | Eigen::Upper,
                                     Eigen::IncompleteCholesky<double>> cg;
            cg.setTolerance(1e-14);
            cg.setMaxIterations(20L * nv);
            cg.compute(sys);
            dir = cg.solve(residual);
            if (cg.info() != Eigen::Success && cg.info() != Eigen::NoConvergence)
                throw Error("flatten: conjugate gradient failure");
        }

        // damped step: require the triangle inequality and residual decrease
        const double res_norm = residual.norm();
        double step = 1.0;
        bool accepted = false;
        std::vector<double> u_try(nv);
        for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5) {
            for (int v = 0; v < nv; ++v) u_try[v] = u[v] + step * dir[v];
            bool capped = false;
            for (const double uv : u_try)
                if (std::abs(uv) > 40.0) { capped = true; break; }
            if (capped) continue;
            const auto l_try = conformal_lengths(out.euclidean_lengths, out.edges, u_try);
            if (!conformal_detail::compute_angles(mesh, face_edges, l_try, tris, theta_hat))
                continue;
            fill_residual();
            if (residual.norm() < res_norm) {
                u = u_try;
                lengths = l_try;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw TriangleInequalityError(0, 0, 0);  // unrecoverable: remesh finer
    }

    out.u = std::move(u);
    out.hyperbolic_lengths = std::move(lengths);
    out.residual = residual.lpNorm<Eigen::Infinity>();
    out.area = 0.0;
    for (const auto& td : tris)
        out.area += kPi - td.angle[0] - td.angle[1] - td.angle[2];
    return out;
}

inline FlattenedPatch flatten(const PatchMesh& patch, const FlattenOptions& opt = {}) {
    return flatten(patch, target_angles(patch), opt);
}

// Realize the flattened metric on the hyperboloid by breadth-first rigid
// placement from a central seed face.  Fills `flat.layout` and returns the
// worst edge-length reproduction error.
inline double layout(const PatchMesh& patch, FlattenedPatch& flat) {
    const TriMesh& mesh = patch.mesh;
    const int nf = mesh.face_count();
    if (nf == 0) throw Error("layout: empty mesh");
    const auto& lt = flat.hyperbolic_lengths;

    // adjacency across edges
    MeshEdges es = build_edges(mesh);
    std::vector<std::array<int, 3>> neighbor(nf, {-1, -1, -1});
    for (const Edge& e : es.edges) {
        if (e.boundary()) continue;
        for (int s = 0; s < 3; ++s) {
            const auto& t0 = mesh.faces[e.f0];
            if ((t0[s] == e.a && t0[(s + 1) % 3] == e.b) ||
                (t0[s] == e.b && t0[(s + 1) % 3] == e.a))
                neighbor[e.f0][s] = e.f1;
            const auto& t1 = mesh.faces[e.f1];
            if ((t1[s] == e.a && t1[(s + 1) % 3] == e.b) ||
                (t1[s] == e.b && t1[(s + 1) % 3] == e.a))
                neighbor[e.f1][s] = e.f0;
        }
    }

    // seed: face whose centroid is nearest the mesh centroid (short BFS depth)
    Vec3 center = Vec3::Zero();
    for (const auto& p : mesh.vertices) center += p;
    center /= static_cast<double>(mesh.vertex_count());
    int seed = 0;
    double best = std::numeric_limits<double>::max();
    for (int f = 0; f < nf; ++f) {
        const auto& t = mesh.faces[f];
        const double d = ((mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0
                          - center).squaredNorm();
        if (d < best) { best = d; seed = f; }
    }

    flat.layout.assign(mesh.vertices.size(), Vec3::Zero());
    std::vector<char> placed(mesh.vertices.size(), 0), visited(nf, 0);

    // canonical pose for the seed: v0 at the apex, v1 on the +x geodesic,
    // v2 on the +y side
    {
        const auto& t = mesh.faces[seed];
        const double c01 = lt[flat.edge_index(t[0], t[1])];
        const double c02 = lt[flat.edge_index(t[0], t[2])];
        const double c12 = lt[flat.edge_index(t[1], t[2])];
        flat.layout[t[0]] = Vec3(0, 0, 1);
        flat.layout[t[1]] = Vec3(std::sinh(c01), 0, std::cosh(c01));
        flat.layout[t[2]] = hyp_place_third(flat.layout[t[0]], flat.layout[t[1]],
                                            c02, c12, true);
        placed[t[0]] = placed[t[1]] = placed[t[2]] = 1;
    }
    visited[seed] = 1;
    std::queue<int> bfs;
    bfs.push(seed);
    while (!bfs.empty()) {
        const int f = bfs.front();
        bfs.pop();
        for (int s = 0; s < 3; ++s) {
            const int g = neighbor[f][s];
            if (g < 0 || visited[g]) continue;
            visited[g] = 1;
            // shared edge of f: (t[s], t[s+1]); opposite vertex in g
            const int a = mesh.faces[f][s], b = mesh.faces[f][(s + 1) % 3];
            int r = -1;
            for (const int w : mesh.faces[g])
                if (w != a && w != b) r = w;
            if (r < 0) throw Error("layout: broken adjacency");
            if (!placed[r]) {
                const Vec3& pa = flat.layout[a];
                const Vec3& pb = flat.layout[b];
                const Vec3 n = minkowski_cross(pa, pb);
                const int sopp = mesh.faces[f][(s + 2) % 3];
                const bool positive = minkowski_dot(flat.layout[sopp], n) < 0;
                flat.layout[r] = hyp_place_third(pa, pb,
                                                 lt[flat.edge_index(a, r)],
                                                 lt[flat.edge_index(b, r)], positive);
                placed[r] = 1;
            }
            bfs.push(g);
        }
    }
    for (const char p : placed)
        if (!p) throw Error("layout: mesh not face-connected");

    // verify reproduction of the metric
    double worst = 0.0;
    int bad = 0;
    for (size_t e = 0; e < flat.edges.size(); ++e) {
        const double d = hyperbolic_distance(flat.layout[flat.edges[e][0]],
                                             flat.layout[flat.edges[e][1]]);
        const double err = std::abs(d - lt[e]);
        worst = std::max(worst, err);
        if (err > 1e-7) ++bad;
    }
    if (worst > 1e-5)
        throw Error("layout: edge reproduction error " + std::to_string(worst));
    if (bad > static_cast<int>(flat.edges.size()) / 1000)
        throw Error("layout: more than 0.1% of edges above 1e-7 reproduction error");
    return worst;
}

// Hyperbolic side lengths, measured intrinsically as chain sums.
struct SideLengths {
    double top = 0.0, bottom = 0.0, left = 0.0, right = 0.0;
};

inline SideLengths side_lengths(const PatchMesh& patch, const FlattenedPatch& flat) {
    const auto chain_sum = [&](const std::vector<int>& chain) {
        double s = 0.0;
        for (size_t i = 0; i + 1 < chain.size(); ++i)
            s += flat.hyperbolic_lengths[flat.edge_index(chain[i], chain[i + 1])];
        return s;
    };
    SideLengths s;
    s.top = chain_sum(patch.side(Side::top));
    s.bottom = chain_sum(patch.side(Side::bottom));
    s.left = chain_sum(patch.side(Side::left));
    s.right = chain_sum(patch.side(Side::right));
    return s;
}

// Goldilocks mismatch: positive when the quad is too wide for the
// four-triangle division, negative when too tall.
inline double mismatch(const SideLengths& s) { return s.top - (s.left + s.right); }

// Division of the laid-out quad into the four triangles of the (2,4,6)
// pattern: M and N are the arc-length midpoints of TOP and BOTTOM, and the
// separating geodesics are V1-N, V2-N and M-N.  Tiles:
//   0 = (V1,M,N)  white     1 = (V1,N,E1)  black
//   2 = (V2,M,N)  black     3 = (V2,N,E2)  white
struct TileAssignment {
    std::vector<int> tile;            // per face, 0..3
    std::vector<std::uint8_t> color;  // per face, 0 black / 1 white
    Vec3 top_mid, bottom_mid;         // layout positions of M and N
    int near_geodesic_count = 0;      // centroids within 1e-9 of a separator
    int reassigned_count = 0;         // diagonal contacts at N resolved
};

inline std::uint8_t tile_color(int tile) { return (tile == 0 || tile == 3) ? 1 : 0; }

namespace conformal_detail {

inline Vec3 chain_arc_midpoint(const PatchMesh& patch, const FlattenedPatch& flat,
                               Side side) {
    const auto& chain = patch.side(side);
    double total = 0.0;
    for (size_t i = 0; i + 1 < chain.size(); ++i)
        total += flat.hyperbolic_lengths[flat.edge_index(chain[i], chain[i + 1])];
    double walk = 0.0;
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const double l = flat.hyperbolic_lengths[flat.edge_index(chain[i], chain[i + 1])];
        if (walk + l >= 0.5 * total) {
            const double s = 0.5 * total - walk;
            return hyp_interpolate(flat.layout[chain[i]], flat.layout[chain[i + 1]], s);
        }
        walk += l;
    }
    return flat.layout[chain.back()];
}

} // namespace conformal_detail

inline TileAssignment tile_quad(const PatchMesh& patch, const FlattenedPatch& flat) {
    if (flat.layout.empty()) throw Error("tile_quad: layout missing");
    TileAssignment ta;
    const Vec3 M = conformal_detail::chain_arc_midpoint(patch, flat, Side::top);
    const Vec3 N = conformal_detail::chain_arc_midpoint(patch, flat, Side::bottom);
    ta.top_mid = M;
    ta.bottom_mid = N;
    const Vec3& V1 = flat.layout[patch.v1];
    const Vec3& V2 = flat.layout[patch.v2];

    Vec3 n_mn = geodesic_normal(M, N);
    if (minkowski_dot(V1, n_mn) < 0) n_mn = -n_mn;       // V1 side positive
    Vec3 n_v1n = geodesic_normal(V1, N);
    if (minkowski_dot(M, n_v1n) < 0) n_v1n = -n_v1n;     // M side positive
    Vec3 n_v2n = geodesic_normal(V2, N);
    if (minkowski_dot(M, n_v2n) < 0) n_v2n = -n_v2n;

    const int nf = patch.mesh.face_count();
    ta.tile.resize(nf);
    ta.color.resize(nf);
    for (int f = 0; f < nf; ++f) {
        const auto& t = patch.mesh.faces[f];
        const Vec3 cen = hyperboloid_normalize(flat.layout[t[0]] + flat.layout[t[1]] +
                                               flat.layout[t[2]]);
        const double d_mn = minkowski_dot(cen, n_mn);
        if (std::abs(d_mn) < 1e-9) ++ta.near_geodesic_count;
        int tile;
        if (d_mn >= -1e-9) {
            const double d1 = minkowski_dot(cen, n_v1n);
            if (std::abs(d1) < 1e-9) ++ta.near_geodesic_count;
            tile = (d1 >= -1e-9) ? 0 : 1;
        } else {
            const double d2 = minkowski_dot(cen, n_v2n);
            if (std::abs(d2) < 1e-9) ++ta.near_geodesic_count;
            tile = (d2 >= -1e-9) ? 2 : 3;
        }
        ta.tile[f] = tile;
        ta.color[f] = tile_color(tile);
    }

    // The four sectors meet at N; a face straddling a sector there can touch
    // the diagonally opposite tile (same color).  Reassign such faces to the
    // separating tile with the best margin until all contacts alternate.
    MeshEdges es = build_edges(patch.mesh);
    const auto margins = [&](int f) {
        const auto& t = patch.mesh.faces[f];
        const Vec3 cen = hyperboloid_normalize(flat.layout[t[0]] + flat.layout[t[1]] +
                                               flat.layout[t[2]]);
        return std::array<double, 3>{minkowski_dot(cen, n_mn),
                                     minkowski_dot(cen, n_v1n),
                                     minkowski_dot(cen, n_v2n)};
    };
    for (int pass = 0; pass < 10; ++pass) {
        int fixed = 0;
        for (const Edge& e : es.edges) {
            if (e.boundary()) continue;
            const int ta0 = ta.tile[e.f0], ta1 = ta.tile[e.f1];
            if (ta0 == ta1 || tile_color(ta0) != tile_color(ta1)) continue;
            // diagonal contact {0,3} or {1,2}: move the face with the smaller
            // margin into an adjacent tile of the other color
            const auto m0 = margins(e.f0), m1 = margins(e.f1);
            const double w0 = std::min({std::abs(m0[0]), std::abs(m0[1]), std::abs(m0[2])});
            const double w1 = std::min({std::abs(m1[0]), std::abs(m1[1]), std::abs(m1[2])});
            const int f = (w0 <= w1) ? e.f0 : e.f1;
            const auto m = (w0 <= w1) ? m0 : m1;
            const int cur = ta.tile[f];
            // candidate neighbors in the tile graph: 0-1, 0-2, 1-3, 2-3
            int next;
            if (cur == 0) next = (std::abs(m[1]) < std::abs(m[0])) ? 1 : 2;
            else if (cur == 3) next = (std::abs(m[2]) < std::abs(m[0])) ? 2 : 1;
            else if (cur == 1) next = (std::abs(m[1]) < std::abs(m[0])) ? 0 : 3;
            else next = (std::abs(m[2]) < std::abs(m[0])) ? 0 : 3;
            ta.tile[f] = next;
            ta.color[f] = tile_color(next);
            ++fixed;
            ++ta.reassigned_count;
        }
        if (fixed == 0) break;
    }
    for (const Edge& e : es.edges) {
        if (e.boundary()) continue;
        if (ta.tile[e.f0] != ta.tile[e.f1] &&
            ta.color[e.f0] == ta.color[e.f1])
            throw Error("tile_quad: could not resolve diagonal tile contact");
    }
    return ta;
}

// Hyperbolic area of each tile (sum of face excesses).
inline std::array<double, 4> tile_areas(const PatchMesh& patch, const FlattenedPatch& flat,
                                        const TileAssignment& ta) {
    std::array<double, 4> areas{};
    for (int f = 0; f < patch.mesh.face_count(); ++f) {
        const auto& t = patch.mesh.faces[f];
        const double a = flat.hyperbolic_lengths[flat.edge_index(t[1], t[2])];
        const double b = flat.hyperbolic_lengths[flat.edge_index(t[0], t[2])];
        const double c = flat.hyperbolic_lengths[flat.edge_index(t[0], t[1])];
        const auto ang = hyp_triangle_angles(a, b, c);
        areas[ta.tile[f]] += kPi - ang[0] - ang[1] - ang[2];
    }
    return areas;
}

} // namespace cct
