#pragma once

#include "cct/geometry.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

namespace cct {

// Indexed triangle mesh.  Faces are counterclockwise vertex-index triples.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

struct Edge {
    int a = -1, b = -1;       // a < b
    int f0 = -1, f1 = -1;     // incident faces, f1 == -1 on the boundary
    bool boundary() const { return f1 < 0; }
};

// Undirected edge set with incident faces, built once per mesh.
struct MeshEdges {
    std::vector<Edge> edges;
    std::unordered_map<std::uint64_t, int> index;  // key(a,b) -> edge id

    static std::uint64_t key(int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    }
    int find(int a, int b) const {
        auto it = index.find(key(a, b));
        return it == index.end() ? -1 : it->second;
    }
};

inline MeshEdges build_edges(const TriMesh& mesh) {
    MeshEdges es;
    es.edges.reserve(mesh.faces.size() * 3 / 2);
    for (int f = 0; f < mesh.face_count(); ++f) {
        const auto& tri = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            const std::uint64_t kk = MeshEdges::key(a, b);
            auto it = es.index.find(kk);
            if (it == es.index.end()) {
                Edge e;
                e.a = std::min(a, b);
                e.b = std::max(a, b);
                e.f0 = f;
                es.index.emplace(kk, static_cast<int>(es.edges.size()));
                es.edges.push_back(e);
            } else {
                Edge& e = es.edges[it->second];
                if (e.f1 >= 0) throw Error("build_edges: edge shared by more than 2 faces");
                e.f1 = f;
            }
        }
    }
    return es;
}

inline std::vector<double> edge_lengths(const TriMesh& mesh, const MeshEdges& es) {
    std::vector<double> len(es.edges.size());
    for (size_t i = 0; i < es.edges.size(); ++i)
        len[i] = (mesh.vertices[es.edges[i].a] - mesh.vertices[es.edges[i].b]).norm();
    return len;
}

inline double face_area(const TriMesh& mesh, int f) {
    const auto& t = mesh.faces[f];
    return 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                     .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                     .norm();
}

inline Vec3 face_normal(const TriMesh& mesh, int f) {
    const auto& t = mesh.faces[f];
    return (mesh.vertices[t[1]] - mesh.vertices[t[0]])
        .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
}

// Corner angles of face f in radians, per vertex slot.
inline std::array<double, 3> face_angles(const TriMesh& mesh, int f) {
    const auto& t = mesh.faces[f];
    std::array<double, 3> ang;
    for (int k = 0; k < 3; ++k) {
        const Vec3 u = mesh.vertices[t[(k + 1) % 3]] - mesh.vertices[t[k]];
        const Vec3 v = mesh.vertices[t[(k + 2) % 3]] - mesh.vertices[t[k]];
        ang[k] = std::acos(clamp_unit(u.dot(v) / (u.norm() * v.norm())));
    }
    return ang;
}

inline int euler_characteristic(const TriMesh& mesh, const MeshEdges& es) {
    return mesh.vertex_count() - static_cast<int>(es.edges.size()) + mesh.face_count();
}

// Ordered boundary loops (each a closed cycle of vertex indices).
inline std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh, const MeshEdges& es) {
    std::unordered_map<int, std::array<int, 2>> next;  // vertex -> up to 2 boundary neighbors
    for (const Edge& e : es.edges) {
        if (!e.boundary()) continue;
        for (auto [u, v] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
            auto& slot = next.try_emplace(u, std::array<int, 2>{-1, -1}).first->second;
            if (slot[0] < 0) slot[0] = v;
            else if (slot[1] < 0) slot[1] = v;
            else throw Error("boundary_loops: vertex on more than 2 boundary edges");
        }
    }
    std::vector<std::vector<int>> loops;
    std::unordered_map<int, bool> used;
    for (const auto& [start, nbrs] : next) {
        if (used[start]) continue;
        std::vector<int> loop;
        int prev = -1, cur = start;
        while (true) {
            loop.push_back(cur);
            used[cur] = true;
            const auto& nn = next.at(cur);
            const int nxt = (nn[0] != prev) ? nn[0] : nn[1];
            if (nxt < 0) throw Error("boundary_loops: open boundary chain");
            if (nxt == start) break;
            prev = cur;
            cur = nxt;
        }
        loops.push_back(std::move(loop));
    }
    // deterministic order: by smallest vertex index, rotated to start there
    for (auto& loop : loops) {
        auto it = std::min_element(loop.begin(), loop.end());
        std::rotate(loop.begin(), it, loop.end());
    }
    std::sort(loops.begin(), loops.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return loops;
}

// Structural validation shared by all mesh producers.  Checks index ranges,
// degenerate faces, edge manifoldness and the per-face triangle inequality.
inline void validate_mesh(const TriMesh& mesh, double min_area = 1e-14) {
    for (const auto& t : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= mesh.vertex_count())
                throw Error("validate_mesh: face index out of range");
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw Error("validate_mesh: face with repeated vertex");
    }
    for (int f = 0; f < mesh.face_count(); ++f) {
        if (face_area(mesh, f) <= min_area) throw Error("validate_mesh: degenerate face");
        const auto& t = mesh.faces[f];
        const double a = (mesh.vertices[t[1]] - mesh.vertices[t[2]]).norm();
        const double b = (mesh.vertices[t[0]] - mesh.vertices[t[2]]).norm();
        const double c = (mesh.vertices[t[0]] - mesh.vertices[t[1]]).norm();
        if (!(a + b > c && b + c > a && a + c > b))
            throw Error("validate_mesh: euclidean triangle inequality violated");
    }
    build_edges(mesh);  // throws on >2 faces per edge
}

// Checks that every interior edge is traversed once in each direction.
inline bool consistently_oriented(const TriMesh& mesh) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.faces)
        for (int k = 0; k < 3; ++k) ++count[{t[k], t[(k + 1) % 3]}];
    for (const auto& [he, n] : count) {
        if (n > 1) return false;
        auto it = count.find({he.second, he.first});
        const int m = it == count.end() ? 0 : it->second;
        if (m > 1) return false;
    }
    return true;
}

inline double signed_volume(const TriMesh& mesh) {
    double v = 0.0;
    for (const auto& t : mesh.faces)
        v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
    return v / 6.0;
}

// Closed surface with a tile decomposition: per-face tile id and color.
struct TiledSurface {
    TriMesh mesh;
    std::vector<int> tile;            // per face
    std::vector<std::uint8_t> color;  // per face, 0 = black, 1 = white
    int genus = 0;
};

} // namespace cct
