#pragma once

#include "cct/conformal.hpp"
#include "cct/octahedral.hpp"
#include "cct/patch.hpp"
#include "cct/trimesh.hpp"

#include <cstring>
#include <unordered_map>
#include <vector>

namespace cct {

namespace assemble_detail {

struct BitKey {
    std::array<std::uint64_t, 3> bits;
    bool operator==(const BitKey&) const = default;
};

struct BitKeyHash {
    size_t operator()(const BitKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (const std::uint64_t v : k.bits) {
            h ^= v;
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

inline BitKey key_of(const Vec3& p) {
    BitKey k;
    for (int i = 0; i < 3; ++i) {
        const double v = p[i] + 0.0;  // -0.0 -> +0.0
        std::memcpy(&k.bits[i], &v, sizeof(double));
    }
    return k;
}

} // namespace assemble_detail

// Replicate the tiled patch over the 48-element group of the cube and weld
// along the wall planes.  Boundary vertices are snapped exactly onto their
// planes first, so mirror images coincide bitwise and welding is exact.
// Per-copy tile ids are copy*4 + local tile; colors flip on the
// orientation-reversing elements.
inline TiledSurface assemble(const PatchMesh& patch, const TileAssignment& tiles) {
    if (static_cast<int>(tiles.tile.size()) != patch.mesh.face_count())
        throw Error("assemble: tile assignment size mismatch");

    // exact wall snap (they are already within 1e-9 by construction)
    TriMesh base = patch.mesh;
    for (int v = 0; v < base.vertex_count(); ++v) {
        const std::uint8_t m = patch.planes[v];
        if (m == 0) continue;
        Vec3& p = base.vertices[v];
        const Vec3 before = p;
        patch_detail::snap_to_planes(p, m);
        if ((before - p).norm() > 1e-8)
            throw Error("assemble: boundary vertex " + std::to_string(v) +
                        " too far from its wall plane");
    }

    const auto group = octahedral_group();
    TiledSurface out;
    std::unordered_map<assemble_detail::BitKey, int, assemble_detail::BitKeyHash> weld;
    std::vector<int> vmap(base.vertices.size());

    for (size_t copy = 0; copy < group.size(); ++copy) {
        const SignedPermutation& g = group[copy];
        const bool reversed = g.determinant() < 0;
        for (int v = 0; v < base.vertex_count(); ++v) {
            Vec3 p = g.apply(base.vertices[v]);
            for (int i = 0; i < 3; ++i) p[i] += 0.0;
            const auto key = assemble_detail::key_of(p);
            auto it = weld.find(key);
            if (it == weld.end()) {
                it = weld.emplace(key, out.mesh.vertex_count()).first;
                out.mesh.vertices.push_back(p);
            }
            vmap[v] = it->second;
        }
        for (int f = 0; f < base.face_count(); ++f) {
            auto t = base.faces[f];
            std::array<int, 3> mapped{vmap[t[0]], vmap[t[1]], vmap[t[2]]};
            if (reversed) std::swap(mapped[1], mapped[2]);
            if (mapped[0] == mapped[1] || mapped[1] == mapped[2] || mapped[0] == mapped[2])
                throw Error("assemble: face collapsed by welding");
            out.mesh.faces.push_back(mapped);
            out.tile.push_back(static_cast<int>(copy) * 4 + tiles.tile[f]);
            out.color.push_back(tiles.color[f] ^ static_cast<std::uint8_t>(reversed ? 1 : 0));
        }
    }

    // validation
    MeshEdges es = build_edges(out.mesh);
    for (const Edge& e : es.edges)
        if (e.boundary())
            throw Error("assemble: welding left a boundary edge (" + std::to_string(e.a) +
                        ", " + std::to_string(e.b) + ")");
    if (!consistently_oriented(out.mesh))
        throw Error("assemble: inconsistent face orientation");

    const int chi = euler_characteristic(out.mesh, es);
    if (chi % 2 != 0) throw Error("assemble: odd Euler characteristic");
    out.genus = (2 - chi) / 2;
    if (patch.contour_value > -1.0 && patch.contour_value < 1.0 && chi != -8)
        throw Error("assemble: expected Euler characteristic -8, got " + std::to_string(chi));

    // color alternation across tile borders
    for (const Edge& e : es.edges)
        if (out.tile[e.f0] != out.tile[e.f1] && out.color[e.f0] == out.color[e.f1])
            throw Error("assemble: adjacent tiles share a color");
    return out;
}

} // namespace cct
