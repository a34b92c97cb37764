#pragma once

#include "cct/conformal.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace cct {

namespace svg_detail {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

inline void open_file(std::ofstream& f, const std::string& path) {
    f.open(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
}

} // namespace svg_detail

// Poincare-disk drawing of a flattened patch; faces filled white/black when
// a tile assignment is given, a single neutral fill otherwise.
inline void export_layout_svg(const PatchMesh& patch, const FlattenedPatch& flat,
                              const TileAssignment* tiles, const std::string& path) {
    if (flat.layout.empty()) throw Error("export_layout_svg: layout missing");
    std::ofstream f;
    svg_detail::open_file(f, path);
    const double scale = 400.0;
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-420 -420 840 840\">\n";
    f << "<circle cx=\"0\" cy=\"0\" r=\"" << svg_detail::num(scale)
      << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";
    for (int face = 0; face < patch.mesh.face_count(); ++face) {
        const auto& t = patch.mesh.faces[face];
        std::string fill = "#9fbf9f";
        if (tiles) fill = tiles->color[face] ? "#e6e6e6" : "#1e1e1e";
        f << "<polygon points=\"";
        for (int s = 0; s < 3; ++s) {
            const Vec2 p = poincare_disk(flat.layout[t[s]]);
            f << svg_detail::num(p.x() * scale) << "," << svg_detail::num(-p.y() * scale)
              << (s < 2 ? " " : "");
        }
        f << "\" fill=\"" << fill << "\" stroke=\"" << fill << "\" stroke-width=\"0.4\"/>\n";
    }
    f << "</svg>\n";
}

} // namespace cct
