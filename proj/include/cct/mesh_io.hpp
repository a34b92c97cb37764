#pragma once

#include "cct/trimesh.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cct {

using json = nlohmann::ordered_json;

enum class PlyMode { ascii, binary_little_endian };

inline std::array<std::uint8_t, 3> color_rgb(std::uint8_t color) {
    return color ? std::array<std::uint8_t, 3>{230, 230, 230}
                 : std::array<std::uint8_t, 3>{30, 30, 30};
}

namespace io_detail {

inline std::string shortest_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    for (int prec = 1; prec < 17; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
        std::sscanf(probe, "%lf", &parsed);
        if (parsed == x) return probe;
    }
    return buf;
}

template <typename T>
inline void write_le(std::ostream& os, T value) {
    static_assert(std::endian::native == std::endian::little,
                  "binary PLY writer assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
inline T read_le(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

} // namespace io_detail

inline void write_ply(const TiledSurface& surface, const std::string& path,
                      PlyMode mode = PlyMode::binary_little_endian) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    const TriMesh& mesh = surface.mesh;
    f << "ply\n";
    f << (mode == PlyMode::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n");
    f << "element vertex " << mesh.vertex_count() << "\n";
    f << "property double x\nproperty double y\nproperty double z\n";
    f << "element face " << mesh.face_count() << "\n";
    f << "property list uchar int vertex_indices\n";
    f << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    f << "end_header\n";
    const bool colored = !surface.color.empty();
    if (mode == PlyMode::ascii) {
        for (const Vec3& p : mesh.vertices)
            f << io_detail::shortest_double(p.x()) << " " << io_detail::shortest_double(p.y())
              << " " << io_detail::shortest_double(p.z()) << "\n";
        for (int i = 0; i < mesh.face_count(); ++i) {
            const auto& t = mesh.faces[i];
            const auto rgb = color_rgb(colored ? surface.color[i] : 1);
            f << "3 " << t[0] << " " << t[1] << " " << t[2] << " " << int(rgb[0]) << " "
              << int(rgb[1]) << " " << int(rgb[2]) << "\n";
        }
    } else {
        for (const Vec3& p : mesh.vertices) {
            io_detail::write_le(f, p.x());
            io_detail::write_le(f, p.y());
            io_detail::write_le(f, p.z());
        }
        for (int i = 0; i < mesh.face_count(); ++i) {
            const auto& t = mesh.faces[i];
            io_detail::write_le<std::uint8_t>(f, 3);
            for (const int v : t) io_detail::write_le<std::int32_t>(f, v);
            const auto rgb = color_rgb(colored ? surface.color[i] : 1);
            for (const std::uint8_t c : rgb) io_detail::write_le(f, c);
        }
    }
    if (!f) throw Error("write failure: " + path);
}

// Reads the PLY files produced by write_ply (and float-typed variants).
inline TiledSurface read_ply(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read file: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "ply") throw Error("read_ply: not a PLY file");
    bool binary = false;
    int n_vertex = -1, n_face = -1;
    bool has_color = false;
    bool vertex_double = true;
    std::string element;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt == "binary_little_endian") binary = true;
            else if (fmt != "ascii") throw Error("read_ply: unsupported format " + fmt);
        } else if (word == "element") {
            int count;
            ss >> element >> count;
            if (element == "vertex") n_vertex = count;
            else if (element == "face") n_face = count;
            else throw Error("read_ply: unsupported element " + element);
        } else if (word == "property") {
            std::string type;
            ss >> type;
            if (element == "vertex") {
                if (type == "float" || type == "float32") vertex_double = false;
            } else if (element == "face" && type == "uchar") {
                std::string name;
                ss >> name;
                if (name == "red") has_color = true;
            }
        } else if (word == "end_header") {
            break;
        } else if (word != "comment") {
            throw Error("read_ply: unexpected header line: " + line);
        }
    }
    if (n_vertex < 0 || n_face < 0) throw Error("read_ply: missing element counts");

    TiledSurface out;
    out.mesh.vertices.resize(n_vertex);
    out.mesh.faces.resize(n_face);
    if (has_color) out.color.resize(n_face);
    if (binary) {
        for (auto& p : out.mesh.vertices)
            for (int i = 0; i < 3; ++i)
                p[i] = vertex_double ? io_detail::read_le<double>(f)
                                     : static_cast<double>(io_detail::read_le<float>(f));
        for (int i = 0; i < n_face; ++i) {
            const int n = io_detail::read_le<std::uint8_t>(f);
            if (n != 3) throw Error("read_ply: non-triangular face");
            for (int s = 0; s < 3; ++s) out.mesh.faces[i][s] = io_detail::read_le<std::int32_t>(f);
            if (has_color) {
                const auto r = io_detail::read_le<std::uint8_t>(f);
                io_detail::read_le<std::uint8_t>(f);
                io_detail::read_le<std::uint8_t>(f);
                out.color[i] = r > 128 ? 1 : 0;
            }
        }
    } else {
        for (auto& p : out.mesh.vertices) {
            if (!std::getline(f, line)) throw Error("read_ply: truncated vertex data");
            std::istringstream ss(line);
            ss >> p.x() >> p.y() >> p.z();
        }
        for (int i = 0; i < n_face; ++i) {
            if (!std::getline(f, line)) throw Error("read_ply: truncated face data");
            std::istringstream ss(line);
            int n;
            ss >> n;
            if (n != 3) throw Error("read_ply: non-triangular face");
            auto& t = out.mesh.faces[i];
            ss >> t[0] >> t[1] >> t[2];
            if (has_color) {
                int r, g, b;
                ss >> r >> g >> b;
                out.color[i] = r > 128 ? 1 : 0;
            }
        }
    }
    if (!f) throw Error("read_ply: truncated file");
    return out;
}

// OBJ + MTL with two material groups, black faces first.
inline void write_obj(const TiledSurface& surface, const std::string& obj_path) {
    std::string mtl_path = obj_path;
    if (mtl_path.size() > 4 && mtl_path.substr(mtl_path.size() - 4) == ".obj")
        mtl_path = mtl_path.substr(0, mtl_path.size() - 4);
    mtl_path += ".mtl";

    {
        std::ofstream m(mtl_path, std::ios::binary);
        if (!m) throw Error("cannot write file: " + mtl_path);
        const auto diffuse = [](std::uint8_t c) {
            const auto rgb = color_rgb(c);
            std::string s = "Kd";
            for (const auto v : rgb) s += " " + io_detail::shortest_double(v / 255.0);
            return s;
        };
        m << "newmtl black\n" << diffuse(0) << "\n";
        m << "newmtl white\n" << diffuse(1) << "\n";
    }

    std::ofstream f(obj_path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + obj_path);
    const size_t slash = mtl_path.find_last_of('/');
    f << "mtllib " << (slash == std::string::npos ? mtl_path : mtl_path.substr(slash + 1))
      << "\n";
    for (const Vec3& p : surface.mesh.vertices)
        f << "v " << io_detail::shortest_double(p.x()) << " "
          << io_detail::shortest_double(p.y()) << " " << io_detail::shortest_double(p.z())
          << "\n";
    const bool colored = !surface.color.empty();
    for (const int want : {0, 1}) {
        bool wrote_header = false;
        for (int i = 0; i < surface.mesh.face_count(); ++i) {
            const int c = colored ? surface.color[i] : 1;
            if (c != want) continue;
            if (!wrote_header) {
                f << "usemtl " << (want ? "white" : "black") << "\n";
                wrote_header = true;
            }
            const auto& t = surface.mesh.faces[i];
            f << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
        }
    }
    if (!f) throw Error("write failure: " + obj_path);
}

inline TiledSurface read_obj(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot read file: " + path);
    TiledSurface out;
    std::string line;
    int current_color = 1;
    while (std::getline(f, line)) {
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word == "v") {
            Vec3 p;
            ss >> p.x() >> p.y() >> p.z();
            out.mesh.vertices.push_back(p);
        } else if (word == "usemtl") {
            std::string name;
            ss >> name;
            current_color = (name == "white") ? 1 : 0;
        } else if (word == "f") {
            std::array<int, 3> t;
            ss >> t[0] >> t[1] >> t[2];
            for (int& v : t) --v;
            out.mesh.faces.push_back(t);
            out.color.push_back(static_cast<std::uint8_t>(current_color));
        }
    }
    return out;
}

// JSON report: UTF-8, insertion-ordered keys, shortest round-trip numbers.
inline void write_report(const json& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    f << report.dump(2) << "\n";
    if (!f) throw Error("write failure: " + path);
}

} // namespace cct
