#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/gaussian.hpp"

namespace mgs {

// Line-oriented scene file. Floats are written as C hex literals (%a), so
// parse(serialize(scene)) round-trips bit-exactly.
//
//   mipmapgs-scene v1
//   sh_degree <int>
//   count <int>
//   meta_scale <hexfloat>
//   [meta_seed <uint64>]
//   g <pos xyz> <rot wxyz> <log_scale xyz> <opacity_logit> <sh ...>
//
// Each record carries 11 + 3*(sh_degree+1)^2 numbers.

namespace scene_io_detail {

inline void put_hex(std::string& out, double v) {
    if (!std::isfinite(v)) throw IoError("scene serialize: non-finite value");
    char buf[48];
    std::snprintf(buf, sizeof(buf), " %a", v);
    out += buf;
}

struct Cursor {
    const char* p;
    int line;
};

inline double next_double(Cursor& c) {
    char* end = nullptr;
    double v = std::strtod(c.p, &end);
    if (end == c.p) throw ParseError("scene parse: expected a number on line " + std::to_string(c.line));
    c.p = end;
    return v;
}

}  // namespace scene_io_detail

inline std::string serialize_scene(const Scene& scene) {
    using scene_io_detail::put_hex;
    std::string out;
    out.reserve(scene.count() * 400 + 128);
    out += "mipmapgs-scene v1\n";
    out += "sh_degree " + std::to_string(scene.sh_degree) + "\n";
    out += "count " + std::to_string(scene.count()) + "\n";
    {
        std::string line = "meta_scale";
        put_hex(line, scene.meta.creation_scale);
        out += line + "\n";
    }
    if (scene.meta.has_seed) out += "meta_seed " + std::to_string(scene.meta.seed) + "\n";
    int n_coeff = sh_coeff_count(scene.sh_degree);
    for (const Gaussian3D& g : scene.gaussians) {
        std::string line = "g";
        for (int a = 0; a < 3; ++a) put_hex(line, g.position[a]);
        for (int c = 0; c < 4; ++c) put_hex(line, g.rotation[c]);
        for (int a = 0; a < 3; ++a) put_hex(line, g.log_scale[a]);
        put_hex(line, g.opacity_logit);
        for (int i = 0; i < n_coeff; ++i)
            for (int ch = 0; ch < 3; ++ch) put_hex(line, g.sh_coeffs[i][ch]);
        out += line + "\n";
    }
    return out;
}

inline Scene parse_scene(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw ParseError(std::string("scene parse: missing ") + what);
        ++lineno;
        return line;
    };

    if (next_line("header") != "mipmapgs-scene v1")
        throw ParseError("scene parse: bad header (want 'mipmapgs-scene v1')");

    Scene scene;
    long count = -1;
    next_line("sh_degree");
    if (std::sscanf(line.c_str(), "sh_degree %d", &scene.sh_degree) != 1 || scene.sh_degree < 0 ||
        scene.sh_degree > kMaxShDegree)
        throw ParseError("scene parse: bad sh_degree line: " + line);
    next_line("count");
    if (std::sscanf(line.c_str(), "count %ld", &count) != 1 || count < 1)
        throw ParseError("scene parse: bad count line: " + line);
    next_line("meta_scale");
    if (line.rfind("meta_scale ", 0) != 0) throw ParseError("scene parse: bad meta_scale line: " + line);
    {
        scene_io_detail::Cursor c{line.c_str() + 10, lineno};
        scene.meta.creation_scale = scene_io_detail::next_double(c);
    }

    int n_coeff = sh_coeff_count(scene.sh_degree);
    scene.gaussians.reserve(size_t(count));
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("meta_seed ", 0) == 0) {
            scene.meta.has_seed = true;
            scene.meta.seed = std::strtoull(line.c_str() + 10, nullptr, 10);
            continue;
        }
        if (line[0] != 'g')
            throw ParseError("scene parse: unexpected line " + std::to_string(lineno) + ": " + line);
        scene_io_detail::Cursor c{line.c_str() + 1, lineno};
        Gaussian3D g;
        for (int a = 0; a < 3; ++a) g.position[a] = scene_io_detail::next_double(c);
        for (int q = 0; q < 4; ++q) g.rotation[q] = scene_io_detail::next_double(c);
        for (int a = 0; a < 3; ++a) g.log_scale[a] = scene_io_detail::next_double(c);
        g.opacity_logit = scene_io_detail::next_double(c);
        for (int i = 0; i < n_coeff; ++i)
            for (int ch = 0; ch < 3; ++ch) g.sh_coeffs[i][ch] = scene_io_detail::next_double(c);
        while (*c.p == ' ') ++c.p;
        if (*c.p != '\0')
            throw ParseError("scene parse: trailing fields on line " + std::to_string(lineno));
        scene.gaussians.push_back(g);
    }
    if (long(scene.count()) != count)
        throw ParseError("scene parse: count says " + std::to_string(count) + " but found " +
                         std::to_string(scene.count()) + " records");
    return scene;
}

// Atomic file write: temp file in place, then rename.
inline void write_file_atomic(const std::string& path, const std::string& bytes) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for write: " + tmp);
        out.write(bytes.data(), std::streamsize(bytes.size()));
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void save_scene(const Scene& scene, const std::string& path) {
    write_file_atomic(path, serialize_scene(scene));
}
inline Scene load_scene(const std::string& path) { return parse_scene(read_file(path)); }

}  // namespace mgs
