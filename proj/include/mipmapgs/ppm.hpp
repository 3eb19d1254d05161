#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/image.hpp"
#include "mipmapgs/scene_io.hpp"

namespace mgs {

// Binary PPM (P6, 8-bit), sRGB-encoded from linear with gamma 2.2.

inline std::uint8_t linear_to_srgb8(double v) {
    v = std::fmin(1.0, std::fmax(0.0, v));
    return std::uint8_t(std::lround(255.0 * std::pow(v, 1.0 / 2.2)));
}
inline double srgb8_to_linear(std::uint8_t v) { return std::pow(double(v) / 255.0, 2.2); }

inline std::string encode_ppm(const ImageBuffer& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.reserve(out.size() + img.data.size());
    for (double v : img.data) out.push_back(char(linear_to_srgb8(v)));
    return out;
}

inline void write_ppm(const ImageBuffer& img, const std::string& path) {
    write_file_atomic(path, encode_ppm(img));
}

inline ImageBuffer decode_ppm(const std::string& bytes) {
    size_t pos = 0;
    auto token = [&]() -> std::string {
        while (pos < bytes.size() && (bytes[pos] == ' ' || bytes[pos] == '\n' || bytes[pos] == '\t' ||
                                      bytes[pos] == '\r' || bytes[pos] == '#')) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                ++pos;
            }
        }
        size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        return bytes.substr(start, pos - start);
    };
    if (token() != "P6") throw ParseError("ppm: not a P6 file");
    int w = std::atoi(token().c_str());
    int h = std::atoi(token().c_str());
    int maxval = std::atoi(token().c_str());
    if (w < 1 || h < 1 || maxval != 255) throw ParseError("ppm: unsupported header");
    ++pos;  // single whitespace after maxval
    if (bytes.size() - pos < size_t(w) * h * 3) throw ParseError("ppm: truncated pixel data");
    ImageBuffer img(w, h);
    for (size_t i = 0; i < size_t(w) * h * 3; ++i)
        img.data[i] = srgb8_to_linear(std::uint8_t(bytes[pos + i]));
    return img;
}

inline ImageBuffer read_ppm(const std::string& path) { return decode_ppm(read_file(path)); }

}  // namespace mgs
