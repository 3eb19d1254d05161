#pragma once

#include <cmath>
#include <vector>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/vecmath.hpp"

namespace mgs {

// H x W x 3 linear-RGB raster. Row-major, channel-interleaved.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<double> data;  // size = height * width * 3

    ImageBuffer() = default;
    ImageBuffer(int w, int h, Vec3 fill = {0, 0, 0}) : width(w), height(h), data(size_t(w) * h * 3) {
        for (int i = 0; i < w * h; ++i) {
            data[3 * i + 0] = fill.x;
            data[3 * i + 1] = fill.y;
            data[3 * i + 2] = fill.z;
        }
    }

    double& at(int x, int y, int c) { return data[(size_t(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(size_t(y) * width + x) * 3 + c]; }

    Vec3 pixel(int x, int y) const { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }
    void set_pixel(int x, int y, Vec3 v) {
        at(x, y, 0) = v.x;
        at(x, y, 1) = v.y;
        at(x, y, 2) = v.z;
    }

    bool same_shape(const ImageBuffer& o) const { return width == o.width && height == o.height; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* who) {
    if (!a.same_shape(b))
        throw DimensionMismatch(std::string(who) + ": image shapes differ (" + std::to_string(a.width) +
                                "x" + std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                std::to_string(b.height) + ")");
}

inline double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) m = std::fmax(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace mgs
