#pragma once

#include <cmath>
#include <vector>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/image.hpp"

namespace mgs {

enum class Kernel { Bilinear, Lanczos3, Bicubic, NearestNeighbor };

struct ResampleSpec {
    enum Direction { Down, Up } direction = Down;
    int factor = 2;
    Kernel kernel = Kernel::Bilinear;
};

namespace resample_detail {

inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

inline double sinc(double x) {
    if (x == 0.0) return 1.0;
    double px = M_PI * x;
    return std::sin(px) / px;
}
inline double lanczos3(double x) {
    double ax = std::fabs(x);
    return ax < 3.0 ? sinc(x) * sinc(x / 3.0) : 0.0;
}
// Catmull-Rom (Keys, a = -0.5)
inline double bicubic(double x) {
    double ax = std::fabs(x);
    if (ax < 1.0) return 1.5 * ax * ax * ax - 2.5 * ax * ax + 1.0;
    if (ax < 2.0) return -0.5 * ax * ax * ax + 2.5 * ax * ax - 4.0 * ax + 2.0;
    return 0.0;
}

inline double support(Kernel k) {
    switch (k) {
        case Kernel::Lanczos3: return 3.0;
        case Kernel::Bicubic: return 2.0;
        default: return 1.0;
    }
}
inline double eval(Kernel k, double x) {
    switch (k) {
        case Kernel::Lanczos3: return lanczos3(x);
        case Kernel::Bicubic: return bicubic(x);
        case Kernel::Bilinear: return std::fabs(x) < 1.0 ? 1.0 - std::fabs(x) : 0.0;
        default: return 0.0;
    }
}

// Separable 1D pass along x. Weights are renormalized per output sample so
// constants are reproduced exactly (partition of unity). `scale` widens the
// kernel for antialiased downsampling (scale = N) and is 1 for upsampling.
inline ImageBuffer resample_x(const ImageBuffer& img, int out_w, double step, double scale, Kernel k) {
    ImageBuffer out(out_w, img.height);
    double sup = support(k) * scale;
    for (int ox = 0; ox < out_w; ++ox) {
        double sx = (ox + 0.5) * step - 0.5;
        if (k == Kernel::NearestNeighbor) {
            int ix = reflect(int(std::floor(sx + 0.5)), img.width);
            for (int y = 0; y < img.height; ++y)
                for (int c = 0; c < 3; ++c) out.at(ox, y, c) = img.at(ix, y, c);
            continue;
        }
        int lo = int(std::ceil(sx - sup)), hi = int(std::floor(sx + sup));
        std::vector<double> w;
        double wsum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            double v = eval(k, (i - sx) / scale);
            w.push_back(v);
            wsum += v;
        }
        for (int y = 0; y < img.height; ++y) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int i = lo; i <= hi; ++i) acc += w[i - lo] * img.at(reflect(i, img.width), y, c);
                out.at(ox, y, c) = acc / wsum;
            }
        }
    }
    return out;
}

inline ImageBuffer transpose_image(const ImageBuffer& img) {
    ImageBuffer out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(x, y, c);
    return out;
}

inline ImageBuffer reflect_pad_to_multiple(const ImageBuffer& img, int n) {
    int w = ((img.width + n - 1) / n) * n;
    int h = ((img.height + n - 1) / n) * n;
    if (w == img.width && h == img.height) return img;
    ImageBuffer out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = img.at(reflect(x, img.width), reflect(y, img.height), c);
    return out;
}

}  // namespace resample_detail

// Integer-factor downsampling with pixel-center alignment. The bilinear
// kernel reduces to the aligned N x N block average (identical to plain
// bilinear at N = 2 and exactly cascade-consistent: x4 then x2 equals x8);
// Lanczos3/bicubic use kernels widened by N. Non-divisible dimensions are
// reflect-padded first.
inline ImageBuffer downsample(const ImageBuffer& img, int n, Kernel kernel = Kernel::Bilinear) {
    if (n < 2) throw InvalidFactor("downsample: factor must be >= 2, got " + std::to_string(n));
    ImageBuffer src = resample_detail::reflect_pad_to_multiple(img, n);
    int out_w = src.width / n, out_h = src.height / n;
    if (kernel == Kernel::Bilinear) {
        ImageBuffer out(out_w, out_h);
        double inv = 1.0 / double(n * n);
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox)
                for (int c = 0; c < 3; ++c) {
                    double acc = 0.0;
                    for (int dy = 0; dy < n; ++dy)
                        for (int dx = 0; dx < n; ++dx) acc += src.at(ox * n + dx, oy * n + dy, c);
                    out.at(ox, oy, c) = acc * inv;
                }
        return out;
    }
    using namespace resample_detail;
    ImageBuffer tmp = resample_x(src, out_w, double(n), double(n), kernel);
    ImageBuffer out = transpose_image(resample_x(transpose_image(tmp), out_h, double(n), double(n), kernel));
    for (double& v : out.data) v = std::fmin(1.0, std::fmax(0.0, v));
    return out;
}

// Integer-factor upsampling; Lanczos3 is the default pseudo-GT kernel for
// zoom-in. Output is clamped to [0,1] (Lanczos/bicubic overshoot).
inline ImageBuffer upsample(const ImageBuffer& img, int n, Kernel kernel = Kernel::Lanczos3) {
    if (n < 2) throw InvalidFactor("upsample: factor must be >= 2, got " + std::to_string(n));
    using namespace resample_detail;
    int out_w = img.width * n, out_h = img.height * n;
    ImageBuffer tmp = resample_x(img, out_w, 1.0 / double(n), 1.0, kernel);
    ImageBuffer out = transpose_image(resample_x(transpose_image(tmp), out_h, 1.0 / double(n), 1.0, kernel));
    if (kernel == Kernel::Lanczos3 || kernel == Kernel::Bicubic)
        for (double& v : out.data) v = std::fmin(1.0, std::fmax(0.0, v));
    return out;
}

}  // namespace mgs
