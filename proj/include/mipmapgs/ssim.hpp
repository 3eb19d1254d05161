#pragma once

#include <cmath>

#include "mipmapgs/image.hpp"

namespace mgs {
namespace ssim_detail {

inline constexpr int kWindow = 11;
inline constexpr int kRadius = kWindow / 2;
inline constexpr double kSigma = 1.5;
inline constexpr double kC1 = 0.01 * 0.01;
inline constexpr double kC2 = 0.03 * 0.03;

struct Window {
    double w[kWindow][kWindow];
};

inline const Window& gaussian_window() {
    static const Window win = [] {
        Window w{};
        double sum = 0.0;
        for (int i = 0; i < kWindow; ++i)
            for (int j = 0; j < kWindow; ++j) {
                int di = i - kRadius, dj = j - kRadius;
                w.w[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
                sum += w.w[i][j];
            }
        for (auto& row : w.w)
            for (double& v : row) v /= sum;
        return w;
    }();
    return win;
}

// reflect-101 boundary (no edge repeat)
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

struct LocalStats {
    double mx, my, sxx, syy, sxy;
};

inline LocalStats window_stats(const ImageBuffer& a, const ImageBuffer& b, int x, int y, int c) {
    const Window& win = gaussian_window();
    LocalStats s{0, 0, 0, 0, 0};
    for (int dy = -kRadius; dy <= kRadius; ++dy) {
        int yy = reflect(y + dy, a.height);
        for (int dx = -kRadius; dx <= kRadius; ++dx) {
            int xx = reflect(x + dx, a.width);
            double wt = win.w[dy + kRadius][dx + kRadius];
            double va = a.at(xx, yy, c), vb = b.at(xx, yy, c);
            s.mx += wt * va;
            s.my += wt * vb;
            s.sxx += wt * va * va;
            s.syy += wt * vb * vb;
            s.sxy += wt * va * vb;
        }
    }
    s.sxx -= s.mx * s.mx;
    s.syy -= s.my * s.my;
    s.sxy -= s.mx * s.my;
    return s;
}

inline double local_ssim(const LocalStats& s) {
    return ((2 * s.mx * s.my + kC1) * (2 * s.sxy + kC2)) /
           ((s.mx * s.mx + s.my * s.my + kC1) * (s.sxx + s.syy + kC2));
}

}  // namespace ssim_detail

// Mean local SSIM over all positions and channels (window 11, sigma 1.5,
// unit data range, reflect boundaries).
inline double ssim_mean(const ImageBuffer& a, const ImageBuffer& b) {
    double total = 0.0;
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < a.height; ++y)
            for (int x = 0; x < a.width; ++x)
                total += ssim_detail::local_ssim(ssim_detail::window_stats(a, b, x, y, c));
    return total / double(size_t(a.width) * a.height * 3);
}

// d(ssim_mean)/da, scaled by `upstream`. Scatter form of the local SSIM
// derivative; reflected window taps fold their contribution back inside.
inline ImageBuffer ssim_mean_backward(const ImageBuffer& a, const ImageBuffer& b, double upstream) {
    using namespace ssim_detail;
    ImageBuffer grad(a.width, a.height, {0, 0, 0});
    const Window& win = gaussian_window();
    double scale = upstream / double(size_t(a.width) * a.height * 3);
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < a.height; ++y) {
            for (int x = 0; x < a.width; ++x) {
                LocalStats s = window_stats(a, b, x, y, c);
                double a1 = 2 * s.mx * s.my + kC1, a2 = 2 * s.sxy + kC2;
                double b1 = s.mx * s.mx + s.my * s.my + kC1, b2 = s.sxx + s.syy + kC2;
                double ssim = (a1 * a2) / (b1 * b2);
                // dS/dmu_x, dS/dsigma_xx, dS/dsigma_xy
                double d_mx = (2 * s.my * a2) / (b1 * b2) - ssim * (2 * s.mx) / b1;
                double d_sxx = -ssim / b2;
                double d_sxy = 2 * a1 / (b1 * b2);
                for (int dy = -kRadius; dy <= kRadius; ++dy) {
                    int yy = reflect(y + dy, a.height);
                    for (int dx = -kRadius; dx <= kRadius; ++dx) {
                        int xx = reflect(x + dx, a.width);
                        double wt = win.w[dy + kRadius][dx + kRadius];
                        double va = a.at(xx, yy, c), vb = b.at(xx, yy, c);
                        double d = wt * (d_mx + d_sxx * 2.0 * (va - s.mx) + d_sxy * (vb - s.my));
                        grad.at(xx, yy, c) += scale * d;
                    }
                }
            }
        }
    }
    return grad;
}

}  // namespace mgs
