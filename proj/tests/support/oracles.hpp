#pragma once

// Test-side oracles, kept independent of the library implementation paths
// they check.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "mipmapgs/camera.hpp"
#include "mipmapgs/gaussian.hpp"
#include "mipmapgs/image.hpp"

namespace oracle {

// --- tiny independent 3x3 helpers -----------------------------------------

using M3 = std::array<std::array<double, 3>, 3>;

inline M3 mul(const M3& a, const M3& b) {
    M3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline M3 tr(const M3& a) {
    M3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
    return r;
}

// R * diag(s)^2 * R' computed the long way from a quaternion.
inline M3 covariance_oracle(double qw, double qx, double qy, double qz, double sx, double sy,
                            double sz) {
    double n = std::sqrt(qw * qw + qx * qx + qy * qy + qz * qz);
    qw /= n, qx /= n, qy /= n, qz /= n;
    M3 r = {{{1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qw * qz), 2 * (qx * qz + qw * qy)},
             {2 * (qx * qy + qw * qz), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qw * qx)},
             {2 * (qx * qz - qw * qy), 2 * (qy * qz + qw * qx), 1 - 2 * (qx * qx + qy * qy)}}};
    M3 s2 = {{{sx * sx, 0, 0}, {0, sy * sy, 0}, {0, 0, sz * sz}}};
    return mul(mul(r, s2), tr(r));
}

// Quadratic form d' A^-1 d via Cramer solve.
inline double mahalanobis2_oracle(const M3& a, std::array<double, 3> d) {
    double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    M3 inv;
    inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    double out = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out += d[i] * inv[i][j] * d[j];
    return out;
}

// --- real spherical harmonics, evaluated directly from the table ----------

inline std::array<double, 9> sh_basis_oracle(double x, double y, double z) {
    return {
        0.28209479177387814,
        -0.4886025119029199 * y,
        0.4886025119029199 * z,
        -0.4886025119029199 * x,
        1.0925484305920792 * x * y,
        -1.0925484305920792 * y * z,
        0.31539156525252005 * (2 * z * z - x * x - y * y),
        -1.0925484305920792 * x * z,
        0.5462742152960396 * (x * x - y * y),
    };
}

// --- image metrics, long-hand ----------------------------------------------

inline double mse_oracle(const mgs::ImageBuffer& a, const mgs::ImageBuffer& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return acc / double(a.data.size());
}

// Straightforward SSIM with an 11x11 Gaussian window (sigma 1.5), C1/C2 on
// unit range, reflect-101 boundaries, channel-averaged. Written flat-footed
// on purpose.
inline double ssim_oracle(const mgs::ImageBuffer& a, const mgs::ImageBuffer& b) {
    const int R = 5;
    double w[11][11];
    double wsum = 0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j) {
            w[i + R][j + R] = std::exp(-(i * i + j * j) / (2.0 * 1.5 * 1.5));
            wsum += w[i + R][j + R];
        }
    for (auto& row : w)
        for (double& v : row) v /= wsum;

    auto reflect = [](int i, int n) {
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
        return i;
    };

    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    long count = 0;
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < a.height; ++y) {
            for (int x = 0; x < a.width; ++x) {
                double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
                for (int dy = -R; dy <= R; ++dy) {
                    for (int dx = -R; dx <= R; ++dx) {
                        double wt = w[dy + R][dx + R];
                        double va = a.at(reflect(x + dx, a.width), reflect(y + dy, a.height), c);
                        double vb = b.at(reflect(x + dx, b.width), reflect(y + dy, b.height), c);
                        mx += wt * va;
                        my += wt * vb;
                        sxx += wt * va * va;
                        syy += wt * vb * vb;
                        sxy += wt * va * vb;
                    }
                }
                sxx -= mx * mx;
                syy -= my * my;
                sxy -= mx * my;
                double s = ((2 * mx * my + c1) * (2 * sxy + c2)) /
                           ((mx * mx + my * my + c1) * (sxx + syy + c2));
                total += s;
                ++count;
            }
        }
    }
    return total / double(count);
}

// --- scene builders for rasterizer tests ------------------------------------

inline mgs::Camera axis_camera(int w, int h, double f) {
    mgs::Camera cam;
    cam.fx = cam.fy = f;
    cam.cx = 0.5 * w;
    cam.cy = 0.5 * h;
    cam.width = w;
    cam.height = h;
    return cam;
}

inline mgs::Gaussian3D blob(mgs::Vec3 pos, double sigma, double opacity, mgs::Vec3 color) {
    mgs::Gaussian3D g;
    g.position = pos;
    g.log_scale = {std::log(sigma), std::log(sigma), std::log(sigma)};
    g.opacity_logit = mgs::logit(opacity);
    g.sh_coeffs[0] = (1.0 / mgs::kSH0) * (color - mgs::Vec3{0.5, 0.5, 0.5});
    return g;
}

// Unconstrained random scene for oracle-equivalence checks.
inline mgs::Scene random_scene(unsigned seed, int k, double extent = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mgs::Scene scene;
    scene.sh_degree = 1;
    for (int i = 0; i < k; ++i) {
        mgs::Gaussian3D g;
        g.position = {extent * (2 * u(rng) - 1), extent * (2 * u(rng) - 1), 2.0 + 4.0 * u(rng)};
        g.rotation = {2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
        if (mgs::norm(g.rotation) < 1e-3) g.rotation = {1, 0, 0, 0};
        g.log_scale = {std::log(0.01 + 0.3 * u(rng)), std::log(0.01 + 0.3 * u(rng)),
                       std::log(0.01 + 0.3 * u(rng))};
        g.opacity_logit = mgs::logit(0.02 + 0.96 * u(rng));
        for (int c = 0; c < 4; ++c)
            g.sh_coeffs[c] = {0.6 * (2 * u(rng) - 1), 0.6 * (2 * u(rng) - 1), 0.6 * (2 * u(rng) - 1)};
        scene.gaussians.push_back(g);
    }
    return scene;
}

// Smooth scene for finite-difference gradient checks: big overlapping blobs
// whose alpha-skip boundary lies outside the viewport, moderate opacities,
// colors away from the clamps. The render is differentiable in every
// parameter over an FD-sized neighborhood.
inline mgs::Scene smooth_scene(unsigned seed, int k = 10) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    mgs::Scene scene;
    scene.sh_degree = 1;
    for (int i = 0; i < k; ++i) {
        mgs::Gaussian3D g;
        g.position = {0.8 * (u(rng) - 0.5), 0.8 * (u(rng) - 0.5), 3.8 + 0.04 * i + 0.01 * u(rng)};
        g.rotation = {2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
        if (mgs::norm(g.rotation) < 1e-3) g.rotation = {1, 0, 0, 0};
        double lo = std::log(1.5), hi = std::log(1.9);
        g.log_scale = {lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng), lo + (hi - lo) * u(rng)};
        g.opacity_logit = mgs::logit(0.2 + 0.3 * u(rng));
        g.sh_coeffs[0] = {(0.25 + 0.5 * u(rng) - 0.5) / mgs::kSH0, (0.25 + 0.5 * u(rng) - 0.5) / mgs::kSH0,
                          (0.25 + 0.5 * u(rng) - 0.5) / mgs::kSH0};
        for (int c = 1; c < 4; ++c)
            g.sh_coeffs[c] = {0.1 * (u(rng) - 0.5), 0.1 * (u(rng) - 0.5), 0.1 * (u(rng) - 0.5)};
        scene.gaussians.push_back(g);
    }
    return scene;
}

}  // namespace oracle
