#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/vecmath.hpp"

namespace mgs {

// Effective scales are clamped below this to keep covariances invertible.
inline constexpr double kScaleFloor = 1e-6;
inline constexpr int kMaxShDegree = 2;
inline constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);

constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

// One primitive. Rotation is stored as a free 4-vector for the optimizer and
// normalized at evaluation; scales live in log space; opacity pre-sigmoid.
// SH coefficients are coefficient-major, one RGB triple per basis function.
struct Gaussian3D {
    Vec3 position;
    Quat rotation;
    Vec3 log_scale;
    double opacity_logit = 0.0;
    std::array<Vec3, kMaxShCoeffs> sh_coeffs{};

    Vec3 effective_scale() const {
        return {std::fmax(std::exp(log_scale.x), kScaleFloor),
                std::fmax(std::exp(log_scale.y), kScaleFloor),
                std::fmax(std::exp(log_scale.z), kScaleFloor)};
    }
    double effective_opacity() const { return sigmoid(opacity_logit); }
};

struct SceneMeta {
    double creation_scale = 1.0;  // zoom factor the scene was last optimized for
    bool has_seed = false;
    std::uint64_t seed = 0;
};

struct Scene {
    std::vector<Gaussian3D> gaussians;
    int sh_degree = 1;
    SceneMeta meta;

    size_t count() const { return gaussians.size(); }
};

struct Covariance3 {
    Mat3 matrix;
};

// Sigma = R * diag(exp(ls))^2 * R'. Total function; the quaternion is
// normalized internally.
inline Covariance3 build_covariance(const Quat& rotation, Vec3 log_scale) {
    Quat q = normalized(rotation);
    Mat3 r = rotation_matrix(q);
    Vec3 s = {std::fmax(std::exp(log_scale.x), kScaleFloor),
              std::fmax(std::exp(log_scale.y), kScaleFloor),
              std::fmax(std::exp(log_scale.z), kScaleFloor)};
    Mat3 m = r * Mat3::diag(s);
    return {m * transpose(m)};
}

// exp(-1/2 (x-mu)' Sigma^-1 (x-mu)), in (0, 1].
inline double eval_gaussian3(const Gaussian3D& g, Vec3 x) {
    Covariance3 cov = build_covariance(g.rotation, g.log_scale);
    auto eig = sym3_eigenvalues(cov.matrix);
    if (eig[0] < 1e-12)
        throw DegenerateCovariance("eval_gaussian3: covariance eigenvalue " + std::to_string(eig[0]) +
                                   " below 1e-12");
    Vec3 d = x - g.position;
    Vec3 sd = inverse(cov.matrix) * d;
    return std::exp(-0.5 * dot(d, sd));
}

// Real SH basis, 3DGS component ordering: dc, then degree-1 bands (y, z, x),
// then degree-2.
inline constexpr double kSH0 = 0.28209479177387814;
inline constexpr double kSH1 = 0.4886025119029199;
inline constexpr double kSH2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                                   -1.0925484305920792, 0.5462742152960396};

inline void sh_basis(Vec3 dir, int degree, double* out) {
    out[0] = kSH0;
    if (degree < 1) return;
    double x = dir.x, y = dir.y, z = dir.z;
    out[1] = -kSH1 * y;
    out[2] = kSH1 * z;
    out[3] = -kSH1 * x;
    if (degree < 2) return;
    out[4] = kSH2[0] * x * y;
    out[5] = kSH2[1] * y * z;
    out[6] = kSH2[2] * (2.0 * z * z - x * x - y * y);
    out[7] = kSH2[3] * x * z;
    out[8] = kSH2[4] * (x * x - y * y);
}

// Gradients of the basis entries w.r.t. the (unnormalized-eval) direction.
inline void sh_basis_grad(Vec3 dir, int degree, Vec3* out) {
    out[0] = {0, 0, 0};
    if (degree < 1) return;
    double x = dir.x, y = dir.y, z = dir.z;
    out[1] = {0, -kSH1, 0};
    out[2] = {0, 0, kSH1};
    out[3] = {-kSH1, 0, 0};
    if (degree < 2) return;
    out[4] = {kSH2[0] * y, kSH2[0] * x, 0};
    out[5] = {0, kSH2[1] * z, kSH2[1] * y};
    out[6] = {-2.0 * kSH2[2] * x, -2.0 * kSH2[2] * y, 4.0 * kSH2[2] * z};
    out[7] = {kSH2[3] * z, 0, kSH2[3] * x};
    out[8] = {2.0 * kSH2[4] * x, -2.0 * kSH2[4] * y, 0};
}

// SH expansion plus the conventional +0.5 offset, before any clamping.
inline Vec3 eval_sh_raw(const Gaussian3D& g, Vec3 view_dir, int degree) {
    double basis[kMaxShCoeffs];
    sh_basis(view_dir, degree, basis);
    Vec3 c = {0.5, 0.5, 0.5};
    int n = sh_coeff_count(degree);
    for (int i = 0; i < n; ++i) c += basis[i] * g.sh_coeffs[i];
    return c;
}

// View-dependent color, clamped to [0, inf). Shading clamps to [0,1] later.
inline Vec3 eval_sh_color(const Gaussian3D& g, Vec3 view_dir, int degree) {
    Vec3 c = eval_sh_raw(g, view_dir, degree);
    return {std::fmax(c.x, 0.0), std::fmax(c.y, 0.0), std::fmax(c.z, 0.0)};
}

}  // namespace mgs
