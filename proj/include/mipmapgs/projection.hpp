#pragma once

#include <cmath>
#include <optional>

#include "mipmapgs/camera.hpp"
#include "mipmapgs/gaussian.hpp"
#include "mipmapgs/vecmath.hpp"

namespace mgs {

inline constexpr double kNearPlane = 0.01;
inline constexpr double kAlphaMax = 0.99;
inline constexpr double kAlphaSkip = 1.0 / 255.0;
// Camera-space x/z, y/z are clamped to this multiple of the frustum
// half-extent before the Jacobian is formed.
inline constexpr double kFrustumClamp = 1.3;

struct FilterMode {
    enum Kind { None, ConstantDilation } kind = ConstantDilation;
    double s = 0.3;

    static FilterMode none() { return {None, 0.0}; }
    static FilterMode dilation(double s) { return {ConstantDilation, s}; }
};

struct Splat2D {
    Vec2 mean2d;     // pixels
    Sym2 cov2d;      // pixels^2, post-dilation
    double depth = 0.0;
    Vec3 color;      // shaded color at this view, clamped to [0,1]
    double opacity = 0.0;
    double radius = 0.0;  // 3-sigma culling extent in pixels
};

// Everything the backward pass needs to re-derive the chain for one splat.
struct SplatGeom {
    Splat2D splat;
    Vec3 t;            // camera-space position
    bool clamp_x = false, clamp_y = false;  // frustum clamp engaged in J
    double tx_used = 0.0, ty_used = 0.0;    // clamped coordinates used in J
    Sym2 conic;        // cov2d^-1
    Vec3 dir;          // view direction used for SH
    double dir_len = 0.0;
    Vec3 color_raw;    // SH value before [0,1] clamping
};

inline std::optional<SplatGeom> project_gaussian_detail(const Gaussian3D& g, const Camera& cam,
                                                        FilterMode filter, int sh_degree) {
    SplatGeom geo;
    Vec3 t = cam.to_camera(g.position);
    if (t.z <= kNearPlane) return std::nullopt;
    geo.t = t;

    double inv_z = 1.0 / t.z;
    Vec2 mean2d = {cam.fx * t.x * inv_z + cam.cx, cam.fy * t.y * inv_z + cam.cy};

    // EWA affine approximation: first-order Jacobian at the (clamped) mean.
    double lim_x = kFrustumClamp * (0.5 * cam.width / cam.fx);
    double lim_y = kFrustumClamp * (0.5 * cam.height / cam.fy);
    double xz = t.x * inv_z, yz = t.y * inv_z;
    geo.clamp_x = xz < -lim_x || xz > lim_x;
    geo.clamp_y = yz < -lim_y || yz > lim_y;
    double tx = std::fmin(lim_x, std::fmax(-lim_x, xz)) * t.z;
    double ty = std::fmin(lim_y, std::fmax(-lim_y, yz)) * t.z;
    geo.tx_used = tx;
    geo.ty_used = ty;

    // J rows (2x3), then M = J * W.
    Vec3 j0 = {cam.fx * inv_z, 0.0, -cam.fx * tx * inv_z * inv_z};
    Vec3 j1 = {0.0, cam.fy * inv_z, -cam.fy * ty * inv_z * inv_z};
    Mat3 wt = transpose(cam.rot);
    Vec3 m0 = wt * j0;  // row 0 of M, as a vector
    Vec3 m1 = wt * j1;

    Mat3 cov3 = build_covariance(g.rotation, g.log_scale).matrix;
    Vec3 c0 = cov3 * m0;
    Vec3 c1 = cov3 * m1;
    Sym2 cov2d = {dot(m0, c0), dot(m0, c1), dot(m1, c1)};
    if (filter.kind == FilterMode::ConstantDilation) {
        cov2d.xx += filter.s;
        cov2d.yy += filter.s;
    }
    if (det(cov2d) <= 0.0) return std::nullopt;

    double radius = 3.0 * std::sqrt(eig_max(cov2d));
    if (mean2d.x + radius < 0.0 || mean2d.x - radius > cam.width || mean2d.y + radius < 0.0 ||
        mean2d.y - radius > cam.height)
        return std::nullopt;

    geo.conic = inverse(cov2d);
    geo.dir = g.position - cam.position();
    geo.dir_len = norm(geo.dir);
    Vec3 nd = {geo.dir.x / geo.dir_len, geo.dir.y / geo.dir_len, geo.dir.z / geo.dir_len};
    geo.color_raw = eval_sh_raw(g, nd, sh_degree);

    geo.splat.mean2d = mean2d;
    geo.splat.cov2d = cov2d;
    geo.splat.depth = t.z;
    geo.splat.color = {std::fmin(1.0, std::fmax(0.0, geo.color_raw.x)),
                       std::fmin(1.0, std::fmax(0.0, geo.color_raw.y)),
                       std::fmin(1.0, std::fmax(0.0, geo.color_raw.z))};
    geo.splat.opacity = g.effective_opacity();
    geo.splat.radius = radius;
    return geo;
}

// Culled is a normal outcome (nullopt), not an error.
inline std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam, FilterMode filter,
                                               int sh_degree = 0) {
    auto geo = project_gaussian_detail(g, cam, filter, sh_degree);
    if (!geo) return std::nullopt;
    return geo->splat;
}

// opacity * G^2D(pixel), clamped to kAlphaMax. Contributions below
// kAlphaSkip are treated as zero by the rasterizer.
inline double splat_alpha(const Splat2D& sp, Vec2 pixel) {
    Sym2 conic = inverse(sp.cov2d);
    Vec2 d = pixel - sp.mean2d;
    double m = qform(conic, d);
    return std::fmin(sp.opacity * std::exp(-0.5 * m), kAlphaMax);
}

}  // namespace mgs
