#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mipmapgs/camera.hpp"
#include "mipmapgs/gaussian.hpp"
#include "mipmapgs/image.hpp"
#include "mipmapgs/projection.hpp"
#include "mipmapgs/threading.hpp"
#include "mipmapgs/vecmath.hpp"

namespace mgs {

struct RenderConfig {
    int tile_size = 16;
    double transmittance_floor = 1e-4;
    Vec3 background = {0, 0, 0};
    FilterMode filter = FilterMode::dilation(0.3);
};

// Gradients for every Gaussian attribute, plus the per-call densification
// statistics (screen-space positional gradient norm, NDC convention, and a
// visibility hit flag).
struct SceneGradients {
    std::vector<Vec3> d_position;
    std::vector<Quat> d_rotation;
    std::vector<Vec3> d_log_scale;
    std::vector<double> d_opacity_logit;
    std::vector<std::array<Vec3, kMaxShCoeffs>> d_sh;
    std::vector<double> screen_grad_norm;
    std::vector<std::uint8_t> hit;

    void resize(size_t n) {
        d_position.assign(n, Vec3{});
        d_rotation.assign(n, Quat{0, 0, 0, 0});
        d_log_scale.assign(n, Vec3{});
        d_opacity_logit.assign(n, 0.0);
        d_sh.assign(n, {});
        screen_grad_norm.assign(n, 0.0);
        hit.assign(n, 0);
    }
    size_t size() const { return d_position.size(); }

    bool all_finite() const {
        for (size_t i = 0; i < size(); ++i) {
            const Vec3& p = d_position[i];
            const Vec3& s = d_log_scale[i];
            const Quat& q = d_rotation[i];
            if (!std::isfinite(p.x + p.y + p.z + s.x + s.y + s.z) ||
                !std::isfinite(q.w + q.x + q.y + q.z) || !std::isfinite(d_opacity_logit[i]) ||
                !std::isfinite(screen_grad_norm[i]))
                return false;
            for (const Vec3& c : d_sh[i])
                if (!std::isfinite(c.x + c.y + c.z)) return false;
        }
        return true;
    }
};

namespace detail {

// Bin extent covering every pixel whose Gaussian value can reach the 1/255
// alpha skip; slightly above sqrt(2 ln 255)/3 times the stored 3-sigma
// radius, so binning never drops a contributing pixel.
inline constexpr double kBinRadiusScale = 1.11;

struct FrameSplats {
    std::vector<SplatGeom> geoms;   // depth-sorted, index tie-break
    std::vector<int> gauss_index;   // parallel: original scene index
};

inline FrameSplats prepare_frame(const Scene& scene, const Camera& cam, FilterMode filter) {
    size_t n = scene.count();
    std::vector<std::optional<SplatGeom>> projected(n);
    parallel_for(int(n), [&](int i) {
        projected[i] = project_gaussian_detail(scene.gaussians[i], cam, filter, scene.sh_degree);
    });
    FrameSplats frame;
    frame.geoms.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (projected[i]) {
            frame.geoms.push_back(*projected[i]);
            frame.gauss_index.push_back(int(i));
        }
    }
    // Global depth sort with stable index tie-break: fixes the blend order.
    std::vector<int> order(frame.geoms.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double da = frame.geoms[a].splat.depth, db = frame.geoms[b].splat.depth;
        if (da != db) return da < db;
        return frame.gauss_index[a] < frame.gauss_index[b];
    });
    FrameSplats sorted;
    sorted.geoms.reserve(order.size());
    sorted.gauss_index.reserve(order.size());
    for (int idx : order) {
        sorted.geoms.push_back(frame.geoms[idx]);
        sorted.gauss_index.push_back(frame.gauss_index[idx]);
    }
    return sorted;
}

struct TileGrid {
    int tile = 16;
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::vector<int>> lists;  // per tile, positions into geoms (depth order)
};

inline TileGrid build_tiles(const FrameSplats& frame, const Camera& cam, int tile_size) {
    TileGrid grid;
    grid.tile = tile_size;
    grid.tiles_x = (cam.width + tile_size - 1) / tile_size;
    grid.tiles_y = (cam.height + tile_size - 1) / tile_size;
    grid.lists.resize(size_t(grid.tiles_x) * grid.tiles_y);
    for (size_t pos = 0; pos < frame.geoms.size(); ++pos) {
        const Splat2D& sp = frame.geoms[pos].splat;
        double rbin = sp.radius * kBinRadiusScale;
        int ix0 = std::max(0, int(std::floor(sp.mean2d.x - rbin - 0.5)));
        int ix1 = std::min(cam.width - 1, int(std::ceil(sp.mean2d.x + rbin - 0.5)));
        int iy0 = std::max(0, int(std::floor(sp.mean2d.y - rbin - 0.5)));
        int iy1 = std::min(cam.height - 1, int(std::ceil(sp.mean2d.y + rbin - 0.5)));
        if (ix0 > ix1 || iy0 > iy1) continue;
        for (int ty = iy0 / tile_size; ty <= iy1 / tile_size; ++ty)
            for (int tx = ix0 / tile_size; tx <= ix1 / tile_size; ++tx)
                grid.lists[size_t(ty) * grid.tiles_x + tx].push_back(int(pos));
    }
    return grid;
}

// Front-to-back blend of one pixel over the given splat positions. Calls
// visit(pos, alpha, transmittance_before) for every blended splat and
// returns the final transmittance. Blending stops before a splat that would
// push the transmittance below the floor.
template <typename Visit>
inline double blend_pixel(const FrameSplats& frame, const int* begin, const int* end, Vec2 p,
                          double t_floor, Visit&& visit) {
    double T = 1.0;
    for (const int* it = begin; it != end; ++it) {
        const SplatGeom& geo = frame.geoms[*it];
        Vec2 d = p - geo.splat.mean2d;
        double alpha = std::fmin(geo.splat.opacity * std::exp(-0.5 * qform(geo.conic, d)), kAlphaMax);
        if (alpha < kAlphaSkip) continue;
        double next_t = T * (1.0 - alpha);
        if (next_t < t_floor) break;
        visit(*it, alpha, T);
        T = next_t;
    }
    return T;
}

}  // namespace detail

// Tile-binned, depth-sorted, front-to-back alpha-blended forward pass.
// Deterministic regardless of thread count: tiles write disjoint pixels and
// the blend order per pixel is fixed by the global sort.
inline ImageBuffer render(const Scene& scene, const Camera& cam, const RenderConfig& cfg) {
    ImageBuffer img(cam.width, cam.height, cfg.background);
    detail::FrameSplats frame = detail::prepare_frame(scene, cam, cfg.filter);
    detail::TileGrid grid = detail::build_tiles(frame, cam, cfg.tile_size);

    parallel_for(grid.tiles_x * grid.tiles_y, [&](int tile_idx) {
        const std::vector<int>& list = grid.lists[tile_idx];
        int tx = tile_idx % grid.tiles_x, ty = tile_idx / grid.tiles_x;
        int x0 = tx * grid.tile, x1 = std::min(cam.width, x0 + grid.tile);
        int y0 = ty * grid.tile, y1 = std::min(cam.height, y0 + grid.tile);
        for (int iy = y0; iy < y1; ++iy) {
            for (int ix = x0; ix < x1; ++ix) {
                Vec2 p = {ix + 0.5, iy + 0.5};
                Vec3 c{};
                double T = detail::blend_pixel(frame, list.data(), list.data() + list.size(), p,
                                               cfg.transmittance_floor, [&](int pos, double a, double t) {
                                                   c += (a * t) * frame.geoms[pos].splat.color;
                                               });
                img.set_pixel(ix, iy, c + T * cfg.background);
            }
        }
    });
    return img;
}

// Reference renderer: per pixel, walks ALL depth-sorted splats with the
// identical blend semantics but no tile binning. Ground truth for the tiled
// path; intended for small scenes.
inline ImageBuffer render_bruteforce(const Scene& scene, const Camera& cam, const RenderConfig& cfg) {
    ImageBuffer img(cam.width, cam.height, cfg.background);
    detail::FrameSplats frame = detail::prepare_frame(scene, cam, cfg.filter);
    std::vector<int> all(frame.geoms.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = int(i);

    for (int iy = 0; iy < cam.height; ++iy) {
        for (int ix = 0; ix < cam.width; ++ix) {
            Vec2 p = {ix + 0.5, iy + 0.5};
            Vec3 c{};
            double T = detail::blend_pixel(frame, all.data(), all.data() + all.size(), p,
                                           cfg.transmittance_floor, [&](int pos, double a, double t) {
                                               c += (a * t) * frame.geoms[pos].splat.color;
                                           });
            img.set_pixel(ix, iy, c + T * cfg.background);
        }
    }
    return img;
}

namespace detail {

// Per-splat accumulators gathered across pixels before the parameter chain.
struct SplatAccum {
    Vec3 d_color;
    double d_opacity = 0.0;          // w.r.t. effective opacity
    double d_conic_xx = 0.0, d_conic_xy = 0.0, d_conic_yy = 0.0;
    Vec2 d_mean2d;
};

inline SplatAccum& operator+=(SplatAccum& a, const SplatAccum& b) {
    a.d_color += b.d_color;
    a.d_opacity += b.d_opacity;
    a.d_conic_xx += b.d_conic_xx;
    a.d_conic_xy += b.d_conic_xy;
    a.d_conic_yy += b.d_conic_yy;
    a.d_mean2d.x += b.d_mean2d.x;
    a.d_mean2d.y += b.d_mean2d.y;
    return a;
}

}  // namespace detail

// Exact analytic gradients of the forward blend with respect to every
// Gaussian parameter. Recomputes the forward pass per tile; saturated clamps
// (alpha max, color clamp) propagate zero gradient.
inline SceneGradients render_backward(const Scene& scene, const Camera& cam, const RenderConfig& cfg,
                                      const ImageBuffer& upstream) {
    if (upstream.width != cam.width || upstream.height != cam.height)
        throw DimensionMismatch("render_backward: upstream gradient does not match camera resolution");

    detail::FrameSplats frame = detail::prepare_frame(scene, cam, cfg.filter);
    detail::TileGrid grid = detail::build_tiles(frame, cam, cfg.tile_size);

    int n_tiles = grid.tiles_x * grid.tiles_y;
    std::vector<std::vector<detail::SplatAccum>> tile_accums(n_tiles);

    parallel_for(n_tiles, [&](int tile_idx) {
        const std::vector<int>& list = grid.lists[tile_idx];
        if (list.empty()) return;
        std::vector<detail::SplatAccum> acc(list.size());
        // local position of each global list entry
        struct Blended {
            int local;
            double alpha, t;
        };
        std::vector<Blended> scratch;
        scratch.reserve(list.size());

        int tx = tile_idx % grid.tiles_x, ty = tile_idx / grid.tiles_x;
        int x0 = tx * grid.tile, x1 = std::min(cam.width, x0 + grid.tile);
        int y0 = ty * grid.tile, y1 = std::min(cam.height, y0 + grid.tile);
        for (int iy = y0; iy < y1; ++iy) {
            for (int ix = x0; ix < x1; ++ix) {
                Vec2 p = {ix + 0.5, iy + 0.5};
                scratch.clear();
                int cursor = 0;
                double t_end = detail::blend_pixel(frame, list.data(), list.data() + list.size(), p,
                                                   cfg.transmittance_floor,
                                                   [&](int pos, double a, double t) {
                                                       while (list[cursor] != pos) ++cursor;
                                                       scratch.push_back({cursor, a, t});
                                                   });
                if (scratch.empty()) continue;
                Vec3 g = upstream.pixel(ix, iy);
                Vec3 suffix = t_end * cfg.background;
                for (int k = int(scratch.size()) - 1; k >= 0; --k) {
                    const auto& bl = scratch[size_t(k)];
                    const SplatGeom& geo = frame.geoms[list[bl.local]];
                    detail::SplatAccum& sa = acc[bl.local];
                    const Vec3 col = geo.splat.color;
                    double w = bl.alpha * bl.t;
                    sa.d_color += w * g;
                    double inv_om = 1.0 / (1.0 - bl.alpha);
                    double d_alpha = g.x * (col.x * bl.t - suffix.x * inv_om) +
                                     g.y * (col.y * bl.t - suffix.y * inv_om) +
                                     g.z * (col.z * bl.t - suffix.z * inv_om);
                    suffix += w * col;
                    // alpha = min(o * G, alpha_max); zero gradient at saturation
                    if (bl.alpha >= kAlphaMax) continue;
                    double gauss = bl.alpha / geo.splat.opacity;
                    sa.d_opacity += d_alpha * gauss;
                    double dm = -0.5 * bl.alpha * d_alpha;
                    Vec2 d = p - geo.splat.mean2d;
                    sa.d_conic_xx += dm * d.x * d.x;
                    sa.d_conic_xy += dm * 2.0 * d.x * d.y;
                    sa.d_conic_yy += dm * d.y * d.y;
                    double mx = 2.0 * (geo.conic.xx * d.x + geo.conic.xy * d.y);
                    double my = 2.0 * (geo.conic.xy * d.x + geo.conic.yy * d.y);
                    sa.d_mean2d.x -= dm * mx;
                    sa.d_mean2d.y -= dm * my;
                }
            }
        }
        tile_accums[tile_idx] = std::move(acc);
    });

    // Deterministic reduction: tiles merged in index order.
    std::vector<detail::SplatAccum> accum(frame.geoms.size());
    for (int tile_idx = 0; tile_idx < n_tiles; ++tile_idx) {
        const std::vector<int>& list = grid.lists[tile_idx];
        const auto& acc = tile_accums[tile_idx];
        for (size_t j = 0; j < acc.size(); ++j) accum[list[j]] += acc[j];
    }

    SceneGradients grads;
    grads.resize(scene.count());

    parallel_for(int(frame.geoms.size()), [&](int pos) {
        const detail::SplatAccum& sa = accum[pos];
        const SplatGeom& geo = frame.geoms[size_t(pos)];
        const Gaussian3D& gau = scene.gaussians[size_t(frame.gauss_index[size_t(pos)])];
        int gi = frame.gauss_index[size_t(pos)];
        grads.hit[gi] = 1;
        grads.screen_grad_norm[gi] = norm(Vec2{sa.d_mean2d.x * 0.5 * cam.width,
                                               sa.d_mean2d.y * 0.5 * cam.height});

        // opacity logit
        double o = geo.splat.opacity;
        grads.d_opacity_logit[gi] = sa.d_opacity * o * (1.0 - o);

        // conic -> cov2d (through the exact inverse, dilation included)
        const Sym2& c = geo.conic;
        // full-matrix upstream with the off-diagonal split evenly
        double gc00 = sa.d_conic_xx, gc01 = 0.5 * sa.d_conic_xy, gc11 = sa.d_conic_yy;
        // dV = -C * GC * C
        double t00 = c.xx * gc00 + c.xy * gc01, t01 = c.xx * gc01 + c.xy * gc11;
        double t10 = c.xy * gc00 + c.yy * gc01, t11 = c.xy * gc01 + c.yy * gc11;
        double dv00 = -(t00 * c.xx + t01 * c.xy);
        double dv01 = -(t00 * c.xy + t01 * c.yy);
        double dv11 = -(t10 * c.xy + t11 * c.yy);

        // cov2d = M Sigma M' (+ sI): recompute M rows and Sigma
        double inv_z = 1.0 / geo.t.z;
        Vec3 j0 = {cam.fx * inv_z, 0.0, -cam.fx * geo.tx_used * inv_z * inv_z};
        Vec3 j1 = {0.0, cam.fy * inv_z, -cam.fy * geo.ty_used * inv_z * inv_z};
        Mat3 wt = transpose(cam.rot);
        Vec3 m0 = wt * j0;
        Vec3 m1 = wt * j1;
        Mat3 sigma = build_covariance(gau.rotation, gau.log_scale).matrix;
        Vec3 s_m0 = sigma * m0;
        Vec3 s_m1 = sigma * m1;

        // dSigma = M' GV M (full, symmetric)
        Mat3 d_sigma = Mat3::zero();
        for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc)
                d_sigma.m[r][cc] = m0[r] * (dv00 * m0[cc] + dv01 * m1[cc]) +
                                   m1[r] * (dv01 * m0[cc] + dv11 * m1[cc]);
        // dM rows = 2 * Sigma (GV M)
        Vec3 d_m0 = 2.0 * (dv00 * s_m0 + dv01 * s_m1);
        Vec3 d_m1 = 2.0 * (dv01 * s_m0 + dv11 * s_m1);

        // M = J W  =>  dJ rows = W dM rows
        Vec3 d_j0 = cam.rot * d_m0;
        Vec3 d_j1 = cam.rot * d_m1;

        // J entries -> camera-space position (respecting the frustum clamp)
        Vec3 d_t{};
        double fx = cam.fx, fy = cam.fy, tz = geo.t.z;
        d_t.z += d_j0.x * (-fx * inv_z * inv_z) + d_j1.y * (-fy * inv_z * inv_z);
        d_t.z += d_j0.z * (2.0 * fx * geo.tx_used * inv_z * inv_z * inv_z) +
                 d_j1.z * (2.0 * fy * geo.ty_used * inv_z * inv_z * inv_z);
        if (geo.clamp_x)
            d_t.z += d_j0.z * (-fx * inv_z * inv_z) * (geo.tx_used / tz);
        else
            d_t.x += d_j0.z * (-fx * inv_z * inv_z);
        if (geo.clamp_y)
            d_t.z += d_j1.z * (-fy * inv_z * inv_z) * (geo.ty_used / tz);
        else
            d_t.y += d_j1.z * (-fy * inv_z * inv_z);

        // mean2d -> t (projection of the unclamped mean)
        d_t.x += sa.d_mean2d.x * fx * inv_z;
        d_t.z -= sa.d_mean2d.x * fx * geo.t.x * inv_z * inv_z;
        d_t.y += sa.d_mean2d.y * fy * inv_z;
        d_t.z -= sa.d_mean2d.y * fy * geo.t.y * inv_z * inv_z;

        Vec3 d_pos = wt * d_t;

        // Sigma = (R S)(R S)': chain to log scales and quaternion
        Quat qn = normalized(gau.rotation);
        Mat3 rot = rotation_matrix(qn);
        Vec3 s = gau.effective_scale();
        Mat3 m3 = rot * Mat3::diag(s);
        Mat3 d_m3 = 2.0 * (d_sigma * m3);
        Vec3 d_ls{};
        for (int axis = 0; axis < 3; ++axis) {
            double ds = d_m3.m[0][axis] * rot.m[0][axis] + d_m3.m[1][axis] * rot.m[1][axis] +
                        d_m3.m[2][axis] * rot.m[2][axis];
            double e = std::exp(gau.log_scale[axis]);
            d_ls[axis] = e > kScaleFloor ? ds * e : 0.0;
        }
        Mat3 d_rot;
        for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc) d_rot.m[r][cc] = d_m3.m[r][cc] * s[cc];
        auto dr_dq = rotation_matrix_jacobian(qn);
        Quat d_qn{0, 0, 0, 0};
        for (int comp = 0; comp < 4; ++comp) {
            double acc = 0.0;
            for (int r = 0; r < 3; ++r)
                for (int cc = 0; cc < 3; ++cc) acc += d_rot.m[r][cc] * dr_dq[comp].m[r][cc];
            d_qn[comp] = acc;
        }
        // through the normalization q_hat = q / |q|
        double qlen = norm(gau.rotation);
        double proj = d_qn.w * qn.w + d_qn.x * qn.x + d_qn.y * qn.y + d_qn.z * qn.z;
        Quat d_q;
        for (int comp = 0; comp < 4; ++comp) d_qn[comp] -= proj * qn[comp];
        for (int comp = 0; comp < 4; ++comp) d_q[comp] = d_qn[comp] / qlen;

        // SH color: clamp masks, basis, and the view-direction chain
        Vec3 nd = {geo.dir.x / geo.dir_len, geo.dir.y / geo.dir_len, geo.dir.z / geo.dir_len};
        double basis[kMaxShCoeffs];
        sh_basis(nd, scene.sh_degree, basis);
        Vec3 basis_grad[kMaxShCoeffs];
        sh_basis_grad(nd, scene.sh_degree, basis_grad);
        Vec3 d_craw = {geo.color_raw.x > 0.0 && geo.color_raw.x < 1.0 ? sa.d_color.x : 0.0,
                       geo.color_raw.y > 0.0 && geo.color_raw.y < 1.0 ? sa.d_color.y : 0.0,
                       geo.color_raw.z > 0.0 && geo.color_raw.z < 1.0 ? sa.d_color.z : 0.0};
        int n_coeff = sh_coeff_count(scene.sh_degree);
        std::array<Vec3, kMaxShCoeffs> d_sh{};
        Vec3 d_nd{};
        for (int i = 0; i < n_coeff; ++i) {
            d_sh[i] = basis[i] * d_craw;
            double along = dot(d_craw, gau.sh_coeffs[i]);
            d_nd += along * basis_grad[i];
        }
        // dir normalization: (I - nd nd') / len
        double along_nd = dot(d_nd, nd);
        Vec3 d_dir = (1.0 / geo.dir_len) * (d_nd - along_nd * nd);
        d_pos += d_dir;

        grads.d_position[gi] = d_pos;
        grads.d_rotation[gi] = d_q;
        grads.d_log_scale[gi] = d_ls;
        grads.d_sh[gi] = d_sh;
    });

    if (!grads.all_finite())
        throw NonFiniteGradient("render_backward: non-finite gradient (degenerate scene?)");
    return grads;
}

}  // namespace mgs
