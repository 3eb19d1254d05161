#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/gaussian.hpp"
#include "mipmapgs/rasterizer.hpp"

namespace mgs {

// Per-group learning rates; position is specified per unit of scene extent
// and scaled once by the trainer.
struct OptimParams {
    double lr_position = 1.6e-4;
    double lr_rotation = 1e-3;
    double lr_scale = 5e-3;
    double lr_opacity = 0.05;
    double lr_sh = 2.5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-15;
};

// First/second Adam moments mirroring the scene layout. Rows are inserted as
// zeros and removed in sync by the density-control operations.
struct AdamState {
    OptimParams params;
    long step = 0;
    std::vector<Vec3> m_position, v_position;
    std::vector<Quat> m_rotation, v_rotation;
    std::vector<Vec3> m_scale, v_scale;
    std::vector<double> m_opacity, v_opacity;
    std::vector<std::array<Vec3, kMaxShCoeffs>> m_sh, v_sh;

    explicit AdamState(size_t n = 0, OptimParams p = {}) : params(p) { resize(n); }

    void resize(size_t n) {
        m_position.assign(n, Vec3{});
        v_position.assign(n, Vec3{});
        m_rotation.assign(n, Quat{0, 0, 0, 0});
        v_rotation.assign(n, Quat{0, 0, 0, 0});
        m_scale.assign(n, Vec3{});
        v_scale.assign(n, Vec3{});
        m_opacity.assign(n, 0.0);
        v_opacity.assign(n, 0.0);
        m_sh.assign(n, {});
        v_sh.assign(n, {});
    }
    size_t size() const { return m_position.size(); }
};

namespace detail {
inline void adam_update(double& param, double& m, double& v, double g, double lr, double bc1,
                        double bc2, const OptimParams& p) {
    m = p.beta1 * m + (1.0 - p.beta1) * g;
    v = p.beta2 * v + (1.0 - p.beta2) * g * g;
    param -= lr * (m / bc1) / (std::sqrt(v / bc2) + p.eps);
}
}  // namespace detail

// Standard Adam with per-group learning rates; quaternions are renormalized
// after the update.
inline void adam_step(Scene& scene, const SceneGradients& grads, AdamState& state) {
    size_t n = scene.count();
    if (grads.size() != n || state.size() != n)
        throw DimensionMismatch("adam_step: scene/gradient/state lengths differ");
    if (!grads.all_finite()) throw NonFiniteGradient("adam_step: non-finite gradient");

    const OptimParams& p = state.params;
    state.step += 1;
    double bc1 = 1.0 - std::pow(p.beta1, double(state.step));
    double bc2 = 1.0 - std::pow(p.beta2, double(state.step));

    for (size_t i = 0; i < n; ++i) {
        Gaussian3D& g = scene.gaussians[i];
        for (int a = 0; a < 3; ++a)
            detail::adam_update(g.position[a], state.m_position[i][a], state.v_position[i][a],
                                grads.d_position[i][a], p.lr_position, bc1, bc2, p);
        for (int c = 0; c < 4; ++c)
            detail::adam_update(g.rotation[c], state.m_rotation[i][c], state.v_rotation[i][c],
                                grads.d_rotation[i][c], p.lr_rotation, bc1, bc2, p);
        for (int a = 0; a < 3; ++a)
            detail::adam_update(g.log_scale[a], state.m_scale[i][a], state.v_scale[i][a],
                                grads.d_log_scale[i][a], p.lr_scale, bc1, bc2, p);
        detail::adam_update(g.opacity_logit, state.m_opacity[i], state.v_opacity[i],
                            grads.d_opacity_logit[i], p.lr_opacity, bc1, bc2, p);
        for (int k = 0; k < kMaxShCoeffs; ++k)
            for (int ch = 0; ch < 3; ++ch)
                detail::adam_update(g.sh_coeffs[k][ch], state.m_sh[i][k][ch], state.v_sh[i][k][ch],
                                    grads.d_sh[i][k][ch], p.lr_sh, bc1, bc2, p);
        // keep zero-gradient steps bitwise no-ops: renormalizing an already
        // unit quaternion would wander by an ulp per step and Adam turns any
        // such speck into a full lr-sized move
        if (std::fabs(norm(g.rotation) - 1.0) > 1e-12) g.rotation = normalized(g.rotation);
    }
}

}  // namespace mgs
