#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mipmapgs/adam.hpp"
#include "mipmapgs/camera.hpp"
#include "mipmapgs/density.hpp"
#include "mipmapgs/loss.hpp"
#include "mipmapgs/metrics.hpp"
#include "mipmapgs/mipmap.hpp"
#include "mipmapgs/rasterizer.hpp"

namespace mgs {

enum class ViewSource { Test, Train, Synthetic };

struct AdaptConfig {
    double scale_N = 0.25;
    int iterations = 0;  // 0 = default: 1000 zoom-in, 500 zoom-out
    LossKind loss = LossKind::l2();
    ViewSource view_source = ViewSource::Test;
    int synthetic_count = 50;
    OptimParams optim;
    DensityControlConfig density;  // interval 100, active pruning on
    Kernel down_kernel = Kernel::Bilinear;
    Kernel up_kernel = Kernel::Lanczos3;
    std::uint64_t rng_seed = 0;

    int effective_iterations() const {
        if (iterations > 0) return iterations;
        return scale_N > 1.0 ? 1000 : 500;
    }
};

struct AdaptReport {
    std::vector<double> loss_trace;
    int K_before = 0;
    int K_after = 0;
    double wall_seconds = 0.0;  // console diagnostic; not serialized
    std::vector<ViewMetrics> per_view;  // final PSNR/SSIM vs pseudo-GT at the target scale
};

// Test -> test cameras verbatim; Train -> training cameras verbatim;
// Synthetic(n) -> n cameras slerped between consecutive test poses, radius
// jittered through an independently drawn interpolation parameter (seeded).
inline std::vector<Camera> select_views(const std::vector<Camera>& all_test,
                                        const std::vector<Camera>& all_train, ViewSource source,
                                        int synthetic_count, std::uint64_t trajectory_seed) {
    switch (source) {
        case ViewSource::Test:
            if (all_test.empty()) throw EmptyViewSet("select_views: no test cameras");
            return all_test;
        case ViewSource::Train:
            if (all_train.empty()) throw EmptyViewSet("select_views: no training cameras");
            return all_train;
        case ViewSource::Synthetic:
            break;
    }
    if (all_test.empty()) throw EmptyViewSet("select_views: no test cameras to interpolate");
    if (synthetic_count < 1) throw InvalidConfig("select_views: synthetic count must be >= 1");

    std::mt19937_64 rng(trajectory_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Camera> out;
    const Camera& proto = all_test.front();
    double fov_y = 2.0 * std::atan(0.5 * proto.height / proto.fy) * 180.0 / M_PI;
    for (int i = 0; i < synthetic_count; ++i) {
        size_t a = all_test.size() > 1 ? size_t(rng() % all_test.size()) : 0;
        size_t b = (a + 1) % all_test.size();
        double t = u(rng);
        double t_r = std::fmin(1.0, std::fmax(0.0, t + 0.2 * (u(rng) - 0.5)));
        Vec3 pa = all_test[a].position(), pb = all_test[b].position();
        double ra = norm(pa), rb = norm(pb);
        Vec3 da = (1.0 / ra) * pa, db = (1.0 / rb) * pb;
        double cosw = std::fmin(1.0, std::fmax(-1.0, dot(da, db)));
        double omega = std::acos(cosw);
        Vec3 dir;
        if (omega < 1e-9) {
            dir = da;
        } else {
            double sw = std::sin(omega);
            dir = (std::sin((1.0 - t) * omega) / sw) * da + (std::sin(t * omega) / sw) * db;
        }
        double radius = (1.0 - t_r) * ra + t_r * rb;
        out.push_back(look_at(radius * dir, {0, 0, 0}, {0, 0, 1}, fov_y, proto.width, proto.height));
    }
    return out;
}

inline double scene_extent(const Scene& scene) {
    if (scene.gaussians.empty()) return 1.0;
    Vec3 centroid{};
    for (const auto& g : scene.gaussians) centroid += g.position;
    centroid = (1.0 / double(scene.count())) * centroid;
    double r = 0.0;
    for (const auto& g : scene.gaussians) r = std::fmax(r, norm(g.position - centroid));
    return r > 1e-9 ? r : 1.0;
}

// Adaptive optimization toward one zoom factor: pseudo-GT is precomputed
// once from the frozen base scene, then the evolving copy is optimized
// against it view by view, with density control and active pruning at every
// interval. The input scene is never mutated.
inline std::pair<Scene, AdaptReport> adapt(const Scene& base, const std::vector<Camera>& views,
                                           const AdaptConfig& cfg, const RenderConfig& render_cfg) {
    if (base.gaussians.empty()) throw InvalidConfig("adapt: base scene is empty");
    if (views.empty()) throw EmptyViewSet("adapt: no views");
    if (!(cfg.scale_N > 0.0)) throw InvalidZoom("adapt: scale must be positive");

    auto t0 = std::chrono::steady_clock::now();
    std::vector<PseudoGtView> targets =
        make_pseudo_gt(base, views, cfg.scale_N, render_cfg, cfg.down_kernel, cfg.up_kernel);

    Scene scene = base;
    scene.meta.creation_scale = cfg.scale_N;

    double extent = scene_extent(base);
    OptimParams optim = cfg.optim;
    optim.lr_position *= extent;
    AdamState state(scene.count(), optim);
    DensifyStats stats(scene.count());
    DensityControlConfig density = cfg.density;
    if (density.scale_split_threshold <= 0.0) density.scale_split_threshold = 0.01 * extent;

    std::mt19937_64 rng(cfg.rng_seed);
    int iterations = cfg.effective_iterations();

    AdaptReport report;
    report.K_before = int(base.count());
    report.loss_trace.reserve(iterations);

    for (int i = 1; i <= iterations; ++i) {
        size_t j = size_t(rng() % targets.size());
        ImageBuffer img = render(scene, targets[j].camera, render_cfg);
        LossResult loss = compute_loss(img, targets[j].image, cfg.loss);
        SceneGradients grads = render_backward(scene, targets[j].camera, render_cfg, loss.grad);
        stats.accumulate(grads);
        adam_step(scene, grads, state);
        report.loss_trace.push_back(loss.value);
        if (density.interval > 0 && i % density.interval == 0)
            densify_and_prune(scene, state, stats, density, rng);
    }

    report.K_after = int(scene.count());
    std::vector<ImageBuffer> rendered, reference;
    for (const auto& view : targets) {
        rendered.push_back(render(scene, view.camera, render_cfg));
        reference.push_back(view.image);
    }
    MetricReport metrics = compare_views(rendered, reference);
    report.per_view = metrics.per_view;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(scene), std::move(report)};
}

}  // namespace mgs
