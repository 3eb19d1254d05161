#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mipmapgs/adam.hpp"
#include "mipmapgs/adapt.hpp"
#include "mipmapgs/density.hpp"
#include "mipmapgs/loss.hpp"
#include "mipmapgs/rasterizer.hpp"

namespace mgs {

struct FitConfig {
    int iterations = 3000;
    int init_count = 400;
    double extent = 1.0;             // init volume radius; scales position lr
    double init_scale_frac = 0.02;   // isotropic init scale as a fraction of extent
    double init_opacity = 0.1;
    LossKind loss = LossKind::l1_dssim();
    OptimParams optim;
    DensityControlConfig density;
    double density_stop_fraction = 0.5;  // density control stops at this point
    std::uint64_t rng_seed = 7;
};

struct FitResult {
    Scene scene;
    std::vector<double> loss_trace;
};

// Fits a fresh scene to the target images: random init inside the extent,
// Adam with density control over the first half of the run.
inline FitResult fit_scene(const std::vector<Camera>& views, const std::vector<ImageBuffer>& targets,
                           const FitConfig& cfg, const RenderConfig& render_cfg) {
    if (cfg.init_count < 1) throw InvalidConfig("fit: init_count must be >= 1");
    if (cfg.iterations < 1) throw InvalidConfig("fit: iterations must be >= 1");
    if (views.empty()) throw EmptyViewSet("fit: no training views");
    if (views.size() != targets.size()) throw DimensionMismatch("fit: views/targets counts differ");

    std::mt19937_64 rng(cfg.rng_seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    Scene scene;
    scene.sh_degree = 1;
    scene.meta.creation_scale = 1.0;
    scene.meta.has_seed = true;
    scene.meta.seed = cfg.rng_seed;
    for (int i = 0; i < cfg.init_count; ++i) {
        Gaussian3D g;
        for (;;) {
            Vec3 p{2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
            if (dot(p, p) <= 1.0) {
                g.position = cfg.extent * p;
                break;
            }
        }
        double s = std::log(cfg.init_scale_frac * cfg.extent);
        g.log_scale = {s, s, s};
        g.opacity_logit = logit(cfg.init_opacity);
        // dc zero -> mid gray; color is learned
        scene.gaussians.push_back(g);
    }

    OptimParams optim = cfg.optim;
    optim.lr_position *= cfg.extent;
    AdamState state(scene.count(), optim);
    DensifyStats stats(scene.count());
    DensityControlConfig density = cfg.density;
    if (density.scale_split_threshold <= 0.0) density.scale_split_threshold = 0.01 * cfg.extent;

    FitResult out;
    out.loss_trace.reserve(cfg.iterations);
    int density_stop = int(cfg.density_stop_fraction * cfg.iterations);
    for (int i = 1; i <= cfg.iterations; ++i) {
        size_t j = size_t(rng() % views.size());
        ImageBuffer img = render(scene, views[j], render_cfg);
        LossResult loss = compute_loss(img, targets[j], cfg.loss);
        SceneGradients grads = render_backward(scene, views[j], render_cfg, loss.grad);
        stats.accumulate(grads);
        adam_step(scene, grads, state);
        out.loss_trace.push_back(loss.value);
        if (density.interval > 0 && i % density.interval == 0 && i <= density_stop)
            densify_and_prune(scene, state, stats, density, rng);
    }
    out.scene = std::move(scene);
    return out;
}

}  // namespace mgs
