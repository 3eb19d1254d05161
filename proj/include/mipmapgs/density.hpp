#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mipmapgs/adam.hpp"
#include "mipmapgs/gaussian.hpp"
#include "mipmapgs/rasterizer.hpp"

namespace mgs {

struct DensityControlConfig {
    double grad_threshold = 2e-4;         // mean screen-space (NDC) grad norm
    double scale_split_threshold = 0.0;   // world units; 0 = auto (1% of scene extent)
    double opacity_prune_threshold = 0.01;
    int interval = 100;
    double split_factor = 1.6;
    bool active_pruning = true;
};

// Densification statistics accumulated between density-control intervals.
struct DensifyStats {
    std::vector<double> grad_norm_sum;
    std::vector<int> hits;
    std::vector<Vec3> pos_grad_sum;  // world-space, drives the clone offset

    explicit DensifyStats(size_t n = 0) { resize(n); }
    void resize(size_t n) {
        grad_norm_sum.assign(n, 0.0);
        hits.assign(n, 0);
        pos_grad_sum.assign(n, Vec3{});
    }
    size_t size() const { return grad_norm_sum.size(); }

    void accumulate(const SceneGradients& g) {
        for (size_t i = 0; i < size() && i < g.size(); ++i) {
            if (!g.hit[i]) continue;
            grad_norm_sum[i] += g.screen_grad_norm[i];
            hits[i] += 1;
            pos_grad_sum[i] += g.d_position[i];
        }
    }
};

struct DensityReport {
    int cloned = 0;
    int split = 0;
    int pruned = 0;
    bool prune_skipped = false;  // pruning would have emptied the scene
};

namespace detail {

struct RowOps {
    std::vector<int> keep;                    // original indices kept, in order
    std::vector<int> clone_src;               // originals to duplicate
    std::vector<std::pair<int, int>> splits;  // (original, child slot 0/1)
};

inline void apply_rows(Scene& scene, AdamState& state, DensifyStats& stats, const RowOps& ops,
                       const std::vector<Gaussian3D>& new_gaussians) {
    std::vector<Gaussian3D> gs;
    gs.reserve(ops.keep.size() + new_gaussians.size());
    AdamState ns(0, state.params);
    ns.step = state.step;
    size_t total = ops.keep.size() + new_gaussians.size();
    ns.resize(total);
    size_t row = 0;
    for (int idx : ops.keep) {
        gs.push_back(scene.gaussians[idx]);
        ns.m_position[row] = state.m_position[idx];
        ns.v_position[row] = state.v_position[idx];
        ns.m_rotation[row] = state.m_rotation[idx];
        ns.v_rotation[row] = state.v_rotation[idx];
        ns.m_scale[row] = state.m_scale[idx];
        ns.v_scale[row] = state.v_scale[idx];
        ns.m_opacity[row] = state.m_opacity[idx];
        ns.v_opacity[row] = state.v_opacity[idx];
        ns.m_sh[row] = state.m_sh[idx];
        ns.v_sh[row] = state.v_sh[idx];
        ++row;
    }
    for (const Gaussian3D& g : new_gaussians) gs.push_back(g);  // zero moments
    scene.gaussians = std::move(gs);
    state = std::move(ns);
    stats.resize(scene.count());
}

}  // namespace detail

// Clone small high-gradient primitives, split large ones, prune transparent
// ones. Untouched primitives are preserved bit-exactly and keep their
// optimizer moments; new rows start with zero moments.
inline DensityReport densify_and_prune(Scene& scene, AdamState& state, DensifyStats& stats,
                                       const DensityControlConfig& cfg, std::mt19937_64& rng) {
    size_t n = scene.count();
    if (stats.size() != n || state.size() != n)
        throw DimensionMismatch("densify_and_prune: stats/state length mismatch");
    if (!(cfg.grad_threshold > 0) || !(cfg.scale_split_threshold > 0) ||
        !(cfg.opacity_prune_threshold > 0) || cfg.interval < 1)
        throw InvalidConfig("densify_and_prune: thresholds must be positive and interval >= 1");
    DensityReport report;

    std::vector<int> kind(n, 0);  // 0 keep, 1 clone, 2 split
    for (size_t i = 0; i < n; ++i) {
        if (stats.hits[i] == 0) continue;
        double mean_grad = stats.grad_norm_sum[i] / double(stats.hits[i]);
        if (mean_grad <= cfg.grad_threshold) continue;
        Vec3 s = scene.gaussians[i].effective_scale();
        double max_scale = std::fmax(s.x, std::fmax(s.y, s.z));
        kind[i] = max_scale > cfg.scale_split_threshold ? 2 : 1;
    }

    // prune decisions apply to the original primitives only
    std::vector<char> prune(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (cfg.active_pruning && kind[i] != 2 &&
            scene.gaussians[i].effective_opacity() < cfg.opacity_prune_threshold)
            prune[i] = 1;
    }

    detail::RowOps ops;
    std::vector<Gaussian3D> fresh;
    for (size_t i = 0; i < n; ++i) {
        if (kind[i] == 2) continue;  // replaced by children
        if (prune[i]) {
            ++report.pruned;
            continue;
        }
        ops.keep.push_back(int(i));
    }
    // pruning everything is skipped with a warning flag
    bool would_empty = ops.keep.empty();
    if (would_empty) {
        report.prune_skipped = true;
        report.pruned = 0;
        ops.keep.clear();
        for (size_t i = 0; i < n; ++i)
            if (kind[i] != 2) ops.keep.push_back(int(i));
    }

    for (size_t i = 0; i < n; ++i) {
        if (kind[i] == 1) {
            // duplicate, offset along the accumulated positional gradient
            Gaussian3D copy = scene.gaussians[i];
            Vec3 dir = stats.pos_grad_sum[i];
            double len = norm(dir);
            if (len > 0.0) {
                Vec3 s = copy.effective_scale();
                double step = 0.5 * std::fmax(s.x, std::fmax(s.y, s.z));
                copy.position += (step / len) * dir;
            }
            fresh.push_back(copy);
            ++report.cloned;
        } else if (kind[i] == 2) {
            const Gaussian3D& parent = scene.gaussians[i];
            Quat qn = normalized(parent.rotation);
            Mat3 rot = rotation_matrix(qn);
            Vec3 s = parent.effective_scale();
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int child = 0; child < 2; ++child) {
                Gaussian3D c = parent;
                Vec3 xi{gauss(rng), gauss(rng), gauss(rng)};
                c.position = parent.position + rot * hadamard(s, xi);
                c.log_scale = {parent.log_scale.x - std::log(cfg.split_factor),
                               parent.log_scale.y - std::log(cfg.split_factor),
                               parent.log_scale.z - std::log(cfg.split_factor)};
                fresh.push_back(c);
            }
            ++report.split;
        }
    }

    detail::apply_rows(scene, state, stats, ops, fresh);
    return report;
}

// Opacity-threshold pruning, kept enabled for entire adaptation runs.
// Survivor order is preserved.
inline DensityReport active_prune(Scene& scene, AdamState& state, DensifyStats& stats,
                                  double threshold) {
    size_t n = scene.count();
    DensityReport report;
    detail::RowOps ops;
    for (size_t i = 0; i < n; ++i) {
        if (scene.gaussians[i].effective_opacity() < threshold)
            ++report.pruned;
        else
            ops.keep.push_back(int(i));
    }
    if (ops.keep.empty()) {
        report.prune_skipped = true;
        report.pruned = 0;
        return report;
    }
    if (report.pruned == 0) return report;
    detail::apply_rows(scene, state, stats, ops, {});
    return report;
}

}  // namespace mgs
