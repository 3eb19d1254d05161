#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mipmapgs/camera.hpp"
#include "mipmapgs/errors.hpp"
#include "mipmapgs/gaussian.hpp"

namespace mgs {

// Procedural teacher scene: ground truth at any zoom factor is obtained by
// rendering it directly. Stands in for captured datasets.
struct TeacherSpec {
    std::uint64_t seed = 1;
    int primitive_count = 300;
    double extent = 1.0;              // primitives placed inside a ball of this radius
    std::vector<Vec3> palette = {{0.85, 0.15, 0.1}, {0.1, 0.65, 0.85}, {0.95, 0.8, 0.15},
                                 {0.2, 0.75, 0.25}, {0.8, 0.3, 0.75},  {0.9, 0.9, 0.9},
                                 {0.95, 0.5, 0.1},  {0.25, 0.3, 0.85}};
    int cameras = 12;                 // ring size; even indices train, odd test
    double ring_radius = 3.2;         // in units of extent
    double elev_min_deg = 15.0;
    double elev_max_deg = 35.0;
    int width = 64, height = 64;
    double fov_y_deg = 40.0;
    double sigma_min = 0.08, sigma_max = 0.30;  // in units of extent
};

struct TeacherScene {
    Scene scene;
    std::vector<Camera> views;  // full ring, ring order
};

inline std::vector<Camera> train_split(const std::vector<Camera>& ring) {
    std::vector<Camera> out;
    for (size_t i = 0; i < ring.size(); i += 2) out.push_back(ring[i]);
    return out;
}
inline std::vector<Camera> test_split(const std::vector<Camera>& ring) {
    std::vector<Camera> out;
    for (size_t i = 1; i < ring.size(); i += 2) out.push_back(ring[i]);
    return out;
}

inline TeacherScene generate_teacher(const TeacherSpec& spec) {
    if (spec.primitive_count < 1) throw InvalidConfig("generate_teacher: primitive_count must be >= 1");
    if (spec.cameras < 1) throw InvalidConfig("generate_teacher: need at least one camera");
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    TeacherScene out;
    out.scene.sh_degree = 1;
    out.scene.meta.creation_scale = 1.0;
    out.scene.meta.has_seed = true;
    out.scene.meta.seed = spec.seed;

    for (int i = 0; i < spec.primitive_count; ++i) {
        Gaussian3D g;
        // uniform in a ball of radius extent
        for (;;) {
            Vec3 p{2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1};
            if (dot(p, p) <= 1.0) {
                g.position = spec.extent * p;
                break;
            }
        }
        g.rotation = normalized(Quat{2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1});
        for (int a = 0; a < 3; ++a) {
            double s = spec.sigma_min + (spec.sigma_max - spec.sigma_min) * u(rng);
            g.log_scale[a] = std::log(s * spec.extent);
        }
        // mostly opaque so alpha compositing is genuine but pruning
        // thresholds stay meaningful
        g.opacity_logit = logit(0.6 + 0.35 * u(rng));
        Vec3 base = spec.palette[size_t(rng() % spec.palette.size())];
        double jitter = 0.1;
        Vec3 color = {std::fmin(0.95, std::fmax(0.05, base.x + jitter * (2 * u(rng) - 1))),
                      std::fmin(0.95, std::fmax(0.05, base.y + jitter * (2 * u(rng) - 1))),
                      std::fmin(0.95, std::fmax(0.05, base.z + jitter * (2 * u(rng) - 1)))};
        g.sh_coeffs[0] = (1.0 / kSH0) * (color - Vec3{0.5, 0.5, 0.5});
        for (int c = 1; c < 4; ++c)
            g.sh_coeffs[c] = {0.08 * (2 * u(rng) - 1), 0.08 * (2 * u(rng) - 1), 0.08 * (2 * u(rng) - 1)};
        out.scene.gaussians.push_back(g);
    }

    double radius = spec.ring_radius * spec.extent;
    for (int i = 0; i < spec.cameras; ++i) {
        double azim = 2.0 * M_PI * double(i) / double(spec.cameras);
        double frac = spec.cameras > 1 ? double(i % 3) / 2.0 : 0.0;
        double elev = (spec.elev_min_deg + (spec.elev_max_deg - spec.elev_min_deg) * frac) * M_PI / 180.0;
        Vec3 pos{radius * std::cos(azim) * std::cos(elev), radius * std::sin(azim) * std::cos(elev),
                 radius * std::sin(elev)};
        out.views.push_back(look_at(pos, {0, 0, 0}, {0, 0, 1}, spec.fov_y_deg, spec.width, spec.height));
    }
    return out;
}

// 1D toy reproducing the sampling-rate analysis: a Gaussian mixture sampled
// on grids at several zoom factors, with 3-sigma truncation, with and
// without per-component dilation.
struct Toy1DSpec {
    std::vector<double> means = {6.0, 16.0, 30.0, 34.0, 49.0, 58.0};
    std::vector<double> sigmas = {1.9, 2.1, 2.0, 2.2, 2.4, 1.9};
    std::vector<double> amplitudes = {1.0, 0.8, 0.9, 1.0, 0.7, 0.85};
    double spacing = 1.0;   // base grid spacing, world units per cell at zoom 1
    double domain = 64.0;   // world length of the sampled segment
    std::vector<double> zooms = {0.25, 0.5, 1.0, 2.0, 4.0};
    double dilation_s = 0.3;  // in grid units squared, like the 2D filter
};

struct Toy1DRow {
    double zoom = 1.0;
    int cell = 0;
    double raw = 0.0;      // truncated mixture, no dilation
    double dilated = 0.0;  // variance widened by s * cell_spacing^2
    int contributors = 0;  // components contributing to `raw`
};

inline std::vector<Toy1DRow> toy1d(const Toy1DSpec& spec) {
    if (spec.means.size() != spec.sigmas.size() || spec.means.size() != spec.amplitudes.size())
        throw InvalidConfig("toy1d: means/sigmas/amplitudes lengths differ");
    for (double s : spec.sigmas)
        if (!(s > 0.0)) throw InvalidConfig("toy1d: sigmas must be positive");
    if (!(spec.spacing > 0.0)) throw InvalidConfig("toy1d: spacing must be positive");

    std::vector<Toy1DRow> rows;
    for (double zoom : spec.zooms) {
        double h = spec.spacing / zoom;
        int cells = int(std::ceil(spec.domain / h));
        for (int cell = 0; cell < cells; ++cell) {
            double x = (cell + 0.5) * h;
            Toy1DRow row;
            row.zoom = zoom;
            row.cell = cell;
            for (size_t k = 0; k < spec.means.size(); ++k) {
                double d = x - spec.means[k];
                double sig = spec.sigmas[k];
                if (std::fabs(d) <= 3.0 * sig) {
                    row.raw += spec.amplitudes[k] * std::exp(-0.5 * d * d / (sig * sig));
                    row.contributors += 1;
                }
                double var_d = sig * sig + spec.dilation_s * h * h;
                double sig_d = std::sqrt(var_d);
                if (std::fabs(d) <= 3.0 * sig_d)
                    row.dilated += spec.amplitudes[k] * std::exp(-0.5 * d * d / var_d);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace mgs
