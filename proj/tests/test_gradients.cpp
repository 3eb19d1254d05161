#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "mipmapgs/rasterizer.hpp"
#include "support/oracles.hpp"

using namespace mgs;

namespace {

// L = 1/2 sum (render - target)^2; upstream gradient is the residual image.
double scene_loss(const Scene& scene, const Camera& cam, const RenderConfig& cfg,
                  const ImageBuffer& target) {
    ImageBuffer img = render(scene, cam, cfg);
    double acc = 0.0;
    for (size_t i = 0; i < img.data.size(); ++i) {
        double d = img.data[i] - target.data[i];
        acc += 0.5 * d * d;
    }
    return acc;
}

ImageBuffer residual(const Scene& scene, const Camera& cam, const RenderConfig& cfg,
                     const ImageBuffer& target) {
    ImageBuffer img = render(scene, cam, cfg);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] -= target.data[i];
    return img;
}

// Central finite difference of the loss w.r.t. one scalar parameter slot.
double fd(Scene scene, const Camera& cam, const RenderConfig& cfg, const ImageBuffer& target,
          const std::function<double&(Scene&)>& slot, double h = 1e-4) {
    double& up = slot(scene);
    double orig = up;
    up = orig + h;
    double lp = scene_loss(scene, cam, cfg, target);
    up = orig - h;
    double lm = scene_loss(scene, cam, cfg, target);
    up = orig;
    return (lp - lm) / (2.0 * h);
}

void check_grad(double analytic, double numeric) {
    if (std::fabs(numeric) < 1e-8) {
        CHECK(std::fabs(analytic - numeric) < 1e-8);
    } else {
        double rel = std::fabs(analytic - numeric) / std::fmax(std::fabs(analytic), std::fabs(numeric));
        CHECK(rel <= 1e-3);
    }
}

}  // namespace

TEST_CASE("zero upstream gradient yields zero scene gradients", "[gradients]") {
    Scene scene = oracle::smooth_scene(1);
    Camera cam = oracle::axis_camera(32, 32, 32.0);
    RenderConfig cfg;
    ImageBuffer upstream(32, 32, {0, 0, 0});
    SceneGradients g = render_backward(scene, cam, cfg, upstream);
    for (size_t i = 0; i < scene.count(); ++i) {
        CHECK(g.d_position[i].x == 0.0);
        CHECK(g.d_rotation[i].y == 0.0);
        CHECK(g.d_log_scale[i].z == 0.0);
        CHECK(g.d_opacity_logit[i] == 0.0);
        CHECK(g.d_sh[i][3].y == 0.0);
    }
}

TEST_CASE("opacity gradient of a single splat matches finite differences", "[gradients]") {
    Scene scene = oracle::smooth_scene(2, 1);
    Camera cam = oracle::axis_camera(32, 32, 32.0);
    RenderConfig cfg;
    ImageBuffer target = render(oracle::smooth_scene(1002, 1), cam, cfg);
    SceneGradients g = render_backward(scene, cam, cfg, residual(scene, cam, cfg, target));
    double numeric =
        fd(scene, cam, cfg, target, [](Scene& s) -> double& { return s.gaussians[0].opacity_logit; });
    check_grad(g.d_opacity_logit[0], numeric);
}

TEST_CASE("every parameter gradient matches finite differences", "[gradients]") {
    Camera cam = oracle::axis_camera(32, 32, 32.0);
    RenderConfig cfg;  // default constant dilation 0.3 in the chain
    for (unsigned seed : {10u, 11u, 12u}) {
        Scene scene = oracle::smooth_scene(seed);
        ImageBuffer target = render(oracle::smooth_scene(seed + 1000), cam, cfg);
        SceneGradients grads = render_backward(scene, cam, cfg, residual(scene, cam, cfg, target));
        REQUIRE(grads.size() == scene.count());

        int n_coeff = sh_coeff_count(scene.sh_degree);
        for (size_t k = 0; k < scene.count(); ++k) {
            for (int axis = 0; axis < 3; ++axis) {
                double numeric = fd(scene, cam, cfg, target,
                                    [&](Scene& s) -> double& { return s.gaussians[k].position[axis]; });
                check_grad(grads.d_position[k][axis], numeric);
            }
            for (int comp = 0; comp < 4; ++comp) {
                double numeric = fd(scene, cam, cfg, target,
                                    [&](Scene& s) -> double& { return s.gaussians[k].rotation[comp]; });
                check_grad(grads.d_rotation[k][comp], numeric);
            }
            for (int axis = 0; axis < 3; ++axis) {
                double numeric = fd(scene, cam, cfg, target,
                                    [&](Scene& s) -> double& { return s.gaussians[k].log_scale[axis]; });
                check_grad(grads.d_log_scale[k][axis], numeric);
            }
            {
                double numeric = fd(scene, cam, cfg, target, [&](Scene& s) -> double& {
                    return s.gaussians[k].opacity_logit;
                });
                check_grad(grads.d_opacity_logit[k], numeric);
            }
            for (int i = 0; i < n_coeff; ++i) {
                for (int ch = 0; ch < 3; ++ch) {
                    double numeric = fd(scene, cam, cfg, target, [&](Scene& s) -> double& {
                        return s.gaussians[k].sh_coeffs[i][ch];
                    });
                    check_grad(grads.d_sh[k][i][ch], numeric);
                }
            }
        }
    }
}

TEST_CASE("saturated color clamp passes zero gradient", "[gradients]") {
    Scene scene = oracle::smooth_scene(3, 2);
    scene.gaussians[0].sh_coeffs[0] = {3.0, 3.0, 3.0};  // raw color far above 1
    for (int i = 1; i < 4; ++i) scene.gaussians[0].sh_coeffs[i] = {0, 0, 0};
    Camera cam = oracle::axis_camera(32, 32, 32.0);
    RenderConfig cfg;
    ImageBuffer upstream(32, 32, {0.4, 0.4, 0.4});
    SceneGradients g = render_backward(scene, cam, cfg, upstream);
    CHECK(g.d_sh[0][0].x == 0.0);
    CHECK(g.d_sh[0][0].y == 0.0);
    CHECK(g.d_sh[0][1].x == 0.0);
}

TEST_CASE("densification statistics are populated", "[gradients]") {
    Scene scene = oracle::smooth_scene(4);
    Camera cam = oracle::axis_camera(32, 32, 32.0);
    RenderConfig cfg;
    ImageBuffer target = render(oracle::smooth_scene(1004), cam, cfg);
    SceneGradients g = render_backward(scene, cam, cfg, residual(scene, cam, cfg, target));
    int hits = 0;
    for (size_t i = 0; i < scene.count(); ++i) {
        if (g.hit[i]) {
            ++hits;
            CHECK(g.screen_grad_norm[i] >= 0.0);
        }
    }
    CHECK(hits == int(scene.count()));
}
