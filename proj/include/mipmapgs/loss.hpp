#pragma once

#include <cmath>
#include <utility>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/image.hpp"
#include "mipmapgs/ssim.hpp"

namespace mgs {

// Photometric losses. D-SSIM = (1 - SSIM)/2; the blend uses the 3DGS
// weighting (0.8 L1 + 0.2 D-SSIM) by default, SSIMOnly is pure D-SSIM.
struct LossKind {
    enum Kind { L2, L1_DSSIM, L1, SSIMOnly } kind = L2;
    double w_l1 = 0.8;
    double w_dssim = 0.2;

    static LossKind l2() { return {L2, 0.0, 0.0}; }
    static LossKind l1() { return {L1, 1.0, 0.0}; }
    static LossKind l1_dssim(double wl1 = 0.8, double wd = 0.2) { return {L1_DSSIM, wl1, wd}; }
    static LossKind ssim_only() { return {SSIMOnly, 0.0, 1.0}; }
};

struct LossResult {
    double value = 0.0;
    ImageBuffer grad;  // d(value)/d(rendered)
};

// Scalar loss (mean-reduced over pixels and channels) and its gradient with
// respect to the rendered image.
inline LossResult compute_loss(const ImageBuffer& rendered, const ImageBuffer& target, LossKind kind) {
    require_same_shape(rendered, target, "compute_loss");
    const double n = double(rendered.data.size());
    LossResult out;
    out.grad = ImageBuffer(rendered.width, rendered.height, {0, 0, 0});

    auto add_l2 = [&](double w) {
        double acc = 0.0;
        for (size_t i = 0; i < rendered.data.size(); ++i) {
            double d = rendered.data[i] - target.data[i];
            acc += d * d;
            out.grad.data[i] += w * 2.0 * d / n;
        }
        out.value += w * acc / n;
    };
    auto add_l1 = [&](double w) {
        double acc = 0.0;
        for (size_t i = 0; i < rendered.data.size(); ++i) {
            double d = rendered.data[i] - target.data[i];
            acc += std::fabs(d);
            out.grad.data[i] += w * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) / n;
        }
        out.value += w * acc / n;
    };
    auto add_dssim = [&](double w) {
        if (rendered.width < ssim_detail::kWindow || rendered.height < ssim_detail::kWindow)
            throw TooSmall("compute_loss: D-SSIM needs images at least 11x11");
        double s = ssim_mean(rendered, target);
        out.value += w * 0.5 * (1.0 - s);
        ImageBuffer g = ssim_mean_backward(rendered, target, -0.5 * w);
        for (size_t i = 0; i < g.data.size(); ++i) out.grad.data[i] += g.data[i];
    };

    switch (kind.kind) {
        case LossKind::L2:
            add_l2(1.0);
            break;
        case LossKind::L1:
            add_l1(1.0);
            break;
        case LossKind::L1_DSSIM:
            if (kind.w_l1 < 0 || kind.w_dssim < 0 || kind.w_l1 + kind.w_dssim <= 0)
                throw InvalidConfig("compute_loss: L1_DSSIM weights must be >= 0 with positive sum");
            add_l1(kind.w_l1);
            add_dssim(kind.w_dssim);
            break;
        case LossKind::SSIMOnly:
            add_dssim(1.0);
            break;
    }
    return out;
}

}  // namespace mgs
