#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/image.hpp"
#include "mipmapgs/ssim.hpp"

namespace mgs {

// 10 log10(1/MSE) over all pixels and channels, unit data range. Identical
// images return +inf.
inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "psnr");
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    double mse = acc / double(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b, "ssim");
    if (a.width < ssim_detail::kWindow || a.height < ssim_detail::kWindow)
        throw TooSmall("ssim: image " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                       " is smaller than the 11x11 window");
    return ssim_mean(a, b);
}

struct ViewMetrics {
    int view = 0;
    double psnr = 0.0;
    bool has_ssim = false;
    double ssim = 0.0;
};

struct MetricReport {
    double psnr_mean = 0.0;
    bool has_ssim = false;
    double ssim_mean = 0.0;
    std::vector<ViewMetrics> per_view;
    // LPIPS is intentionally absent (needs a learned network); reports keep a
    // null placeholder for format compatibility.
};

inline MetricReport compare_views(const std::vector<ImageBuffer>& rendered,
                                  const std::vector<ImageBuffer>& reference) {
    if (rendered.size() != reference.size())
        throw DimensionMismatch("compare_views: view counts differ");
    MetricReport rep;
    double psnr_acc = 0.0, ssim_acc = 0.0;
    int ssim_n = 0;
    for (size_t i = 0; i < rendered.size(); ++i) {
        ViewMetrics vm;
        vm.view = int(i);
        vm.psnr = psnr(rendered[i], reference[i]);
        if (rendered[i].width >= ssim_detail::kWindow && rendered[i].height >= ssim_detail::kWindow) {
            vm.has_ssim = true;
            vm.ssim = ssim(rendered[i], reference[i]);
            ssim_acc += vm.ssim;
            ++ssim_n;
        }
        psnr_acc += vm.psnr;
        rep.per_view.push_back(vm);
    }
    rep.psnr_mean = rendered.empty() ? 0.0 : psnr_acc / double(rendered.size());
    rep.has_ssim = ssim_n == int(rendered.size()) && ssim_n > 0;
    if (ssim_n > 0) rep.ssim_mean = ssim_acc / double(ssim_n);
    return rep;
}

}  // namespace mgs
