#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "mipmapgs/camera.hpp"
#include "mipmapgs/errors.hpp"
#include "mipmapgs/rasterizer.hpp"
#include "mipmapgs/resample.hpp"
#include "mipmapgs/threading.hpp"

namespace mgs {

// Supported zoom factors for resampled pseudo-GT: integers and their
// reciprocals. Returns +k for x k, -k for x 1/k, 1 for identity.
inline int zoom_resample_factor(double zoom) {
    if (zoom == 1.0) return 1;
    if (zoom > 1.0) {
        double r = std::round(zoom);
        if (std::fabs(zoom - r) < 1e-9 && r >= 2.0) return int(r);
    } else if (zoom > 0.0) {
        double inv = 1.0 / zoom;
        double r = std::round(inv);
        if (std::fabs(inv - r) < 1e-9 && r >= 2.0) return -int(r);
    }
    throw InvalidZoom("pseudo-GT zoom must be 1, an integer, or 1/integer; got " + std::to_string(zoom));
}

struct PseudoGtView {
    Camera camera;  // scaled to the target zoom
    ImageBuffer image;
};

// Scale-specific mipmap pseudo-GT: render the frozen base scene at the basic
// scale, then resample each view to the target zoom. The returned cameras
// are the scaled ones, so an adaptation render aligns with its target
// pixel-for-pixel.
inline std::vector<PseudoGtView> make_pseudo_gt(const Scene& base, const std::vector<Camera>& views,
                                                double zoom, const RenderConfig& cfg,
                                                Kernel down_kernel = Kernel::Bilinear,
                                                Kernel up_kernel = Kernel::Lanczos3) {
    int factor = zoom_resample_factor(zoom);
    std::vector<PseudoGtView> out(views.size());
    parallel_for(int(views.size()), [&](int i) {
        ImageBuffer basic = render(base, views[i], cfg);
        PseudoGtView v;
        v.camera = scale_camera(views[i], zoom);
        if (factor == 1)
            v.image = std::move(basic);
        else if (factor > 1)
            v.image = upsample(basic, factor, up_kernel);
        else
            v.image = downsample(basic, -factor, down_kernel);
        out[i] = std::move(v);
    });
    return out;
}

}  // namespace mgs
