#pragma once

#include <cmath>

#include "mipmapgs/errors.hpp"
#include "mipmapgs/vecmath.hpp"

namespace mgs {

// Pinhole camera. world_to_cam maps world points into a right-handed frame
// with x right, y down, z forward. Pixel (i, j) samples the continuous
// coordinate (i + 0.5, j + 0.5).
struct Camera {
    double fx = 1.0, fy = 1.0;
    double cx = 0.0, cy = 0.0;
    int width = 1, height = 1;
    Mat3 rot;    // world -> camera rotation
    Vec3 trans;  // world -> camera translation

    Vec3 to_camera(Vec3 p) const { return rot * p + trans; }
    Vec3 position() const { return transpose(rot) * ((-1.0) * trans); }

    bool rotation_orthonormal(double tol = 1e-9) const {
        Mat3 rr = rot * transpose(rot);
        double err = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) err = std::fmax(err, std::fabs(rr.m[i][j] - (i == j ? 1.0 : 0.0)));
        return err <= tol && det(rot) > 0.0;
    }
};

// The single definition of "zoom factor": intrinsics and resolution all
// scale by N, pose unchanged.
inline Camera scale_camera(const Camera& cam, double zoom) {
    if (!(zoom > 0.0)) throw InvalidZoom("scale_camera: zoom must be positive, got " + std::to_string(zoom));
    int w = int(std::llround(cam.width * zoom));
    int h = int(std::llround(cam.height * zoom));
    if (w < 1 || h < 1)
        throw InvalidZoom("scale_camera: zoom " + std::to_string(zoom) + " yields resolution " +
                          std::to_string(w) + "x" + std::to_string(h));
    Camera out = cam;
    out.fx = cam.fx * zoom;
    out.fy = cam.fy * zoom;
    out.cx = cam.cx * zoom;
    out.cy = cam.cy * zoom;
    out.width = w;
    out.height = h;
    return out;
}

// Camera at `pos` looking at `target`, square pixels, principal point at the
// image center.
inline Camera look_at(Vec3 pos, Vec3 target, Vec3 up, double fov_y_deg, int width, int height) {
    Vec3 fwd = normalized(target - pos);
    Vec3 right = normalized(cross(fwd, up));
    Vec3 down = cross(fwd, right);
    Camera cam;
    cam.rot = Mat3{{{right.x, right.y, right.z}, {down.x, down.y, down.z}, {fwd.x, fwd.y, fwd.z}}};
    cam.trans = (-1.0) * (cam.rot * pos);
    cam.width = width;
    cam.height = height;
    double f = 0.5 * height / std::tan(0.5 * fov_y_deg * M_PI / 180.0);
    cam.fx = cam.fy = f;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    return cam;
}

}  // namespace mgs
