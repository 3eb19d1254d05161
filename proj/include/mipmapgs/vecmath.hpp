#pragma once

#include <array>
#include <cmath>
#include <cstddef>

// Small fixed-size linear algebra for the splatting pipeline. Double
// precision throughout; the analytic backward pass needs the headroom.

namespace mgs {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a.x += b.x; a.y += b.y; a.z += b.z; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
    double n = norm(a);
    return {a.x / n, a.y / n, a.z / n};
}
inline Vec3 hadamard(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

// Quaternion, scalar-first (w, x, y, z).
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&w)[i]; }
    double operator[](int i) const { return (&w)[i]; }
};

inline double norm(const Quat& q) {
    return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}
inline Quat normalized(const Quat& q) {
    double n = norm(q);
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Row-major 3x3 matrix.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 zero() { return Mat3{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}}; }
    static Mat3 identity() { return Mat3{}; }
    static Mat3 diag(Vec3 d) { return Mat3{{{d.x, 0, 0}, {0, d.y, 0}, {0, 0, d.z}}}; }
};

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r = Mat3::zero();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) r.m[i][j] += a.m[i][k] * b.m[k][j];
    return r;
}
inline Vec3 operator*(const Mat3& a, Vec3 v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}
inline Mat3 transpose(const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
    return r;
}
inline Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}
inline Mat3 operator*(double s, const Mat3& a) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}
inline double det(const Mat3& a) {
    return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
           a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
           a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}
inline Mat3 inverse(const Mat3& a) {
    double d = det(a);
    Mat3 r;
    r.m[0][0] = (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) / d;
    r.m[0][1] = (a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2]) / d;
    r.m[0][2] = (a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1]) / d;
    r.m[1][0] = (a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2]) / d;
    r.m[1][1] = (a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0]) / d;
    r.m[1][2] = (a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2]) / d;
    r.m[2][0] = (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]) / d;
    r.m[2][1] = (a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1]) / d;
    r.m[2][2] = (a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]) / d;
    return r;
}

// Eigenvalues of a symmetric 3x3, ascending. Analytic (trigonometric) form.
inline std::array<double, 3> sym3_eigenvalues(const Mat3& a) {
    double p1 = a.m[0][1] * a.m[0][1] + a.m[0][2] * a.m[0][2] + a.m[1][2] * a.m[1][2];
    double q = (a.m[0][0] + a.m[1][1] + a.m[2][2]) / 3.0;
    if (p1 == 0.0) {
        std::array<double, 3> e = {a.m[0][0], a.m[1][1], a.m[2][2]};
        if (e[0] > e[1]) std::swap(e[0], e[1]);
        if (e[1] > e[2]) std::swap(e[1], e[2]);
        if (e[0] > e[1]) std::swap(e[0], e[1]);
        return e;
    }
    double p2 = (a.m[0][0] - q) * (a.m[0][0] - q) + (a.m[1][1] - q) * (a.m[1][1] - q) +
                (a.m[2][2] - q) * (a.m[2][2] - q) + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    Mat3 b = (1.0 / p) * (a + (-q) * Mat3::identity());
    double r = det(b) / 2.0;
    r = std::fmin(1.0, std::fmax(-1.0, r));
    double phi = std::acos(r) / 3.0;
    double e2 = q + 2.0 * p * std::cos(phi);
    double e0 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e1 = 3.0 * q - e0 - e2;
    return {e0, e1, e2};
}

// Symmetric 2x2, stored as (xx, xy, yy).
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

inline double det(Sym2 s) { return s.xx * s.yy - s.xy * s.xy; }
inline Sym2 inverse(Sym2 s) {
    double d = det(s);
    return {s.yy / d, -s.xy / d, s.xx / d};
}
inline double eig_max(Sym2 s) {
    double mid = 0.5 * (s.xx + s.yy);
    double rad = std::sqrt(0.25 * (s.xx - s.yy) * (s.xx - s.yy) + s.xy * s.xy);
    return mid + rad;
}
inline double eig_min(Sym2 s) {
    double mid = 0.5 * (s.xx + s.yy);
    double rad = std::sqrt(0.25 * (s.xx - s.yy) * (s.xx - s.yy) + s.xy * s.xy);
    return mid - rad;
}
// Quadratic form d' S d.
inline double qform(Sym2 s, Vec2 d) {
    return s.xx * d.x * d.x + 2.0 * s.xy * d.x * d.y + s.yy * d.y * d.y;
}

// Rotation matrix of a unit quaternion.
inline Mat3 rotation_matrix(const Quat& q) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3 r;
    r.m[0][0] = 1 - 2 * (y * y + z * z);
    r.m[0][1] = 2 * (x * y - w * z);
    r.m[0][2] = 2 * (x * z + w * y);
    r.m[1][0] = 2 * (x * y + w * z);
    r.m[1][1] = 1 - 2 * (x * x + z * z);
    r.m[1][2] = 2 * (y * z - w * x);
    r.m[2][0] = 2 * (x * z - w * y);
    r.m[2][1] = 2 * (y * z + w * x);
    r.m[2][2] = 1 - 2 * (x * x + y * y);
    return r;
}

// Partial derivatives dR/dq of rotation_matrix at a unit quaternion,
// indexed w, x, y, z.
inline std::array<Mat3, 4> rotation_matrix_jacobian(const Quat& q) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    std::array<Mat3, 4> d;
    d[0] = Mat3{{{0, -z, y}, {z, 0, -x}, {-y, x, 0}}};
    d[1] = Mat3{{{0, y, z}, {y, -2 * x, -w}, {z, w, -2 * x}}};
    d[2] = Mat3{{{-2 * y, x, w}, {x, 0, z}, {-w, z, -2 * y}}};
    d[3] = Mat3{{{-2 * z, -w, x}, {w, -2 * z, y}, {x, y, 0}}};
    for (auto& mat : d) mat = 2.0 * mat;
    return d;
}

}  // namespace mgs
