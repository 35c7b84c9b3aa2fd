#pragma once

#include <algorithm>
#include <cmath>

namespace gamerecon {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }
inline Vec2 normalized(const Vec2& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0.0, 0.0, 0.0};
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Row-major 3x3 matrix. Used for camera orientation (columns are the camera
// axes expressed in the field frame).
struct Mat3 {
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return Mat3{}; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
                r.m[i * 3 + j] = s;
            }
        return r;
    }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i * 3 + j] = m[j * 3 + i];
        return r;
    }
};

// Axis-aligned box spanned by the top-left corner p1 and bottom-right p2,
// in image coordinates (y grows downward). Invariant: p1 <= p2 per component.
struct Roi {
    Vec2 p1;
    Vec2 p2;

    double width() const { return p2.x - p1.x; }
    double height() const { return p2.y - p1.y; }
    double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
    Vec2 center() const { return {(p1.x + p2.x) * 0.5, (p1.y + p2.y) * 0.5}; }
    double diagonal() const { return norm(p2 - p1); }

    bool contains(const Vec2& p) const {
        return p.x >= p1.x && p.x <= p2.x && p.y >= p1.y && p.y <= p2.y;
    }

    Roi clipped(double frame_w, double frame_h) const {
        Roi r;
        r.p1 = {std::clamp(p1.x, 0.0, frame_w), std::clamp(p1.y, 0.0, frame_h)};
        r.p2 = {std::clamp(p2.x, 0.0, frame_w), std::clamp(p2.y, 0.0, frame_h)};
        return r;
    }
};

// Area intersection-over-union. Returns 0 when both boxes are degenerate.
double iou(const Roi& a, const Roi& b);

}  // namespace gamerecon
