#pragma once

#include <optional>
#include <vector>

#include "gamerecon/gbcv.hpp"
#include "gamerecon/geometry.hpp"

namespace gamerecon::ballistics {

inline constexpr double kMetersPerSecondPerMph = 0.44704;

// Pinhole camera in the field frame (meters, z up). rotation columns are the
// camera axes in field coordinates: x right, y down (image convention),
// z forward along the optical axis.
struct CameraModel {
    double focal_px = 1000.0;
    Vec2 principal_px;
    Vec3 position_m;
    Mat3 rotation;
};

// Vertical plane through the mound and plate ground anchors.
struct VerticalPlane {
    Vec3 mound_m;
    Vec3 plate_m;
    // Offset along the plane normal, in meters; exposes the shift-toward-a-
    // camera correction without claiming a calibrated value.
    double offset_m = 0.0;

    Vec3 normal() const;  // horizontal unit normal
    Vec3 anchor() const;  // mound anchor shifted by offset_m
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

struct SpeedEstimate {
    double mph = 0.0;
    std::vector<Vec3> points_3d;
    std::vector<int> frames;
    const char* method = "plane-intersection";
};

Vec2 project_point(const CameraModel& camera, const Vec3& point_m);

// Ray through the camera center and the back-projected pixel.
Ray project_ray(const CameraModel& camera, const Vec2& pixel);

// Unique ray-plane intersection in front of the camera; nullopt when the ray
// is parallel to the plane (within 1e-9) or the hit lies behind the camera.
std::optional<Vec3> intersect_plane(const Ray& ray, const VerticalPlane& plane);

// Intersects every observed track point with the plane and reports the
// median per-step 3D speed in mph. Inferred (gap-bridged) points and points
// that miss the plane are skipped. Throws Error(insufficient_track) when
// fewer than three usable points or no moving step remains.
SpeedEstimate estimate_speed(const gbcv::BallTrack2D& track, const CameraModel& camera,
                             const VerticalPlane& plane, double fps);

}  // namespace gamerecon::ballistics
