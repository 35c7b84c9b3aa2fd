#include "gamerecon/ballistics.hpp"

#include <algorithm>
#include <cmath>

#include "gamerecon/error.hpp"

namespace gamerecon::ballistics {

Vec3 VerticalPlane::normal() const {
    Vec2 d{plate_m.x - mound_m.x, plate_m.y - mound_m.y};
    double n = norm(d);
    if (n <= 0.0)
        throw Error(ErrorCode::bad_input, "plane anchors must be distinct in the ground plane");
    return {-d.y / n, d.x / n, 0.0};
}

Vec3 VerticalPlane::anchor() const {
    return mound_m + normal() * offset_m;
}

Vec2 project_point(const CameraModel& camera, const Vec3& point_m) {
    Vec3 cam = camera.rotation.transpose() * (point_m - camera.position_m);
    return {camera.focal_px * cam.x / cam.z + camera.principal_px.x,
            camera.focal_px * cam.y / cam.z + camera.principal_px.y};
}

Ray project_ray(const CameraModel& camera, const Vec2& pixel) {
    Vec3 dir_cam{(pixel.x - camera.principal_px.x) / camera.focal_px,
                 (pixel.y - camera.principal_px.y) / camera.focal_px, 1.0};
    return {camera.position_m, normalized(camera.rotation * dir_cam)};
}

std::optional<Vec3> intersect_plane(const Ray& ray, const VerticalPlane& plane) {
    Vec3 n = plane.normal();
    double denom = dot(n, ray.direction);
    if (std::abs(denom) < 1e-9) return std::nullopt;
    double t = dot(n, plane.anchor() - ray.origin) / denom;
    if (t <= 0.0) return std::nullopt;
    return ray.origin + ray.direction * t;
}

SpeedEstimate estimate_speed(const gbcv::BallTrack2D& track, const CameraModel& camera,
                             const VerticalPlane& plane, double fps) {
    SpeedEstimate est;
    for (const auto& p : track.points) {
        if (p.inferred) continue;
        auto hit = intersect_plane(project_ray(camera, p.pos), plane);
        if (!hit) continue;  // dropped, not fatal
        est.points_3d.push_back(*hit);
        est.frames.push_back(p.frame);
    }
    if (est.points_3d.size() < 3)
        throw Error(ErrorCode::insufficient_track,
                    "speed estimation needs at least three usable track points");

    std::vector<double> speeds;
    for (size_t i = 1; i < est.points_3d.size(); ++i) {
        int df = est.frames[i] - est.frames[i - 1];
        if (df <= 0) continue;
        double step = norm(est.points_3d[i] - est.points_3d[i - 1]) / df;
        if (step <= 1e-12) continue;  // stationary samples carry no speed signal
        speeds.push_back(step * fps);
    }
    if (speeds.empty())
        throw Error(ErrorCode::insufficient_track, "track does not move; no speed to estimate");

    std::sort(speeds.begin(), speeds.end());
    double median = speeds.size() % 2 == 1
                        ? speeds[speeds.size() / 2]
                        : 0.5 * (speeds[speeds.size() / 2 - 1] + speeds[speeds.size() / 2]);
    est.mph = median / kMetersPerSecondPerMph;
    return est;
}

}  // namespace gamerecon::ballistics
