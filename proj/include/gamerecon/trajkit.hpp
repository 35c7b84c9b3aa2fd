#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "gamerecon/geometry.hpp"

namespace gamerecon::trajkit {

// Fixed 18-slot joint catalog, in pose-estimator output order. The first 14
// slots are body joints, the last 4 facial. Slots 2..13 (shoulders through
// ankles) form the 12-joint trajectory catalog.
enum PoseJoint : int {
    kNose = 0,
    kNeck,
    kRShoulder,
    kRElbow,
    kRWrist,
    kLShoulder,
    kLElbow,
    kLWrist,
    kRHip,
    kRKnee,
    kRAnkle,
    kLHip,
    kLKnee,
    kLAnkle,
    kREye,
    kLEye,
    kREar,
    kLEar,
};

inline constexpr int kPoseJointCount = 18;
inline constexpr int kTrajectoryJointCount = 12;

// Index within the 12-joint trajectory catalog (pose index minus 2).
enum TrajJoint : int {
    kTrajRShoulder = 0,
    kTrajRElbow,
    kTrajRWrist,
    kTrajLShoulder,
    kTrajLElbow,
    kTrajLWrist,
    kTrajRHip,
    kTrajRKnee,
    kTrajRAnkle,
    kTrajLHip,
    kTrajLKnee,
    kTrajLAnkle,
};

const std::array<const char*, kPoseJointCount>& pose_joint_names();
const std::array<const char*, kTrajectoryJointCount>& trajectory_joint_names();

// Joints used for localization boxes; hips, shoulders, knees and ankles are
// the most stable detections.
const std::array<int, 8>& stable_joint_indices();

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    bool present = false;
};

struct PersonDetection {
    std::array<Keypoint, kPoseJointCount> joints{};

    // AABB of the present stable joints; nullopt when none are present.
    std::optional<Roi> stable_joint_box() const;
};

// Last available coordinate of each joint, across all frames seen so far.
class JointHistory {
public:
    void update(const PersonDetection& detection);
    const std::optional<Vec2>& last_seen(int joint) const { return last_seen_[joint]; }
    bool any() const;

private:
    std::array<std::optional<Vec2>, kPoseJointCount> last_seen_{};
};

// Padded AABB around the previous target detection. Missing joints are
// substituted with the last available coordinate of the respective joint so
// the box does not shrink when detections drop out. Throws
// Error(no_history) if no joint was ever observed.
Roi compute_roi(const PersonDetection& prev_target, const JointHistory& history,
                const Vec2& padding, double frame_w, double frame_h);

// Picks the detected person with the highest stable-joint-box IoU against
// the previous target. Returns nullopt (target missing this frame) when the
// best IoU does not exceed min_iou or when more than one person exceeds
// max_iou (people mixed up by the pose estimator).
std::optional<PersonDetection> localize_target(const std::vector<PersonDetection>& people,
                                               const PersonDetection& prev_target,
                                               double min_iou, double max_iou);

// 1-D series with NaN marking missing samples.
using Series = std::vector<double>;

inline bool is_missing(double v) { return std::isnan(v); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

// Linear interpolation of interior gaps; leading/trailing gaps are filled by
// holding the nearest present value. Throws Error(all_missing) when no
// sample is present.
Series interpolate_gaps(const Series& series);

// Zero-phase (forward-backward) Butterworth low-pass with unit DC gain.
// Throws Error(invalid_cutoff) unless 0 < cutoff_hz < fps/2.
Series lowpass_filter(const Series& series, double cutoff_hz, int order, double fps);

// Cubic B-spline least-squares fit evaluated at every frame index; imputes
// gaps and smooths in one pass. knot_spacing is the approximate distance in
// frames between spline knots (larger = smoother). Throws
// Error(underdetermined) with fewer than four present samples.
Series bspline_fit(const Series& series, double knot_spacing);

// Per-player time series of the 12 trajectory joints. NaN coordinates mark
// missing samples until a smoothing pass has run.
struct JointTrajectories {
    double fps = 30.0;
    // coords[t][j]: catalog joint j at frame t.
    std::vector<std::array<Vec2, kTrajectoryJointCount>> coords;

    int frame_count() const { return static_cast<int>(coords.size()); }

    // One coordinate (0 = x, 1 = y) of one joint as a Series.
    Series channel(int joint, int coord) const;
    void set_channel(int joint, int coord, const Series& values);
};

enum class Smoother { none, butterworth, bspline };

struct TrackerConfig {
    double min_iou = 0.1;
    double max_iou = 0.5;
    // Box padding in pixels at a 1080-pixel-high frame; scaled by the ratio
    // of the current box height to 1080.
    Vec2 padding{15.0, 15.0};
    double reference_frame_height = 1080.0;
    Vec2 init_center{0.0, 0.0};
    double butter_cutoff_hz = 3.0;
    int butter_order = 4;
    double bspline_knot_spacing = 5.0;
    Smoother smoother = Smoother::butterworth;
};

// Sequential per-player target tracker: seeds on the person nearest the
// configured start position, then follows the target frame to frame by IoU.
class PoseTracker {
public:
    explicit PoseTracker(const TrackerConfig& config, double frame_w, double frame_h);

    // Consumes one frame of detections; returns the selected target, or
    // nullopt when the target is missing this frame.
    std::optional<PersonDetection> push(const std::vector<PersonDetection>& people);

    // ROI to crop for the next frame; nullopt until a target has been seen.
    std::optional<Roi> next_roi() const;

    // 12-joint trajectories accumulated so far (missing frames are NaN).
    JointTrajectories trajectories(double fps) const;

private:
    TrackerConfig config_;
    double frame_w_;
    double frame_h_;
    bool seeded_ = false;
    std::optional<PersonDetection> last_target_;
    JointHistory history_;
    std::vector<std::optional<PersonDetection>> selected_;
};

// Interpolates every channel and applies the configured smoother. After this
// no missing values remain and the frame count is unchanged.
JointTrajectories smooth_trajectories(const JointTrajectories& raw, const TrackerConfig& config);

}  // namespace gamerecon::trajkit
