#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "gamerecon/ballistics.hpp"
#include "gamerecon/batglove.hpp"
#include "gamerecon/fmoc.hpp"
#include "gamerecon/mccnn.hpp"
#include "gamerecon/trajkit.hpp"

namespace gamerecon::synthgen {

// Scripted pitch scene: a motion-blurred ball streak over a textured
// background, with an optional slow arm-like decoy, camera jitter and
// per-frame noise. Identical script and seed produce identical frames.
struct SceneScript {
    uint64_t seed = 1;
    double fps = 30.0;
    int width = 480;
    int height = 270;
    int frame_count = 60;

    // Ball flight in the field frame (meters, z up); constant velocity.
    int release_frame = 12;
    Vec3 release_point_m{0.5, 0.0, 1.8};
    Vec3 velocity_mps{40.2336, 0.0, -1.5};  // about 90 mph toward the plate
    double streak_width_px = 3.0;
    double exposure = 1.0;  // fraction of the frame interval the shutter is open
    uint8_t ball_intensity = 215;

    // Slow curved decoy (an arm-like blob on a circular arc).
    bool decoy_enabled = true;
    Vec2 decoy_center_px{120.0, 140.0};
    double decoy_orbit_px = 40.0;
    double decoy_speed_px_per_frame = 6.0;
    double decoy_blob_px = 7.0;
    uint8_t decoy_intensity = 170;

    // Background texture, camera jitter and sensor noise.
    uint8_t background = 90;
    double texture_contrast = 25.0;     // +- intensity of the static texture
    double jitter_amplitude_px = 1.0;   // horizontal shake, alternating frames
    int jitter_start = 0;
    int jitter_end = -1;                // -1 = whole clip
    double noise_amplitude = 8.0;       // +- uniform per-pixel noise

    ballistics::CameraModel camera;
    ballistics::VerticalPlane plane;
};

// Camera looking from `position` toward `target`, z up, image y downward.
ballistics::CameraModel look_at_camera(const Vec3& position, const Vec3& target,
                                       double focal_px, const Vec2& principal_px);

// Script with a consistent side-view camera/plane pairing for the given
// frame size; callers tweak fields afterwards.
SceneScript default_scene(int width, int height);

struct SceneGroundTruth {
    int release_frame = 0;
    double speed_mph = 0.0;
    Vec2 release_px;
    // Mid-exposure ball pixel per frame; nullopt before release or once the
    // ball leaves the frame.
    std::vector<std::optional<Vec2>> ball_px;
    std::vector<Vec3> ball_m;  // mid-exposure 3D position for visible frames
    bool left_frame_early = false;  // ball exited before a full track was visible
};

struct Scene {
    std::vector<fmoc::GrayFrame> frames;
    SceneGroundTruth truth;
};

Scene render_scene(const SceneScript& script);

// Classification dataset: per-class limb-oscillation signatures (distinct
// frequency, phase and amplitude), optional coordinate noise and per-joint
// dropout emulating pose-estimation gaps (missing values become NaN).
struct ClassSpec {
    int n_classes = 3;
    double base_freq_hz = 0.6;
    double freq_step_hz = 0.8;
    double amplitude_px = 30.0;
    double amplitude_step_px = 20.0;  // per-class amplitude offset
    double noise_px = 1.0;
    double fps = 30.0;
    std::array<double, trajkit::kTrajectoryJointCount> dropout{};  // per-joint probability
};

// Dropout probabilities matching observed pose-estimator gap rates: wrists
// 28%, elbows 10%, everything else 5%.
std::array<double, trajkit::kTrajectoryJointCount> dropout_preset_paper();

mccnn::Dataset synth_trajectories(const ClassSpec& spec, int per_class, int T, uint64_t seed);

// Scripted play: clean pitcher and batter trajectories plus a synthetic
// motion-candidate stream near the pitcher's leg, with exact event frames.
struct PlayScript {
    uint64_t seed = 1;
    int frame_count = 165;
    double fps = 30.0;
    double scale = 1.0;  // uniform spatial scale of the whole scene

    int release_frame = 93;
    int first_move_apex = 44;       // pitcher leg highest here
    int first_move_onset_delta = 4;  // lift starts this many frames earlier
    int candidate_onset_delay = 0;   // motion detector latency to emulate
    int leg_raise_offset = 5;        // batter leg apex at release - offset
    int foot_down_delta = 8;         // batter foot back down apex + delta
    int first_step_frame = 123;
    int run_direction = 1;  // +1 or -1 along x
    double noise_px = 0.4;
};

struct PlayTruth {
    int first_move_onset = 0;
    int first_move_apex = 0;
    int release = 0;
    int leg_raise = 0;
    int foot_down = 0;
    int first_step = 0;
};

struct ScriptedPlay {
    trajkit::JointTrajectories pitcher;
    trajkit::JointTrajectories batter;
    std::vector<fmoc::FrameCandidates> pitcher_candidates;
    PlayTruth truth;
};

ScriptedPlay scripted_play(const PlayScript& script);

// Scripted swing for bat fusion: per-frame ground-truth bat endpoints, a
// detector stream covering only the windup, and FMO candidates thereafter.
struct SwingScript {
    uint64_t seed = 1;
    int frame_count = 56;
    Vec2 pivot_px{400.0, 300.0};
    double bat_length_px = 90.0;
    double sweep_radians = 3.6;
    double detector_fraction = 0.223;  // leading frames covered by the detector
    double fmo_dropout = 0.1;
    double glove_dropout = 0.62;
};

struct SwingTruth {
    std::vector<Vec2> tip_px;
    std::vector<Vec2> base_px;
    std::vector<Vec2> wrist_px;
    std::vector<Roi> glove_box;  // smooth ground-truth glove path
};

struct ScriptedSwing {
    std::vector<batglove::DetectorBox> detector_boxes;  // bat + glove
    std::vector<fmoc::FrameCandidates> candidates;
    SwingTruth truth;
};

ScriptedSwing scripted_swing(const SwingScript& script);

// Pose-estimator-style per-frame detections for one or more synthetic
// people, with joint dropout; exercises the localization stack end to end.
struct PoseSceneScript {
    uint64_t seed = 1;
    int frame_count = 120;
    double fps = 30.0;
    int width = 960;
    int height = 540;
    Vec2 target_start{480.0, 300.0};
    double target_speed_px = 2.0;
    bool bystander = true;  // a second, slower person nearby
    std::array<double, trajkit::kPoseJointCount> dropout{};
};

struct PoseScene {
    std::vector<std::vector<trajkit::PersonDetection>> frames;  // people per frame
    std::vector<std::array<Vec2, trajkit::kPoseJointCount>> target_truth;
};

PoseScene synth_pose_scene(const PoseSceneScript& script);

}  // namespace gamerecon::synthgen
