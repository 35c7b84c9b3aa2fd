#include "gamerecon/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gamerecon/error.hpp"

namespace gamerecon::synthgen {

namespace {

// Counter-based hash so pixel noise is independent of evaluation order.
uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double hash01(uint64_t a, uint64_t b, uint64_t c) {
    uint64_t h = splitmix64(a ^ splitmix64(b ^ splitmix64(c)));
    return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 <= 0.0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

}  // namespace

ballistics::CameraModel look_at_camera(const Vec3& position, const Vec3& target,
                                       double focal_px, const Vec2& principal_px) {
    ballistics::CameraModel cam;
    cam.focal_px = focal_px;
    cam.principal_px = principal_px;
    cam.position_m = position;
    Vec3 forward = normalized(target - position);
    Vec3 right = normalized(cross(forward, Vec3{0.0, 0.0, 1.0}));
    Vec3 down = cross(forward, right);
    cam.rotation.m[0] = right.x;
    cam.rotation.m[3] = right.y;
    cam.rotation.m[6] = right.z;
    cam.rotation.m[1] = down.x;
    cam.rotation.m[4] = down.y;
    cam.rotation.m[7] = down.z;
    cam.rotation.m[2] = forward.x;
    cam.rotation.m[5] = forward.y;
    cam.rotation.m[8] = forward.z;
    return cam;
}

SceneScript default_scene(int width, int height) {
    SceneScript script;
    script.width = width;
    script.height = height;
    script.plane.mound_m = {0.0, 0.0, 0.0};
    script.plane.plate_m = {18.44, 0.0, 0.0};
    // High side view covering the full flight.
    script.camera = look_at_camera({9.2, -26.0, 4.5}, {9.2, 0.0, 1.2},
                                   0.9 * width, {width / 2.0, height / 2.0});
    return script;
}

Scene render_scene(const SceneScript& script) {
    Scene scene;
    const int W = script.width;
    const int H = script.height;
    const int jitter_end = script.jitter_end < 0 ? script.frame_count - 1 : script.jitter_end;

    auto ball_at = [&](double frame_time) {
        return script.release_point_m +
               script.velocity_mps * ((frame_time - script.release_frame) / script.fps);
    };

    scene.truth.release_frame = script.release_frame;
    scene.truth.speed_mph = norm(script.velocity_mps) / ballistics::kMetersPerSecondPerMph;
    scene.truth.release_px = ballistics::project_point(script.camera, script.release_point_m);
    scene.truth.ball_px.resize(script.frame_count);

    for (int t = 0; t < script.frame_count; ++t) {
        fmoc::GrayFrame frame(W, H);

        int jx = 0;
        if (script.jitter_amplitude_px > 0.0 && t >= script.jitter_start && t <= jitter_end)
            jx = (t % 2 == 1) ? static_cast<int>(std::lround(script.jitter_amplitude_px)) : 0;

        // Static texture sampled with the jitter offset, plus per-frame noise.
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                double tex = hash01(script.seed, 0x7e97ull,
                                    static_cast<uint64_t>(y + 7) * 131071 + (x + jx + 9));
                double noise =
                    hash01(script.seed, 0xBAD + t, static_cast<uint64_t>(y) * 524287 + x);
                double v = script.background + (tex * 2.0 - 1.0) * script.texture_contrast +
                           (noise * 2.0 - 1.0) * script.noise_amplitude;
                frame.set(x, y, static_cast<uint8_t>(std::clamp(v, 0.0, 255.0)));
            }
        }

        // Decoy blob on a slow circular arc.
        if (script.decoy_enabled) {
            double omega = script.decoy_speed_px_per_frame / script.decoy_orbit_px;
            Vec2 pos = script.decoy_center_px +
                       Vec2{std::cos(omega * t), std::sin(omega * t)} * script.decoy_orbit_px;
            int r = static_cast<int>(std::ceil(script.decoy_blob_px));
            for (int y = std::max(0, (int)pos.y - r); y <= std::min(H - 1, (int)pos.y + r); ++y)
                for (int x = std::max(0, (int)pos.x - r); x <= std::min(W - 1, (int)pos.x + r);
                     ++x)
                    if (norm(Vec2{(double)x, (double)y} - pos) <= script.decoy_blob_px)
                        frame.set(x, y, script.decoy_intensity);
        }

        // Ball streak: capsule between the exposure-window endpoints.
        double t0 = std::max(static_cast<double>(t), static_cast<double>(script.release_frame));
        double t1 = t + script.exposure;
        if (t1 > t0) {
            Vec3 p0 = ball_at(t0);
            Vec3 p1 = ball_at(t1);
            Vec2 a = ballistics::project_point(script.camera, p0);
            Vec2 b = ballistics::project_point(script.camera, p1);
            double mid_time = 0.5 * (t0 + t1);
            Vec3 mid = ball_at(mid_time);
            Vec2 mid_px = ballistics::project_point(script.camera, mid);
            bool inside = mid_px.x >= 0 && mid_px.x < W && mid_px.y >= 0 && mid_px.y < H;
            if (inside) {
                scene.truth.ball_px[t] = mid_px;
                scene.truth.ball_m.push_back(mid);
            } else if (t >= script.release_frame) {
                scene.truth.left_frame_early =
                    scene.truth.left_frame_early ||
                    static_cast<int>(scene.truth.ball_m.size()) < 5;
            }

            double radius = script.streak_width_px * 0.5;
            int x_lo = std::max(0, (int)std::floor(std::min(a.x, b.x) - radius - 1));
            int x_hi = std::min(W - 1, (int)std::ceil(std::max(a.x, b.x) + radius + 1));
            int y_lo = std::max(0, (int)std::floor(std::min(a.y, b.y) - radius - 1));
            int y_hi = std::min(H - 1, (int)std::ceil(std::max(a.y, b.y) + radius + 1));
            for (int y = y_lo; y <= y_hi; ++y)
                for (int x = x_lo; x <= x_hi; ++x)
                    if (point_segment_distance({(double)x, (double)y}, a, b) <= radius)
                        frame.set(x, y, script.ball_intensity);
        }

        scene.frames.push_back(std::move(frame));
    }
    return scene;
}

std::array<double, trajkit::kTrajectoryJointCount> dropout_preset_paper() {
    using namespace trajkit;
    std::array<double, kTrajectoryJointCount> d{};
    d.fill(0.05);
    d[kTrajRWrist] = 0.28;
    d[kTrajLWrist] = 0.28;
    d[kTrajRElbow] = 0.10;
    d[kTrajLElbow] = 0.10;
    return d;
}

namespace {

// Rest offsets of a simple standing skeleton, trajectory-catalog order.
const std::array<Vec2, trajkit::kTrajectoryJointCount>& skeleton_offsets() {
    static const std::array<Vec2, trajkit::kTrajectoryJointCount> offsets = {{
        {22.0, -80.0},   // r_shoulder
        {30.0, -50.0},   // r_elbow
        {34.0, -20.0},   // r_wrist
        {-22.0, -80.0},  // l_shoulder
        {-30.0, -50.0},  // l_elbow
        {-34.0, -20.0},  // l_wrist
        {14.0, 0.0},     // r_hip
        {16.0, 45.0},    // r_knee
        {18.0, 90.0},    // r_ankle
        {-14.0, 0.0},    // l_hip
        {-16.0, 45.0},   // l_knee
        {-18.0, 90.0},   // l_ankle
    }};
    return offsets;
}

}  // namespace

mccnn::Dataset synth_trajectories(const ClassSpec& spec, int per_class, int T, uint64_t seed) {
    if (spec.n_classes < 2)
        throw Error(ErrorCode::bad_input, "need at least two classes");
    mccnn::Dataset data;
    data.n_channels = 2 * trajkit::kTrajectoryJointCount;
    data.length = T;
    data.n_classes = spec.n_classes;
    for (const char* name : trajkit::trajectory_joint_names()) data.catalog.push_back(name);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto& offsets = skeleton_offsets();

    for (int cls = 0; cls < spec.n_classes; ++cls) {
        double freq = spec.base_freq_hz + cls * spec.freq_step_hz;
        double amp = spec.amplitude_px + cls * spec.amplitude_step_px;
        double class_phase = cls * 2.0 * std::numbers::pi / spec.n_classes;
        for (int s = 0; s < per_class; ++s) {
            mccnn::TrajectorySample sample;
            sample.label = cls;
            sample.channels.assign(static_cast<size_t>(data.n_channels) * T, 0.0);
            Vec2 center{400.0 + 40.0 * gauss(rng), 280.0 + 20.0 * gauss(rng)};
            double sample_phase = uni(rng) * 2.0 * std::numbers::pi;

            for (int j = 0; j < trajkit::kTrajectoryJointCount; ++j) {
                // Limbs swing harder than the torso.
                double limb_gain = (j == trajkit::kTrajRWrist || j == trajkit::kTrajLWrist ||
                                    j == trajkit::kTrajRAnkle || j == trajkit::kTrajLAnkle)
                                       ? 1.0
                                       : (j == trajkit::kTrajRElbow || j == trajkit::kTrajLElbow ||
                                          j == trajkit::kTrajRKnee || j == trajkit::kTrajLKnee)
                                             ? 0.6
                                             : 0.25;
                double joint_phase = j * 0.7;
                for (int t = 0; t < T; ++t) {
                    double w = 2.0 * std::numbers::pi * freq * t / spec.fps;
                    double osc_x = amp * limb_gain * std::sin(w + class_phase + sample_phase +
                                                              joint_phase);
                    double osc_y = 0.5 * amp * limb_gain *
                                   std::cos(w + class_phase + sample_phase + joint_phase * 1.3);
                    double x = center.x + offsets[j].x + osc_x + spec.noise_px * gauss(rng);
                    double y = center.y + offsets[j].y + osc_y + spec.noise_px * gauss(rng);
                    if (spec.dropout[j] > 0.0 && uni(rng) < spec.dropout[j]) {
                        x = trajkit::kMissing;
                        y = trajkit::kMissing;
                    }
                    sample.channels[static_cast<size_t>(2 * j) * T + t] = x;
                    sample.channels[static_cast<size_t>(2 * j + 1) * T + t] = y;
                }
            }
            data.samples.push_back(std::move(sample));
        }
    }
    return data;
}

namespace {

// Smooth 0 -> 1 -> 0 bump peaking at apex, supported on [onset, end].
double bump(double t, double onset, double apex, double end) {
    if (t <= onset || t >= end) return 0.0;
    double u = t < apex ? (t - onset) / (apex - onset) : (end - t) / (end - apex);
    return 0.5 - 0.5 * std::cos(std::numbers::pi * u);
}

}  // namespace

ScriptedPlay scripted_play(const PlayScript& script) {
    ScriptedPlay play;
    const int T = script.frame_count;
    const double s = script.scale;
    std::mt19937_64 rng(script.seed);
    std::normal_distribution<double> gauss(0.0, script.noise_px);
    std::uniform_int_distribution<int> jitter_px(-2, 2);
    const auto& offsets = skeleton_offsets();

    play.truth.release = script.release_frame;
    play.truth.first_move_apex = script.first_move_apex;
    play.truth.first_move_onset = script.first_move_apex - script.first_move_onset_delta;
    play.truth.leg_raise = script.release_frame - script.leg_raise_offset;
    play.truth.foot_down = play.truth.leg_raise + script.foot_down_delta;
    play.truth.first_step = script.first_step_frame;

    auto make_player = [&](Vec2 anchor) {
        trajkit::JointTrajectories traj;
        traj.fps = script.fps;
        traj.coords.resize(T);
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < trajkit::kTrajectoryJointCount; ++j)
                traj.coords[t][j] = (anchor + offsets[j]) * s;
        return traj;
    };

    // Pitcher: lead leg (left) rises to its apex and returns.
    play.pitcher = make_player({300.0, 380.0});
    {
        int onset = play.truth.first_move_onset;
        int apex = play.truth.first_move_apex;
        int end = apex + script.first_move_onset_delta + 4;
        for (int t = 0; t < T; ++t) {
            double lift = 55.0 * s * bump(t, onset, apex, end);
            play.pitcher.coords[t][trajkit::kTrajLAnkle].y -= lift;
            play.pitcher.coords[t][trajkit::kTrajLKnee].y -= 0.6 * lift;
        }
    }

    // Batter: a smaller lift before release, then the run.
    play.batter = make_player({700.0, 400.0});
    {
        int apex = play.truth.leg_raise;
        int onset = apex - 5;
        int end = play.truth.foot_down;
        for (int t = 0; t < T; ++t) {
            double lift = 30.0 * s * bump(t, onset, apex, end);
            // The foot plants slightly below its rest height and stays
            // there, so the return to baseline is a well-defined instant.
            double plant = t >= end ? std::min(2.0, 1.0 + (t - end)) * 2.0 * s : 0.0;
            play.batter.coords[t][trajkit::kTrajLAnkle].y += plant - lift;
            play.batter.coords[t][trajkit::kTrajLKnee].y += 0.5 * plant - 0.65 * lift;
        }
        double run_x = 0.0;
        for (int t = 0; t < T; ++t) {
            if (t >= play.truth.first_step)
                run_x += script.run_direction *
                         std::min(8.0, 2.5 * (t - play.truth.first_step + 1)) * s;
            for (int j = 0; j < trajkit::kTrajectoryJointCount; ++j)
                play.batter.coords[t][j].x += run_x;
        }
    }

    // Coordinate noise on both players.
    if (script.noise_px > 0.0) {
        for (auto* traj : {&play.pitcher, &play.batter})
            for (auto& frame : traj->coords)
                for (auto& p : frame) {
                    p.x += gauss(rng) * s;
                    p.y += gauss(rng) * s;
                }
    }

    // Motion candidates near the pitcher's moving leg, starting with the
    // emulated detector latency; plus one isolated early candidate and a
    // far-away distractor that never qualifies.
    int cand_start = play.truth.first_move_onset + script.candidate_onset_delay;
    int cand_end = play.truth.first_move_apex + script.first_move_onset_delta + 4;
    for (int t = 0; t < T; ++t) {
        fmoc::FrameCandidates fc;
        fc.frame = t;
        auto near_leg_candidate = [&](Vec2 at) {
            fmoc::MotionCandidate c;
            c.centroid = at + Vec2{(double)jitter_px(rng), (double)jitter_px(rng)} * s;
            c.x0 = static_cast<int>(c.centroid.x - 4 * s);
            c.x1 = static_cast<int>(c.centroid.x + 4 * s);
            c.y0 = static_cast<int>(c.centroid.y - 4 * s);
            c.y1 = static_cast<int>(c.centroid.y + 4 * s);
            c.area = static_cast<int>(30 * s * s);
            return c;
        };
        if (t >= cand_start && t <= cand_end)
            fc.candidates.push_back(
                near_leg_candidate(play.pitcher.coords[t][trajkit::kTrajLAnkle]));
        if (t == play.truth.first_move_onset - 15 && t >= 0)
            fc.candidates.push_back(
                near_leg_candidate(play.pitcher.coords[t][trajkit::kTrajLAnkle]));
        // Distractor far from the legs (e.g. the scoreboard).
        if (t % 4 == 0) {
            fmoc::MotionCandidate c;
            c.centroid = Vec2{80.0, 60.0} * s;
            c.x0 = static_cast<int>(c.centroid.x - 3 * s);
            c.x1 = static_cast<int>(c.centroid.x + 3 * s);
            c.y0 = static_cast<int>(c.centroid.y - 3 * s);
            c.y1 = static_cast<int>(c.centroid.y + 3 * s);
            c.area = static_cast<int>(20 * s * s);
            fc.candidates.push_back(c);
        }
        play.pitcher_candidates.push_back(std::move(fc));
    }
    return play;
}

ScriptedSwing scripted_swing(const SwingScript& script) {
    ScriptedSwing swing;
    const int T = script.frame_count;
    std::mt19937_64 rng(script.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    swing.truth.tip_px.resize(T);
    swing.truth.base_px.resize(T);
    swing.truth.wrist_px.resize(T);
    swing.truth.glove_box.resize(T);

    int detector_frames = std::max(1, static_cast<int>(std::lround(script.detector_fraction * T)));

    for (int t = 0; t < T; ++t) {
        double angle = -0.4 + script.sweep_radians * t / (T - 1);
        Vec2 dir{std::cos(angle), std::sin(angle)};
        Vec2 base = script.pivot_px + dir * 12.0;
        Vec2 tip = script.pivot_px + dir * (12.0 + script.bat_length_px);
        swing.truth.base_px[t] = base;
        swing.truth.tip_px[t] = tip;
        swing.truth.wrist_px[t] = script.pivot_px + dir * 8.0;

        Roi bat_box{{std::min(base.x, tip.x) - 3.0, std::min(base.y, tip.y) - 3.0},
                    {std::max(base.x, tip.x) + 3.0, std::max(base.y, tip.y) + 3.0}};

        if (t < detector_frames) {
            swing.detector_boxes.push_back(
                {t, batglove::ObjectClass::bat, bat_box, 0.9});
        }

        fmoc::FrameCandidates fc;
        fc.frame = t;
        if (t >= detector_frames && uni(rng) >= script.fmo_dropout) {
            fmoc::MotionCandidate c;
            c.x0 = static_cast<int>(bat_box.p1.x);
            c.y0 = static_cast<int>(bat_box.p1.y);
            c.x1 = static_cast<int>(bat_box.p2.x);
            c.y1 = static_cast<int>(bat_box.p2.y);
            c.centroid = bat_box.center();
            c.area = 60;
            fc.candidates.push_back(c);
        }
        // A stray candidate far away must never be adopted.
        if (t % 5 == 0) {
            fmoc::MotionCandidate c;
            c.centroid = {40.0, 40.0};
            c.x0 = 36;
            c.y0 = 36;
            c.x1 = 44;
            c.y1 = 44;
            c.area = 40;
            fc.candidates.push_back(c);
        }
        swing.candidates.push_back(std::move(fc));

        // Glove drifting slowly; detector sees it through the dropout.
        Vec2 glove_center{650.0 + 0.4 * t, 380.0 + 0.2 * t};
        Roi glove_box{glove_center - Vec2{12.0, 12.0}, glove_center + Vec2{12.0, 12.0}};
        swing.truth.glove_box[t] = glove_box;
        if (uni(rng) >= script.glove_dropout)
            swing.detector_boxes.push_back({t, batglove::ObjectClass::glove, glove_box, 0.8});
    }
    return swing;
}

PoseScene synth_pose_scene(const PoseSceneScript& script) {
    PoseScene scene;
    std::mt19937_64 rng(script.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.5);
    const auto& offsets = skeleton_offsets();

    auto build_person = [&](Vec2 center, std::array<Vec2, trajkit::kPoseJointCount>* truth_out) {
        trajkit::PersonDetection person;
        for (int j = 0; j < trajkit::kPoseJointCount; ++j) {
            Vec2 p;
            if (j >= 2 && j < 2 + trajkit::kTrajectoryJointCount) {
                p = center + offsets[j - 2];
            } else if (j == trajkit::kNose) {
                p = center + Vec2{0.0, -110.0};
            } else if (j == trajkit::kNeck) {
                p = center + Vec2{0.0, -90.0};
            } else {
                p = center + Vec2{(j % 2 == 0 ? 6.0 : -6.0), -115.0};
            }
            p.x += gauss(rng);
            p.y += gauss(rng);
            if (truth_out) (*truth_out)[j] = p;
            person.joints[j] = {p.x, p.y, uni(rng) >= script.dropout[j]};
        }
        return person;
    };

    for (int t = 0; t < script.frame_count; ++t) {
        std::vector<trajkit::PersonDetection> people;
        Vec2 target_center = script.target_start + Vec2{script.target_speed_px * t, 0.0};
        std::array<Vec2, trajkit::kPoseJointCount> truth;
        trajkit::PersonDetection target = build_person(target_center, &truth);
        if (script.bystander) {
            Vec2 other = script.target_start + Vec2{180.0, 10.0} + Vec2{0.3 * t, 0.0};
            people.push_back(build_person(other, nullptr));
        }
        people.push_back(target);  // order varies in real output; keep target last
        scene.frames.push_back(std::move(people));
        scene.target_truth.push_back(truth);
    }
    return scene;
}

}  // namespace gamerecon::synthgen
