#include "gamerecon/events.hpp"

#include <algorithm>
#include <cmath>

#include "gamerecon/error.hpp"

namespace gamerecon::events {

using trajkit::TrajJoint;

double mean_leg_y(const JointTrajectories& joints, int t) {
    const auto& c = joints.coords[t];
    return (c[TrajJoint::kTrajRAnkle].y + c[TrajJoint::kTrajLAnkle].y +
            c[TrajJoint::kTrajRKnee].y + c[TrajJoint::kTrajLKnee].y) /
           4.0;
}

namespace {

double closeness_radius(const JointTrajectories& joints, int t, double factor) {
    const auto& c = joints.coords[t];
    double span = norm(c[TrajJoint::kTrajLAnkle] - c[TrajJoint::kTrajLKnee]) +
                  norm(c[TrajJoint::kTrajRAnkle] - c[TrajJoint::kTrajRKnee]);
    return 0.5 * factor * span;
}

bool frame_qualifies(const FrameCandidates& fc, const JointTrajectories& joints,
                     double factor) {
    if (fc.frame < 0 || fc.frame >= joints.frame_count()) return false;
    const auto& c = joints.coords[fc.frame];
    const Vec2 legs[4] = {c[TrajJoint::kTrajRAnkle], c[TrajJoint::kTrajLAnkle],
                          c[TrajJoint::kTrajRKnee], c[TrajJoint::kTrajLKnee]};
    double radius = closeness_radius(joints, fc.frame, factor);
    for (const auto& cand : fc.candidates)
        for (const auto& leg : legs)
            if (norm(leg - cand.centroid) < radius) return true;
    return false;
}

}  // namespace

std::optional<int> detect_pitcher_first_move(const std::vector<FrameCandidates>& candidates,
                                             const JointTrajectories& pitcher,
                                             const FirstMoveConfig& config) {
    std::vector<int> qualifying;
    for (const auto& fc : candidates)
        if (frame_qualifies(fc, pitcher, config.closeness_factor))
            qualifying.push_back(fc.frame);
    std::sort(qualifying.begin(), qualifying.end());

    // Earliest start whose window [start, start + max_apart) holds enough
    // qualifying frames. An isolated spike cannot anchor the sequence: the
    // start frame needs a companion qualifying frame within two frames.
    for (size_t i = 0; i < qualifying.size(); ++i) {
        int start = qualifying[i];
        bool companion = (i + 1 < qualifying.size() && qualifying[i + 1] - start <= 2) ||
                         (i > 0 && start - qualifying[i - 1] <= 2);
        if (!companion) continue;
        int count = 0;
        for (size_t j = i; j < qualifying.size(); ++j) {
            if (qualifying[j] - start >= config.max_apart) break;
            ++count;
        }
        if (count >= config.min_length) return start;
    }
    return std::nullopt;
}

int refine_first_move(int n, const JointTrajectories& pitcher, int halfwidth) {
    int lo = std::max(0, n - halfwidth);
    int hi = std::min(pitcher.frame_count() - 1, n + halfwidth);
    int best = lo;
    double best_y = mean_leg_y(pitcher, lo);
    for (int t = lo + 1; t <= hi; ++t) {
        double y = mean_leg_y(pitcher, t);
        if (y < best_y) {
            best_y = y;
            best = t;
        }
    }
    return best;
}

namespace {

double mean_hip_ankle_x(const JointTrajectories& joints, int t) {
    const auto& c = joints.coords[t];
    return (c[TrajJoint::kTrajRHip].x + c[TrajJoint::kTrajLHip].x +
            c[TrajJoint::kTrajRAnkle].x + c[TrajJoint::kTrajLAnkle].x) /
           4.0;
}

double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    if (values.empty()) return 0.0;
    double rank = p / 100.0 * (values.size() - 1);
    size_t lo = static_cast<size_t>(rank);
    size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = rank - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

std::optional<int> detect_batter_first_step(const JointTrajectories& batter, int release,
                                            const FirstStepConfig& config) {
    const int T = batter.frame_count();
    int w0 = release + config.window_start_offset;
    int w1 = w0 + config.window_length;
    w0 = std::clamp(w0, 1, T - 1);
    w1 = std::clamp(w1, w0, T - 1);
    if (w1 <= w0) return std::nullopt;

    std::vector<double> disp(w1 - w0 + 1);
    for (int t = w0; t <= w1; ++t)
        disp[t - w0] = std::abs(mean_hip_ankle_x(batter, t) - mean_hip_ankle_x(batter, t - 1));

    double thr = percentile(disp, config.percentile);
    // A frame qualifies when the motion persists: the median displacement
    // over the next few frames must also clear the threshold, so a lone
    // noise spike cannot pass.
    auto qualifying = [&](double threshold) -> std::optional<int> {
        for (int t = w0; t <= w1; ++t) {
            if (disp[t - w0] <= threshold) continue;
            std::vector<double> window;
            for (int u = t; u <= std::min(w1, t + config.sustain_frames - 1); ++u)
                window.push_back(disp[u - w0]);
            if (percentile(window, 50.0) > threshold) return t;
        }
        return std::nullopt;
    };

    while (thr >= config.floor_px) {
        if (auto frame = qualifying(thr)) return frame;
        thr *= config.lowering_factor;
    }
    return std::nullopt;
}

int detect_leg_raise(const JointTrajectories& batter, int release, int first_step) {
    int lo = std::max(0, release - 20);
    int hi = std::min(batter.frame_count() - 1, first_step - 10);
    if (hi < lo)
        throw Error(ErrorCode::invalid_window, "leg-raise window [r-20, s-10] is empty");
    int best = lo;
    double best_y = mean_leg_y(batter, lo);
    for (int t = lo + 1; t <= hi; ++t) {
        double y = mean_leg_y(batter, t);
        if (y < best_y) {
            best_y = y;
            best = t;
        }
    }
    return best;
}

FootDownResult detect_foot_down(const JointTrajectories& batter, int leg_raise,
                                int search_range) {
    if (leg_raise < 11)
        throw Error(ErrorCode::insufficient_baseline,
                    "need at least 11 frames before the leg raise for a baseline");
    double baseline = 0.0;
    for (int t = 0; t <= leg_raise - 10; ++t) baseline += mean_leg_y(batter, t);
    baseline /= (leg_raise - 10 + 1);

    int hi = std::min(batter.frame_count() - 1, leg_raise + search_range);
    int best = leg_raise;
    double best_d = std::abs(mean_leg_y(batter, leg_raise) - baseline);
    for (int t = leg_raise + 1; t <= hi; ++t) {
        double d = std::abs(mean_leg_y(batter, t) - baseline);
        if (d < best_d) {
            best_d = d;
            best = t;
        }
    }
    return {best, best == hi && hi > leg_raise};
}

}  // namespace gamerecon::events
