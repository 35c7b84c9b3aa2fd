#include "gamerecon/batglove.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gamerecon/error.hpp"

namespace gamerecon::batglove {

int BatTrack::coverage() const {
    int n = 0;
    for (const auto& f : frames)
        if (f.source != BatSource::missing) ++n;
    return n;
}

BatTrack fuse_bat_track(const std::vector<DetectorBox>& detector_boxes,
                        const std::vector<FrameCandidates>& fmo_candidates,
                        int frame_count, const BatFusionConfig& config) {
    std::map<int, const DetectorBox*> detections;
    for (const auto& box : detector_boxes) {
        if (box.object != ObjectClass::bat) continue;
        auto it = detections.find(box.frame);
        if (it == detections.end() || box.score > it->second->score)
            detections[box.frame] = &box;
    }
    if (detections.empty())
        throw Error(ErrorCode::no_seed, "no detector box to seed the bat track");

    std::map<int, const FrameCandidates*> candidates;
    for (const auto& fc : fmo_candidates) candidates[fc.frame] = &fc;

    BatTrack track;
    track.first_frame = 0;
    track.frames.resize(frame_count);

    std::optional<Roi> prev_box;
    for (int t = 0; t < frame_count; ++t) {
        BatFrame& out = track.frames[t];
        auto det = detections.find(t);
        if (det != detections.end()) {
            out.source = BatSource::detector;  // detector wins over FMO
            out.aabb = det->second->aabb;
            prev_box = out.aabb;
            continue;
        }
        if (!prev_box) continue;  // not seeded yet
        auto fc = candidates.find(t);
        if (fc == candidates.end()) continue;

        double max_dist = config.max_dist_factor * prev_box->diagonal();
        Vec2 prev_center = prev_box->center();
        const fmoc::MotionCandidate* best = nullptr;
        double best_dist = max_dist;
        for (const auto& cand : fc->second->candidates) {
            double d = norm(cand.centroid - prev_center);
            if (d < best_dist) {
                best_dist = d;
                best = &cand;
            }
        }
        if (best) {
            out.source = BatSource::fmo;
            out.aabb = best->aabb();
            prev_box = out.aabb;
        }
    }
    return track;
}

TipBase assign_tip_base(const Roi& aabb, const Vec2& wrist) {
    const Vec2 corners[4] = {aabb.p1,
                             {aabb.p2.x, aabb.p1.y},
                             {aabb.p1.x, aabb.p2.y},
                             aabb.p2};
    const Vec2 opposite[4] = {aabb.p2,
                              {aabb.p1.x, aabb.p2.y},
                              {aabb.p2.x, aabb.p1.y},
                              aabb.p1};
    int best = 0;
    double best_d = norm(corners[0] - wrist);
    for (int i = 1; i < 4; ++i) {
        double d = norm(corners[i] - wrist);
        // Ties go to the lower corner; the batter's hands are below the bat.
        if (d < best_d - 1e-12 ||
            (std::abs(d - best_d) <= 1e-12 && corners[i].y > corners[best].y)) {
            best_d = d;
            best = i;
        }
    }
    return {opposite[best], corners[best]};
}

void assign_track_tips(BatTrack& track, const std::vector<Vec2>& wrist_per_frame) {
    for (size_t t = 0; t < track.frames.size(); ++t) {
        BatFrame& f = track.frames[t];
        if (f.source == BatSource::missing) continue;
        size_t frame = track.first_frame + t;
        if (frame >= wrist_per_frame.size()) continue;
        const Vec2& wrist = wrist_per_frame[frame];
        if (std::isnan(wrist.x) || std::isnan(wrist.y)) continue;  // unassigned
        TipBase tb = assign_tip_base(f.aabb, wrist);
        f.tip = tb.tip;
        f.base = tb.base;
    }
}

std::vector<Roi> interpolate_glove(const std::vector<DetectorBox>& glove_boxes,
                                   int frame_count) {
    std::map<int, Roi> detections;
    for (const auto& box : glove_boxes)
        if (box.object == ObjectClass::glove) detections[box.frame] = box.aabb;
    if (detections.size() < 2)
        throw Error(ErrorCode::insufficient_detections,
                    "glove interpolation needs at least two detections");

    std::vector<Roi> out(frame_count);
    auto lerp = [](const Roi& a, const Roi& b, double t) {
        return Roi{a.p1 + (b.p1 - a.p1) * t, a.p2 + (b.p2 - a.p2) * t};
    };

    for (int t = 0; t < frame_count; ++t) {
        auto next = detections.lower_bound(t);
        if (next == detections.end()) {
            out[t] = std::prev(detections.end())->second;
        } else if (next->first == t || next == detections.begin()) {
            out[t] = next->second;
        } else {
            auto prev = std::prev(next);
            double alpha = static_cast<double>(t - prev->first) / (next->first - prev->first);
            out[t] = lerp(prev->second, next->second, alpha);
        }
    }
    return out;
}

}  // namespace gamerecon::batglove
