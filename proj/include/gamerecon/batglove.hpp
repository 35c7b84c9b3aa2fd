#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamerecon/fmoc.hpp"
#include "gamerecon/geometry.hpp"

namespace gamerecon::batglove {

using fmoc::FrameCandidates;

enum class ObjectClass { bat, glove };

struct DetectorBox {
    int frame = 0;
    ObjectClass object = ObjectClass::bat;
    Roi aabb;
    double score = 0.0;
};

enum class BatSource { detector, fmo, missing };

struct BatFrame {
    BatSource source = BatSource::missing;
    Roi aabb;
    std::optional<Vec2> tip;
    std::optional<Vec2> base;
};

struct BatTrack {
    int first_frame = 0;
    std::vector<BatFrame> frames;  // frames[t] covers first_frame + t

    int coverage() const;  // frames with a box (detector or fmo)
};

struct BatFusionConfig {
    // Adoption radius for FMO candidates, as a multiple of the previous
    // bat box diagonal.
    double max_dist_factor = 1.5;
};

// Per frame: the detector box when present, otherwise the FMO candidate
// nearest the previous bat position (centroid to centroid) if within the
// adoption radius, otherwise missing. Throws Error(no_seed) when the
// detector never saw the bat.
BatTrack fuse_bat_track(const std::vector<DetectorBox>& detector_boxes,
                        const std::vector<FrameCandidates>& fmo_candidates,
                        int frame_count, const BatFusionConfig& config);

// base = the AABB corner nearest the wrist, tip = the diagonally opposite
// corner. Equidistant corners resolve to the lower one (larger y).
struct TipBase {
    Vec2 tip;
    Vec2 base;
};
TipBase assign_tip_base(const Roi& aabb, const Vec2& wrist);

// Fills tip/base for every tracked frame from per-frame wrist coordinates
// (NaN wrist leaves the frame unassigned).
void assign_track_tips(BatTrack& track, const std::vector<Vec2>& wrist_per_frame);

// Linear interpolation of box corners across detection gaps; frames before
// the first and after the last detection hold the nearest one. Throws
// Error(insufficient_detections) with fewer than two boxes.
std::vector<Roi> interpolate_glove(const std::vector<DetectorBox>& glove_boxes,
                                   int frame_count);

}  // namespace gamerecon::batglove
