#pragma once

#include <optional>
#include <vector>

#include "gamerecon/fmoc.hpp"
#include "gamerecon/trajkit.hpp"

namespace gamerecon::events {

using fmoc::FrameCandidates;
using trajkit::JointTrajectories;

struct EventTimeline {
    std::optional<int> first_movement;          // raw detection n
    std::optional<int> first_movement_refined;  // leg-apex refinement h
    std::optional<int> release;                 // r
    std::optional<int> leg_raise;               // l
    std::optional<int> foot_down;               // g
    bool foot_down_low_confidence = false;      // argmin landed on the window edge
    std::optional<int> first_step;              // s
    double fps = 30.0;
};

struct FirstMoveConfig {
    double closeness_factor = 1.0;  // b: radius as a fraction of the ankle-knee span
    int min_length = 5;             // qualifying frames required in a sequence
    int max_apart = 10;             // max span from first to last qualifying frame
    int refine_halfwidth = 5;       // p: frames searched around n for the leg apex
    int k = 3;                      // FMO-C stride used for the candidate stream
};

struct FirstStepConfig {
    int window_start_offset = 10;   // window is [r+10, r+50]
    int window_length = 40;
    double percentile = 97.5;       // initial threshold percentile of |dx|
    double lowering_factor = 0.8;
    double floor_px = 1.0;          // displacements below this are noise
    int sustain_frames = 5;         // motion must persist to qualify
};

// Mean y of both ankles and knees at frame t ("leg height"; smaller y means
// a higher leg since y runs downward).
double mean_leg_y(const JointTrajectories& joints, int t);

// Earliest frame starting a run of at least min_length qualifying frames
// whose first-to-last span stays under max_apart. A frame qualifies when a
// motion candidate lies within b/2 * (|ankle-knee| left + right) of any
// ankle or knee. Isolated qualifying frames are ignored.
std::optional<int> detect_pitcher_first_move(const std::vector<FrameCandidates>& candidates,
                                             const JointTrajectories& pitcher,
                                             const FirstMoveConfig& config);

// Refinement: the frame with the highest leg (argmin of mean leg y) within
// [n-p, n+p], clipped to the video; ties resolve to the earliest frame.
int refine_first_move(int n, const JointTrajectories& pitcher, int halfwidth);

// First frame in [r+10, r+50] with a sustained per-frame x-displacement of
// the mean of hips and ankles above a threshold. The threshold starts at the
// window's 97.5th displacement percentile and is lowered geometrically until
// a frame qualifies; it never drops below an absolute noise floor.
std::optional<int> detect_batter_first_step(const JointTrajectories& batter, int release,
                                            const FirstStepConfig& config);

// argmin of mean leg y over [r-20, s-10]; earliest frame on ties. Throws
// Error(invalid_window) when the window is empty.
int detect_leg_raise(const JointTrajectories& batter, int release, int first_step);

struct FootDownResult {
    int frame = 0;
    bool low_confidence = false;  // argmin landed on the search-range edge
};

// Baseline leg height m = mean over frames [0, l-10]; returns the frame in
// [l, l+search_range] whose leg height is closest to m. Throws
// Error(insufficient_baseline) when l < 11.
FootDownResult detect_foot_down(const JointTrajectories& batter, int leg_raise,
                                int search_range);

}  // namespace gamerecon::events
