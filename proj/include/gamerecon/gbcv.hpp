#pragma once

#include <optional>
#include <vector>

#include "gamerecon/fmoc.hpp"
#include "gamerecon/geometry.hpp"

namespace gamerecon::gbcv {

using fmoc::FrameCandidates;
using fmoc::MotionCandidate;

struct GbcvConfig {
    double theta_dist = 10.0;       // minimum centroid step in pixels
    double slope_weight = 0.5;      // a1
    double distance_weight = 0.5;   // a2
    double area_weight = 0.0;       // optional extra term, off by default
    double theta_confidence = 0.8;
    int min_track_len = 5;
    int gap_merge_max = 5;
};

// Per-frame layered DAG over motion candidates. Edges connect nodes of
// consecutive frames whose centroids are more than theta_dist apart (the
// ball never moves slower than that).
struct CandidateGraph {
    struct Layer {
        int frame = 0;
        std::vector<MotionCandidate> nodes;
    };
    std::vector<Layer> layers;
    // edges[l][i]: indices into layers[l+1].nodes reachable from node i of
    // layer l. Empty when the next layer is not the next frame.
    std::vector<std::vector<std::vector<int>>> edges;
};

CandidateGraph build_candidate_graph(const std::vector<FrameCandidates>& stream,
                                     double theta_dist);

// Direction of the displacement from a to b as a unit vector. The direction
// matters: a zig-zag back along the same line must not look like the ball.
Vec2 step_slope(const Vec2& a, const Vec2& b);

// 1 for equal directions, 0 for opposite ones. Zero vectors score 0.
double slope_similarity(const Vec2& s1, const Vec2& s2);

// min(d1/d2, d2/d1): symmetric, scale-invariant, 1 iff equal. Nonpositive
// inputs score 0.
double distance_similarity(double d1, double d2);

double area_similarity(double a1, double a2);

// Confidence of a path triple a -> b -> c: the weighted combination of slope
// and distance similarity (plus the optional area term).
double triple_confidence(const Vec2& a, const Vec2& b, const Vec2& c, const GbcvConfig& config);
double triple_confidence(const MotionCandidate& a, const MotionCandidate& b,
                         const MotionCandidate& c, const GbcvConfig& config);

struct TrackPoint {
    int frame = 0;
    Vec2 pos;
    bool inferred = false;  // gap-bridged, not observed
    double area = 0.0;
};

struct BallTrack2D {
    std::vector<TrackPoint> points;
    std::vector<double> confidences;  // one per interior triple

    int first_frame() const { return points.front().frame; }
    int last_frame() const { return points.back().frame; }
    int length() const { return static_cast<int>(points.size()); }
    double mean_confidence() const;
    // Mean per-frame step distance over consecutive points.
    double mean_step() const;
    // Renormalized mean of the unit step directions.
    Vec2 mean_slope() const;
    double mean_area() const;
};

// Online track builder: greedy frame-by-frame extension, confidence-gated.
// Tracks are closed as soon as they can no longer be extended.
class TrackBuilder {
public:
    explicit TrackBuilder(const GbcvConfig& config);

    void push(const FrameCandidates& frame);
    // Closes all open tracks and returns the ranked result: longest first,
    // then highest mean confidence, then earliest start, then lowest layer
    // index of the first node.
    std::vector<BallTrack2D> finish();

private:
    struct PathState {
        std::vector<TrackPoint> points;
        std::vector<double> confidences;
        double conf_sum = 0.0;
        int first_layer_index = 0;
        int tail_index = 0;  // index of the last point within its frame layer
    };

    void close(PathState&& state);

    GbcvConfig config_;
    int last_frame_ = -1;
    std::vector<MotionCandidate> last_candidates_;
    std::vector<PathState> active_;  // states keyed by their last two nodes
    std::vector<BallTrack2D> closed_;
};

std::vector<BallTrack2D> detect_ball_tracks(const CandidateGraph& graph,
                                            const GbcvConfig& config);
std::vector<BallTrack2D> detect_ball_tracks(const std::vector<FrameCandidates>& stream,
                                            const GbcvConfig& config);

// Bridges two tracks across a detection gap when the average slope and step
// of each side agree with the bridging segment. Gap frames get interpolated
// points flagged as inferred. Returns nullopt when the pieces do not fit;
// throws Error(invalid_merge) when the frame ranges overlap.
std::optional<BallTrack2D> merge_tracks(const BallTrack2D& earlier, const BallTrack2D& later,
                                        const GbcvConfig& config);

// Greedily merges a ranked track list until no pair can be joined.
std::vector<BallTrack2D> merge_all(std::vector<BallTrack2D> tracks, const GbcvConfig& config);

// Back-extrapolates from the first detection to the configured release
// point: release = first frame - round(distance / mean step). Throws
// Error(degenerate_track) when the track does not move.
int estimate_release_frame(const BallTrack2D& track, const Vec2& release_point);

}  // namespace gamerecon::gbcv
