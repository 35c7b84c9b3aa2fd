#include "gamerecon/gbcv.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gamerecon/error.hpp"

namespace gamerecon::gbcv {

CandidateGraph build_candidate_graph(const std::vector<FrameCandidates>& stream,
                                     double theta_dist) {
    CandidateGraph graph;
    for (const auto& fc : stream) {
        CandidateGraph::Layer layer;
        layer.frame = fc.frame;
        layer.nodes = fc.candidates;
        graph.layers.push_back(std::move(layer));
    }
    if (!graph.layers.empty()) graph.edges.resize(graph.layers.size() - 1);
    for (size_t l = 0; l + 1 < graph.layers.size(); ++l) {
        const auto& cur = graph.layers[l];
        const auto& next = graph.layers[l + 1];
        graph.edges[l].assign(cur.nodes.size(), {});
        if (next.frame != cur.frame + 1) continue;  // layers must be adjacent frames
        for (size_t i = 0; i < cur.nodes.size(); ++i) {
            for (size_t j = 0; j < next.nodes.size(); ++j) {
                if (norm(next.nodes[j].centroid - cur.nodes[i].centroid) > theta_dist)
                    graph.edges[l][i].push_back(static_cast<int>(j));
            }
        }
    }
    return graph;
}

Vec2 step_slope(const Vec2& a, const Vec2& b) { return normalized(b - a); }

double slope_similarity(const Vec2& s1, const Vec2& s2) {
    if ((s1.x == 0.0 && s1.y == 0.0) || (s2.x == 0.0 && s2.y == 0.0)) return 0.0;
    return 1.0 - 0.5 * norm(s1 - s2);
}

double distance_similarity(double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) return 0.0;
    return std::min(d1 / d2, d2 / d1);
}

double area_similarity(double a1, double a2) {
    if (a1 <= 0.0 || a2 <= 0.0) return 0.0;
    return std::min(a1 / a2, a2 / a1);
}

namespace {

double combine_confidence(const Vec2& slope1, const Vec2& slope2, double d1, double d2,
                          double area1, double area2, double area3,
                          const GbcvConfig& config) {
    double c = config.slope_weight * slope_similarity(slope1, slope2) +
               config.distance_weight * distance_similarity(d1, d2);
    if (config.area_weight > 0.0) {
        double s = std::min(area_similarity(area1, area2), area_similarity(area2, area3));
        c += config.area_weight * s;
    }
    return c;
}

}  // namespace

double triple_confidence(const Vec2& a, const Vec2& b, const Vec2& c, const GbcvConfig& config) {
    return combine_confidence(step_slope(a, b), step_slope(b, c), norm(b - a), norm(c - b),
                              1.0, 1.0, 1.0, config);
}

double triple_confidence(const MotionCandidate& a, const MotionCandidate& b,
                         const MotionCandidate& c, const GbcvConfig& config) {
    return combine_confidence(step_slope(a.centroid, b.centroid),
                              step_slope(b.centroid, c.centroid),
                              norm(b.centroid - a.centroid), norm(c.centroid - b.centroid),
                              a.area, b.area, c.area, config);
}

double BallTrack2D::mean_confidence() const {
    if (confidences.empty()) return 0.0;
    double s = 0.0;
    for (double c : confidences) s += c;
    return s / confidences.size();
}

double BallTrack2D::mean_step() const {
    double s = 0.0;
    int n = 0;
    for (size_t i = 1; i < points.size(); ++i) {
        int df = points[i].frame - points[i - 1].frame;
        if (df <= 0) continue;
        s += norm(points[i].pos - points[i - 1].pos) / df;
        ++n;
    }
    return n > 0 ? s / n : 0.0;
}

Vec2 BallTrack2D::mean_slope() const {
    Vec2 s{0.0, 0.0};
    for (size_t i = 1; i < points.size(); ++i)
        s = s + step_slope(points[i - 1].pos, points[i].pos);
    return normalized(s);
}

double BallTrack2D::mean_area() const {
    double s = 0.0;
    int n = 0;
    for (const auto& p : points) {
        if (p.inferred) continue;
        s += p.area;
        ++n;
    }
    return n > 0 ? s / n : 0.0;
}

TrackBuilder::TrackBuilder(const GbcvConfig& config) : config_(config) {}

void TrackBuilder::close(PathState&& state) {
    if (static_cast<int>(state.points.size()) < config_.min_track_len) return;
    BallTrack2D track;
    track.points = std::move(state.points);
    track.confidences = std::move(state.confidences);
    closed_.push_back(std::move(track));
}

void TrackBuilder::push(const FrameCandidates& frame) {
    const bool adjacent = (last_frame_ >= 0 && frame.frame == last_frame_ + 1);

    // Best state per (previous node, current node) pair; extensions only
    // depend on the last two nodes, so keeping the best-ranked path per pair
    // loses nothing.
    std::map<std::pair<int, int>, PathState> next_states;
    auto offer = [&](int prev_idx, int cur_idx, PathState&& st) {
        auto key = std::make_pair(prev_idx, cur_idx);
        auto it = next_states.find(key);
        if (it == next_states.end()) {
            next_states.emplace(key, std::move(st));
            return;
        }
        PathState& have = it->second;
        auto rank = [](const PathState& s) {
            return std::make_tuple(s.points.size(), s.conf_sum);
        };
        if (rank(st) > rank(have)) have = std::move(st);
    };

    std::vector<bool> extended(active_.size(), false);
    if (adjacent) {
        for (size_t si = 0; si < active_.size(); ++si) {
            const PathState& st = active_[si];
            const TrackPoint& tail = st.points.back();
            const TrackPoint& before = st.points[st.points.size() - 2];
            for (size_t j = 0; j < frame.candidates.size(); ++j) {
                const MotionCandidate& cand = frame.candidates[j];
                if (norm(cand.centroid - tail.pos) <= config_.theta_dist) continue;
                double conf = combine_confidence(
                    step_slope(before.pos, tail.pos), step_slope(tail.pos, cand.centroid),
                    norm(tail.pos - before.pos), norm(cand.centroid - tail.pos),
                    before.area, tail.area, cand.area, config_);
                if (conf < config_.theta_confidence) continue;
                PathState ext = st;
                ext.points.push_back({frame.frame, cand.centroid, false,
                                      static_cast<double>(cand.area)});
                ext.confidences.push_back(conf);
                ext.conf_sum += conf;
                ext.tail_index = static_cast<int>(j);
                extended[si] = true;
                offer(st.tail_index, static_cast<int>(j), std::move(ext));
            }
        }
        // Fresh two-node seeds. A seed sharing its two nodes with an
        // extension dedupes against it and loses (shorter path).
        for (size_t i = 0; i < last_candidates_.size(); ++i) {
            for (size_t j = 0; j < frame.candidates.size(); ++j) {
                if (norm(frame.candidates[j].centroid - last_candidates_[i].centroid) <=
                    config_.theta_dist)
                    continue;
                PathState seed;
                seed.points.push_back({last_frame_, last_candidates_[i].centroid, false,
                                       static_cast<double>(last_candidates_[i].area)});
                seed.points.push_back({frame.frame, frame.candidates[j].centroid, false,
                                       static_cast<double>(frame.candidates[j].area)});
                seed.first_layer_index = static_cast<int>(i);
                seed.tail_index = static_cast<int>(j);
                offer(static_cast<int>(i), static_cast<int>(j), std::move(seed));
            }
        }
    }

    for (size_t si = 0; si < active_.size(); ++si)
        if (!extended[si]) close(std::move(active_[si]));

    active_.clear();
    for (auto& [key, st] : next_states) active_.push_back(std::move(st));
    last_frame_ = frame.frame;
    last_candidates_ = frame.candidates;
}

std::vector<BallTrack2D> TrackBuilder::finish() {
    for (auto& st : active_) close(std::move(st));
    active_.clear();

    std::stable_sort(closed_.begin(), closed_.end(),
                     [](const BallTrack2D& a, const BallTrack2D& b) {
                         if (a.length() != b.length()) return a.length() > b.length();
                         double ca = a.mean_confidence(), cb = b.mean_confidence();
                         if (ca != cb) return ca > cb;
                         return a.first_frame() < b.first_frame();
                     });

    // Drop tracks that are contiguous subsequences of a better-ranked one.
    std::vector<BallTrack2D> out;
    for (auto& t : closed_) {
        bool contained = false;
        for (const auto& kept : out) {
            if (t.first_frame() < kept.first_frame() || t.last_frame() > kept.last_frame())
                continue;
            bool all = true;
            for (const auto& p : t.points) {
                bool found = false;
                for (const auto& q : kept.points)
                    if (q.frame == p.frame && q.pos == p.pos) {
                        found = true;
                        break;
                    }
                if (!found) {
                    all = false;
                    break;
                }
            }
            if (all) {
                contained = true;
                break;
            }
        }
        if (!contained) out.push_back(std::move(t));
    }
    closed_.clear();
    return out;
}

std::vector<BallTrack2D> detect_ball_tracks(const std::vector<FrameCandidates>& stream,
                                            const GbcvConfig& config) {
    TrackBuilder builder(config);
    for (const auto& fc : stream) builder.push(fc);
    return builder.finish();
}

std::vector<BallTrack2D> detect_ball_tracks(const CandidateGraph& graph,
                                            const GbcvConfig& config) {
    std::vector<FrameCandidates> stream;
    for (const auto& layer : graph.layers) stream.push_back({layer.frame, layer.nodes});
    return detect_ball_tracks(stream, config);
}

std::optional<BallTrack2D> merge_tracks(const BallTrack2D& earlier, const BallTrack2D& later,
                                        const GbcvConfig& config) {
    if (earlier.points.empty() || later.points.empty())
        throw Error(ErrorCode::invalid_merge, "cannot merge an empty track");
    if (later.first_frame() <= earlier.last_frame())
        throw Error(ErrorCode::invalid_merge, "track frame ranges overlap");

    const int frame_delta = later.first_frame() - earlier.last_frame();
    const int gap = frame_delta - 1;
    if (gap > config.gap_merge_max) return std::nullopt;

    const Vec2 bridge = later.points.front().pos - earlier.points.back().pos;
    const double bridge_step = norm(bridge) / frame_delta;
    const Vec2 bridge_slope = normalized(bridge);

    double c_in = combine_confidence(earlier.mean_slope(), bridge_slope, earlier.mean_step(),
                                     bridge_step, earlier.mean_area(), earlier.mean_area(),
                                     later.mean_area(), config);
    double c_out = combine_confidence(bridge_slope, later.mean_slope(), bridge_step,
                                      later.mean_step(), earlier.mean_area(), later.mean_area(),
                                      later.mean_area(), config);
    if (std::min(c_in, c_out) < config.theta_confidence) return std::nullopt;

    BallTrack2D merged;
    merged.points = earlier.points;
    for (int g = 1; g <= gap; ++g) {
        double t = static_cast<double>(g) / frame_delta;
        TrackPoint p;
        p.frame = earlier.last_frame() + g;
        p.pos = earlier.points.back().pos + bridge * t;
        p.inferred = true;
        p.area = 0.0;
        merged.points.push_back(p);
    }
    merged.points.insert(merged.points.end(), later.points.begin(), later.points.end());

    merged.confidences.clear();
    for (size_t i = 2; i < merged.points.size(); ++i)
        merged.confidences.push_back(triple_confidence(merged.points[i - 2].pos,
                                                       merged.points[i - 1].pos,
                                                       merged.points[i].pos, config));
    return merged;
}

std::vector<BallTrack2D> merge_all(std::vector<BallTrack2D> tracks, const GbcvConfig& config) {
    std::stable_sort(tracks.begin(), tracks.end(),
                     [](const BallTrack2D& a, const BallTrack2D& b) {
                         return a.first_frame() < b.first_frame();
                     });
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < tracks.size() && !changed; ++i) {
            for (size_t j = i + 1; j < tracks.size() && !changed; ++j) {
                if (tracks[j].first_frame() <= tracks[i].last_frame()) continue;
                auto merged = merge_tracks(tracks[i], tracks[j], config);
                if (merged) {
                    tracks[i] = std::move(*merged);
                    tracks.erase(tracks.begin() + j);
                    changed = true;
                }
            }
        }
    }
    return tracks;
}

int estimate_release_frame(const BallTrack2D& track, const Vec2& release_point) {
    if (track.points.size() < 2)
        throw Error(ErrorCode::degenerate_track, "track too short to extrapolate");
    double step = track.mean_step();
    if (step <= 0.0)
        throw Error(ErrorCode::degenerate_track, "track has zero mean step");
    double dist = norm(track.points.front().pos - release_point);
    int back = static_cast<int>(std::lround(dist / step));
    int release = track.first_frame() - back;
    return std::min(release, track.first_frame());
}

}  // namespace gamerecon::gbcv
