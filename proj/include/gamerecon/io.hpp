#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamerecon/ballistics.hpp"
#include "gamerecon/batglove.hpp"
#include "gamerecon/events.hpp"
#include "gamerecon/fmoc.hpp"
#include "gamerecon/gbcv.hpp"
#include "gamerecon/mccnn.hpp"
#include "gamerecon/trajkit.hpp"

namespace gamerecon::io {

// ---- pose detections ----
// One JSON record per line: {"frame": int, "people": [{"joints":
// [[x, y, present], x18]}]}. Returned frames are dense from 0 to the highest
// frame index; absent frames have no people.
std::vector<std::vector<trajkit::PersonDetection>> read_pose_jsonl(const std::string& path);
void write_pose_jsonl(const std::string& path,
                      const std::vector<std::vector<trajkit::PersonDetection>>& frames);

// ---- joint trajectories ----
// {"fps": .., "joints": [12 names], "coords": T x 12 x ([x, y] or null)}
trajkit::JointTrajectories read_trajectories_json(const std::string& path);
void write_trajectories_json(const std::string& path, const trajkit::JointTrajectories& traj);

// ---- grayscale frames ----
// Either a directory of numbered 8-bit PGM files or a raw stream with a
// 16-byte header (magic "FMOS", width, height, frame count; little-endian
// 32-bit each).
std::vector<fmoc::GrayFrame> read_frames(const std::string& path);
void write_pgm(const std::string& path, const fmoc::GrayFrame& frame);
void write_pgm_dir(const std::string& dir, const std::vector<fmoc::GrayFrame>& frames);
void write_raw_stream(const std::string& path, const std::vector<fmoc::GrayFrame>& frames);

// ---- motion candidates ----
// JSON lines: {"frame": t, "candidates": [{x0,y0,x1,y1,cx,cy,area}]}
std::vector<fmoc::FrameCandidates> read_candidates_jsonl(const std::string& path);
void write_candidates_jsonl(const std::string& path,
                            const std::vector<fmoc::FrameCandidates>& stream);

// ---- ball tracks ----
struct TrackFile {
    gbcv::BallTrack2D track;
    std::optional<int> release_frame;
    std::optional<double> speed_mph;
    std::vector<Vec3> points_3d;
};
TrackFile read_track_json(const std::string& path);
void write_track_json(const std::string& path, const TrackFile& track);

// ---- event timeline ----
events::EventTimeline read_timeline_json(const std::string& path);
void write_timeline_json(const std::string& path, const events::EventTimeline& timeline);

// ---- detector boxes ----
// JSON lines: {"frame": t, "class": "bat"|"glove", x0,y0,x1,y1, "score": s}
std::vector<batglove::DetectorBox> read_detections_jsonl(const std::string& path);
void write_detections_jsonl(const std::string& path,
                            const std::vector<batglove::DetectorBox>& boxes);

// ---- bat track ----
void write_bat_track_json(const std::string& path, const batglove::BatTrack& track);
batglove::BatTrack read_bat_track_json(const std::string& path);

// ---- classification dataset (binary, little-endian) ----
// header: magic "GRDS", version, n_samples, n_channels, T, n_classes,
// catalog string; then per sample channels as f64 plus a u32 label.
void write_dataset(const std::string& path, const mccnn::Dataset& data);
mccnn::Dataset read_dataset(const std::string& path);

// ---- model checkpoint (binary, little-endian) ----
// magic "GRMC", version, net dimensions, per-channel normalization stats,
// parameter tensors in declaration order.
void write_checkpoint(const std::string& path, const mccnn::MccnnNet& net);
mccnn::MccnnNet read_checkpoint(const std::string& path);

}  // namespace gamerecon::io
