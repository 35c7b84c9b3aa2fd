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
#include "gamerecon/synthgen.hpp"
#include "gamerecon/trajkit.hpp"

namespace gamerecon::pipeline {

struct EventsConfig {
    events::FirstMoveConfig first_move;
    events::FirstStepConfig first_step;
    int foot_down_search_range = 15;
};

struct TrainHarnessConfig {
    mccnn::TrainConfig train;
    int folds = 0;  // >= 2 runs k-fold cross-validation before the final fit
};

struct SynthSceneConfig {
    int width = 480;
    int height = 270;
    int frame_count = 60;
    int release_frame = 12;
    double speed_mph = 90.0;
    double noise_amplitude = 8.0;
    bool decoy = true;
    double jitter_amplitude_px = 1.0;
};

struct SynthPlayConfig {
    int frame_count = 165;
    int release_frame = 93;
    int first_move_apex = 44;
    int first_step_frame = 123;
};

struct SynthDatasetConfig {
    int classes = 3;
    int per_class = 40;
    int length = 32;
    double noise_px = 1.0;
    std::string dropout = "none";  // "none" or "paper"
};

struct SynthConfig {
    SynthSceneConfig scene;
    SynthPlayConfig play;
    SynthDatasetConfig dataset;
};

// Every tunable of every stage in one document. Unknown keys are rejected
// when loading from file.
struct PipelineConfig {
    double fps = 30.0;
    uint64_t seed = 0;

    trajkit::TrackerConfig trajkit;
    Vec2 pitcher_init{300.0, 380.0};
    Vec2 batter_init{700.0, 400.0};

    fmoc::FmocConfig fmoc;
    gbcv::GbcvConfig gbcv;
    EventsConfig events;
    batglove::BatFusionConfig batglove;
    TrainHarnessConfig mccnn;
    SynthConfig synth;

    std::optional<ballistics::CameraModel> camera;
    std::optional<ballistics::VerticalPlane> plane;
    std::optional<Vec2> release_point_px;
    std::optional<std::string> model_checkpoint;
    std::string classify_target = "batter";
};

PipelineConfig default_config();
PipelineConfig load_config(const std::string& path);

// ---- per-stage runners over files (the CLI surface) ----

void stage_track_pose(const PipelineConfig& config, const std::string& pose_jsonl,
                      const std::string& target, const std::string& out_json);

void stage_fmoc(const PipelineConfig& config, const std::string& frames_path,
                const std::string& out_jsonl);

void stage_gbcv(const PipelineConfig& config, const std::string& candidates_jsonl,
                const std::string& out_json);

void stage_events(const PipelineConfig& config, const std::string& pitcher_traj_json,
                  const std::string& batter_traj_json, const std::string& candidates_jsonl,
                  const std::string& track_json, const std::string& out_json);

void stage_speed(const PipelineConfig& config, const std::string& track_json,
                 const std::string& out_json);

void stage_bat(const PipelineConfig& config, const std::string& detections_jsonl,
               const std::string& candidates_jsonl, const std::string& batter_traj_json,
               const std::string& out_json);

void stage_train(const PipelineConfig& config, const std::string& dataset_path,
                 const std::string& model_out, const std::string& metrics_out);

void stage_eval(const PipelineConfig& config, const std::string& dataset_path,
                const std::string& model_path, const std::string& metrics_out);

void stage_synth(const PipelineConfig& config, const std::string& kind,
                 const std::string& out_dir);

// ---- whole-play run ----

struct StageReport {
    std::string name;
    std::string status;  // ok | skipped | failed
    std::string detail;
};

struct RunReport {
    std::vector<StageReport> stages;
    bool ok() const;
};

// Executes the full reconstruction over one play and writes a bundle
// directory: trajectories, candidate streams, ball track, timeline, speed
// and bat track, plus a manifest (the only file carrying a timestamp).
// Stage failures are recorded; stages whose inputs are satisfied still run.
RunReport run_pipeline(const PipelineConfig& config, const std::string& frames_path,
                       const std::string& pose_jsonl, const std::string& detections_jsonl,
                       const std::string& out_dir);

}  // namespace gamerecon::pipeline
