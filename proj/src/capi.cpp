#include "gamerecon.h"

#include <string>

#include "gamerecon/error.hpp"
#include "gamerecon/pipeline.hpp"

using gamerecon::Error;
using gamerecon::ErrorCode;

struct gr_context {
    gamerecon::pipeline::PipelineConfig config = gamerecon::pipeline::default_config();
    std::string last_error;
};

namespace {

gr_status status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::io_error:
            return GR_ERR_IO;
        case ErrorCode::bad_input:
        case ErrorCode::invalid_config:
        case ErrorCode::shape_mismatch:
        case ErrorCode::invalid_k:
            return GR_ERR_BAD_INPUT;
        default:
            return GR_ERR_STAGE_FAILED;
    }
}

template <typename Fn>
gr_status guarded(gr_context* ctx, Fn&& fn) {
    if (!ctx) return GR_ERR_INVALID_ARGUMENT;
    ctx->last_error.clear();
    try {
        fn();
        return GR_OK;
    } catch (const Error& e) {
        ctx->last_error = e.what();
        return status_for(e.code());
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return GR_ERR_INTERNAL;
    } catch (...) {
        ctx->last_error = "unknown error";
        return GR_ERR_INTERNAL;
    }
}

std::string arg(const char* s) { return s ? std::string(s) : std::string(); }

bool required(gr_context* ctx, const char* value, const char* name) {
    if (value && *value) return true;
    if (ctx) ctx->last_error = std::string(name) + " is required";
    return false;
}

}  // namespace

extern "C" {

const char* gr_version(void) { return "0.1.0"; }

gr_status gr_context_create(gr_context** out_ctx) {
    if (!out_ctx) return GR_ERR_INVALID_ARGUMENT;
    *out_ctx = new (std::nothrow) gr_context;
    return *out_ctx ? GR_OK : GR_ERR_INTERNAL;
}

void gr_context_destroy(gr_context* ctx) { delete ctx; }

gr_status gr_context_load_config(gr_context* ctx, const char* config_path) {
    if (!ctx || !required(ctx, config_path, "config_path")) return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] { ctx->config = gamerecon::pipeline::load_config(config_path); });
}

gr_status gr_context_set_seed(gr_context* ctx, unsigned long long seed) {
    if (!ctx) return GR_ERR_INVALID_ARGUMENT;
    ctx->config.seed = seed;
    return GR_OK;
}

const char* gr_context_last_error(const gr_context* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

gr_status gr_track_pose(gr_context* ctx, const char* pose_jsonl, const char* target,
                        const char* out_trajectories_json) {
    if (!ctx || !required(ctx, pose_jsonl, "pose_jsonl") ||
        !required(ctx, target, "target") ||
        !required(ctx, out_trajectories_json, "out_trajectories_json"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_track_pose(ctx->config, pose_jsonl, target,
                                              out_trajectories_json);
    });
}

gr_status gr_fmoc(gr_context* ctx, const char* frames_path, const char* out_candidates_jsonl) {
    if (!ctx || !required(ctx, frames_path, "frames_path") ||
        !required(ctx, out_candidates_jsonl, "out_candidates_jsonl"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_fmoc(ctx->config, frames_path, out_candidates_jsonl);
    });
}

gr_status gr_gbcv(gr_context* ctx, const char* candidates_jsonl, const char* out_track_json) {
    if (!ctx || !required(ctx, candidates_jsonl, "candidates_jsonl") ||
        !required(ctx, out_track_json, "out_track_json"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_gbcv(ctx->config, candidates_jsonl, out_track_json);
    });
}

gr_status gr_events(gr_context* ctx, const char* pitcher_trajectories_json,
                    const char* batter_trajectories_json, const char* candidates_jsonl,
                    const char* track_json, const char* out_timeline_json) {
    if (!ctx || !required(ctx, out_timeline_json, "out_timeline_json"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_events(ctx->config, arg(pitcher_trajectories_json),
                                          arg(batter_trajectories_json),
                                          arg(candidates_jsonl), arg(track_json),
                                          out_timeline_json);
    });
}

gr_status gr_speed(gr_context* ctx, const char* track_json, const char* out_json) {
    if (!ctx || !required(ctx, track_json, "track_json") ||
        !required(ctx, out_json, "out_json"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_speed(ctx->config, track_json, out_json);
    });
}

gr_status gr_bat(gr_context* ctx, const char* detections_jsonl, const char* candidates_jsonl,
                 const char* batter_trajectories_json, const char* out_bat_track_json) {
    if (!ctx || !required(ctx, detections_jsonl, "detections_jsonl") ||
        !required(ctx, candidates_jsonl, "candidates_jsonl") ||
        !required(ctx, out_bat_track_json, "out_bat_track_json"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_bat(ctx->config, detections_jsonl, candidates_jsonl,
                                       arg(batter_trajectories_json), out_bat_track_json);
    });
}

gr_status gr_train(gr_context* ctx, const char* dataset_path, const char* model_out,
                   const char* metrics_out) {
    if (!ctx || !required(ctx, dataset_path, "dataset_path") ||
        !required(ctx, model_out, "model_out") || !required(ctx, metrics_out, "metrics_out"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_train(ctx->config, dataset_path, model_out, metrics_out);
    });
}

gr_status gr_eval(gr_context* ctx, const char* dataset_path, const char* model_path,
                  const char* metrics_out) {
    if (!ctx || !required(ctx, dataset_path, "dataset_path") ||
        !required(ctx, model_path, "model_path") ||
        !required(ctx, metrics_out, "metrics_out"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_eval(ctx->config, dataset_path, model_path, metrics_out);
    });
}

gr_status gr_synth(gr_context* ctx, const char* kind, const char* out_dir) {
    if (!ctx || !required(ctx, kind, "kind") || !required(ctx, out_dir, "out_dir"))
        return GR_ERR_INVALID_ARGUMENT;
    return guarded(ctx, [&] {
        gamerecon::pipeline::stage_synth(ctx->config, kind, out_dir);
    });
}

gr_status gr_run(gr_context* ctx, const char* frames_path, const char* pose_jsonl,
                 const char* detections_jsonl, const char* out_dir) {
    if (!ctx || !required(ctx, out_dir, "out_dir")) return GR_ERR_INVALID_ARGUMENT;
    gr_status status = guarded(ctx, [&] {
        auto report = gamerecon::pipeline::run_pipeline(ctx->config, arg(frames_path),
                                                        arg(pose_jsonl),
                                                        arg(detections_jsonl), out_dir);
        if (!report.ok()) {
            std::string detail;
            for (const auto& s : report.stages)
                if (s.status == "failed") detail += s.name + ": " + s.detail + "; ";
            throw Error(ErrorCode::insufficient_track, "stage failures: " + detail);
        }
    });
    return status;
}

}  // extern "C"
