/* C interface to the game-reconstruction pipeline.
 *
 * All functions are thread-compatible: one gr_context per thread. Paths are
 * UTF-8, NUL-terminated. Every call reports failure through the returned
 * status code; gr_context_last_error() holds a human-readable message for
 * the most recent failure on that context.
 */
#ifndef GAMERECON_H
#define GAMERECON_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GR_API __declspec(dllexport)
#else
#define GR_API __attribute__((visibility("default")))
#endif

typedef enum gr_status {
    GR_OK = 0,
    GR_ERR_INVALID_ARGUMENT = 1, /* bad parameters to the call itself */
    GR_ERR_IO = 2,               /* file not readable/writable */
    GR_ERR_BAD_INPUT = 3,        /* input file exists but fails validation */
    GR_ERR_STAGE_FAILED = 4,     /* processing could not produce a result */
    GR_ERR_INTERNAL = 5
} gr_status;

typedef struct gr_context gr_context;

GR_API const char* gr_version(void);

GR_API gr_status gr_context_create(gr_context** out_ctx);
GR_API void gr_context_destroy(gr_context* ctx);

/* Loads the layered JSON configuration; unknown keys are rejected. */
GR_API gr_status gr_context_load_config(gr_context* ctx, const char* config_path);
GR_API gr_status gr_context_set_seed(gr_context* ctx, unsigned long long seed);

/* Message for the most recent failing call on this context; empty string
 * when the last call succeeded. The pointer stays valid until the next call
 * on the same context. */
GR_API const char* gr_context_last_error(const gr_context* ctx);

/* ---- pipeline stages over files ---- */

/* target is "pitcher" or "batter". */
GR_API gr_status gr_track_pose(gr_context* ctx, const char* pose_jsonl, const char* target,
                               const char* out_trajectories_json);

/* frames_path: directory of .pgm files or a raw stream file. */
GR_API gr_status gr_fmoc(gr_context* ctx, const char* frames_path,
                         const char* out_candidates_jsonl);

GR_API gr_status gr_gbcv(gr_context* ctx, const char* candidates_jsonl,
                         const char* out_track_json);

/* Optional inputs may be NULL or empty; dependent events are left null. */
GR_API gr_status gr_events(gr_context* ctx, const char* pitcher_trajectories_json,
                           const char* batter_trajectories_json,
                           const char* candidates_jsonl, const char* track_json,
                           const char* out_timeline_json);

GR_API gr_status gr_speed(gr_context* ctx, const char* track_json, const char* out_json);

GR_API gr_status gr_bat(gr_context* ctx, const char* detections_jsonl,
                        const char* candidates_jsonl, const char* batter_trajectories_json,
                        const char* out_bat_track_json);

GR_API gr_status gr_train(gr_context* ctx, const char* dataset_path, const char* model_out,
                          const char* metrics_out);

GR_API gr_status gr_eval(gr_context* ctx, const char* dataset_path, const char* model_path,
                         const char* metrics_out);

/* kind: "scene", "play" or "dataset". */
GR_API gr_status gr_synth(gr_context* ctx, const char* kind, const char* out_dir);

/* Full play reconstruction into a bundle directory. Optional inputs may be
 * NULL; stages without inputs are skipped, failed stages are recorded in the
 * bundle manifest and turn the result into GR_ERR_STAGE_FAILED. */
GR_API gr_status gr_run(gr_context* ctx, const char* frames_path, const char* pose_jsonl,
                        const char* detections_jsonl, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* GAMERECON_H */
