// Command-line front end over the shared-library C API.

#include <CLI11.hpp>
#include <cstdio>
#include <memory>
#include <string>

#include "gamerecon.h"

namespace {

int exit_code_for(gr_status status) {
    switch (status) {
        case GR_OK:
            return 0;
        case GR_ERR_INVALID_ARGUMENT:
        case GR_ERR_IO:
        case GR_ERR_BAD_INPUT:
            return 1;  // input error
        default:
            return 2;  // stage failure
    }
}

struct ContextDeleter {
    void operator()(gr_context* ctx) const { gr_context_destroy(ctx); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"baseball game reconstruction pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned long long seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "pipeline configuration JSON")->expected(1);
    app.add_option("--seed", seed, "seed for synthetic generation and training")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    std::string in_path, out_path, target = "pitcher";
    std::string pitcher_path, batter_path, candidates_path, track_path, detections_path;
    std::string frames_path, pose_path, model_path, metrics_path, dataset_path, kind, out_dir;

    auto* track_pose = app.add_subcommand("track-pose", "pose detections to joint trajectories");
    track_pose->add_option("--in", in_path, "pose JSONL")->required();
    track_pose->add_option("--target", target, "pitcher or batter");
    track_pose->add_option("--out", out_path, "trajectories JSON")->required();

    auto* fmoc_cmd = app.add_subcommand("fmoc", "fast-moving-object candidate detection");
    fmoc_cmd->add_option("--frames", frames_path, "PGM directory or raw stream")->required();
    fmoc_cmd->add_option("--out", out_path, "candidates JSONL")->required();

    auto* gbcv_cmd = app.add_subcommand("gbcv", "ball track detection over candidates");
    gbcv_cmd->add_option("--candidates", candidates_path, "candidates JSONL")->required();
    gbcv_cmd->add_option("--out", out_path, "track JSON")->required();

    auto* events_cmd = app.add_subcommand("events", "game-event timeline detection");
    events_cmd->add_option("--pitcher", pitcher_path, "pitcher trajectories JSON");
    events_cmd->add_option("--batter", batter_path, "batter trajectories JSON");
    events_cmd->add_option("--candidates", candidates_path, "candidates JSONL (first-move stride)");
    events_cmd->add_option("--track", track_path, "ball track JSON (release source)");
    events_cmd->add_option("--out", out_path, "timeline JSON")->required();

    auto* speed_cmd = app.add_subcommand("speed", "ball speed from the vertical-plane model");
    speed_cmd->add_option("--track", track_path, "track JSON")->required();
    speed_cmd->add_option("--out", out_path, "track JSON with speed")->required();

    auto* bat_cmd = app.add_subcommand("bat", "bat track fusion");
    bat_cmd->add_option("--detections", detections_path, "detector JSONL")->required();
    bat_cmd->add_option("--candidates", candidates_path, "candidates JSONL")->required();
    bat_cmd->add_option("--batter", batter_path, "batter trajectories JSON (wrist)");
    bat_cmd->add_option("--out", out_path, "bat track JSON")->required();

    auto* train_cmd = app.add_subcommand("train", "train the movement classifier");
    train_cmd->add_option("--dataset", dataset_path, "dataset file")->required();
    train_cmd->add_option("--model", model_path, "checkpoint output")->required();
    train_cmd->add_option("--metrics", metrics_path, "metrics JSON output")->required();

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained classifier");
    eval_cmd->add_option("--dataset", dataset_path, "dataset file")->required();
    eval_cmd->add_option("--model", model_path, "checkpoint")->required();
    eval_cmd->add_option("--metrics", metrics_path, "metrics JSON output")->required();

    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic inputs");
    synth_cmd->add_option("--kind", kind, "scene, play or dataset")->required();
    synth_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "full reconstruction into a bundle directory");
    run_cmd->add_option("--frames", frames_path, "PGM directory or raw stream");
    run_cmd->add_option("--pose", pose_path, "pose JSONL");
    run_cmd->add_option("--detections", detections_path, "detector JSONL");
    run_cmd->add_option("--out", out_dir, "bundle directory")->required();

    CLI11_PARSE(app, argc, argv);

    gr_context* raw_ctx = nullptr;
    if (gr_context_create(&raw_ctx) != GR_OK) {
        std::fprintf(stderr, "error: cannot create context\n");
        return 2;
    }
    std::unique_ptr<gr_context, ContextDeleter> ctx(raw_ctx);

    gr_status status = GR_OK;
    if (!config_path.empty()) status = gr_context_load_config(ctx.get(), config_path.c_str());
    if (status == GR_OK && seed_set) status = gr_context_set_seed(ctx.get(), seed);

    if (status == GR_OK) {
        if (track_pose->parsed()) {
            status = gr_track_pose(ctx.get(), in_path.c_str(), target.c_str(), out_path.c_str());
        } else if (fmoc_cmd->parsed()) {
            status = gr_fmoc(ctx.get(), frames_path.c_str(), out_path.c_str());
        } else if (gbcv_cmd->parsed()) {
            status = gr_gbcv(ctx.get(), candidates_path.c_str(), out_path.c_str());
        } else if (events_cmd->parsed()) {
            status = gr_events(ctx.get(), pitcher_path.c_str(), batter_path.c_str(),
                               candidates_path.c_str(), track_path.c_str(), out_path.c_str());
        } else if (speed_cmd->parsed()) {
            status = gr_speed(ctx.get(), track_path.c_str(), out_path.c_str());
        } else if (bat_cmd->parsed()) {
            status = gr_bat(ctx.get(), detections_path.c_str(), candidates_path.c_str(),
                            batter_path.c_str(), out_path.c_str());
        } else if (train_cmd->parsed()) {
            status = gr_train(ctx.get(), dataset_path.c_str(), model_path.c_str(),
                              metrics_path.c_str());
        } else if (eval_cmd->parsed()) {
            status = gr_eval(ctx.get(), dataset_path.c_str(), model_path.c_str(),
                             metrics_path.c_str());
        } else if (synth_cmd->parsed()) {
            status = gr_synth(ctx.get(), kind.c_str(), out_dir.c_str());
        } else if (run_cmd->parsed()) {
            status = gr_run(ctx.get(), frames_path.empty() ? nullptr : frames_path.c_str(),
                            pose_path.empty() ? nullptr : pose_path.c_str(),
                            detections_path.empty() ? nullptr : detections_path.c_str(),
                            out_dir.c_str());
        }
    }

    if (status != GR_OK)
        std::fprintf(stderr, "error: %s\n", gr_context_last_error(ctx.get()));
    return exit_code_for(status);
}
