#include "gamerecon/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>

#include "gamerecon/error.hpp"
#include "gamerecon/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gamerecon::pipeline {

namespace {

void check_keys(const json& j, const std::string& context,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw Error(ErrorCode::invalid_config, context + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.count(key))
            throw Error(ErrorCode::invalid_config,
                        "unknown config key \"" + key + "\" in " + context);
    }
}

Vec2 parse_vec2(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 2)
        throw Error(ErrorCode::invalid_config, context + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 parse_vec3(const json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::invalid_config, context + " must be [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void maybe(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

PipelineConfig default_config() { return PipelineConfig{}; }

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::invalid_config, "malformed JSON in " + path);

    PipelineConfig cfg;
    check_keys(j, "config",
               {"fps", "seed", "trajkit", "fmoc", "gbcv", "events", "batglove", "mccnn",
                "camera", "plane", "release_point_px", "model_checkpoint", "classify_target",
                "synth"});
    maybe(j, "fps", cfg.fps);
    maybe(j, "seed", cfg.seed);

    if (j.contains("trajkit")) {
        const json& t = j["trajkit"];
        check_keys(t, "trajkit",
                   {"min_iou", "max_iou", "padding_px", "smoother", "butter_cutoff_hz",
                    "butter_order", "bspline_knot_spacing", "pitcher_init", "batter_init"});
        maybe(t, "min_iou", cfg.trajkit.min_iou);
        maybe(t, "max_iou", cfg.trajkit.max_iou);
        if (t.contains("padding_px"))
            cfg.trajkit.padding = parse_vec2(t["padding_px"], "trajkit.padding_px");
        if (t.contains("smoother")) {
            std::string s = t["smoother"].get<std::string>();
            if (s == "butterworth")
                cfg.trajkit.smoother = trajkit::Smoother::butterworth;
            else if (s == "bspline")
                cfg.trajkit.smoother = trajkit::Smoother::bspline;
            else if (s == "none")
                cfg.trajkit.smoother = trajkit::Smoother::none;
            else
                throw Error(ErrorCode::invalid_config, "unknown smoother \"" + s + "\"");
        }
        maybe(t, "butter_cutoff_hz", cfg.trajkit.butter_cutoff_hz);
        maybe(t, "butter_order", cfg.trajkit.butter_order);
        maybe(t, "bspline_knot_spacing", cfg.trajkit.bspline_knot_spacing);
        if (t.contains("pitcher_init"))
            cfg.pitcher_init = parse_vec2(t["pitcher_init"], "trajkit.pitcher_init");
        if (t.contains("batter_init"))
            cfg.batter_init = parse_vec2(t["batter_init"], "trajkit.batter_init");
    }

    if (j.contains("fmoc")) {
        const json& f = j["fmoc"];
        check_keys(f, "fmoc", {"k", "tau_diff", "jitter_memory", "min_area"});
        maybe(f, "k", cfg.fmoc.k);
        maybe(f, "tau_diff", cfg.fmoc.tau_diff);
        maybe(f, "jitter_memory", cfg.fmoc.jitter_memory);
        maybe(f, "min_area", cfg.fmoc.min_area);
        if (cfg.fmoc.k < 1 || cfg.fmoc.jitter_memory < 0 || cfg.fmoc.min_area < 1)
            throw Error(ErrorCode::invalid_config, "fmoc: k >= 1, jitter_memory >= 0, min_area >= 1");
    }

    if (j.contains("gbcv")) {
        const json& g = j["gbcv"];
        check_keys(g, "gbcv",
                   {"theta_dist", "slope_weight", "distance_weight", "area_weight",
                    "theta_confidence", "min_track_len", "gap_merge_max"});
        maybe(g, "theta_dist", cfg.gbcv.theta_dist);
        maybe(g, "slope_weight", cfg.gbcv.slope_weight);
        maybe(g, "distance_weight", cfg.gbcv.distance_weight);
        maybe(g, "area_weight", cfg.gbcv.area_weight);
        maybe(g, "theta_confidence", cfg.gbcv.theta_confidence);
        maybe(g, "min_track_len", cfg.gbcv.min_track_len);
        maybe(g, "gap_merge_max", cfg.gbcv.gap_merge_max);
        double wsum = cfg.gbcv.slope_weight + cfg.gbcv.distance_weight + cfg.gbcv.area_weight;
        if (std::abs(wsum - 1.0) > 1e-9 || cfg.gbcv.slope_weight < 0.0 ||
            cfg.gbcv.distance_weight < 0.0 || cfg.gbcv.area_weight < 0.0)
            throw Error(ErrorCode::invalid_config,
                        "gbcv weights must be nonnegative and sum to 1");
        if (!(cfg.gbcv.theta_confidence > 0.0 && cfg.gbcv.theta_confidence <= 1.0))
            throw Error(ErrorCode::invalid_config, "gbcv.theta_confidence must lie in (0, 1]");
    }

    if (j.contains("events")) {
        const json& e = j["events"];
        check_keys(e, "events", {"first_move", "first_step", "foot_down_search_range"});
        if (e.contains("first_move")) {
            const json& m = e["first_move"];
            check_keys(m, "events.first_move",
                       {"closeness_factor", "min_length", "max_apart", "refine_halfwidth", "k"});
            maybe(m, "closeness_factor", cfg.events.first_move.closeness_factor);
            maybe(m, "min_length", cfg.events.first_move.min_length);
            maybe(m, "max_apart", cfg.events.first_move.max_apart);
            maybe(m, "refine_halfwidth", cfg.events.first_move.refine_halfwidth);
            maybe(m, "k", cfg.events.first_move.k);
            if (cfg.events.first_move.min_length > cfg.events.first_move.max_apart)
                throw Error(ErrorCode::invalid_config,
                            "events.first_move: min_length must not exceed max_apart");
        }
        if (e.contains("first_step")) {
            const json& s = e["first_step"];
            check_keys(s, "events.first_step",
                       {"window_start_offset", "window_length", "percentile",
                        "lowering_factor", "floor_px", "sustain_frames"});
            maybe(s, "window_start_offset", cfg.events.first_step.window_start_offset);
            maybe(s, "window_length", cfg.events.first_step.window_length);
            maybe(s, "percentile", cfg.events.first_step.percentile);
            maybe(s, "lowering_factor", cfg.events.first_step.lowering_factor);
            maybe(s, "floor_px", cfg.events.first_step.floor_px);
            maybe(s, "sustain_frames", cfg.events.first_step.sustain_frames);
        }
        maybe(e, "foot_down_search_range", cfg.events.foot_down_search_range);
    }

    if (j.contains("batglove")) {
        const json& b = j["batglove"];
        check_keys(b, "batglove", {"max_dist_factor"});
        maybe(b, "max_dist_factor", cfg.batglove.max_dist_factor);
    }

    if (j.contains("mccnn")) {
        const json& m = j["mccnn"];
        check_keys(m, "mccnn",
                   {"learning_rate", "batch_size", "epochs", "adam_beta1", "adam_beta2",
                    "adam_epsilon", "threads", "early_stop_loss", "folds"});
        maybe(m, "learning_rate", cfg.mccnn.train.learning_rate);
        maybe(m, "batch_size", cfg.mccnn.train.batch_size);
        maybe(m, "epochs", cfg.mccnn.train.epochs);
        maybe(m, "adam_beta1", cfg.mccnn.train.adam_beta1);
        maybe(m, "adam_beta2", cfg.mccnn.train.adam_beta2);
        maybe(m, "adam_epsilon", cfg.mccnn.train.adam_epsilon);
        maybe(m, "threads", cfg.mccnn.train.threads);
        maybe(m, "early_stop_loss", cfg.mccnn.train.early_stop_loss);
        maybe(m, "folds", cfg.mccnn.folds);
    }

    if (j.contains("camera")) {
        const json& c = j["camera"];
        check_keys(c, "camera", {"focal_px", "principal_px", "position_m", "rotation"});
        ballistics::CameraModel cam;
        cam.focal_px = c.at("focal_px").get<double>();
        cam.principal_px = parse_vec2(c.at("principal_px"), "camera.principal_px");
        cam.position_m = parse_vec3(c.at("position_m"), "camera.position_m");
        const json& r = c.at("rotation");
        if (!r.is_array() || r.size() != 9)
            throw Error(ErrorCode::invalid_config, "camera.rotation must be 9 row-major values");
        for (int i = 0; i < 9; ++i) cam.rotation.m[i] = r[i].get<double>();
        if (cam.focal_px <= 0.0)
            throw Error(ErrorCode::invalid_config, "camera.focal_px must be positive");
        cfg.camera = cam;
    }

    if (j.contains("plane")) {
        const json& p = j["plane"];
        check_keys(p, "plane", {"mound_m", "plate_m", "offset_m"});
        ballistics::VerticalPlane plane;
        plane.mound_m = parse_vec3(p.at("mound_m"), "plane.mound_m");
        plane.plate_m = parse_vec3(p.at("plate_m"), "plane.plate_m");
        maybe(p, "offset_m", plane.offset_m);
        cfg.plane = plane;
    }

    if (j.contains("release_point_px"))
        cfg.release_point_px = parse_vec2(j["release_point_px"], "release_point_px");
    if (j.contains("model_checkpoint"))
        cfg.model_checkpoint = j["model_checkpoint"].get<std::string>();
    maybe(j, "classify_target", cfg.classify_target);

    if (j.contains("synth")) {
        const json& s = j["synth"];
        check_keys(s, "synth", {"scene", "play", "dataset"});
        if (s.contains("scene")) {
            const json& sc = s["scene"];
            check_keys(sc, "synth.scene",
                       {"width", "height", "frame_count", "release_frame", "speed_mph",
                        "noise_amplitude", "decoy", "jitter_amplitude_px"});
            maybe(sc, "width", cfg.synth.scene.width);
            maybe(sc, "height", cfg.synth.scene.height);
            maybe(sc, "frame_count", cfg.synth.scene.frame_count);
            maybe(sc, "release_frame", cfg.synth.scene.release_frame);
            maybe(sc, "speed_mph", cfg.synth.scene.speed_mph);
            maybe(sc, "noise_amplitude", cfg.synth.scene.noise_amplitude);
            maybe(sc, "decoy", cfg.synth.scene.decoy);
            maybe(sc, "jitter_amplitude_px", cfg.synth.scene.jitter_amplitude_px);
        }
        if (s.contains("play")) {
            const json& sp = s["play"];
            check_keys(sp, "synth.play",
                       {"frame_count", "release_frame", "first_move_apex", "first_step_frame"});
            maybe(sp, "frame_count", cfg.synth.play.frame_count);
            maybe(sp, "release_frame", cfg.synth.play.release_frame);
            maybe(sp, "first_move_apex", cfg.synth.play.first_move_apex);
            maybe(sp, "first_step_frame", cfg.synth.play.first_step_frame);
        }
        if (s.contains("dataset")) {
            const json& sd = s["dataset"];
            check_keys(sd, "synth.dataset",
                       {"classes", "per_class", "length", "noise_px", "dropout"});
            maybe(sd, "classes", cfg.synth.dataset.classes);
            maybe(sd, "per_class", cfg.synth.dataset.per_class);
            maybe(sd, "length", cfg.synth.dataset.length);
            maybe(sd, "noise_px", cfg.synth.dataset.noise_px);
            maybe(sd, "dropout", cfg.synth.dataset.dropout);
        }
    }

    return cfg;
}

namespace {

trajkit::JointTrajectories track_target(const PipelineConfig& config,
                                        const std::vector<std::vector<trajkit::PersonDetection>>& frames,
                                        const Vec2& init, double frame_w, double frame_h) {
    trajkit::TrackerConfig tc = config.trajkit;
    tc.init_center = init;
    trajkit::PoseTracker tracker(tc, frame_w, frame_h);
    for (const auto& people : frames) tracker.push(people);
    trajkit::JointTrajectories raw = tracker.trajectories(config.fps);
    return trajkit::smooth_trajectories(raw, config.trajkit);
}

std::optional<gbcv::BallTrack2D> best_track(const PipelineConfig& config,
                                            const std::vector<fmoc::FrameCandidates>& stream) {
    auto tracks = gbcv::detect_ball_tracks(stream, config.gbcv);
    if (tracks.empty()) return std::nullopt;
    tracks = gbcv::merge_all(std::move(tracks), config.gbcv);
    std::stable_sort(tracks.begin(), tracks.end(),
                     [](const gbcv::BallTrack2D& a, const gbcv::BallTrack2D& b) {
                         if (a.length() != b.length()) return a.length() > b.length();
                         return a.mean_confidence() > b.mean_confidence();
                     });
    return tracks.front();
}

io::TrackFile make_track_file(const PipelineConfig& config, const gbcv::BallTrack2D& track) {
    io::TrackFile tf;
    tf.track = track;
    if (config.release_point_px)
        tf.release_frame = gbcv::estimate_release_frame(track, *config.release_point_px);
    else
        tf.release_frame = track.first_frame();  // ball first seen; no reference configured
    return tf;
}

events::EventTimeline compute_timeline(const PipelineConfig& config,
                                       const trajkit::JointTrajectories* pitcher,
                                       const trajkit::JointTrajectories* batter,
                                       const std::vector<fmoc::FrameCandidates>* candidates,
                                       std::optional<int> release) {
    events::EventTimeline tl;
    tl.fps = config.fps;
    tl.release = release;
    if (pitcher && candidates) {
        tl.first_movement =
            events::detect_pitcher_first_move(*candidates, *pitcher, config.events.first_move);
        if (tl.first_movement)
            tl.first_movement_refined = events::refine_first_move(
                *tl.first_movement, *pitcher, config.events.first_move.refine_halfwidth);
    }
    if (batter && release) {
        tl.first_step =
            events::detect_batter_first_step(*batter, *release, config.events.first_step);
        if (tl.first_step && *release >= 20) {
            tl.leg_raise = events::detect_leg_raise(*batter, *release, *tl.first_step);
            if (*tl.leg_raise >= 11) {
                auto fd = events::detect_foot_down(*batter, *tl.leg_raise,
                                                   config.events.foot_down_search_range);
                tl.foot_down = fd.frame;
                tl.foot_down_low_confidence = fd.low_confidence;
            }
        }
    }
    return tl;
}

}  // namespace

void stage_track_pose(const PipelineConfig& config, const std::string& pose_jsonl,
                      const std::string& target, const std::string& out_json) {
    auto frames = io::read_pose_jsonl(pose_jsonl);
    Vec2 init;
    if (target == "pitcher")
        init = config.pitcher_init;
    else if (target == "batter")
        init = config.batter_init;
    else
        throw Error(ErrorCode::bad_input, "target must be \"pitcher\" or \"batter\"");
    // Frame bounds: pose coordinates bound the virtual frame; use a generous box.
    auto traj = track_target(config, frames, init, 1e6, 1e6);
    io::write_trajectories_json(out_json, traj);
}

void stage_fmoc(const PipelineConfig& config, const std::string& frames_path,
                const std::string& out_jsonl) {
    auto frames = io::read_frames(frames_path);
    auto stream = fmoc::detect_sequence(frames, config.fmoc);
    io::write_candidates_jsonl(out_jsonl, stream);
}

void stage_gbcv(const PipelineConfig& config, const std::string& candidates_jsonl,
                const std::string& out_json) {
    auto stream = io::read_candidates_jsonl(candidates_jsonl);
    auto track = best_track(config, stream);
    if (!track)
        throw Error(ErrorCode::insufficient_track, "no ball track found in candidate stream");
    io::write_track_json(out_json, make_track_file(config, *track));
}

void stage_events(const PipelineConfig& config, const std::string& pitcher_traj_json,
                  const std::string& batter_traj_json, const std::string& candidates_jsonl,
                  const std::string& track_json, const std::string& out_json) {
    std::optional<trajkit::JointTrajectories> pitcher, batter;
    std::optional<std::vector<fmoc::FrameCandidates>> candidates;
    std::optional<int> release;
    if (!pitcher_traj_json.empty())
        pitcher = io::read_trajectories_json(pitcher_traj_json);
    if (!batter_traj_json.empty()) batter = io::read_trajectories_json(batter_traj_json);
    if (!candidates_jsonl.empty())
        candidates = io::read_candidates_jsonl(candidates_jsonl);
    if (!track_json.empty()) {
        auto tf = io::read_track_json(track_json);
        release = tf.release_frame;
    }
    auto tl = compute_timeline(config, pitcher ? &*pitcher : nullptr,
                               batter ? &*batter : nullptr,
                               candidates ? &*candidates : nullptr, release);
    io::write_timeline_json(out_json, tl);
}

void stage_speed(const PipelineConfig& config, const std::string& track_json,
                 const std::string& out_json) {
    if (!config.camera || !config.plane)
        throw Error(ErrorCode::invalid_config,
                    "speed estimation requires camera and plane configuration");
    io::TrackFile tf = io::read_track_json(track_json);
    auto est = ballistics::estimate_speed(tf.track, *config.camera, *config.plane, config.fps);
    tf.speed_mph = est.mph;
    tf.points_3d = est.points_3d;
    io::write_track_json(out_json, tf);
}

void stage_bat(const PipelineConfig& config, const std::string& detections_jsonl,
               const std::string& candidates_jsonl, const std::string& batter_traj_json,
               const std::string& out_json) {
    auto boxes = io::read_detections_jsonl(detections_jsonl);
    auto candidates = io::read_candidates_jsonl(candidates_jsonl);
    int frame_count = 0;
    for (const auto& b : boxes) frame_count = std::max(frame_count, b.frame + 1);
    for (const auto& fc : candidates) frame_count = std::max(frame_count, fc.frame + 1);

    auto track = batglove::fuse_bat_track(boxes, candidates, frame_count, config.batglove);

    if (!batter_traj_json.empty()) {
        auto traj = io::read_trajectories_json(batter_traj_json);
        std::vector<Vec2> wrists(frame_count, {trajkit::kMissing, trajkit::kMissing});
        for (int t = 0; t < std::min(frame_count, traj.frame_count()); ++t) {
            // Lead wrist: the one nearer the bat when known, else the right.
            wrists[t] = traj.coords[t][trajkit::kTrajRWrist];
        }
        batglove::assign_track_tips(track, wrists);
    }
    io::write_bat_track_json(out_json, track);
}

namespace {

json metrics_json(const std::vector<int>& preds, const std::vector<int>& labels,
                  int n_classes) {
    std::vector<int> excluded;
    double ba = mccnn::balanced_accuracy(preds, labels, n_classes, &excluded);
    auto cm = mccnn::confusion_matrix(preds, labels, n_classes, true);
    json cm_json = json::array();
    for (const auto& row : cm) cm_json.push_back(row);
    json out = {{"accuracy", mccnn::accuracy(preds, labels)},
                {"balanced_accuracy", ba},
                {"confusion_matrix", cm_json}};
    if (!excluded.empty()) out["classes_excluded_from_ba"] = excluded;
    return out;
}

}  // namespace

void stage_train(const PipelineConfig& config, const std::string& dataset_path,
                 const std::string& model_out, const std::string& metrics_out) {
    mccnn::Dataset data = io::read_dataset(dataset_path);
    mccnn::TrainConfig tc = config.mccnn.train;
    if (tc.seed == 0) tc.seed = config.seed + 1;

    json metrics;

    if (config.mccnn.folds >= 2) {
        auto folds = mccnn::kfold_split(data.sample_count(), config.mccnn.folds, tc.seed);
        json fold_reports = json::array();
        std::vector<int> all_preds, all_labels;
        for (size_t f = 0; f < folds.size(); ++f) {
            std::vector<int> train_idx;
            for (size_t g = 0; g < folds.size(); ++g)
                if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());

            mccnn::Dataset fold_data = data;  // normalize with training stats only
            auto stats = mccnn::compute_channel_stats(fold_data, train_idx);
            mccnn::apply_normalization(fold_data, stats);

            mccnn::NetConfig nc;
            nc.channels = data.n_channels;
            nc.length = data.length;
            nc.n_classes = data.n_classes;
            mccnn::MccnnNet net(nc);
            net.init_weights(tc.seed + f);
            auto result = mccnn::train(net, fold_data, train_idx, tc);

            auto preds = mccnn::predict_all(net, fold_data, folds[f]);
            std::vector<int> labels;
            for (int i : folds[f]) labels.push_back(fold_data.samples[i].label);
            all_preds.insert(all_preds.end(), preds.begin(), preds.end());
            all_labels.insert(all_labels.end(), labels.begin(), labels.end());

            json report = metrics_json(preds, labels, data.n_classes);
            report["epochs_run"] = result.epochs_run;
            report["final_loss"] = result.loss_curve.empty() ? 0.0 : result.loss_curve.back();
            fold_reports.push_back(report);
        }
        metrics["folds"] = fold_reports;
        metrics["cross_validation"] = metrics_json(all_preds, all_labels, data.n_classes);
    }

    // Final fit on the full dataset; the checkpoint carries the stats.
    std::vector<int> all(data.sample_count());
    std::iota(all.begin(), all.end(), 0);
    auto stats = mccnn::compute_channel_stats(data, all);
    mccnn::apply_normalization(data, stats);

    mccnn::NetConfig nc;
    nc.channels = data.n_channels;
    nc.length = data.length;
    nc.n_classes = data.n_classes;
    mccnn::MccnnNet net(nc);
    net.init_weights(tc.seed);
    auto result = mccnn::train(net, data, all, tc);
    net.norm_stats = stats;
    io::write_checkpoint(model_out, net);

    auto preds = mccnn::predict_all(net, data, all);
    std::vector<int> labels;
    for (const auto& s : data.samples) labels.push_back(s.label);
    metrics["train"] = metrics_json(preds, labels, data.n_classes);
    metrics["train"]["epochs_run"] = result.epochs_run;
    metrics["train"]["early_stopped"] = result.early_stopped;
    metrics["loss_curve"] = result.loss_curve;

    std::ofstream out(metrics_out);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + metrics_out);
    out << metrics.dump(1) << "\n";
}

void stage_eval(const PipelineConfig& config, const std::string& dataset_path,
                const std::string& model_path, const std::string& metrics_out) {
    (void)config;
    mccnn::Dataset data = io::read_dataset(dataset_path);
    mccnn::MccnnNet net = io::read_checkpoint(model_path);
    if (net.config().channels != data.n_channels || net.config().length != data.length)
        throw Error(ErrorCode::shape_mismatch, "dataset does not match model dimensions");
    if (!net.norm_stats.mean.empty()) apply_normalization(data, net.norm_stats);

    std::vector<int> all(data.sample_count());
    std::iota(all.begin(), all.end(), 0);
    auto preds = mccnn::predict_all(net, data, all);
    std::vector<int> labels;
    for (const auto& s : data.samples) labels.push_back(s.label);

    json metrics = {{"eval", metrics_json(preds, labels, data.n_classes)}};
    std::ofstream out(metrics_out);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + metrics_out);
    out << metrics.dump(1) << "\n";
}

void stage_synth(const PipelineConfig& config, const std::string& kind,
                 const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);

    if (kind == "scene") {
        synthgen::SceneScript script =
            synthgen::default_scene(config.synth.scene.width, config.synth.scene.height);
        script.seed = config.seed;
        script.fps = config.fps;
        script.frame_count = config.synth.scene.frame_count;
        script.release_frame = config.synth.scene.release_frame;
        script.velocity_mps =
            normalized(script.velocity_mps) *
            (config.synth.scene.speed_mph * ballistics::kMetersPerSecondPerMph);
        script.noise_amplitude = config.synth.scene.noise_amplitude;
        script.decoy_enabled = config.synth.scene.decoy;
        script.jitter_amplitude_px = config.synth.scene.jitter_amplitude_px;

        auto scene = synthgen::render_scene(script);
        io::write_raw_stream((dir / "frames.raw").string(), scene.frames);

        json gt = {{"release_frame", scene.truth.release_frame},
                   {"speed_mph", scene.truth.speed_mph},
                   {"release_px", {scene.truth.release_px.x, scene.truth.release_px.y}}};
        json ball = json::array();
        for (const auto& p : scene.truth.ball_px)
            ball.push_back(p ? json({p->x, p->y}) : json(nullptr));
        gt["ball_px"] = ball;
        std::ofstream(dir / "ground_truth.json") << gt.dump(1) << "\n";

        // Camera/plane block ready to merge into a run config.
        json cam = {{"focal_px", script.camera.focal_px},
                    {"principal_px",
                     {script.camera.principal_px.x, script.camera.principal_px.y}},
                    {"position_m",
                     {script.camera.position_m.x, script.camera.position_m.y,
                      script.camera.position_m.z}},
                    {"rotation", std::vector<double>(script.camera.rotation.m,
                                                     script.camera.rotation.m + 9)}};
        json plane = {{"mound_m",
                       {script.plane.mound_m.x, script.plane.mound_m.y, script.plane.mound_m.z}},
                      {"plate_m",
                       {script.plane.plate_m.x, script.plane.plate_m.y, script.plane.plate_m.z}},
                      {"offset_m", script.plane.offset_m}};
        json geom = {{"camera", cam},
                     {"plane", plane},
                     {"release_point_px",
                      {scene.truth.release_px.x, scene.truth.release_px.y}}};
        std::ofstream(dir / "geometry.json") << geom.dump(1) << "\n";
        return;
    }

    if (kind == "play") {
        synthgen::PlayScript script;
        script.seed = config.seed;
        script.fps = config.fps;
        script.frame_count = config.synth.play.frame_count;
        script.release_frame = config.synth.play.release_frame;
        script.first_move_apex = config.synth.play.first_move_apex;
        script.first_step_frame = config.synth.play.first_step_frame;

        auto play = synthgen::scripted_play(script);
        io::write_trajectories_json((dir / "pitcher.json").string(), play.pitcher);
        io::write_trajectories_json((dir / "batter.json").string(), play.batter);
        io::write_candidates_jsonl((dir / "candidates.jsonl").string(),
                                   play.pitcher_candidates);
        json gt = {{"first_move_onset", play.truth.first_move_onset},
                   {"first_move_apex", play.truth.first_move_apex},
                   {"release", play.truth.release},
                   {"leg_raise", play.truth.leg_raise},
                   {"foot_down", play.truth.foot_down},
                   {"first_step", play.truth.first_step}};
        std::ofstream(dir / "ground_truth.json") << gt.dump(1) << "\n";
        return;
    }

    if (kind == "dataset") {
        synthgen::ClassSpec spec;
        spec.n_classes = config.synth.dataset.classes;
        spec.noise_px = config.synth.dataset.noise_px;
        if (config.synth.dataset.dropout == "paper")
            spec.dropout = synthgen::dropout_preset_paper();
        else if (config.synth.dataset.dropout != "none")
            throw Error(ErrorCode::invalid_config, "synth.dataset.dropout: none or paper");
        auto data = synthgen::synth_trajectories(spec, config.synth.dataset.per_class,
                                                 config.synth.dataset.length, config.seed);
        io::write_dataset((dir / "dataset.grds").string(), data);
        json meta = {{"classes", data.n_classes},
                     {"samples", data.sample_count()},
                     {"length", data.length},
                     {"channels", data.n_channels}};
        std::ofstream(dir / "dataset_meta.json") << meta.dump(1) << "\n";
        return;
    }

    throw Error(ErrorCode::bad_input, "unknown synth kind \"" + kind + "\"");
}

bool RunReport::ok() const {
    for (const auto& s : stages)
        if (s.status == "failed") return false;
    return true;
}

RunReport run_pipeline(const PipelineConfig& config, const std::string& frames_path,
                       const std::string& pose_jsonl, const std::string& detections_jsonl,
                       const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    RunReport report;

    auto run_stage = [&report](const std::string& name, auto&& fn) -> bool {
        try {
            fn();
            report.stages.push_back({name, "ok", ""});
            return true;
        } catch (const Error& e) {
            report.stages.push_back({name, "failed", e.what()});
        } catch (const std::exception& e) {
            report.stages.push_back({name, "failed", e.what()});
        }
        return false;
    };
    auto skip_stage = [&report](const std::string& name, const std::string& why) {
        report.stages.push_back({name, "skipped", why});
    };

    // Per-frame work: player localization and the two FMO-C streams (ball
    // stride and the slower first-movement stride).
    std::optional<trajkit::JointTrajectories> pitcher, batter;
    std::optional<std::vector<fmoc::FrameCandidates>> ball_candidates, leg_candidates;

    if (!pose_jsonl.empty()) {
        run_stage("track_pose", [&] {
            auto frames = io::read_pose_jsonl(pose_jsonl);
            pitcher = track_target(config, frames, config.pitcher_init, 1e6, 1e6);
            batter = track_target(config, frames, config.batter_init, 1e6, 1e6);
            io::write_trajectories_json((dir / "pitcher.json").string(), *pitcher);
            io::write_trajectories_json((dir / "batter.json").string(), *batter);
        });
    } else {
        skip_stage("track_pose", "no pose input");
    }

    if (!frames_path.empty()) {
        run_stage("fmoc", [&] {
            auto frames = io::read_frames(frames_path);
            ball_candidates = fmoc::detect_sequence(frames, config.fmoc);
            io::write_candidates_jsonl((dir / "candidates.jsonl").string(), *ball_candidates);
            fmoc::FmocConfig slow = config.fmoc;
            slow.k = config.events.first_move.k;
            leg_candidates = fmoc::detect_sequence(frames, slow);
            io::write_candidates_jsonl((dir / "candidates_firstmove.jsonl").string(),
                                       *leg_candidates);
        });
    } else {
        skip_stage("fmoc", "no frame input");
    }

    std::optional<io::TrackFile> track_file;
    if (ball_candidates) {
        run_stage("gbcv", [&] {
            auto track = best_track(config, *ball_candidates);
            if (!track)
                throw Error(ErrorCode::insufficient_track, "no ball track found");
            track_file = make_track_file(config, *track);
            io::write_track_json((dir / "track.json").string(), *track_file);
        });
    } else {
        skip_stage("gbcv", "no candidates");
    }

    if (detections_jsonl.empty()) {
        skip_stage("bat", "no detector input");
    } else if (!ball_candidates) {
        skip_stage("bat", "no candidates");
    } else {
        run_stage("bat", [&] {
            auto boxes = io::read_detections_jsonl(detections_jsonl);
            int frame_count = 0;
            for (const auto& b : boxes) frame_count = std::max(frame_count, b.frame + 1);
            for (const auto& fc : *ball_candidates)
                frame_count = std::max(frame_count, fc.frame + 1);
            auto bat = batglove::fuse_bat_track(boxes, *ball_candidates, frame_count,
                                                config.batglove);
            if (batter) {
                std::vector<Vec2> wrists(frame_count, {trajkit::kMissing, trajkit::kMissing});
                for (int t = 0; t < std::min(frame_count, batter->frame_count()); ++t)
                    wrists[t] = batter->coords[t][trajkit::kTrajRWrist];
                batglove::assign_track_tips(bat, wrists);
            }
            io::write_bat_track_json((dir / "bat_track.json").string(), bat);

            std::vector<Roi> glove;
            try {
                glove = batglove::interpolate_glove(boxes, frame_count);
            } catch (const Error&) {
                return;  // glove coverage is optional
            }
            json frames_json = json::array();
            for (int t = 0; t < frame_count; ++t)
                frames_json.push_back({{"frame", t},
                                       {"x0", glove[t].p1.x},
                                       {"y0", glove[t].p1.y},
                                       {"x1", glove[t].p2.x},
                                       {"y1", glove[t].p2.y}});
            std::ofstream(dir / "glove_track.json") << json({{"frames", frames_json}}).dump(1)
                                                    << "\n";
        });
    }

    run_stage("events", [&] {
        std::optional<int> release;
        if (track_file) release = track_file->release_frame;
        auto tl = compute_timeline(config, pitcher ? &*pitcher : nullptr,
                                   batter ? &*batter : nullptr,
                                   leg_candidates ? &*leg_candidates : nullptr, release);
        io::write_timeline_json((dir / "timeline.json").string(), tl);
    });

    if (!track_file) {
        skip_stage("speed", "no ball track");
    } else if (!config.camera || !config.plane) {
        skip_stage("speed", "no camera/plane configuration");
    } else {
        run_stage("speed", [&] {
            auto est = ballistics::estimate_speed(track_file->track, *config.camera,
                                                  *config.plane, config.fps);
            track_file->speed_mph = est.mph;
            track_file->points_3d = est.points_3d;
            io::write_track_json((dir / "track.json").string(), *track_file);
        });
    }

    if (!config.model_checkpoint) {
        skip_stage("classify", "no model checkpoint configured");
    } else if (!pitcher && !batter) {
        skip_stage("classify", "no trajectories");
    } else {
        run_stage("classify", [&] {
            mccnn::MccnnNet net = io::read_checkpoint(*config.model_checkpoint);
            const trajkit::JointTrajectories& traj =
                (config.classify_target == "pitcher" && pitcher) ? *pitcher : *batter;
            const int T = net.config().length;
            if (traj.frame_count() < T)
                throw Error(ErrorCode::shape_mismatch,
                            "trajectory shorter than the model input length");
            // Leading window of the play, channels in catalog order.
            std::vector<double> channels(static_cast<size_t>(net.config().channels) * T);
            for (int j = 0; j < trajkit::kTrajectoryJointCount; ++j)
                for (int t = 0; t < T; ++t) {
                    channels[static_cast<size_t>(2 * j) * T + t] = traj.coords[t][j].x;
                    channels[static_cast<size_t>(2 * j + 1) * T + t] = traj.coords[t][j].y;
                }
            if (!net.norm_stats.mean.empty()) {
                for (int c = 0; c < net.config().channels; ++c)
                    for (int t = 0; t < T; ++t)
                        channels[static_cast<size_t>(c) * T + t] =
                            (channels[static_cast<size_t>(c) * T + t] - net.norm_stats.mean[c]) /
                            net.norm_stats.scale[c];
            }
            auto probs = net.forward(channels);
            json j = {{"target", config.classify_target},
                      {"probabilities", probs},
                      {"predicted_class",
                       static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                                        probs.begin())}};
            std::ofstream(dir / "classification.json") << j.dump(1) << "\n";
        });
    }

    // Manifest is the only artifact carrying wall-clock time.
    json stages_json = json::array();
    for (const auto& s : report.stages)
        stages_json.push_back({{"name", s.name}, {"status", s.status}, {"detail", s.detail}});
    auto now = std::chrono::system_clock::now().time_since_epoch();
    json manifest = {
        {"stages", stages_json},
        {"timestamp_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    std::ofstream(dir / "manifest.json") << manifest.dump(1) << "\n";
    return report;
}

}  // namespace gamerecon::pipeline
