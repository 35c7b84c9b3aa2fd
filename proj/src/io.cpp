#include "gamerecon/io.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "gamerecon/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gamerecon::io {

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    return out;
}

json parse_json(const std::string& text, const std::string& context) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::bad_input, "malformed JSON in " + context);
    return j;
}

double number_or_null(const json& j, double fallback) {
    return j.is_null() ? fallback : j.get<double>();
}

}  // namespace

std::vector<std::vector<trajkit::PersonDetection>> read_pose_jsonl(const std::string& path) {
    auto in = open_in(path);
    std::vector<std::vector<trajkit::PersonDetection>> frames;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json(line, path + ":" + std::to_string(line_no));
        if (!j.contains("frame") || !j.contains("people"))
            throw Error(ErrorCode::bad_input, "pose record needs frame and people fields");
        int frame = j["frame"].get<int>();
        if (frame < 0) throw Error(ErrorCode::bad_input, "negative frame index");
        if (static_cast<int>(frames.size()) <= frame) frames.resize(frame + 1);
        std::vector<trajkit::PersonDetection> people;
        for (const auto& pj : j["people"]) {
            const auto& joints = pj.at("joints");
            if (joints.size() != trajkit::kPoseJointCount)
                throw Error(ErrorCode::bad_input, "person record must have 18 joints");
            trajkit::PersonDetection person;
            for (int k = 0; k < trajkit::kPoseJointCount; ++k) {
                const auto& kp = joints[k];
                person.joints[k] = {kp[0].get<double>(), kp[1].get<double>(),
                                    kp[2].get<double>() != 0.0};
            }
            people.push_back(person);
        }
        frames[frame] = std::move(people);
    }
    return frames;
}

void write_pose_jsonl(const std::string& path,
                      const std::vector<std::vector<trajkit::PersonDetection>>& frames) {
    auto out = open_out(path);
    for (size_t t = 0; t < frames.size(); ++t) {
        json people = json::array();
        for (const auto& person : frames[t]) {
            json joints = json::array();
            for (const auto& kp : person.joints) {
                // zero coordinates for undetected joints, by convention
                if (kp.present)
                    joints.push_back({kp.x, kp.y, 1});
                else
                    joints.push_back({0.0, 0.0, 0});
            }
            people.push_back({{"joints", joints}});
        }
        json record = {{"frame", t}, {"people", people}};
        out << record.dump() << "\n";
    }
}

trajkit::JointTrajectories read_trajectories_json(const std::string& path) {
    auto in = open_in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = parse_json(text, path);
    trajkit::JointTrajectories traj;
    traj.fps = j.at("fps").get<double>();
    const auto& coords = j.at("coords");
    traj.coords.resize(coords.size());
    for (size_t t = 0; t < coords.size(); ++t) {
        if (coords[t].size() != trajkit::kTrajectoryJointCount)
            throw Error(ErrorCode::bad_input, "trajectory row must have 12 joints");
        for (int k = 0; k < trajkit::kTrajectoryJointCount; ++k) {
            const auto& p = coords[t][k];
            if (p.is_null()) {
                traj.coords[t][k] = {trajkit::kMissing, trajkit::kMissing};
            } else {
                traj.coords[t][k] = {p[0].get<double>(), p[1].get<double>()};
            }
        }
    }
    return traj;
}

void write_trajectories_json(const std::string& path, const trajkit::JointTrajectories& traj) {
    json joints = json::array();
    for (const char* name : trajkit::trajectory_joint_names()) joints.push_back(name);
    json coords = json::array();
    for (const auto& frame : traj.coords) {
        json row = json::array();
        for (const auto& p : frame) {
            if (std::isnan(p.x) || std::isnan(p.y))
                row.push_back(nullptr);
            else
                row.push_back({p.x, p.y});
        }
        coords.push_back(row);
    }
    json j = {{"fps", traj.fps}, {"joints", joints}, {"coords", coords}};
    open_out(path) << j.dump(1) << "\n";
}

namespace {

constexpr uint32_t kRawMagic = 0x534F4D46u;  // "FMOS"

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<char*>(b), 4);
}

fmoc::GrayFrame read_pgm(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw Error(ErrorCode::bad_input, path + ": not a binary PGM (P5)");
    int w = 0, h = 0, maxval = 0;
    auto next_int = [&in, &path]() {
        // skip whitespace and '#' comments
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string skip;
                std::getline(in, skip);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        int v;
        if (!(in >> v)) throw Error(ErrorCode::bad_input, path + ": truncated PGM header");
        return v;
    };
    w = next_int();
    h = next_int();
    maxval = next_int();
    if (maxval != 255) throw Error(ErrorCode::bad_input, path + ": PGM maxval must be 255");
    in.get();  // single whitespace after header
    fmoc::GrayFrame frame(w, h);
    in.read(reinterpret_cast<char*>(frame.pixels.data()), frame.pixels.size());
    if (!in) throw Error(ErrorCode::bad_input, path + ": truncated PGM data");
    return frame;
}

}  // namespace

std::vector<fmoc::GrayFrame> read_frames(const std::string& path) {
    if (fs::is_directory(path)) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".pgm") files.push_back(entry.path().string());
        }
        if (files.empty())
            throw Error(ErrorCode::bad_input, path + ": no .pgm files in directory");
        std::sort(files.begin(), files.end());
        std::vector<fmoc::GrayFrame> frames;
        for (const auto& f : files) frames.push_back(read_pgm(f));
        for (const auto& f : frames)
            if (f.width != frames[0].width || f.height != frames[0].height)
                throw Error(ErrorCode::bad_input, "frame dimensions differ within sequence");
        return frames;
    }

    auto in = open_in(path, std::ios::binary);
    if (read_u32(in) != kRawMagic)
        throw Error(ErrorCode::bad_input, path + ": bad raw stream magic");
    uint32_t w = read_u32(in), h = read_u32(in), count = read_u32(in);
    if (w == 0 || h == 0 || w > 16384 || h > 16384)
        throw Error(ErrorCode::bad_input, path + ": implausible raw stream dimensions");
    std::vector<fmoc::GrayFrame> frames;
    frames.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        fmoc::GrayFrame frame(static_cast<int>(w), static_cast<int>(h));
        in.read(reinterpret_cast<char*>(frame.pixels.data()), frame.pixels.size());
        if (!in) throw Error(ErrorCode::bad_input, path + ": truncated raw stream");
        frames.push_back(std::move(frame));
    }
    return frames;
}

void write_pgm(const std::string& path, const fmoc::GrayFrame& frame) {
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), frame.pixels.size());
}

void write_pgm_dir(const std::string& dir, const std::vector<fmoc::GrayFrame>& frames) {
    fs::create_directories(dir);
    char name[32];
    for (size_t i = 0; i < frames.size(); ++i) {
        std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
        write_pgm((fs::path(dir) / name).string(), frames[i]);
    }
}

void write_raw_stream(const std::string& path, const std::vector<fmoc::GrayFrame>& frames) {
    auto out = open_out(path, std::ios::binary);
    write_u32(out, kRawMagic);
    write_u32(out, frames.empty() ? 0 : frames[0].width);
    write_u32(out, frames.empty() ? 0 : frames[0].height);
    write_u32(out, static_cast<uint32_t>(frames.size()));
    for (const auto& f : frames)
        out.write(reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size());
}

std::vector<fmoc::FrameCandidates> read_candidates_jsonl(const std::string& path) {
    auto in = open_in(path);
    std::vector<fmoc::FrameCandidates> stream;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json(line, path + ":" + std::to_string(line_no));
        fmoc::FrameCandidates fc;
        fc.frame = j.at("frame").get<int>();
        for (const auto& cj : j.at("candidates")) {
            fmoc::MotionCandidate c;
            c.x0 = cj.at("x0").get<int>();
            c.y0 = cj.at("y0").get<int>();
            c.x1 = cj.at("x1").get<int>();
            c.y1 = cj.at("y1").get<int>();
            c.centroid = {cj.at("cx").get<double>(), cj.at("cy").get<double>()};
            c.area = cj.at("area").get<int>();
            fc.candidates.push_back(c);
        }
        stream.push_back(std::move(fc));
    }
    std::stable_sort(stream.begin(), stream.end(),
                     [](const auto& a, const auto& b) { return a.frame < b.frame; });
    return stream;
}

void write_candidates_jsonl(const std::string& path,
                            const std::vector<fmoc::FrameCandidates>& stream) {
    auto out = open_out(path);
    for (const auto& fc : stream) {
        json cands = json::array();
        for (const auto& c : fc.candidates) {
            cands.push_back({{"x0", c.x0},
                             {"y0", c.y0},
                             {"x1", c.x1},
                             {"y1", c.y1},
                             {"cx", c.centroid.x},
                             {"cy", c.centroid.y},
                             {"area", c.area}});
        }
        json record = {{"frame", fc.frame}, {"candidates", cands}};
        out << record.dump() << "\n";
    }
}

TrackFile read_track_json(const std::string& path) {
    auto in = open_in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = parse_json(text, path);
    TrackFile tf;
    for (const auto& pj : j.at("points")) {
        gbcv::TrackPoint p;
        p.frame = pj.at("frame").get<int>();
        p.pos = {pj.at("x").get<double>(), pj.at("y").get<double>()};
        p.inferred = pj.value("inferred", false);
        tf.track.points.push_back(p);
    }
    if (j.contains("release_frame") && !j["release_frame"].is_null())
        tf.release_frame = j["release_frame"].get<int>();
    if (j.contains("speed_mph") && !j["speed_mph"].is_null())
        tf.speed_mph = j["speed_mph"].get<double>();
    if (j.contains("points_3d"))
        for (const auto& pj : j["points_3d"])
            tf.points_3d.push_back({pj[0].get<double>(), pj[1].get<double>(),
                                    pj[2].get<double>()});
    return tf;
}

void write_track_json(const std::string& path, const TrackFile& tf) {
    json points = json::array();
    for (const auto& p : tf.track.points)
        points.push_back({{"frame", p.frame},
                          {"x", p.pos.x},
                          {"y", p.pos.y},
                          {"inferred", p.inferred}});
    json j = {{"points", points}, {"mean_step_px", tf.track.mean_step()}};
    j["release_frame"] = tf.release_frame ? json(*tf.release_frame) : json(nullptr);
    if (tf.speed_mph) {
        j["speed_mph"] = *tf.speed_mph;
        json p3 = json::array();
        for (const auto& p : tf.points_3d) p3.push_back({p.x, p.y, p.z});
        j["points_3d"] = p3;
    }
    open_out(path) << j.dump(1) << "\n";
}

events::EventTimeline read_timeline_json(const std::string& path) {
    auto in = open_in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = parse_json(text, path);
    events::EventTimeline tl;
    auto opt_int = [&j](const char* key) -> std::optional<int> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<int>();
    };
    tl.first_movement = opt_int("first_movement");
    tl.first_movement_refined = opt_int("first_movement_refined");
    tl.release = opt_int("release");
    tl.leg_raise = opt_int("leg_raise");
    tl.foot_down = opt_int("foot_down");
    tl.first_step = opt_int("first_step");
    tl.fps = number_or_null(j.value("fps", json(30.0)), 30.0);
    return tl;
}

void write_timeline_json(const std::string& path, const events::EventTimeline& tl) {
    auto put = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    json j = {{"first_movement", put(tl.first_movement)},
              {"first_movement_refined", put(tl.first_movement_refined)},
              {"release", put(tl.release)},
              {"leg_raise", put(tl.leg_raise)},
              {"foot_down", put(tl.foot_down)},
              {"first_step", put(tl.first_step)},
              {"fps", tl.fps}};
    open_out(path) << j.dump(1) << "\n";
}

std::vector<batglove::DetectorBox> read_detections_jsonl(const std::string& path) {
    auto in = open_in(path);
    std::vector<batglove::DetectorBox> boxes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_json(line, path + ":" + std::to_string(line_no));
        batglove::DetectorBox box;
        box.frame = j.at("frame").get<int>();
        std::string cls = j.at("class").get<std::string>();
        if (cls == "bat")
            box.object = batglove::ObjectClass::bat;
        else if (cls == "glove")
            box.object = batglove::ObjectClass::glove;
        else
            throw Error(ErrorCode::bad_input, "unknown detection class: " + cls);
        box.aabb = Roi{{j.at("x0").get<double>(), j.at("y0").get<double>()},
                       {j.at("x1").get<double>(), j.at("y1").get<double>()}};
        box.score = j.at("score").get<double>();
        boxes.push_back(box);
    }
    return boxes;
}

void write_detections_jsonl(const std::string& path,
                            const std::vector<batglove::DetectorBox>& boxes) {
    auto out = open_out(path);
    for (const auto& b : boxes) {
        json j = {{"frame", b.frame},
                  {"class", b.object == batglove::ObjectClass::bat ? "bat" : "glove"},
                  {"x0", b.aabb.p1.x},
                  {"y0", b.aabb.p1.y},
                  {"x1", b.aabb.p2.x},
                  {"y1", b.aabb.p2.y},
                  {"score", b.score}};
        out << j.dump() << "\n";
    }
}

namespace {

const char* bat_source_name(batglove::BatSource s) {
    switch (s) {
        case batglove::BatSource::detector: return "detector";
        case batglove::BatSource::fmo: return "fmo";
        case batglove::BatSource::missing: return "missing";
    }
    return "missing";
}

}  // namespace

void write_bat_track_json(const std::string& path, const batglove::BatTrack& track) {
    json frames = json::array();
    for (size_t t = 0; t < track.frames.size(); ++t) {
        const auto& f = track.frames[t];
        json fj = {{"frame", track.first_frame + static_cast<int>(t)},
                   {"source", bat_source_name(f.source)}};
        if (f.source != batglove::BatSource::missing) {
            fj["x0"] = f.aabb.p1.x;
            fj["y0"] = f.aabb.p1.y;
            fj["x1"] = f.aabb.p2.x;
            fj["y1"] = f.aabb.p2.y;
        }
        fj["tip"] = f.tip ? json({f.tip->x, f.tip->y}) : json(nullptr);
        fj["base"] = f.base ? json({f.base->x, f.base->y}) : json(nullptr);
        frames.push_back(fj);
    }
    json j = {{"first_frame", track.first_frame}, {"frames", frames}};
    open_out(path) << j.dump(1) << "\n";
}

batglove::BatTrack read_bat_track_json(const std::string& path) {
    auto in = open_in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json j = parse_json(text, path);
    batglove::BatTrack track;
    track.first_frame = j.at("first_frame").get<int>();
    for (const auto& fj : j.at("frames")) {
        batglove::BatFrame f;
        std::string source = fj.at("source").get<std::string>();
        f.source = source == "detector" ? batglove::BatSource::detector
                   : source == "fmo"    ? batglove::BatSource::fmo
                                        : batglove::BatSource::missing;
        if (f.source != batglove::BatSource::missing)
            f.aabb = Roi{{fj.at("x0").get<double>(), fj.at("y0").get<double>()},
                         {fj.at("x1").get<double>(), fj.at("y1").get<double>()}};
        if (fj.contains("tip") && !fj["tip"].is_null())
            f.tip = Vec2{fj["tip"][0].get<double>(), fj["tip"][1].get<double>()};
        if (fj.contains("base") && !fj["base"].is_null())
            f.base = Vec2{fj["base"][0].get<double>(), fj["base"][1].get<double>()};
        track.frames.push_back(f);
    }
    return track;
}

namespace {

constexpr uint32_t kDatasetMagic = 0x53445247u;     // "GRDS"
constexpr uint32_t kCheckpointMagic = 0x434D5247u;  // "GRMC"
constexpr uint32_t kFormatVersion = 1;

void write_f64(std::ostream& out, double v) {
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(&v), 8);
}

double read_f64(std::istream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

}  // namespace

void write_dataset(const std::string& path, const mccnn::Dataset& data) {
    auto out = open_out(path, std::ios::binary);
    write_u32(out, kDatasetMagic);
    write_u32(out, kFormatVersion);
    write_u32(out, static_cast<uint32_t>(data.samples.size()));
    write_u32(out, static_cast<uint32_t>(data.n_channels));
    write_u32(out, static_cast<uint32_t>(data.length));
    write_u32(out, static_cast<uint32_t>(data.n_classes));
    std::string catalog;
    for (size_t i = 0; i < data.catalog.size(); ++i) {
        if (i) catalog += ",";
        catalog += data.catalog[i];
    }
    write_u32(out, static_cast<uint32_t>(catalog.size()));
    out.write(catalog.data(), catalog.size());
    for (const auto& sample : data.samples) {
        for (double v : sample.channels) write_f64(out, v);
        write_u32(out, static_cast<uint32_t>(sample.label));
    }
}

mccnn::Dataset read_dataset(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    if (read_u32(in) != kDatasetMagic)
        throw Error(ErrorCode::bad_input, path + ": not a dataset file");
    if (read_u32(in) != kFormatVersion)
        throw Error(ErrorCode::bad_input, path + ": unsupported dataset version");
    mccnn::Dataset data;
    uint32_t n_samples = read_u32(in);
    data.n_channels = static_cast<int>(read_u32(in));
    data.length = static_cast<int>(read_u32(in));
    data.n_classes = static_cast<int>(read_u32(in));
    uint32_t catalog_len = read_u32(in);
    std::string catalog(catalog_len, '\0');
    in.read(catalog.data(), catalog_len);
    size_t pos = 0;
    while (pos < catalog.size()) {
        size_t comma = catalog.find(',', pos);
        if (comma == std::string::npos) comma = catalog.size();
        data.catalog.push_back(catalog.substr(pos, comma - pos));
        pos = comma + 1;
    }
    const size_t values = static_cast<size_t>(data.n_channels) * data.length;
    for (uint32_t i = 0; i < n_samples; ++i) {
        mccnn::TrajectorySample sample;
        sample.channels.resize(values);
        for (size_t v = 0; v < values; ++v) sample.channels[v] = read_f64(in);
        sample.label = static_cast<int>(read_u32(in));
        if (!in) throw Error(ErrorCode::bad_input, path + ": truncated dataset");
        data.samples.push_back(std::move(sample));
    }
    return data;
}

void write_checkpoint(const std::string& path, const mccnn::MccnnNet& net) {
    auto out = open_out(path, std::ios::binary);
    const auto& cfg = net.config();
    write_u32(out, kCheckpointMagic);
    write_u32(out, kFormatVersion);
    for (int v : {cfg.channels, cfg.length, cfg.n_classes, cfg.conv1_filters, cfg.conv1_kernel,
                  cfg.conv2_filters, cfg.conv2_kernel, cfg.fc1_units})
        write_u32(out, static_cast<uint32_t>(v));
    bool has_stats = !net.norm_stats.mean.empty();
    write_u32(out, has_stats ? 1 : 0);
    if (has_stats) {
        for (double v : net.norm_stats.mean) write_f64(out, v);
        for (double v : net.norm_stats.scale) write_f64(out, v);
    }
    for (const auto* tensor : net.parameter_tensors())
        for (double v : *tensor) write_f64(out, v);
}

mccnn::MccnnNet read_checkpoint(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    if (read_u32(in) != kCheckpointMagic)
        throw Error(ErrorCode::bad_input, path + ": not a model checkpoint");
    if (read_u32(in) != kFormatVersion)
        throw Error(ErrorCode::bad_input, path + ": unsupported checkpoint version");
    mccnn::NetConfig cfg;
    cfg.channels = static_cast<int>(read_u32(in));
    cfg.length = static_cast<int>(read_u32(in));
    cfg.n_classes = static_cast<int>(read_u32(in));
    cfg.conv1_filters = static_cast<int>(read_u32(in));
    cfg.conv1_kernel = static_cast<int>(read_u32(in));
    cfg.conv2_filters = static_cast<int>(read_u32(in));
    cfg.conv2_kernel = static_cast<int>(read_u32(in));
    cfg.fc1_units = static_cast<int>(read_u32(in));
    mccnn::MccnnNet net(cfg);
    if (read_u32(in) == 1) {
        net.norm_stats.mean.resize(cfg.channels);
        net.norm_stats.scale.resize(cfg.channels);
        for (double& v : net.norm_stats.mean) v = read_f64(in);
        for (double& v : net.norm_stats.scale) v = read_f64(in);
    }
    for (auto* tensor : net.parameter_tensors())
        for (double& v : *tensor) v = read_f64(in);
    if (!in) throw Error(ErrorCode::bad_input, path + ": truncated checkpoint");
    return net;
}

}  // namespace gamerecon::io
