#include "gamerecon/trajkit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "gamerecon/error.hpp"

namespace gamerecon::trajkit {

const std::array<const char*, kPoseJointCount>& pose_joint_names() {
    static const std::array<const char*, kPoseJointCount> names = {
        "nose",    "neck",       "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
        "l_elbow", "l_wrist",    "r_hip",      "r_knee",  "r_ankle", "l_hip",
        "l_knee",  "l_ankle",    "r_eye",      "l_eye",   "r_ear",   "l_ear"};
    return names;
}

const std::array<const char*, kTrajectoryJointCount>& trajectory_joint_names() {
    static const std::array<const char*, kTrajectoryJointCount> names = {
        "r_shoulder", "r_elbow", "r_wrist", "l_shoulder", "l_elbow", "l_wrist",
        "r_hip",      "r_knee",  "r_ankle", "l_hip",      "l_knee",  "l_ankle"};
    return names;
}

const std::array<int, 8>& stable_joint_indices() {
    static const std::array<int, 8> idx = {kRShoulder, kLShoulder, kRHip,   kLHip,
                                           kRKnee,     kLKnee,     kRAnkle, kLAnkle};
    return idx;
}

std::optional<Roi> PersonDetection::stable_joint_box() const {
    bool any = false;
    Roi box{{0, 0}, {0, 0}};
    for (int j : stable_joint_indices()) {
        const Keypoint& kp = joints[j];
        if (!kp.present) continue;
        if (!any) {
            box.p1 = box.p2 = {kp.x, kp.y};
            any = true;
        } else {
            box.p1.x = std::min(box.p1.x, kp.x);
            box.p1.y = std::min(box.p1.y, kp.y);
            box.p2.x = std::max(box.p2.x, kp.x);
            box.p2.y = std::max(box.p2.y, kp.y);
        }
    }
    if (!any) return std::nullopt;
    return box;
}

void JointHistory::update(const PersonDetection& detection) {
    for (int j = 0; j < kPoseJointCount; ++j) {
        if (detection.joints[j].present)
            last_seen_[j] = Vec2{detection.joints[j].x, detection.joints[j].y};
    }
}

bool JointHistory::any() const {
    for (const auto& v : last_seen_)
        if (v) return true;
    return false;
}

Roi compute_roi(const PersonDetection& prev_target, const JointHistory& history,
                const Vec2& padding, double frame_w, double frame_h) {
    bool any = false;
    Vec2 lo{0, 0}, hi{0, 0};
    for (int j = 0; j < kPoseJointCount; ++j) {
        std::optional<Vec2> p;
        if (prev_target.joints[j].present)
            p = Vec2{prev_target.joints[j].x, prev_target.joints[j].y};
        else if (history.last_seen(j))
            p = history.last_seen(j);
        if (!p) continue;
        if (!any) {
            lo = hi = *p;
            any = true;
        } else {
            lo.x = std::min(lo.x, p->x);
            lo.y = std::min(lo.y, p->y);
            hi.x = std::max(hi.x, p->x);
            hi.y = std::max(hi.y, p->y);
        }
    }
    if (!any) throw Error(ErrorCode::no_history, "no joint ever observed for this player");
    Roi roi{lo - padding, hi + padding};
    return roi.clipped(frame_w, frame_h);
}

std::optional<PersonDetection> localize_target(const std::vector<PersonDetection>& people,
                                               const PersonDetection& prev_target,
                                               double min_iou, double max_iou) {
    auto prev_box = prev_target.stable_joint_box();
    if (!prev_box) return std::nullopt;

    int best = -1;
    double best_iou = 0.0;
    int above_max = 0;
    for (size_t i = 0; i < people.size(); ++i) {
        auto box = people[i].stable_joint_box();
        if (!box) continue;
        double v = iou(*box, *prev_box);
        if (v > max_iou) ++above_max;
        if (v > best_iou) {
            best_iou = v;
            best = static_cast<int>(i);
        }
    }
    if (best < 0 || best_iou <= min_iou) return std::nullopt;
    if (above_max > 1) return std::nullopt;
    return people[best];
}

Series interpolate_gaps(const Series& series) {
    const int n = static_cast<int>(series.size());
    int first = -1, last = -1;
    for (int i = 0; i < n; ++i) {
        if (!is_missing(series[i])) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw Error(ErrorCode::all_missing, "series has no present values");

    Series out(series);
    for (int i = 0; i < first; ++i) out[i] = series[first];
    for (int i = last + 1; i < n; ++i) out[i] = series[last];

    int prev = first;
    for (int i = first + 1; i <= last; ++i) {
        if (is_missing(series[i])) continue;
        if (i > prev + 1) {
            double step = (series[i] - series[prev]) / (i - prev);
            for (int k = prev + 1; k < i; ++k) out[k] = series[prev] + step * (k - prev);
        }
        prev = i;
    }
    return out;
}

namespace {

struct Biquad {
    double b0, b1, b2;  // numerator
    double a1, a2;      // denominator (a0 normalized to 1)
};

// Butterworth low-pass as a cascade of bilinear-transformed second-order
// sections (plus a first-order section for odd orders). Each section is
// rescaled so its DC gain is exactly one.
std::vector<Biquad> butterworth_sections(double cutoff_hz, int order, double fps) {
    const double K = std::tan(std::numbers::pi * cutoff_hz / fps);  // pre-warped
    std::vector<Biquad> sections;
    int pairs = order / 2;
    for (int k = 0; k < pairs; ++k) {
        double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
        double c1 = 2.0 * std::sin(theta);  // -2*cos of pole angle from the negative real axis
        double den = 1.0 + c1 * K + K * K;
        Biquad s;
        s.b0 = K * K / den;
        s.b1 = 2.0 * s.b0;
        s.b2 = s.b0;
        s.a1 = 2.0 * (K * K - 1.0) / den;
        s.a2 = (1.0 - c1 * K + K * K) / den;
        double g = (1.0 + s.a1 + s.a2) / (s.b0 + s.b1 + s.b2);
        s.b0 *= g;
        s.b1 *= g;
        s.b2 *= g;
        sections.push_back(s);
    }
    if (order % 2 == 1) {
        double den = K + 1.0;
        Biquad s;
        s.b0 = K / den;
        s.b1 = s.b0;
        s.b2 = 0.0;
        s.a1 = (K - 1.0) / den;
        s.a2 = 0.0;
        double g = (1.0 + s.a1) / (s.b0 + s.b1);
        s.b0 *= g;
        s.b1 *= g;
        sections.push_back(s);
    }
    return sections;
}

// Direct form II transposed, with the state initialized to steady state for
// the first sample so constant inputs pass through untouched.
void filter_inplace(const Biquad& s, std::vector<double>& x) {
    if (x.empty()) return;
    double z1 = ((s.b1 - s.a1) + (s.b2 - s.a2)) * x[0];
    double z2 = (s.b2 - s.a2) * x[0];
    for (double& v : x) {
        double y = s.b0 * v + z1;
        z1 = s.b1 * v - s.a1 * y + z2;
        z2 = s.b2 * v - s.a2 * y;
        v = y;
    }
}

}  // namespace

Series lowpass_filter(const Series& series, double cutoff_hz, int order, double fps) {
    if (!(cutoff_hz > 0.0) || cutoff_hz >= fps / 2.0)
        throw Error(ErrorCode::invalid_cutoff, "cutoff must lie in (0, fps/2)");
    if (order < 1) throw Error(ErrorCode::invalid_cutoff, "filter order must be >= 1");
    for (double v : series)
        if (is_missing(v))
            throw Error(ErrorCode::bad_input, "lowpass_filter requires a gap-free series");

    const int n = static_cast<int>(series.size());
    if (n < 2) return series;

    // Odd-reflection padding at both ends shields the signal from edge
    // transients of the forward and backward passes.
    int pad = std::min(3 * (2 * order + 1), n - 1);
    std::vector<double> x;
    x.reserve(n + 2 * pad);
    for (int i = pad; i >= 1; --i) x.push_back(2.0 * series[0] - series[i]);
    x.insert(x.end(), series.begin(), series.end());
    for (int i = 1; i <= pad; ++i) x.push_back(2.0 * series[n - 1] - series[n - 1 - i]);

    auto sections = butterworth_sections(cutoff_hz, order, fps);
    for (const auto& s : sections) filter_inplace(s, x);
    std::reverse(x.begin(), x.end());
    for (const auto& s : sections) filter_inplace(s, x);
    std::reverse(x.begin(), x.end());

    return Series(x.begin() + pad, x.begin() + pad + n);
}

namespace {

// Cox–de Boor evaluation of the cubic B-spline basis at parameter u.
// knots is a clamped knot vector; returns the index of the first of the four
// non-zero basis functions and their values.
int cubic_basis(const std::vector<double>& knots, int n_ctrl, double u, double out[4]) {
    const int degree = 3;
    int span = degree;
    int hi = n_ctrl;  // knots has n_ctrl + degree + 1 entries
    while (span < hi - 1 && u >= knots[span + 1]) ++span;

    double left[4], right[4];
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[r + 1] + left[j - r];
            double temp = denom != 0.0 ? out[r] / denom : 0.0;
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
    return span - degree;
}

}  // namespace

Series bspline_fit(const Series& series, double knot_spacing) {
    const int n = static_cast<int>(series.size());
    std::vector<int> present;
    for (int i = 0; i < n; ++i)
        if (!is_missing(series[i])) present.push_back(i);
    if (present.size() < 4)
        throw Error(ErrorCode::underdetermined, "b-spline fit needs at least four present samples");

    const double t0 = present.front();
    const double t1 = present.back();
    const double span = std::max(1.0, t1 - t0);
    if (knot_spacing <= 0.0) knot_spacing = 1.0;
    int n_ctrl = static_cast<int>(std::lround(span / knot_spacing)) + 3;
    n_ctrl = std::clamp(n_ctrl, 4, static_cast<int>(present.size()));

    // Clamped uniform knot vector over [0, 1] (parameters normalized for
    // conditioning).
    const int degree = 3;
    const int n_interior = n_ctrl - degree - 1;
    std::vector<double> knots(n_ctrl + degree + 1);
    for (int i = 0; i <= degree; ++i) {
        knots[i] = 0.0;
        knots[knots.size() - 1 - i] = 1.0;
    }
    for (int i = 1; i <= n_interior; ++i)
        knots[degree + i] = static_cast<double>(i) / (n_interior + 1);

    auto param = [&](double t) { return std::clamp((t - t0) / span, 0.0, 1.0); };

    Eigen::MatrixXd BtB = Eigen::MatrixXd::Zero(n_ctrl, n_ctrl);
    Eigen::VectorXd Btv = Eigen::VectorXd::Zero(n_ctrl);
    double basis[4];
    for (int i : present) {
        int first = cubic_basis(knots, n_ctrl, param(i), basis);
        for (int r = 0; r < 4; ++r) {
            Btv(first + r) += basis[r] * series[i];
            for (int c = 0; c < 4; ++c) BtB(first + r, first + c) += basis[r] * basis[c];
        }
    }

    // Fourth-difference penalty: regularizes rank deficiency from clustered
    // samples while leaving cubic polynomials untouched.
    const double lambda = 1e-8;
    if (n_ctrl >= 5) {
        static const double d[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
        for (int r = 0; r + 4 < n_ctrl; ++r)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) BtB(r + i, r + j) += lambda * d[i] * d[j];
    } else {
        for (int i = 0; i < n_ctrl; ++i) BtB(i, i) += lambda;
    }

    Eigen::VectorXd coef = BtB.ldlt().solve(Btv);

    Series out(n);
    for (int t = 0; t < n; ++t) {
        int first = cubic_basis(knots, n_ctrl, param(t), basis);
        double v = 0.0;
        for (int r = 0; r < 4; ++r) v += basis[r] * coef(first + r);
        out[t] = v;
    }
    return out;
}

Series JointTrajectories::channel(int joint, int coord) const {
    Series s(coords.size());
    for (size_t t = 0; t < coords.size(); ++t)
        s[t] = coord == 0 ? coords[t][joint].x : coords[t][joint].y;
    return s;
}

void JointTrajectories::set_channel(int joint, int coord, const Series& values) {
    for (size_t t = 0; t < coords.size(); ++t) {
        if (coord == 0)
            coords[t][joint].x = values[t];
        else
            coords[t][joint].y = values[t];
    }
}

PoseTracker::PoseTracker(const TrackerConfig& config, double frame_w, double frame_h)
    : config_(config), frame_w_(frame_w), frame_h_(frame_h) {}

std::optional<PersonDetection> PoseTracker::push(const std::vector<PersonDetection>& people) {
    std::optional<PersonDetection> selected;
    if (!seeded_) {
        // Seed on the person whose stable-joint box is nearest (or contains)
        // the configured start position.
        double best_dist = std::numeric_limits<double>::infinity();
        for (const auto& person : people) {
            auto box = person.stable_joint_box();
            if (!box) continue;
            double d = box->contains(config_.init_center)
                           ? 0.0
                           : norm(box->center() - config_.init_center);
            if (d < best_dist) {
                best_dist = d;
                selected = person;
            }
        }
        if (selected) seeded_ = true;
    } else if (last_target_) {
        selected = localize_target(people, *last_target_, config_.min_iou, config_.max_iou);
    }

    if (selected) {
        last_target_ = selected;  // re-anchor on the most recent resolved detection
        history_.update(*selected);
    }
    selected_.push_back(selected);
    return selected;
}

std::optional<Roi> PoseTracker::next_roi() const {
    if (!last_target_ || !history_.any()) return std::nullopt;
    // Padding defaults assume a person box roughly a third of a 1080-pixel
    // frame; scale it with the apparent size of the current target.
    auto box = last_target_->stable_joint_box();
    double scale = 1.0;
    if (box && config_.reference_frame_height > 0.0)
        scale = std::max(box->height(), 1.0) / (config_.reference_frame_height / 3.0);
    Vec2 padding = {std::max(config_.padding.x * scale, 1.0),
                    std::max(config_.padding.y * scale, 1.0)};
    return compute_roi(*last_target_, history_, padding, frame_w_, frame_h_);
}

JointTrajectories PoseTracker::trajectories(double fps) const {
    JointTrajectories traj;
    traj.fps = fps;
    traj.coords.resize(selected_.size());
    for (size_t t = 0; t < selected_.size(); ++t) {
        for (int j = 0; j < kTrajectoryJointCount; ++j) {
            const int pose_idx = j + 2;
            if (selected_[t] && selected_[t]->joints[pose_idx].present) {
                traj.coords[t][j] = {selected_[t]->joints[pose_idx].x,
                                     selected_[t]->joints[pose_idx].y};
            } else {
                traj.coords[t][j] = {kMissing, kMissing};
            }
        }
    }
    return traj;
}

JointTrajectories smooth_trajectories(const JointTrajectories& raw, const TrackerConfig& config) {
    JointTrajectories out = raw;
    for (int j = 0; j < kTrajectoryJointCount; ++j) {
        for (int coord = 0; coord < 2; ++coord) {
            Series s = raw.channel(j, coord);
            switch (config.smoother) {
                case Smoother::none:
                    out.set_channel(j, coord, s);
                    break;
                case Smoother::butterworth: {
                    Series filled = interpolate_gaps(s);
                    out.set_channel(j, coord,
                                    lowpass_filter(filled, config.butter_cutoff_hz,
                                                   config.butter_order, raw.fps));
                    break;
                }
                case Smoother::bspline:
                    out.set_channel(j, coord, bspline_fit(s, config.bspline_knot_spacing));
                    break;
            }
        }
    }
    return out;
}

}  // namespace gamerecon::trajkit
