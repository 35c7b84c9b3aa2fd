#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gamerecon/error.hpp"
#include "gamerecon/trajkit.hpp"

using namespace gamerecon;
using namespace gamerecon::trajkit;

namespace {

PersonDetection person_at(const std::vector<std::pair<int, Vec2>>& joints) {
    PersonDetection p;
    for (const auto& [idx, pos] : joints) p.joints[idx] = {pos.x, pos.y, true};
    return p;
}

// All stable joints spread over a box; convenient for IoU fixtures.
PersonDetection person_box(double x0, double y0, double x1, double y1) {
    PersonDetection p;
    const auto& idx = stable_joint_indices();
    p.joints[idx[0]] = {x0, y0, true};
    p.joints[idx[1]] = {x1, y0, true};
    p.joints[idx[2]] = {x0, y1, true};
    p.joints[idx[3]] = {x1, y1, true};
    for (size_t i = 4; i < idx.size(); ++i)
        p.joints[idx[i]] = {(x0 + x1) / 2, (y0 + y1) / 2, true};
    return p;
}

// Oracle: IoU by rasterizing both boxes on a fine pixel grid.
double iou_rasterized(const Roi& a, const Roi& b) {
    int inter = 0, uni = 0;
    int x0 = static_cast<int>(std::floor(std::min(a.p1.x, b.p1.x)));
    int x1 = static_cast<int>(std::ceil(std::max(a.p2.x, b.p2.x)));
    int y0 = static_cast<int>(std::floor(std::min(a.p1.y, b.p1.y)));
    int y1 = static_cast<int>(std::ceil(std::max(a.p2.y, b.p2.y)));
    const int sub = 4;  // subpixel sampling
    for (int y = y0 * sub; y < y1 * sub; ++y) {
        for (int x = x0 * sub; x < x1 * sub; ++x) {
            double px = (x + 0.5) / sub, py = (y + 0.5) / sub;
            bool in_a = px >= a.p1.x && px < a.p2.x && py >= a.p1.y && py < a.p2.y;
            bool in_b = px >= b.p1.x && px < b.p2.x && py >= b.p1.y && py < b.p2.y;
            if (in_a && in_b) ++inter;
            if (in_a || in_b) ++uni;
        }
    }
    return uni ? static_cast<double>(inter) / uni : 0.0;
}

}  // namespace

TEST_CASE("compute_roi spans min/max with padding") {
    JointHistory history;
    PersonDetection p = person_at({{kRShoulder, {10, 30}},
                                   {kLShoulder, {20, 30}},
                                   {kRHip, {15, 60}},
                                   {kRAnkle, {12, 45}}});
    history.update(p);
    Roi roi = compute_roi(p, history, {5, 5}, 1000, 1000);
    CHECK(roi.p1.x == doctest::Approx(5));
    CHECK(roi.p1.y == doctest::Approx(25));
    CHECK(roi.p2.x == doctest::Approx(25));
    CHECK(roi.p2.y == doctest::Approx(65));
}

TEST_CASE("compute_roi degenerate single point") {
    JointHistory history;
    PersonDetection p = person_at({{kRHip, {12, 12}}});
    history.update(p);
    Roi roi = compute_roi(p, history, {3, 3}, 100, 100);
    CHECK(roi.p1.x == doctest::Approx(9));
    CHECK(roi.p1.y == doctest::Approx(9));
    CHECK(roi.p2.x == doctest::Approx(15));
    CHECK(roi.p2.y == doctest::Approx(15));
}

TEST_CASE("compute_roi substitutes the last available coordinate") {
    // Three-frame fixture replayed by hand: the left wrist is seen at x=200
    // two frames ago, missing since; the box must still reach x=200.
    JointHistory history;
    PersonDetection f0 = person_at({{kLWrist, {200, 50}}, {kRHip, {100, 80}}});
    history.update(f0);
    PersonDetection f1 = person_at({{kRHip, {102, 81}}});
    history.update(f1);
    PersonDetection f2 = person_at({{kRHip, {104, 82}}, {kRShoulder, {104, 40}}});
    history.update(f2);

    Roi roi = compute_roi(f2, history, {0, 0}, 1000, 1000);
    CHECK(roi.p2.x == doctest::Approx(200));
    CHECK(roi.p1.y == doctest::Approx(40));
}

TEST_CASE("compute_roi clips to frame bounds and flags empty history") {
    JointHistory history;
    PersonDetection p = person_at({{kRHip, {5, 5}}});
    history.update(p);
    Roi roi = compute_roi(p, history, {20, 20}, 100, 100);
    CHECK(roi.p1.x == 0);
    CHECK(roi.p1.y == 0);

    JointHistory empty;
    PersonDetection nothing;
    CHECK_THROWS_AS(compute_roi(nothing, empty, {5, 5}, 100, 100), Error);
}

TEST_CASE("iou basics") {
    Roi a{{0, 0}, {10, 10}};
    CHECK(iou(a, a) == doctest::Approx(1.0));
    Roi b{{20, 20}, {30, 30}};
    CHECK(iou(a, b) == doctest::Approx(0.0));
    Roi c{{5, 0}, {15, 10}};
    CHECK(iou(a, c) == doctest::Approx(1.0 / 3.0));
    // degenerate zero-area boxes
    Roi point{{1, 1}, {1, 1}};
    CHECK(iou(point, point) == doctest::Approx(0.0));
}

TEST_CASE("iou matches the rasterized oracle on random boxes") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int i = 0; i < 200; ++i) {
        Roi a{{u(rng), u(rng)}, {0, 0}}, b{{u(rng), u(rng)}, {0, 0}};
        a.p2 = {a.p1.x + 1 + u(rng), a.p1.y + 1 + u(rng)};
        b.p2 = {b.p1.x + 1 + u(rng), b.p1.y + 1 + u(rng)};
        double direct = iou(a, b);
        double oracle = iou_rasterized(a, b);
        CHECK(direct == doctest::Approx(oracle).epsilon(0.05));
        CHECK(direct == doctest::Approx(iou(b, a)));  // symmetry
        CHECK(direct >= 0.0);
        CHECK(direct <= 1.0);
    }
}

TEST_CASE("localize_target picks the best-overlap person") {
    PersonDetection prev = person_box(100, 100, 160, 220);

    SUBCASE("single decent candidate wins") {
        PersonDetection cand = person_box(105, 102, 165, 222);
        auto got = localize_target({cand}, prev, 0.1, 0.5);
        REQUIRE(got.has_value());
        CHECK(got->joints[kRShoulder].x == doctest::Approx(105));
    }
    SUBCASE("two people above the upper bound means mixed up") {
        PersonDetection a = person_box(101, 101, 161, 221);
        PersonDetection b = person_box(99, 99, 159, 219);
        CHECK(!localize_target({a, b}, prev, 0.1, 0.5).has_value());
    }
    SUBCASE("best IoU below the lower threshold is rejected") {
        PersonDetection far = person_box(150, 210, 260, 380);
        CHECK(!localize_target({far}, prev, 0.1, 0.5).has_value());
    }
    SUBCASE("empty people list") {
        CHECK(!localize_target({}, prev, 0.1, 0.5).has_value());
    }
}

TEST_CASE("localize_target is translation invariant") {
    PersonDetection prev = person_box(100, 100, 160, 220);
    std::vector<PersonDetection> people = {person_box(104, 104, 164, 224),
                                           person_box(10, 10, 60, 120)};
    auto base = localize_target(people, prev, 0.1, 0.5);
    REQUIRE(base.has_value());

    Vec2 shift{37.0, -12.0};
    auto shifted_person = [&](PersonDetection p) {
        for (auto& kp : p.joints) {
            kp.x += shift.x;
            kp.y += shift.y;
        }
        return p;
    };
    std::vector<PersonDetection> moved;
    for (const auto& p : people) moved.push_back(shifted_person(p));
    auto got = localize_target(moved, shifted_person(prev), 0.1, 0.5);
    REQUIRE(got.has_value());
    CHECK(got->joints[kRShoulder].x ==
          doctest::Approx(base->joints[kRShoulder].x + shift.x));
}

TEST_CASE("interpolate_gaps") {
    SUBCASE("interior gap") {
        Series s = {1, kMissing, 3};
        auto out = interpolate_gaps(s);
        CHECK(out[1] == doctest::Approx(2));
    }
    SUBCASE("leading gap holds the first value") {
        Series s = {kMissing, kMissing, 5, 7};
        auto out = interpolate_gaps(s);
        CHECK(out[0] == doctest::Approx(5));
        CHECK(out[1] == doctest::Approx(5));
        CHECK(out[2] == doctest::Approx(5));
        CHECK(out[3] == doctest::Approx(7));
    }
    SUBCASE("long gap is a closed-form ramp") {
        Series s(22, kMissing);
        s[0] = 0;
        s[21] = 42;
        auto out = interpolate_gaps(s);
        for (int i = 0; i <= 21; ++i) CHECK(out[i] == doctest::Approx(2.0 * i));
    }
    SUBCASE("all missing throws") {
        Series s = {kMissing, kMissing};
        CHECK_THROWS_AS(interpolate_gaps(s), Error);
    }
    SUBCASE("idempotent and exact on gap-free input") {
        Series s = {3, 1, 4, 1, 5, 9, 2, 6};
        auto once = interpolate_gaps(s);
        CHECK(once == s);
        CHECK(interpolate_gaps(once) == once);
    }
}

TEST_CASE("lowpass_filter leaves constants untouched (unit DC gain)") {
    Series s(64, 17.25);
    auto out = lowpass_filter(s, 3.0, 4, 30.0);
    REQUIRE(out.size() == s.size());
    for (double v : out) CHECK(v == doctest::Approx(17.25).epsilon(1e-12));
}

TEST_CASE("lowpass_filter halves power at the cutoff after both passes") {
    // Analytic magnitude response: |H| = 1/sqrt(2) at the cutoff for any
    // order, squared by the forward-backward application.
    const double fps = 30.0, cutoff = 3.0;
    const int n = 900;
    Series s(n);
    for (int i = 0; i < n; ++i)
        s[i] = std::sin(2.0 * std::numbers::pi * cutoff * i / fps);
    auto out = lowpass_filter(s, cutoff, 4, fps);

    // Amplitude over the central region via a quadrature fit.
    double c = 0, q = 0;
    int count = 0;
    for (int i = n / 4; i < 3 * n / 4; ++i) {
        c += out[i] * std::sin(2.0 * std::numbers::pi * cutoff * i / fps);
        q += out[i] * std::cos(2.0 * std::numbers::pi * cutoff * i / fps);
        ++count;
    }
    double amplitude = 2.0 * std::sqrt(c * c + q * q) / count;
    CHECK(amplitude == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("lowpass_filter crushes Nyquist alternation") {
    const double fps = 30.0;
    const double cutoff = 0.2 * fps / 2.0;
    const int n = 400;
    Series s(n);
    for (int i = 0; i < n; ++i) s[i] = (i % 2 == 0) ? 1.0 : -1.0;
    auto out = lowpass_filter(s, cutoff, 4, fps);
    for (int i = n / 4; i < 3 * n / 4; ++i) CHECK(std::abs(out[i]) < 0.01);
}

TEST_CASE("lowpass_filter rejects cutoffs at or above Nyquist") {
    Series s(32, 0.0);
    CHECK_THROWS_AS(lowpass_filter(s, 15.0, 4, 30.0), Error);
    CHECK_THROWS_AS(lowpass_filter(s, 20.0, 4, 30.0), Error);
}

TEST_CASE("lowpass_filter is stable under double filtering") {
    std::mt19937 rng(11);
    std::normal_distribution<double> noise(0.0, 1.0);
    Series s(512);
    for (double& v : s) v = noise(rng);
    auto once = lowpass_filter(s, 3.0, 4, 30.0);
    auto twice = lowpass_filter(once, 3.0, 4, 30.0);

    double first_change = 0, second_change = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        first_change += (once[i] - s[i]) * (once[i] - s[i]);
        second_change += (twice[i] - once[i]) * (twice[i] - once[i]);
    }
    CHECK(std::sqrt(second_change) < 0.1 * std::sqrt(first_change));
}

TEST_CASE("bspline_fit reproduces cubic polynomials") {
    const int n = 60;
    Series s(n);
    auto poly = [](double t) { return 0.02 * t * t * t - 0.5 * t * t + 3.0 * t - 7.0; };
    for (int i = 0; i < n; ++i) s[i] = poly(i);
    // punch some gaps
    for (int i : {7, 8, 9, 23, 41}) s[i] = kMissing;
    auto out = bspline_fit(s, 5.0);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(poly(i)));
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(out[i] - poly(i)) / scale < 1e-6);
}

TEST_CASE("bspline_fit keeps constants constant across gaps") {
    Series s(40, 6.5);
    for (int i : {3, 4, 5, 20, 21, 33}) s[i] = kMissing;
    auto out = bspline_fit(s, 5.0);
    for (double v : out) CHECK(v == doctest::Approx(6.5).epsilon(1e-9));
}

TEST_CASE("bspline_fit needs four present samples") {
    Series s(20, kMissing);
    s[3] = 1.0;
    s[9] = 2.0;
    s[15] = 3.0;
    CHECK_THROWS_AS(bspline_fit(s, 5.0), Error);
}

TEST_CASE("both smoothers agree on a swing-like trajectory") {
    // Band-limited synthetic swing: the two pipelines should nearly match.
    const int n = 150;
    const double fps = 30.0;
    Series s(n);
    std::mt19937 rng(5);
    std::normal_distribution<double> noise(0.0, 0.5);
    for (int i = 0; i < n; ++i) {
        double t = i / fps;
        s[i] = 100.0 + 40.0 * std::sin(2.0 * std::numbers::pi * 0.8 * t) +
               10.0 * std::sin(2.0 * std::numbers::pi * 1.6 * t + 0.7) + noise(rng);
    }
    auto lp = lowpass_filter(interpolate_gaps(s), 3.0, 4, fps);
    auto bs = bspline_fit(s, 5.0);

    double range = *std::max_element(lp.begin(), lp.end()) -
                   *std::min_element(lp.begin(), lp.end());
    double max_dev = 0.0;
    for (int i = 0; i < n; ++i) max_dev = std::max(max_dev, std::abs(lp[i] - bs[i]));
    CHECK(max_dev / range < 0.05);
}

TEST_CASE("smoothers preserve length and never emit missing values") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::bernoulli_distribution drop(0.2);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 30 + trial * 7;
        JointTrajectories traj;
        traj.fps = 30.0;
        traj.coords.resize(n);
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < kTrajectoryJointCount; ++j) {
                if (drop(rng) && t > 0 && t + 1 < n)
                    traj.coords[t][j] = {kMissing, kMissing};
                else
                    traj.coords[t][j] = {u(rng), u(rng)};
            }
        TrackerConfig config;
        config.smoother = trial % 2 == 0 ? Smoother::butterworth : Smoother::bspline;
        auto smooth = smooth_trajectories(traj, config);
        REQUIRE(smooth.frame_count() == n);
        for (const auto& frame : smooth.coords)
            for (const auto& p : frame) {
                CHECK(!std::isnan(p.x));
                CHECK(!std::isnan(p.y));
            }
    }
}

TEST_CASE("PoseTracker re-anchors after a string of missing frames") {
    TrackerConfig config;
    config.init_center = {130, 160};
    PoseTracker tracker(config, 1000, 1000);

    auto target = person_box(100, 100, 160, 220);
    REQUIRE(tracker.push({target}).has_value());
    // two frames with nothing usable
    CHECK(!tracker.push({}).has_value());
    CHECK(!tracker.push({}).has_value());
    // resolved again close to the old position
    auto back = person_box(108, 104, 168, 224);
    CHECK(tracker.push({back}).has_value());

    auto traj = tracker.trajectories(30.0);
    REQUIRE(traj.frame_count() == 4);
    CHECK(std::isnan(traj.coords[1][0].x));
    CHECK(!std::isnan(traj.coords[3][0].x));
}
