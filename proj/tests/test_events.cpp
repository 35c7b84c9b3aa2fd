#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gamerecon/error.hpp"
#include "gamerecon/events.hpp"
#include "gamerecon/synthgen.hpp"

using namespace gamerecon;
using namespace gamerecon::events;
using namespace gamerecon::trajkit;

namespace {

// Standing skeleton with legs at fixed positions; knees 45 px above ankles.
JointTrajectories standing(int frames, Vec2 anchor = {300, 380}, double scale = 1.0) {
    JointTrajectories traj;
    traj.fps = 30.0;
    traj.coords.resize(frames);
    synthgen::PlayScript script;
    script.frame_count = frames;
    script.noise_px = 0.0;
    script.scale = scale;
    auto play = synthgen::scripted_play(script);
    (void)anchor;
    for (int t = 0; t < frames; ++t) traj.coords[t] = play.pitcher.coords[0];
    return traj;
}

fmoc::FrameCandidates near_leg(const JointTrajectories& joints, int frame) {
    fmoc::FrameCandidates fc;
    fc.frame = frame;
    fmoc::MotionCandidate c;
    c.centroid = joints.coords[frame][kTrajLAnkle] + Vec2{3.0, -2.0};
    c.area = 30;
    fc.candidates.push_back(c);
    return fc;
}

}  // namespace

TEST_CASE("first movement follows the qualifying-sequence walkthrough") {
    auto joints = standing(100);
    FirstMoveConfig config;  // min_length 5, max_apart 10

    SUBCASE("five qualifying frames within ten output the first one") {
        std::vector<fmoc::FrameCandidates> stream;
        for (int f : {59, 60, 62, 63, 65}) stream.push_back(near_leg(joints, f));
        auto got = detect_pitcher_first_move(stream, joints, config);
        REQUIRE(got.has_value());
        CHECK(*got == 59);
    }
    SUBCASE("an isolated earlier frame does not shift the output") {
        std::vector<fmoc::FrameCandidates> stream;
        stream.push_back(near_leg(joints, 56));
        for (int f : {59, 60, 62, 63, 65}) stream.push_back(near_leg(joints, f));
        auto got = detect_pitcher_first_move(stream, joints, config);
        REQUIRE(got.has_value());
        CHECK(*got == 59);
    }
    SUBCASE("isolated frames alone never qualify") {
        std::vector<fmoc::FrameCandidates> stream;
        for (int f : {20, 40, 60, 80}) stream.push_back(near_leg(joints, f));
        CHECK(!detect_pitcher_first_move(stream, joints, config).has_value());
    }
    SUBCASE("five frames spread wider than max_apart do not qualify") {
        std::vector<fmoc::FrameCandidates> stream;
        for (int f : {50, 53, 56, 59, 62}) stream.push_back(near_leg(joints, f));
        CHECK(!detect_pitcher_first_move(stream, joints, config).has_value());
    }
    SUBCASE("candidates far from the legs never qualify") {
        std::vector<fmoc::FrameCandidates> stream;
        for (int f = 50; f < 60; ++f) {
            fmoc::FrameCandidates fc;
            fc.frame = f;
            fmoc::MotionCandidate c;
            c.centroid = joints.coords[f][kTrajLAnkle] + Vec2{500.0, 0.0};
            c.area = 30;
            fc.candidates.push_back(c);
            stream.push_back(fc);
        }
        CHECK(!detect_pitcher_first_move(stream, joints, config).has_value());
    }
}

TEST_CASE("scripted leg lift at frame 40 is found within two frames") {
    synthgen::PlayScript script;
    script.first_move_apex = 44;
    script.first_move_onset_delta = 4;  // onset at 40
    script.candidate_onset_delay = 1;
    auto play = synthgen::scripted_play(script);
    FirstMoveConfig config;
    auto got = detect_pitcher_first_move(play.pitcher_candidates, play.pitcher, config);
    REQUIRE(got.has_value());
    CHECK(std::abs(*got - 40) <= 2);
}

TEST_CASE("refine_first_move finds the scripted apex") {
    synthgen::PlayScript script;
    script.first_move_apex = 44;
    auto play = synthgen::scripted_play(script);
    CHECK(refine_first_move(41, play.pitcher, 5) == 44);
}

TEST_CASE("refine_first_move tie-breaks to the earliest frame of a flat window") {
    auto joints = standing(60);
    CHECK(refine_first_move(30, joints, 5) == 25);  // n - p on constant input
    // and output always stays inside [n-p, n+p]
    for (int n : {5, 20, 55}) {
        int h = refine_first_move(n, joints, 5);
        CHECK(h >= n - 5);
        CHECK(h <= n + 5);
    }
}

TEST_CASE("refinement reduces output variance across aligned plays") {
    FirstMoveConfig config;
    std::mt19937 rng(4);
    std::uniform_int_distribution<int> delta(3, 6);
    std::uniform_int_distribution<int> delay(0, 2);
    std::vector<double> raw, refined;
    for (int i = 0; i < 30; ++i) {
        synthgen::PlayScript script;
        script.seed = 100 + i;
        script.first_move_apex = 44;
        script.first_move_onset_delta = delta(rng);
        script.candidate_onset_delay = delay(rng);
        auto play = synthgen::scripted_play(script);
        auto got = detect_pitcher_first_move(play.pitcher_candidates, play.pitcher, config);
        REQUIRE(got.has_value());
        raw.push_back(*got);
        refined.push_back(refine_first_move(*got, play.pitcher, config.refine_halfwidth));
    }
    auto variance = [](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= v.size();
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        return var / v.size();
    };
    CHECK(variance(refined) < variance(raw));
}

TEST_CASE("batter first step lands near the scripted run start") {
    synthgen::PlayScript script;
    script.release_frame = 90;
    script.first_step_frame = 120;
    auto play = synthgen::scripted_play(script);
    FirstStepConfig config;
    auto got = detect_batter_first_step(play.batter, 90, config);
    REQUIRE(got.has_value());
    CHECK(*got >= 117);
    CHECK(*got <= 123);

    SUBCASE("mirroring the scene flips nothing") {
        JointTrajectories mirrored = play.batter;
        for (auto& frame : mirrored.coords)
            for (auto& p : frame) p.x = 960.0 - p.x;
        auto mirror_got = detect_batter_first_step(mirrored, 90, config);
        REQUIRE(mirror_got.has_value());
        CHECK(*mirror_got == *got);
    }
}

TEST_CASE("a stationary batter yields no first step") {
    JointTrajectories still = standing(165);
    std::mt19937 rng(6);
    std::normal_distribution<double> noise(0.0, 0.15);
    for (auto& frame : still.coords)
        for (auto& p : frame) {
            p.x += noise(rng);
            p.y += noise(rng);
        }
    FirstStepConfig config;
    CHECK(!detect_batter_first_step(still, 90, config).has_value());
}

TEST_CASE("leg raise argmin inside [r-20, s-10]") {
    SUBCASE("scripted apex at r-4") {
        synthgen::PlayScript script;
        script.leg_raise_offset = 4;
        auto play = synthgen::scripted_play(script);
        int l = detect_leg_raise(play.batter, play.truth.release, play.truth.first_step);
        CHECK(l == play.truth.release - 4);
    }
    SUBCASE("monotone-rising leg picks the window end") {
        JointTrajectories traj = standing(165);
        for (int t = 0; t < 165; ++t)
            for (int j : {kTrajRAnkle, kTrajLAnkle, kTrajRKnee, kTrajLKnee})
                traj.coords[t][j].y -= 0.5 * t;  // leg keeps rising
        int l = detect_leg_raise(traj, 93, 123);
        CHECK(l == 113);  // s - 10
    }
    SUBCASE("empty window throws") {
        JointTrajectories traj = standing(165);
        CHECK_THROWS_AS(detect_leg_raise(traj, 93, 70), Error);
    }
}

TEST_CASE("foot down returns near the scripted plant") {
    synthgen::PlayScript script;
    script.foot_down_delta = 8;
    auto play = synthgen::scripted_play(script);
    int l = play.truth.leg_raise;
    auto got = detect_foot_down(play.batter, l, 15);
    CHECK(std::abs(got.frame - play.truth.foot_down) <= 1);
    CHECK(!got.low_confidence);
    CHECK(got.frame >= l);
    CHECK(got.frame <= l + 15);
}

TEST_CASE("foot down edge cases") {
    SUBCASE("leg never returns: boundary frame, low confidence") {
        JointTrajectories traj = standing(120);
        for (int t = 60; t < 120; ++t)
            for (int j : {kTrajRAnkle, kTrajLAnkle, kTrajRKnee, kTrajLKnee})
                traj.coords[t][j].y -= 40.0 - 0.5 * (t - 60);  // descending, never lands
        auto got = detect_foot_down(traj, 62, 15);
        CHECK(got.frame == 77);
        CHECK(got.low_confidence);
    }
    SUBCASE("constant leg height means the earliest frame wins") {
        JointTrajectories traj = standing(120);
        auto got = detect_foot_down(traj, 50, 15);
        CHECK(got.frame == 50);
        CHECK(!got.low_confidence);
    }
    SUBCASE("too little baseline") {
        JointTrajectories traj = standing(120);
        CHECK_THROWS_AS(detect_foot_down(traj, 10, 15), Error);
    }
}

TEST_CASE("all detectors are invariant to uniform scaling of the scene") {
    FirstMoveConfig move_config;
    FirstStepConfig step_config;
    for (double scale : {1.0, 2.0}) {
        (void)scale;
    }
    synthgen::PlayScript base;
    base.seed = 12;
    auto play1 = synthgen::scripted_play(base);
    synthgen::PlayScript doubled = base;
    doubled.scale = 2.0;
    auto play2 = synthgen::scripted_play(doubled);

    auto m1 = detect_pitcher_first_move(play1.pitcher_candidates, play1.pitcher, move_config);
    auto m2 = detect_pitcher_first_move(play2.pitcher_candidates, play2.pitcher, move_config);
    REQUIRE(m1.has_value());
    REQUIRE(m2.has_value());
    CHECK(*m1 == *m2);
    CHECK(refine_first_move(*m1, play1.pitcher, 5) == refine_first_move(*m2, play2.pitcher, 5));

    auto s1 = detect_batter_first_step(play1.batter, base.release_frame, step_config);
    auto s2 = detect_batter_first_step(play2.batter, base.release_frame, step_config);
    REQUIRE(s1.has_value());
    REQUIRE(s2.has_value());
    CHECK(*s1 == *s2);

    int l1 = detect_leg_raise(play1.batter, base.release_frame, *s1);
    int l2 = detect_leg_raise(play2.batter, base.release_frame, *s2);
    CHECK(l1 == l2);
    CHECK(detect_foot_down(play1.batter, l1, 15).frame ==
          detect_foot_down(play2.batter, l2, 15).frame);
}

TEST_CASE("detected events stay in order: first move < release < first step") {
    FirstMoveConfig move_config;
    FirstStepConfig step_config;
    for (int i = 0; i < 10; ++i) {
        synthgen::PlayScript script;
        script.seed = 500 + i;
        auto play = synthgen::scripted_play(script);
        auto mv = detect_pitcher_first_move(play.pitcher_candidates, play.pitcher, move_config);
        auto st = detect_batter_first_step(play.batter, play.truth.release, step_config);
        REQUIRE(mv.has_value());
        REQUIRE(st.has_value());
        CHECK(*mv < play.truth.release);
        CHECK(play.truth.release < *st);
    }
}
