#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gamerecon/error.hpp"
#include "gamerecon/gbcv.hpp"

using namespace gamerecon;
using namespace gamerecon::gbcv;

namespace {

MotionCandidate candidate_at(double x, double y, int area = 40) {
    MotionCandidate c;
    c.centroid = {x, y};
    c.x0 = static_cast<int>(x) - 3;
    c.x1 = static_cast<int>(x) + 3;
    c.y0 = static_cast<int>(y) - 2;
    c.y1 = static_cast<int>(y) + 2;
    c.area = area;
    return c;
}

std::vector<FrameCandidates> straight_ball_stream(int frames, Vec2 start, Vec2 step,
                                                  int first_frame = 0) {
    std::vector<FrameCandidates> stream;
    for (int t = 0; t < frames; ++t) {
        FrameCandidates fc;
        fc.frame = first_frame + t;
        fc.candidates.push_back(candidate_at(start.x + step.x * t, start.y + step.y * t));
        stream.push_back(fc);
    }
    return stream;
}

// Independent validity pass over an emitted track.
void check_track_valid(const BallTrack2D& track, const GbcvConfig& config) {
    REQUIRE(track.length() >= config.min_track_len);
    for (size_t i = 1; i < track.points.size(); ++i) {
        CHECK(track.points[i].frame > track.points[i - 1].frame);
        if (!track.points[i].inferred && !track.points[i - 1].inferred)
            if (track.points[i].frame == track.points[i - 1].frame + 1)
                CHECK(norm(track.points[i].pos - track.points[i - 1].pos) >
                      config.theta_dist);
    }
    for (size_t i = 2; i < track.points.size(); ++i) {
        if (track.points[i].inferred || track.points[i - 1].inferred ||
            track.points[i - 2].inferred)
            continue;
        double c = triple_confidence(track.points[i - 2].pos, track.points[i - 1].pos,
                                     track.points[i].pos, config);
        CHECK(c >= config.theta_confidence);
    }
}

}  // namespace

TEST_CASE("graph edges follow the minimum-speed rule") {
    std::vector<FrameCandidates> stream(2);
    stream[0] = {0, {candidate_at(100, 100)}};
    SUBCASE("too close, no edge") {
        stream[1] = {1, {candidate_at(103, 104)}};  // 5 px apart
        auto graph = build_candidate_graph(stream, 10.0);
        CHECK(graph.edges[0][0].empty());
    }
    SUBCASE("fast enough, edge") {
        stream[1] = {1, {candidate_at(112, 116)}};  // 20 px apart
        auto graph = build_candidate_graph(stream, 10.0);
        REQUIRE(graph.edges[0][0].size() == 1);
        CHECK(graph.edges[0][0][0] == 0);
    }
}

TEST_CASE("collinear three-frame chain forms a single path") {
    auto stream = straight_ball_stream(3, {50, 50}, {20, 0});
    auto graph = build_candidate_graph(stream, 10.0);
    REQUIRE(graph.layers.size() == 3);
    CHECK(graph.edges[0][0] == std::vector<int>{0});
    CHECK(graph.edges[1][0] == std::vector<int>{0});
}

TEST_CASE("graph edges match brute-force pair enumeration on random clouds") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> pos(0.0, 200.0);
    std::uniform_int_distribution<int> count(0, 6);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<FrameCandidates> stream;
        for (int t = 0; t < 6; ++t) {
            FrameCandidates fc;
            fc.frame = t;
            int n = count(rng);
            for (int i = 0; i < n; ++i) fc.candidates.push_back(candidate_at(pos(rng), pos(rng)));
            stream.push_back(fc);
        }
        const double theta = 25.0;
        auto graph = build_candidate_graph(stream, theta);
        for (size_t l = 0; l + 1 < graph.layers.size(); ++l) {
            for (size_t i = 0; i < graph.layers[l].nodes.size(); ++i) {
                for (size_t j = 0; j < graph.layers[l + 1].nodes.size(); ++j) {
                    bool expect = norm(graph.layers[l + 1].nodes[j].centroid -
                                       graph.layers[l].nodes[i].centroid) > theta;
                    bool have = std::find(graph.edges[l][i].begin(), graph.edges[l][i].end(),
                                          static_cast<int>(j)) != graph.edges[l][i].end();
                    CHECK(expect == have);
                }
            }
        }
    }
}

TEST_CASE("slope_similarity endpoints and range") {
    Vec2 e{1, 0};
    CHECK(slope_similarity(e, e) == doctest::Approx(1.0));
    CHECK(slope_similarity(e, {-1, 0}) == doctest::Approx(0.0));
    CHECK(slope_similarity(e, {0, 1}) == doctest::Approx(1.0 - std::sqrt(2.0) / 2.0));
    CHECK(slope_similarity({0, 0}, e) == 0.0);  // zero displacement scores zero

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 300; ++i) {
        double ta = angle(rng), tb = angle(rng);
        Vec2 a{std::cos(ta), std::sin(ta)};
        Vec2 b{std::cos(tb), std::sin(tb)};
        double s = slope_similarity(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(slope_similarity(a, a) == doctest::Approx(1.0));
        CHECK(slope_similarity(a, {-a.x, -a.y}) == doctest::Approx(0.0));
    }
}

TEST_CASE("distance_similarity arithmetic and invariances") {
    CHECK(distance_similarity(10, 10) == doctest::Approx(1.0));
    CHECK(distance_similarity(10, 20) == doctest::Approx(0.5));
    CHECK(distance_similarity(12, 18) == doctest::Approx(2.0 / 3.0));
    CHECK(distance_similarity(-1, 5) == 0.0);
    CHECK(distance_similarity(0, 5) == 0.0);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(0.1, 100.0);
    for (int i = 0; i < 300; ++i) {
        double d1 = d(rng), d2 = d(rng), c = d(rng);
        CHECK(distance_similarity(d1, d2) == doctest::Approx(distance_similarity(d2, d1)));
        CHECK(distance_similarity(c * d1, c * d2) ==
              doctest::Approx(distance_similarity(d1, d2)));
        CHECK(distance_similarity(d1, d2) <= 1.0);
    }
}

TEST_CASE("triple_confidence canonical values") {
    GbcvConfig config;  // equal weights
    SUBCASE("collinear, equally spaced") {
        CHECK(triple_confidence(Vec2{0, 0}, Vec2{20, 0}, Vec2{40, 0}, config) == doctest::Approx(1.0));
    }
    SUBCASE("right-angle turn, equal distances") {
        double c = triple_confidence(Vec2{0, 0}, Vec2{20, 0}, Vec2{20, 20}, config);
        CHECK(c == doctest::Approx(0.5 * (1.0 - std::sqrt(2.0) / 2.0) + 0.5));
        CHECK(c == doctest::Approx(0.64645).epsilon(1e-4));
    }
    SUBCASE("out-and-back scores exactly the distance term") {
        // leg -> arm -> leg: same segment walked twice; the complex-vector
        // slope sees opposite directions.
        double c = triple_confidence(Vec2{0, 0}, Vec2{30, 0}, Vec2{0, 0}, config);
        CHECK(c == doctest::Approx(0.5));
    }
}

TEST_CASE("triple_confidence is invariant under rigid motion and scaling") {
    GbcvConfig config;
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> scale(0.2, 5.0);
    for (int i = 0; i < 200; ++i) {
        Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        double base = triple_confidence(a, b, c, config);

        double th = angle(rng), s = scale(rng);
        Vec2 t{u(rng), u(rng)};
        auto xf = [&](const Vec2& p) {
            return Vec2{s * (p.x * std::cos(th) - p.y * std::sin(th)) + t.x,
                        s * (p.x * std::sin(th) + p.y * std::cos(th)) + t.y};
        };
        double moved = triple_confidence(xf(a), xf(b), xf(c), config);
        CHECK(moved == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("detect_ball_tracks on an empty stream") {
    CHECK(detect_ball_tracks(std::vector<FrameCandidates>{}, GbcvConfig{}).empty());
}

TEST_CASE("detect_ball_tracks recovers a straight streak among distractors") {
    GbcvConfig config;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> pos(0.0, 400.0);

    // Ball: 15 px/frame along a line. Decoy: a slow curved arm (6 px/frame,
    // below the minimum-speed edge rule). Noise: random isolated blobs.
    std::vector<FrameCandidates> stream;
    for (int t = 0; t < 20; ++t) {
        FrameCandidates fc;
        fc.frame = t;
        fc.candidates.push_back(candidate_at(40.0 + 15.0 * t, 100.0 + 3.0 * t));
        double th = 0.15 * t;
        fc.candidates.push_back(
            candidate_at(80.0 + 40.0 * std::cos(th), 250.0 + 40.0 * std::sin(th), 120));
        fc.candidates.push_back(candidate_at(pos(rng), pos(rng), 15));
        stream.push_back(fc);
    }

    auto tracks = detect_ball_tracks(stream, config);
    REQUIRE(!tracks.empty());
    const auto& best = tracks.front();
    check_track_valid(best, config);
    CHECK(best.length() >= 15);
    for (const auto& p : best.points) {
        double expect_x = 40.0 + 15.0 * p.frame;
        double expect_y = 100.0 + 3.0 * p.frame;
        CHECK(norm(p.pos - Vec2{expect_x, expect_y}) < 1.0);
    }
    // The decoy never yields a competing track of comparable length.
    for (size_t i = 1; i < tracks.size(); ++i) CHECK(tracks[i].length() < 10);
}

TEST_CASE("every emitted track passes an independent confidence re-check") {
    GbcvConfig config;
    config.min_track_len = 3;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> pos(0.0, 300.0);
    std::uniform_int_distribution<int> count(0, 5);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<FrameCandidates> stream;
        for (int t = 0; t < 12; ++t) {
            FrameCandidates fc;
            fc.frame = t;
            int n = count(rng);
            for (int i = 0; i < n; ++i) fc.candidates.push_back(candidate_at(pos(rng), pos(rng)));
            stream.push_back(fc);
        }
        for (const auto& track : detect_ball_tracks(stream, config))
            check_track_valid(track, config);
    }
}

TEST_CASE("merge_tracks bridges a one-frame gap on the same line") {
    GbcvConfig config;
    auto full = straight_ball_stream(11, {0, 0}, {15, 0});
    std::vector<FrameCandidates> gappy;
    for (const auto& fc : full)
        if (fc.frame != 5) gappy.push_back(fc);

    auto tracks = detect_ball_tracks(gappy, config);
    REQUIRE(tracks.size() == 2);
    std::stable_sort(tracks.begin(), tracks.end(),
                     [](const BallTrack2D& a, const BallTrack2D& b) {
                         return a.first_frame() < b.first_frame();
                     });
    auto merged = merge_tracks(tracks[0], tracks[1], config);
    REQUIRE(merged.has_value());
    CHECK(merged->first_frame() == 0);
    CHECK(merged->last_frame() == 10);
    const auto& bridged = merged->points[5];
    CHECK(bridged.frame == 5);
    CHECK(bridged.inferred);
    CHECK(bridged.pos.x == doctest::Approx(75.0));
    CHECK(bridged.pos.y == doctest::Approx(0.0));
}

TEST_CASE("merge_tracks rejects a perpendicular continuation") {
    GbcvConfig config;
    auto a_stream = straight_ball_stream(6, {0, 0}, {15, 0});
    auto b_stream = straight_ball_stream(6, {92, 15}, {0, 15}, 8);
    auto a = detect_ball_tracks(a_stream, config);
    auto b = detect_ball_tracks(b_stream, config);
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(!merge_tracks(a[0], b[0], config).has_value());
}

TEST_CASE("merge_tracks rejects overlapping ranges and long gaps") {
    GbcvConfig config;
    auto s = straight_ball_stream(8, {0, 0}, {15, 0});
    auto tracks = detect_ball_tracks(s, config);
    REQUIRE(tracks.size() == 1);
    CHECK_THROWS_AS(merge_tracks(tracks[0], tracks[0], config), Error);

    auto far = detect_ball_tracks(straight_ball_stream(8, {300, 0}, {15, 0}, 40), config);
    REQUIRE(far.size() == 1);
    CHECK(!merge_tracks(tracks[0], far[0], config).has_value());  // gap over the limit
}

TEST_CASE("merge_all joins the missed-detection scenario into one track") {
    GbcvConfig config;
    auto full = straight_ball_stream(12, {10, 20}, {14, 4});
    std::vector<FrameCandidates> gappy;
    for (const auto& fc : full)
        if (fc.frame != 6) gappy.push_back(fc);
    auto merged = merge_all(detect_ball_tracks(gappy, config), config);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].length() == 12);
    check_track_valid(merged[0], config);
}

TEST_CASE("estimate_release_frame") {
    GbcvConfig config;
    SUBCASE("first detection at the release point") {
        auto tracks = detect_ball_tracks(straight_ball_stream(6, {50, 60}, {15, 0}, 96), config);
        REQUIRE(tracks.size() == 1);
        CHECK(estimate_release_frame(tracks[0], {50, 60}) == 96);
    }
    SUBCASE("45 px at 15 px/frame lands three frames back") {
        auto tracks = detect_ball_tracks(straight_ball_stream(6, {95, 60}, {15, 0}, 96), config);
        REQUIRE(tracks.size() == 1);
        CHECK(estimate_release_frame(tracks[0], {50, 60}) == 93);
    }
    SUBCASE("zero-step track is degenerate") {
        BallTrack2D track;
        track.points = {{0, {5, 5}, false, 10}, {1, {5, 5}, false, 10}};
        CHECK_THROWS_AS(estimate_release_frame(track, {0, 0}), Error);
    }
}

TEST_CASE("ranking prefers longer tracks, then confidence, then start frame") {
    GbcvConfig config;
    config.min_track_len = 4;
    std::vector<FrameCandidates> stream;
    // Long straight track frames 0..9 plus a shorter one frames 2..6.
    for (int t = 0; t < 10; ++t) {
        FrameCandidates fc;
        fc.frame = t;
        fc.candidates.push_back(candidate_at(15.0 * t, 0.0));
        if (t >= 2 && t <= 6) fc.candidates.push_back(candidate_at(200.0 + 12.0 * t, 300.0));
        stream.push_back(fc);
    }
    auto tracks = detect_ball_tracks(stream, config);
    REQUIRE(tracks.size() >= 2);
    CHECK(tracks[0].length() == 10);
    CHECK(tracks[0].first_frame() == 0);
    CHECK(tracks[1].length() == 5);
}
