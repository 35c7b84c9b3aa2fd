#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "gamerecon/error.hpp"
#include "gamerecon/fmoc.hpp"

using namespace gamerecon;
using namespace gamerecon::fmoc;

namespace {

GrayFrame uniform_frame(int w, int h, uint8_t v) { return GrayFrame(w, h, v); }

void draw_square(GrayFrame& f, int x0, int y0, int size, uint8_t v) {
    for (int y = y0; y < y0 + size; ++y)
        for (int x = x0; x < x0 + size; ++x)
            if (x >= 0 && x < f.width && y >= 0 && y < f.height) f.set(x, y, v);
}

// Oracle: per-pixel recomputation of the thresholded difference.
BinaryMask diff_oracle(const GrayFrame& a, const GrayFrame& b, int tau) {
    BinaryMask m(a.width, a.height);
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x)
            m.set(x, y, std::abs(int(a.at(x, y)) - int(b.at(x, y))) > tau);
    return m;
}

// Oracle: 4/8-connected labeling by repeated scanning (slow but simple).
std::vector<int> flood_areas(const BinaryMask& mask) {
    std::vector<int> label(mask.bits.size(), -1);
    std::vector<int> areas;
    for (size_t start = 0; start < mask.bits.size(); ++start) {
        if (!mask.bits[start] || label[start] >= 0) continue;
        int id = static_cast<int>(areas.size());
        areas.push_back(0);
        std::vector<size_t> stack = {start};
        label[start] = id;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            ++areas[id];
            int cy = static_cast<int>(cur) / mask.width;
            int cx = static_cast<int>(cur) % mask.width;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                    size_t ni = static_cast<size_t>(ny) * mask.width + nx;
                    if (mask.bits[ni] && label[ni] < 0) {
                        label[ni] = id;
                        stack.push_back(ni);
                    }
                }
        }
    }
    return areas;
}

}  // namespace

TEST_CASE("diff_image basics") {
    auto a = uniform_frame(8, 8, 100);
    auto b = a;
    CHECK(diff_image(a, b, 25).count() == 0);

    b.set(3, 4, 255);  // single pixel jumps by 155
    auto mask = diff_image(a, b, 25);
    CHECK(mask.count() == 1);
    CHECK(mask.at(3, 4));
}

TEST_CASE("diff_image ignores sub-threshold noise") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> noise(-10, 10);
    auto a = uniform_frame(32, 32, 120);
    auto b = a;
    for (auto& px : b.pixels)
        px = static_cast<uint8_t>(std::clamp(int(px) + noise(rng), 0, 255));
    auto mask = diff_image(a, b, 25);
    auto oracle = diff_oracle(a, b, 25);
    CHECK(mask.count() == 0);
    CHECK(mask.bits == oracle.bits);
}

TEST_CASE("diff_image shape mismatch") {
    CHECK_THROWS_AS(diff_image(uniform_frame(4, 4, 0), uniform_frame(5, 4, 0), 25), Error);
}

TEST_CASE("motion_mask keeps only the middle-frame appearance") {
    // Bright square at three disjoint positions A, B, C.
    auto base = uniform_frame(64, 32, 80);
    auto fa = base, fb = base, fc = base;
    draw_square(fa, 4, 10, 6, 220);
    draw_square(fb, 24, 10, 6, 220);
    draw_square(fc, 44, 10, 6, 220);

    auto mask = motion_mask(fa, fb, fc, 25);

    // Oracle: d(a,b) & d(b,c) & !d(a,c), recomputed per pixel.
    auto dab = diff_oracle(fa, fb, 25);
    auto dbc = diff_oracle(fb, fc, 25);
    auto dac = diff_oracle(fa, fc, 25);
    for (size_t i = 0; i < mask.bits.size(); ++i)
        CHECK(mask.bits[i] == (dab.bits[i] && dbc.bits[i] && !dac.bits[i] ? 1 : 0));

    // Only position B survives.
    for (int y = 10; y < 16; ++y)
        for (int x = 24; x < 30; ++x) CHECK(mask.at(x, y));
    for (int y = 10; y < 16; ++y)
        for (int x = 4; x < 10; ++x) CHECK(!mask.at(x, y));
}

TEST_CASE("motion_mask is empty for a static scene") {
    auto f = uniform_frame(16, 16, 77);
    CHECK(motion_mask(f, f, f, 25).count() == 0);
}

TEST_CASE("motion_mask on an A-B-A revisit") {
    // Object sits at A in the outer frames and at B in the middle. The new
    // position B fires as a transient appearance. A fires too (a transient
    // disappearance: both adjacent diffs change, the outer frames agree) --
    // sustained oscillation like this is what jitter removal cleans up
    // across frames.
    auto base = uniform_frame(48, 24, 70);
    auto fa = base, fb = base, fc = base;
    draw_square(fa, 5, 8, 5, 200);
    draw_square(fb, 25, 8, 5, 200);
    draw_square(fc, 5, 8, 5, 200);

    auto mask = motion_mask(fa, fb, fc, 25);
    auto dab = diff_oracle(fa, fb, 25);
    auto dbc = diff_oracle(fb, fc, 25);
    auto dac = diff_oracle(fa, fc, 25);
    for (size_t i = 0; i < mask.bits.size(); ++i)
        CHECK(mask.bits[i] == (dab.bits[i] && dbc.bits[i] && !dac.bits[i] ? 1 : 0));
    for (int y = 8; y < 13; ++y)
        for (int x = 25; x < 30; ++x) CHECK(mask.at(x, y));
}

TEST_CASE("the negated outer term kills continuously-changing pixels") {
    // A pixel that differs in every pairing (slow textured motion) is
    // excluded; only transient appearances survive.
    auto fa = uniform_frame(8, 8, 40);
    auto fb = uniform_frame(8, 8, 120);
    auto fc = uniform_frame(8, 8, 200);
    CHECK(motion_mask(fa, fb, fc, 25).count() == 0);
    // Whereas background -> object -> background fires.
    auto f_bg = uniform_frame(8, 8, 40);
    CHECK(motion_mask(f_bg, fb, f_bg, 25).count() == 64);
}

TEST_CASE("motion_mask(f, f, f) empty for arbitrary frames") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> level(0, 255);
    GrayFrame f(20, 20);
    for (auto& px : f.pixels) px = static_cast<uint8_t>(level(rng));
    CHECK(motion_mask(f, f, f, 25).count() == 0);
}

TEST_CASE("remove_jitter with empty history is the identity") {
    BinaryMask m(8, 8);
    m.set(2, 2, true);
    m.set(5, 7, true);
    auto out = remove_jitter(m, {});
    CHECK(out.bits == m.bits);
}

TEST_CASE("remove_jitter output is a subset of the input") {
    std::mt19937 rng(9);
    std::bernoulli_distribution bit(0.3);
    BinaryMask m(16, 16);
    std::deque<BinaryMask> history;
    for (int h = 0; h < 3; ++h) {
        BinaryMask prev(16, 16);
        for (auto& b : prev.bits) b = bit(rng);
        history.push_back(prev);
    }
    for (auto& b : m.bits) b = bit(rng);
    auto out = remove_jitter(m, history);
    for (size_t i = 0; i < m.bits.size(); ++i) {
        CHECK(out.bits[i] <= m.bits[i]);
        for (const auto& prev : history)
            if (prev.bits[i]) CHECK(!out.bits[i]);
    }
}

TEST_CASE("camera shake is removed, a moving streak is kept") {
    // Shake fixture: strong vertical edges shifting one pixel left/right
    // with period two; a streak advancing 15 px/frame.
    const int W = 200, H = 40;
    auto make_frame = [&](int t) {
        GrayFrame f(W, H);
        int jx = (t % 2) ? 1 : 0;
        for (int y = 0; y < H; ++y)
            for (int x = 0; x < W; ++x)
                f.set(x, y, ((x + jx) / 4) % 2 ? 160 : 60);  // striped background
        draw_square(f, 10 + 15 * t, 18, 4, 255);
        return f;
    };

    FmocConfig config;
    config.k = 1;
    config.jitter_memory = 2;
    config.min_area = 1;

    // Build masks directly to measure the density drop.
    std::deque<BinaryMask> history;
    size_t raw_pixels = 0, cleaned_pixels = 0;
    BinaryMask last_cleaned(W, H);
    for (int t = 1; t + 1 < 8; ++t) {
        auto mask = motion_mask(make_frame(t - 1), make_frame(t), make_frame(t + 1), 25);
        auto cleaned = remove_jitter(mask, history);
        history.push_back(mask);
        if (history.size() > 2) history.pop_front();
        if (t >= 3) {  // once history is warm
            raw_pixels += mask.count();
            cleaned_pixels += cleaned.count();
            last_cleaned = cleaned;
        }
    }
    CHECK(cleaned_pixels < raw_pixels * 0.05 + 16 * 6);  // shake gone, streak pixels remain
    // Streak pixels at the last target frame survive jitter removal.
    auto candidates = extract_candidates(last_cleaned, 4);
    REQUIRE(!candidates.empty());
    CHECK(candidates[0].centroid.x > 60);
}

TEST_CASE("extract_candidates filters, measures and sorts components") {
    SUBCASE("empty mask") {
        CHECK(extract_candidates(BinaryMask(8, 8), 10).empty());
    }
    SUBCASE("single blob with centroid at its center") {
        BinaryMask m(16, 16);
        for (int y = 4; y < 9; ++y)
            for (int x = 6; x < 11; ++x) m.set(x, y, true);
        auto got = extract_candidates(m, 10);
        REQUIRE(got.size() == 1);
        CHECK(got[0].area == 25);
        CHECK(got[0].centroid.x == doctest::Approx(8.0));
        CHECK(got[0].centroid.y == doctest::Approx(6.0));
        CHECK(got[0].x0 == 6);
        CHECK(got[0].x1 == 10);
    }
    SUBCASE("single pixels are dropped, one big blob stays") {
        BinaryMask m(64, 64);
        std::mt19937 rng(17);
        std::uniform_int_distribution<int> pos(0, 63);
        std::set<std::pair<int, int>> used;
        int placed = 0;
        while (placed < 50) {
            int x = pos(rng), y = pos(rng);
            if (x < 20 && y < 20) continue;  // keep clear of the blob
            bool lonely = true;
            for (int dy = -1; dy <= 1 && lonely; ++dy)
                for (int dx = -1; dx <= 1 && lonely; ++dx)
                    if (used.count({x + dx, y + dy})) lonely = false;
            if (!lonely) continue;
            used.insert({x, y});
            m.set(x, y, true);
            ++placed;
        }
        for (int y = 2; y < 7; ++y)
            for (int x = 2; x < 10; ++x) m.set(x, y, true);  // 40-pixel blob

        auto areas = flood_areas(m);
        int oracle_count = 0;
        for (int a : areas)
            if (a >= 10) ++oracle_count;
        auto got = extract_candidates(m, 10);
        CHECK(static_cast<int>(got.size()) == oracle_count);
        REQUIRE(got.size() == 1);
        CHECK(got[0].area == 40);
    }
}

TEST_CASE("extract_candidates area accounting against the flood-fill oracle") {
    std::mt19937 rng(29);
    std::bernoulli_distribution bit(0.35);
    for (int trial = 0; trial < 10; ++trial) {
        BinaryMask m(40, 30);
        for (auto& b : m.bits) b = bit(rng);
        auto got = extract_candidates(m, 3);
        auto areas = flood_areas(m);

        std::multiset<int> got_areas, oracle_areas;
        for (const auto& c : got) {
            CHECK(c.area >= 3);
            got_areas.insert(c.area);
            CHECK(c.centroid.x >= c.x0);
            CHECK(c.centroid.x <= c.x1);
            CHECK(c.centroid.y >= c.y0);
            CHECK(c.centroid.y <= c.y1);
        }
        for (int a : areas)
            if (a >= 3) oracle_areas.insert(a);
        CHECK(got_areas == oracle_areas);

        size_t total = 0;
        for (const auto& c : got) total += c.area;
        CHECK(total <= m.count());

        // sorted by area descending
        for (size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].area >= got[i].area);
    }
}

TEST_CASE("stream produces byte-identical candidates on identical input") {
    auto make_frames = [] {
        std::vector<GrayFrame> frames;
        std::mt19937 rng(77);
        std::uniform_int_distribution<int> noise(-6, 6);
        for (int t = 0; t < 12; ++t) {
            GrayFrame f(60, 40, 90);
            draw_square(f, 3 + 12 * t % 50, 12, 5, 240);
            for (auto& px : f.pixels)
                px = static_cast<uint8_t>(std::clamp(int(px) + noise(rng), 0, 255));
            frames.push_back(f);
        }
        return frames;
    };
    FmocConfig config;
    auto a = detect_sequence(make_frames(), config);
    auto b = detect_sequence(make_frames(), config);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].frame == b[i].frame);
        REQUIRE(a[i].candidates.size() == b[i].candidates.size());
        for (size_t c = 0; c < a[i].candidates.size(); ++c) {
            CHECK(a[i].candidates[c].centroid == b[i].candidates[c].centroid);
            CHECK(a[i].candidates[c].area == b[i].candidates[c].area);
        }
    }
}

TEST_CASE("stream emits frame t exactly when frame t+k arrives") {
    FmocConfig config;
    config.k = 2;
    FmocStream stream(config);
    GrayFrame f(8, 8, 50);
    for (int t = 0; t < 10; ++t) {
        auto out = stream.push(f);
        if (t < 2 * config.k) {
            CHECK(!out.has_value());
        } else {
            REQUIRE(out.has_value());
            CHECK(out->frame == t - config.k);  // lag bound: never reads past t+k
        }
    }
}
