#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gamerecon/geometry.hpp"

namespace gamerecon::fmoc {

struct GrayFrame {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // row-major, intensity 0..255

    GrayFrame() = default;
    GrayFrame(int w, int h, uint8_t fill = 0) : width(w), height(h), pixels(w * h, fill) {}

    uint8_t at(int x, int y) const { return pixels[y * width + x]; }
    void set(int x, int y, uint8_t v) { pixels[y * width + x] = v; }
    size_t size() const { return pixels.size(); }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;  // 0 or 1 per pixel

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(w * h, 0) {}

    bool at(int x, int y) const { return bits[y * width + x] != 0; }
    void set(int x, int y, bool v) { bits[y * width + x] = v ? 1 : 0; }
    size_t count() const;
};

// Connected component of the motion mask. AABB bounds are inclusive pixel
// indices; the centroid is the mean of the member pixel coordinates.
struct MotionCandidate {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    Vec2 centroid;
    int area = 0;

    Roi aabb() const {
        return Roi{{static_cast<double>(x0), static_cast<double>(y0)},
                   {static_cast<double>(x1), static_cast<double>(y1)}};
    }
};

struct FmocConfig {
    int k = 1;            // frame stride; larger detects slower motion
    int tau_diff = 25;    // intensity threshold for the difference images
    int jitter_memory = 3;  // m: how many previous masks suppress repeats
    int min_area = 10;    // theta_conn: minimum component pixel count
};

// Thresholded absolute difference: pixel set iff |fa - fb| > tau_diff.
// Throws Error(shape_mismatch) on dimension mismatch.
BinaryMask diff_image(const GrayFrame& fa, const GrayFrame& fb, int tau_diff);

// Motion present only in the middle frame: intersection of the two adjacent
// difference images minus the outer one.
BinaryMask motion_mask(const GrayFrame& f_prev, const GrayFrame& f_cur,
                       const GrayFrame& f_next, int tau_diff);

// Clears every pixel that appears in any of the history masks.
BinaryMask remove_jitter(const BinaryMask& mask, const std::deque<BinaryMask>& history);

// 8-connected components with area >= min_area, sorted by area descending
// (ties by top-left scan order, so output is deterministic).
std::vector<MotionCandidate> extract_candidates(const BinaryMask& mask, int min_area);

struct FrameCandidates {
    int frame = 0;
    std::vector<MotionCandidate> candidates;
};

// Online detector over a frame stream. Emits candidates for frame t once
// frame t+k has been pushed; frames closer than k to either end of the
// stream produce no output.
class FmocStream {
public:
    explicit FmocStream(const FmocConfig& config);

    // Pushes the next frame; returns candidates for frame (pushed_index - k)
    // when that triple is complete.
    std::optional<FrameCandidates> push(const GrayFrame& frame);

    const FmocConfig& config() const { return config_; }

private:
    FmocConfig config_;
    int next_index_ = 0;
    std::deque<GrayFrame> window_;        // frames t-k .. t+k as they arrive
    std::deque<BinaryMask> mask_history_;  // last m pre-removal masks
};

// Convenience batch run over a whole sequence.
std::vector<FrameCandidates> detect_sequence(const std::vector<GrayFrame>& frames,
                                             const FmocConfig& config);

}  // namespace gamerecon::fmoc
