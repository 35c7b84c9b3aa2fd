#include "gamerecon/fmoc.hpp"

#include <cstdlib>

#include "gamerecon/error.hpp"

namespace gamerecon::fmoc {

namespace {

void require_same_shape(int wa, int ha, int wb, int hb) {
    if (wa != wb || ha != hb)
        throw Error(ErrorCode::shape_mismatch, "frame dimensions differ");
}

}  // namespace

size_t BinaryMask::count() const {
    size_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

BinaryMask diff_image(const GrayFrame& fa, const GrayFrame& fb, int tau_diff) {
    require_same_shape(fa.width, fa.height, fb.width, fb.height);
    BinaryMask mask(fa.width, fa.height);
    const size_t n = fa.size();
    for (size_t i = 0; i < n; ++i) {
        int d = static_cast<int>(fa.pixels[i]) - static_cast<int>(fb.pixels[i]);
        mask.bits[i] = (std::abs(d) > tau_diff) ? 1 : 0;
    }
    return mask;
}

BinaryMask motion_mask(const GrayFrame& f_prev, const GrayFrame& f_cur,
                       const GrayFrame& f_next, int tau_diff) {
    require_same_shape(f_prev.width, f_prev.height, f_cur.width, f_cur.height);
    require_same_shape(f_cur.width, f_cur.height, f_next.width, f_next.height);
    BinaryMask mask(f_cur.width, f_cur.height);
    const size_t n = f_cur.size();
    for (size_t i = 0; i < n; ++i) {
        int d_prev = std::abs(static_cast<int>(f_prev.pixels[i]) - static_cast<int>(f_cur.pixels[i]));
        int d_next = std::abs(static_cast<int>(f_cur.pixels[i]) - static_cast<int>(f_next.pixels[i]));
        int d_outer = std::abs(static_cast<int>(f_prev.pixels[i]) - static_cast<int>(f_next.pixels[i]));
        mask.bits[i] = (d_prev > tau_diff && d_next > tau_diff && !(d_outer > tau_diff)) ? 1 : 0;
    }
    return mask;
}

BinaryMask remove_jitter(const BinaryMask& mask, const std::deque<BinaryMask>& history) {
    BinaryMask out = mask;
    for (const auto& prev : history) {
        require_same_shape(mask.width, mask.height, prev.width, prev.height);
        const size_t n = out.bits.size();
        for (size_t i = 0; i < n; ++i)
            if (prev.bits[i]) out.bits[i] = 0;
    }
    return out;
}

std::vector<MotionCandidate> extract_candidates(const BinaryMask& mask, int min_area) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<int32_t> label(static_cast<size_t>(w) * h, -1);
    std::vector<MotionCandidate> components;
    std::vector<int> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int idx = y * w + x;
            if (!mask.bits[idx] || label[idx] >= 0) continue;

            int id = static_cast<int>(components.size());
            MotionCandidate c;
            c.x0 = c.x1 = x;
            c.y0 = c.y1 = y;
            double sum_x = 0.0, sum_y = 0.0;
            int area = 0;

            stack.clear();
            stack.push_back(idx);
            label[idx] = id;
            while (!stack.empty()) {
                int cur = stack.back();
                stack.pop_back();
                int cy = cur / w;
                int cx = cur - cy * w;
                ++area;
                sum_x += cx;
                sum_y += cy;
                c.x0 = std::min(c.x0, cx);
                c.x1 = std::max(c.x1, cx);
                c.y0 = std::min(c.y0, cy);
                c.y1 = std::max(c.y1, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    int ny = cy + dy;
                    if (ny < 0 || ny >= h) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        int nx = cx + dx;
                        if (nx < 0 || nx >= w) continue;
                        int nidx = ny * w + nx;
                        if (mask.bits[nidx] && label[nidx] < 0) {
                            label[nidx] = id;
                            stack.push_back(nidx);
                        }
                    }
                }
            }
            c.area = area;
            c.centroid = {sum_x / area, sum_y / area};
            components.push_back(c);
        }
    }

    std::vector<MotionCandidate> out;
    for (const auto& c : components)
        if (c.area >= min_area) out.push_back(c);
    std::stable_sort(out.begin(), out.end(),
                     [](const MotionCandidate& a, const MotionCandidate& b) {
                         return a.area > b.area;
                     });
    return out;
}

FmocStream::FmocStream(const FmocConfig& config) : config_(config) {}

std::optional<FrameCandidates> FmocStream::push(const GrayFrame& frame) {
    window_.push_back(frame);
    ++next_index_;
    const int span = 2 * config_.k + 1;
    if (static_cast<int>(window_.size()) > span) window_.pop_front();
    if (static_cast<int>(window_.size()) < span) return std::nullopt;

    // window_ holds frames [t-k .. t+k]; emit for t.
    const int target = next_index_ - 1 - config_.k;
    BinaryMask mask = motion_mask(window_.front(), window_[config_.k], window_.back(),
                                  config_.tau_diff);
    BinaryMask cleaned = remove_jitter(mask, mask_history_);
    if (config_.jitter_memory > 0) {
        mask_history_.push_back(mask);  // pre-removal masks, matching the formula
        if (static_cast<int>(mask_history_.size()) > config_.jitter_memory)
            mask_history_.pop_front();
    }

    FrameCandidates fc;
    fc.frame = target;
    fc.candidates = extract_candidates(cleaned, config_.min_area);
    return fc;
}

std::vector<FrameCandidates> detect_sequence(const std::vector<GrayFrame>& frames,
                                             const FmocConfig& config) {
    FmocStream stream(config);
    std::vector<FrameCandidates> out;
    for (const auto& f : frames) {
        if (auto fc = stream.push(f)) out.push_back(std::move(*fc));
    }
    return out;
}

}  // namespace gamerecon::fmoc
