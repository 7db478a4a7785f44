#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "laughkit/cascade.hpp"
#include "laughkit/error.hpp"
#include "laughkit/integral_image.hpp"
#include "laughkit/types.hpp"

namespace laughkit {

struct DetectionParams {
    double scale_factor = 1.1;
    int min_neighbors = 3;
    int step_px = 1;
    int min_window_px = 0; // 0: start at the model's own window size

    void validate() const {
        if (scale_factor <= 1.0) raise(errc::bad_argument, "scale_factor must be > 1");
        if (min_neighbors < 0) raise(errc::bad_argument, "min_neighbors must be >= 0");
        if (step_px < 1) raise(errc::bad_argument, "step_px must be >= 1");
        if (min_window_px < 0) raise(errc::bad_argument, "min_window_px must be >= 0");
    }
};

struct DetectionBox {
    int x = 0, y = 0, w = 0, h = 0;
    int neighbors = 0;
    friend bool operator==(const DetectionBox&, const DetectionBox&) = default;
};

struct EvalResult {
    bool accept = false;
    int exit_stage = 0; // first failing stage, or stage count when accepted
};

namespace detail {

inline int scaled(double scale, int v) {
    return static_cast<int>(std::lround(scale * v));
}

// number of in-image pixels of an upright rect (zero extension elsewhere)
inline std::int64_t clipped_rect_count(const Rect& r, int img_w, int img_h) {
    const std::int64_t w = std::max(0, std::min(r.x + r.w, img_w) - std::max(r.x, 0));
    const std::int64_t h = std::max(0, std::min(r.y + r.h, img_h) - std::max(r.y, 0));
    return w * h;
}

// number of in-image pixels of the solid tilted diamond, row by row
inline std::int64_t clipped_tilted_count(const Rect& r, int img_w, int img_h) {
    std::int64_t count = 0;
    for (int t = 0; t <= r.w + r.h - 2; ++t) {
        const int y = r.y + t;
        if (y < 0 || y >= img_h) continue;
        const int lo = std::max(std::max(-t, t - 2 * (r.h - 1)), -r.x);
        const int hi = std::min(std::min(t, 2 * (r.w - 1) - t), img_w - 1 - r.x);
        if (hi >= lo) count += hi - lo + 1;
    }
    return count;
}

} // namespace detail

inline bool cascade_uses_tilted(const CascadeModel& model) {
    for (const HaarFeature& f : model.features) {
        if (f.tilted) return true;
    }
    return false;
}

// Evaluates the cascade on the window whose top-left corner is (x, y), with
// every feature coordinate scaled by per-value rounding. Feature values are
// normalized by window area and the pixel standard deviation (floored at 1).
// Per-value rounding breaks the zero-sum weight property at most scales, so
// the first rect's weight is recomputed per window from the in-image pixel
// counts of the scaled rects (the stock cascade convention); constant images
// then yield exactly zero for every feature, at every scale and position.
inline EvalResult eval_window(const CascadeModel& model, const IntegralImage& ii, int x, int y,
                              double scale) {
    const int win_w = detail::scaled(scale, model.window_width);
    const int win_h = detail::scaled(scale, model.window_height);
    if (x < 0 || y < 0 || x + win_w > ii.width() || y + win_h > ii.height()) {
        raise(errc::out_of_bounds, "detection window outside image");
    }
    const Rect win{x, y, win_w, win_h};
    const double area = static_cast<double>(win_w) * win_h;
    const double mean = static_cast<double>(ii.rect_sum_clipped(win)) / area;
    const double var = static_cast<double>(ii.sq_rect_sum_clipped(win)) / area - mean * mean;
    const double norm = var > 1.0 ? std::sqrt(var) : 1.0;

    for (std::size_t si = 0; si < model.stages.size(); ++si) {
        const CascadeStage& stage = model.stages[si];
        double votes = 0.0;
        for (const Stump& stump : stage.stumps) {
            const HaarFeature& feat = model.features[stump.feature_index];
            double sums[3] = {0, 0, 0};
            std::int64_t counts[3] = {0, 0, 0};
            for (std::size_t ri = 0; ri < feat.rects.size(); ++ri) {
                const WeightedRect& wr = feat.rects[ri];
                Rect r{x + detail::scaled(scale, wr.rect.x), y + detail::scaled(scale, wr.rect.y),
                       detail::scaled(scale, wr.rect.w), detail::scaled(scale, wr.rect.h)};
                if (feat.tilted) {
                    sums[ri] = static_cast<double>(ii.tilted_rect_sum_clipped(r));
                    counts[ri] = detail::clipped_tilted_count(r, ii.width(), ii.height());
                } else {
                    sums[ri] = static_cast<double>(ii.rect_sum_clipped(r));
                    counts[ri] = detail::clipped_rect_count(r, ii.width(), ii.height());
                }
            }
            double raw = 0.0;
            double rest_area = 0.0;
            for (std::size_t ri = 1; ri < feat.rects.size(); ++ri) {
                raw += feat.rects[ri].weight * sums[ri];
                rest_area += feat.rects[ri].weight * static_cast<double>(counts[ri]);
            }
            const double w0 = counts[0] > 0 ? -rest_area / static_cast<double>(counts[0]) : 0.0;
            raw += w0 * sums[0];
            const double value = raw / (norm * area);
            votes += value < stump.threshold ? stump.leaf_left : stump.leaf_right;
        }
        if (votes < stage.stage_threshold) {
            return {false, static_cast<int>(si)};
        }
    }
    return {true, static_cast<int>(model.stages.size())};
}

// Union-find grouping of raw hits. Two boxes are similar when their corners
// differ by at most 0.2x the smaller width in each axis and their widths are
// within a 1.25 factor of each other; clusters are the transitive closure, so
// the partition does not depend on input order. A cluster survives only with
// strictly more than min_neighbors members.
inline std::vector<DetectionBox> group_detections(const std::vector<DetectionBox>& raw,
                                                  int min_neighbors) {
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    auto similar = [](const DetectionBox& a, const DetectionBox& b) {
        const double eps = 0.2 * std::min(a.w, b.w);
        return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps &&
               a.w <= 1.25 * b.w && b.w <= 1.25 * a.w;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (similar(raw[i], raw[j])) {
                const std::size_t ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }
    struct Acc {
        std::int64_t x = 0, y = 0, w = 0, h = 0;
        int count = 0;
    };
    std::vector<Acc> acc(n);
    for (std::size_t i = 0; i < n; ++i) {
        Acc& a = acc[find(i)];
        a.x += raw[i].x;
        a.y += raw[i].y;
        a.w += raw[i].w;
        a.h += raw[i].h;
        a.count += 1;
    }
    std::vector<DetectionBox> out;
    for (const Acc& a : acc) {
        if (a.count <= min_neighbors || a.count == 0) continue;
        DetectionBox box;
        box.x = static_cast<int>(std::lround(static_cast<double>(a.x) / a.count));
        box.y = static_cast<int>(std::lround(static_cast<double>(a.y) / a.count));
        box.w = static_cast<int>(std::lround(static_cast<double>(a.w) / a.count));
        box.h = static_cast<int>(std::lround(static_cast<double>(a.h) / a.count));
        box.neighbors = a.count;
        out.push_back(box);
    }
    std::sort(out.begin(), out.end(), [](const DetectionBox& a, const DetectionBox& b) {
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        if (a.w != b.w) return a.w < b.w;
        if (a.h != b.h) return a.h < b.h;
        return a.neighbors < b.neighbors;
    });
    return out;
}

// Scans all scales s = s0 * scale_factor^k while the scaled window fits the
// image, sliding with the given stride; raw hit order is scale-major, then
// row, then column. Grouped boxes are clamped to the image.
inline std::vector<DetectionBox> detect_multiscale(const CascadeModel& model, const GrayImage& img,
                                                   const DetectionParams& params) {
    params.validate();
    const int min_side = std::min(model.window_width, model.window_height);
    double s0 = 1.0;
    if (params.min_window_px > 0) {
        if (params.min_window_px < min_side) {
            raise(errc::bad_argument, "min_window_px smaller than the model window");
        }
        s0 = static_cast<double>(params.min_window_px) / min_side;
    }
    // collect scales first so the rotated table margin can cover the largest
    std::vector<double> scales;
    for (double s = s0;; s *= params.scale_factor) {
        const int win_w = detail::scaled(s, model.window_width);
        const int win_h = detail::scaled(s, model.window_height);
        if (win_w > img.width || win_h > img.height || win_w < 1 || win_h < 1) break;
        scales.push_back(s);
    }
    if (scales.empty()) return {};

    const bool tilted = cascade_uses_tilted(model);
    const int margin = IntegralImage::required_rotated_margin(scales.back());
    const IntegralImage ii(img, tilted, margin);

    std::vector<DetectionBox> raw;
    for (double s : scales) {
        const int win_w = detail::scaled(s, model.window_width);
        const int win_h = detail::scaled(s, model.window_height);
        for (int y = 0; y + win_h <= img.height; y += params.step_px) {
            for (int x = 0; x + win_w <= img.width; x += params.step_px) {
                if (eval_window(model, ii, x, y, s).accept) {
                    raw.push_back({x, y, win_w, win_h, 1});
                }
            }
        }
    }
    std::vector<DetectionBox> grouped = group_detections(raw, params.min_neighbors);
    for (DetectionBox& b : grouped) {
        b.w = std::min(b.w, img.width);
        b.h = std::min(b.h, img.height);
        b.x = std::clamp(b.x, 0, img.width - b.w);
        b.y = std::clamp(b.y, 0, img.height - b.h);
    }
    return grouped;
}

struct SmileFrameRecord {
    int count = 0;
    bool present = false;
    friend bool operator==(const SmileFrameRecord&, const SmileFrameRecord&) = default;
};

struct SmileSeries {
    std::vector<SmileFrameRecord> frames;
    double smile_ratio = 0.0; // fraction of frames with at least one detection
    double mean_count = 0.0;
};

inline SmileSeries smile_presence_series(const CascadeModel& model, const FrameSequence& seq,
                                         const DetectionParams& params) {
    SmileSeries series;
    series.frames.reserve(seq.frames.size());
    std::int64_t present_total = 0, count_total = 0;
    for (const GrayImage& frame : seq.frames) {
        const auto boxes = detect_multiscale(model, frame, params);
        SmileFrameRecord rec;
        rec.count = static_cast<int>(boxes.size());
        rec.present = rec.count >= 1;
        present_total += rec.present ? 1 : 0;
        count_total += rec.count;
        series.frames.push_back(rec);
    }
    if (!series.frames.empty()) {
        const double n = static_cast<double>(series.frames.size());
        series.smile_ratio = static_cast<double>(present_total) / n;
        series.mean_count = static_cast<double>(count_total) / n;
    }
    return series;
}

} // namespace laughkit
