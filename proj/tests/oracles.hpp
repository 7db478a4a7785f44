#pragma once

// Independent reference implementations used only by tests. Each one favors
// the most literal formulation available (quadratic DFT, exhaustive pixel
// enumeration, exact rational arithmetic) so agreement with the library is
// meaningful evidence rather than the same code twice.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "laughkit/cascade.hpp"
#include "laughkit/detect.hpp"
#include "laughkit/types.hpp"

namespace oracle {

// O(N^2) discrete Fourier transform.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * M_PI * static_cast<double>(k * t % n) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

// Pixel-enumeration sums with zero extension outside the image.
inline std::int64_t pixel_rect_sum(const laughkit::GrayImage& img, const laughkit::Rect& r) {
    std::int64_t s = 0;
    for (int yy = r.y; yy < r.y + r.h; ++yy) {
        for (int xx = r.x; xx < r.x + r.w; ++xx) {
            if (xx >= 0 && xx < img.width && yy >= 0 && yy < img.height) {
                s += img.at(xx, yy);
            }
        }
    }
    return s;
}

inline std::int64_t pixel_sq_rect_sum(const laughkit::GrayImage& img, const laughkit::Rect& r) {
    std::int64_t s = 0;
    for (int yy = r.y; yy < r.y + r.h; ++yy) {
        for (int xx = r.x; xx < r.x + r.w; ++xx) {
            if (xx >= 0 && xx < img.width && yy >= 0 && yy < img.height) {
                const std::int64_t v = img.at(xx, yy);
                s += v * v;
            }
        }
    }
    return s;
}

// The 45-degree diamond anchored at (x, y): rows t = 0 .. w+h-2, columns
// x+u for u in [max(-t, t-2(h-1)), min(t, 2(w-1)-t)], row y+t.
inline std::int64_t pixel_tilted_sum(const laughkit::GrayImage& img, const laughkit::Rect& r) {
    std::int64_t s = 0;
    for (int t = 0; t <= r.w + r.h - 2; ++t) {
        const int yy = r.y + t;
        const int lo = std::max(-t, t - 2 * (r.h - 1));
        const int hi = std::min(t, 2 * (r.w - 1) - t);
        for (int u = lo; u <= hi; ++u) {
            const int xx = r.x + u;
            if (xx >= 0 && xx < img.width && yy >= 0 && yy < img.height) {
                s += img.at(xx, yy);
            }
        }
    }
    return s;
}

inline std::int64_t pixel_tilted_count(const laughkit::GrayImage& img, const laughkit::Rect& r) {
    std::int64_t c = 0;
    for (int t = 0; t <= r.w + r.h - 2; ++t) {
        const int yy = r.y + t;
        const int lo = std::max(-t, t - 2 * (r.h - 1));
        const int hi = std::min(t, 2 * (r.w - 1) - t);
        for (int u = lo; u <= hi; ++u) {
            const int xx = r.x + u;
            if (xx >= 0 && xx < img.width && yy >= 0 && yy < img.height) ++c;
        }
    }
    return c;
}

inline std::int64_t pixel_rect_count(const laughkit::GrayImage& img, const laughkit::Rect& r) {
    const std::int64_t w = std::max(0, std::min(r.x + r.w, img.width) - std::max(r.x, 0));
    const std::int64_t h = std::max(0, std::min(r.y + r.h, img.height) - std::max(r.y, 0));
    return w * h;
}

// Window evaluation straight from pixels: same normalization and per-window
// weight compensation contract as the library, no integral images anywhere.
inline laughkit::EvalResult eval_window_pixels(const laughkit::CascadeModel& model,
                                               const laughkit::GrayImage& img, int x, int y,
                                               double scale) {
    auto sc = [scale](int v) { return static_cast<int>(std::lround(scale * v)); };
    const int win_w = sc(model.window_width);
    const int win_h = sc(model.window_height);
    const laughkit::Rect win{x, y, win_w, win_h};
    const double area = static_cast<double>(win_w) * win_h;
    const double mean = static_cast<double>(pixel_rect_sum(img, win)) / area;
    const double var = static_cast<double>(pixel_sq_rect_sum(img, win)) / area - mean * mean;
    const double norm = var > 1.0 ? std::sqrt(var) : 1.0;

    for (std::size_t si = 0; si < model.stages.size(); ++si) {
        double votes = 0.0;
        for (const laughkit::Stump& stump : model.stages[si].stumps) {
            const laughkit::HaarFeature& feat = model.features[stump.feature_index];
            std::vector<double> sums;
            std::vector<std::int64_t> counts;
            for (const laughkit::WeightedRect& wr : feat.rects) {
                const laughkit::Rect r{x + sc(wr.rect.x), y + sc(wr.rect.y), sc(wr.rect.w),
                                       sc(wr.rect.h)};
                if (feat.tilted) {
                    sums.push_back(static_cast<double>(pixel_tilted_sum(img, r)));
                    counts.push_back(pixel_tilted_count(img, r));
                } else {
                    sums.push_back(static_cast<double>(pixel_rect_sum(img, r)));
                    counts.push_back(pixel_rect_count(img, r));
                }
            }
            double raw = 0.0;
            double rest = 0.0;
            for (std::size_t ri = 1; ri < feat.rects.size(); ++ri) {
                raw += feat.rects[ri].weight * sums[ri];
                rest += feat.rects[ri].weight * static_cast<double>(counts[ri]);
            }
            const double w0 = counts[0] > 0 ? -rest / static_cast<double>(counts[0]) : 0.0;
            raw += w0 * sums[0];
            const double value = raw / (norm * area);
            votes += value < stump.threshold ? stump.leaf_left : stump.leaf_right;
        }
        if (votes < model.stages[si].stage_threshold) return {false, static_cast<int>(si)};
    }
    return {true, static_cast<int>(model.stages.size())};
}

// Grouping by explicit transitive closure over the similarity relation,
// with O(n^3)-ish repeated passes; order independent by construction.
inline std::vector<laughkit::DetectionBox> group_by_closure(
    std::vector<laughkit::DetectionBox> raw, int min_neighbors) {
    const std::size_t n = raw.size();
    std::vector<int> cluster(n, -1);
    auto similar = [](const laughkit::DetectionBox& a, const laughkit::DetectionBox& b) {
        const double eps = 0.2 * std::min(a.w, b.w);
        return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps && a.w <= 1.25 * b.w &&
               b.w <= 1.25 * a.w;
    };
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cluster[i] >= 0) continue;
        cluster[i] = next++;
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t a = 0; a < n; ++a) {
                if (cluster[a] != cluster[i]) continue;
                for (std::size_t b = 0; b < n; ++b) {
                    if (cluster[b] < 0 && similar(raw[a], raw[b])) {
                        cluster[b] = cluster[i];
                        changed = true;
                    }
                }
            }
        }
    }
    std::vector<laughkit::DetectionBox> out;
    for (int c = 0; c < next; ++c) {
        std::int64_t sx = 0, sy = 0, sw = 0, sh = 0;
        int count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (cluster[i] == c) {
                sx += raw[i].x;
                sy += raw[i].y;
                sw += raw[i].w;
                sh += raw[i].h;
                ++count;
            }
        }
        if (count <= min_neighbors) continue;
        laughkit::DetectionBox box;
        box.x = static_cast<int>(std::lround(static_cast<double>(sx) / count));
        box.y = static_cast<int>(std::lround(static_cast<double>(sy) / count));
        box.w = static_cast<int>(std::lround(static_cast<double>(sw) / count));
        box.h = static_cast<int>(std::lround(static_cast<double>(sh) / count));
        box.neighbors = count;
        out.push_back(box);
    }
    std::sort(out.begin(), out.end(),
              [](const laughkit::DetectionBox& a, const laughkit::DetectionBox& b) {
                  if (a.y != b.y) return a.y < b.y;
                  if (a.x != b.x) return a.x < b.x;
                  if (a.w != b.w) return a.w < b.w;
                  if (a.h != b.h) return a.h < b.h;
                  return a.neighbors < b.neighbors;
              });
    return out;
}

// Exact rational p/q with small non-negative integer parts.
struct Rational {
    long long num = 0;
    long long den = 1; // den 0 encodes 0/0 conventions resolved by caller

    double value(double zero_over_zero = 0.0) const {
        if (den == 0) return zero_over_zero;
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

struct RationalMetrics {
    double accuracy, precision, recall, f1;
};

inline RationalMetrics metrics_exact(long long tp, long long fp, long long fn, long long tn) {
    RationalMetrics m{};
    const long long total = tp + fp + fn + tn;
    m.accuracy = total == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total);
    m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    // f1 = 2pr/(p+r) = 2tp / (2tp + fp + fn) exactly, when defined
    m.f1 = (2 * tp + fp + fn) == 0 ? 0.0
                                   : 2.0 * static_cast<double>(tp) /
                                         static_cast<double>(2 * tp + fp + fn);
    if (m.precision == 0.0 && m.recall == 0.0) m.f1 = 0.0;
    return m;
}

// Central finite difference of a scalar function of one coordinate.
template <typename F>
double central_diff(F&& f, double& slot, double h) {
    const double orig = slot;
    slot = orig + h;
    const double up = f();
    slot = orig - h;
    const double down = f();
    slot = orig;
    return (up - down) / (2.0 * h);
}

} // namespace oracle
