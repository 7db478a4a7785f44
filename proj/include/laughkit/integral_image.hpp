#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/types.hpp"

namespace laughkit {

struct Rect {
    int x = 0, y = 0, w = 0, h = 0;
};

// Summed-area tables over a grayscale image: plain and squared sums, plus an
// optional 45-degree rotated table for tilted Haar features. All sums are
// exact 64-bit integers; pixels outside the image count as zero.
//
// The rotated table R(x, y) holds the sum of the upward-opening right-angle
// triangle whose bottom apex is pixel (x, y-1):
//   R(x, y) = sum of I(px, py) with py < y and |px - x| <= y - 1 - py.
// Tilted rectangle corners scaled by per-coordinate rounding can land up to
// about `scale` cells outside the image, so the table is stored with a
// configurable margin; required_rotated_margin gives the safe value.
class IntegralImage {
public:
    static int required_rotated_margin(double max_scale) {
        return static_cast<int>(std::ceil(std::max(1.0, max_scale))) + 2;
    }

    explicit IntegralImage(const GrayImage& img, bool with_rotated = false, int rotated_margin = 4)
        : width_(img.width), height_(img.height), margin_(rotated_margin) {
        const std::size_t stride = static_cast<std::size_t>(width_) + 1;
        sum_.assign(stride * (height_ + 1), 0);
        sq_sum_.assign(stride * (height_ + 1), 0);
        for (int y = 0; y < height_; ++y) {
            std::int64_t row = 0, row_sq = 0;
            for (int x = 0; x < width_; ++x) {
                const std::int64_t v = img.at(x, y);
                row += v;
                row_sq += v * v;
                sum_[(y + 1) * stride + (x + 1)] = row + sum_[y * stride + (x + 1)];
                sq_sum_[(y + 1) * stride + (x + 1)] = row_sq + sq_sum_[y * stride + (x + 1)];
            }
        }
        if (with_rotated) build_rotated(img);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool has_rotated() const { return !rot_.empty(); }

    std::int64_t plain_at(int x, int y) const { return sum_[idx(x, y)]; }
    std::int64_t squared_at(int x, int y) const { return sq_sum_[idx(x, y)]; }

    // Upright rectangle sum; corners clamped to the image (zero extension).
    std::int64_t rect_sum_clipped(const Rect& r) const {
        if (r.w <= 0 || r.h <= 0) return 0;
        const int x0 = std::clamp(r.x, 0, width_);
        const int y0 = std::clamp(r.y, 0, height_);
        const int x1 = std::clamp(r.x + r.w, 0, width_);
        const int y1 = std::clamp(r.y + r.h, 0, height_);
        return sum_[idx(x1, y1)] - sum_[idx(x0, y1)] - sum_[idx(x1, y0)] + sum_[idx(x0, y0)];
    }

    std::int64_t sq_rect_sum_clipped(const Rect& r) const {
        if (r.w <= 0 || r.h <= 0) return 0;
        const int x0 = std::clamp(r.x, 0, width_);
        const int y0 = std::clamp(r.y, 0, height_);
        const int x1 = std::clamp(r.x + r.w, 0, width_);
        const int y1 = std::clamp(r.y + r.h, 0, height_);
        return sq_sum_[idx(x1, y1)] - sq_sum_[idx(x0, y1)] - sq_sum_[idx(x1, y0)] + sq_sum_[idx(x0, y0)];
    }

    // Tilted rectangle: solid 45-degree diamond with top corner at (x, y),
    // extending w steps down-right and h steps down-left. Row offset t runs
    // over [0, w+h-2]; column offset u over [max(-t, t-2(h-1)), min(t, 2(w-1)-t)].
    //
    // In rotated coordinates (s, d) = (px+py, px-py) the diamond is the box
    // s in [x+y, x+y+2(w-1)], d in [x-y-2(h-1), x-y], and R(X, Y) is the
    // quadrant {s <= X+Y-1, d >= X-Y+1}. Quadrant corners only exist at even
    // s+d parity; the two odd-parity corners of the box each split into an
    // even quadrant plus a diagonal ray, which the ray table supplies.
    std::int64_t tilted_rect_sum_clipped(const Rect& r) const {
        if (r.w <= 0 || r.h <= 0) return 0;
        return rot(r.x + r.w - r.h, r.y + r.w + r.h - 1) + rot(r.x, r.y) -
               rot(r.x - r.h, r.y + r.h - 1) - ray(r.x - r.h + 1, r.y + r.h - 1) -
               rot(r.x + r.w - 1, r.y + r.w - 1) - ray(r.x + r.w, r.y + r.w - 1);
    }

    // Checked variants backing the public rect-sum operation.
    std::int64_t rect_sum(const Rect& r, bool tilted = false) const {
        if (r.w == 0 || r.h == 0) return 0;
        if (r.w < 0 || r.h < 0) raise(errc::out_of_bounds, "rectangle with negative extent");
        if (!tilted) {
            if (r.x < 0 || r.y < 0 || r.x + r.w > width_ || r.y + r.h > height_) {
                raise(errc::out_of_bounds, "rectangle outside image");
            }
            return rect_sum_clipped(r);
        }
        if (!has_rotated()) raise(errc::bad_argument, "integral image built without rotated table");
        if (r.x - (r.h - 1) < 0 || r.x + r.w > width_ || r.y < 0 || r.y + r.w + r.h - 1 > height_) {
            raise(errc::out_of_bounds, "tilted rectangle outside image");
        }
        return tilted_rect_sum_clipped(r);
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * (width_ + 1) + x;
    }

    std::int64_t rot(int x, int y) const {
        if (y <= 0) return 0;
        if (y > height_ + margin_ || x < -margin_ || x > width_ + margin_ - 1) {
            raise(errc::out_of_bounds, "rotated table lookup outside stored margin");
        }
        return rot_[static_cast<std::size_t>(y) * rot_stride() + (x + margin_)];
    }

    // sum of the up-right diagonal ray I(x, y-1), I(x+1, y-2), ...
    std::int64_t ray(int x, int y) const {
        if (y <= 0) return 0;
        if (x > width_ + margin_ - 1) return 0; // whole ray right of the image
        if (y > height_ + margin_ || x < -margin_) {
            raise(errc::out_of_bounds, "rotated table lookup outside stored margin");
        }
        return ray_[static_cast<std::size_t>(y) * rot_stride() + (x + margin_)];
    }

    std::size_t rot_stride() const { return static_cast<std::size_t>(width_) + 2 * margin_; }

    void build_rotated(const GrayImage& img) {
        const std::size_t stride = rot_stride();
        rot_.assign(stride * (height_ + margin_ + 1), 0);
        ray_.assign(stride * (height_ + margin_ + 1), 0);
        // diagonal running sums per row: dl propagates down-left, dr down-right
        std::vector<std::int64_t> dl(stride, 0), dr(stride, 0), dl_prev(stride, 0), dr_prev(stride, 0);
        for (int y = 1; y <= height_ + margin_; ++y) {
            for (int x = -margin_; x <= width_ + margin_ - 1; ++x) {
                const std::size_t col = static_cast<std::size_t>(x + margin_);
                const std::int64_t pix =
                    (x >= 0 && x < width_ && y - 1 < height_) ? img.at(x, y - 1) : 0;
                // diagonals entirely outside the stored band are zero: they
                // run through columns beyond the image on that side
                const std::int64_t dl_diag = (x - 1 >= -margin_) ? dl_prev[col - 1] : 0;
                const std::int64_t dr_diag = (x + 1 <= width_ + margin_ - 1) ? dr_prev[col + 1] : 0;
                dl[col] = pix + dl_diag;
                dr[col] = pix + dr_diag;
                rot_[static_cast<std::size_t>(y) * stride + col] =
                    rot_[static_cast<std::size_t>(y - 1) * stride + col] + dl[col] + dr[col] - pix;
                ray_[static_cast<std::size_t>(y) * stride + col] = dr[col];
            }
            std::swap(dl, dl_prev);
            std::swap(dr, dr_prev);
        }
    }

    int width_;
    int height_;
    int margin_;
    std::vector<std::int64_t> sum_;
    std::vector<std::int64_t> sq_sum_;
    std::vector<std::int64_t> rot_;
    std::vector<std::int64_t> ray_;
};

inline IntegralImage integral_image(const GrayImage& img, bool with_rotated = false) {
    return IntegralImage(img, with_rotated);
}

} // namespace laughkit
