#pragma once

#include <cstdint>
#include <vector>

#include "laughkit/error.hpp"

namespace laughkit {

// Mono PCM signal. Samples live in [-1, 1].
struct AudioClip {
    int sample_rate_hz = 0;
    std::vector<double> samples;

    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

// 8-bit grayscale image, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) raise(errc::bad_image, "image dimensions must be positive");
    }

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// Ordered frames of uniform size; frame i sits at timestamp i / frame_rate_hz.
struct FrameSequence {
    std::vector<GrayImage> frames;
    double frame_rate_hz = 0.0;
};

} // namespace laughkit
