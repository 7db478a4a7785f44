#pragma once

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/types.hpp"
#include "laughkit/wav.hpp" // read_file_bytes

namespace laughkit {

// ITU-R 601 luma, rounded half up. (255,0,0) -> 76.
inline std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::floor(y + 0.5));
}

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255)
// ---------------------------------------------------------------------------

inline GrayImage read_pgm(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path, errc::unreadable_file);
    std::size_t pos = 0;

    auto skip_ws_and_comments = [&]() {
        while (pos < bytes.size()) {
            const char c = static_cast<char>(bytes[pos]);
            if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_ws_and_comments();
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) raise(errc::bad_image, path.string() + ": malformed PGM header");
        return v;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        raise(errc::bad_image, path.string() + ": not a binary PGM (P5) file");
    }
    pos = 2;
    const long w = read_int();
    const long h = read_int();
    const long maxval = read_int();
    if (w <= 0 || h <= 0) raise(errc::bad_image, path.string() + ": bad PGM dimensions");
    if (maxval != 255) raise(errc::bad_image, path.string() + ": PGM maxval must be 255");
    ++pos; // single whitespace after maxval

    const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (pos + need > bytes.size()) raise(errc::bad_image, path.string() + ": PGM pixel data truncated");

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::memcpy(img.pixels.data(), bytes.data() + pos, need);
    return img;
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) raise(errc::io_error, "cannot write " + path.string());
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (!f) raise(errc::io_error, "short write to " + path.string());
}

// ---------------------------------------------------------------------------
// PNG (8-bit, non-interlaced; gray / gray+alpha / RGB / RGBA / palette)
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t be32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline std::uint8_t paeth_predict(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

} // namespace detail

// Decodes an 8-bit PNG to grayscale. Color inputs go through luma601;
// alpha channels are ignored; interlaced files are rejected.
inline GrayImage read_png(const std::filesystem::path& path) {
    using detail::be32;
    const auto bytes = detail::read_file_bytes(path, errc::unreadable_file);

    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0) {
        raise(errc::bad_image, path.string() + ": not a PNG file");
    }

    std::uint32_t width = 0, height = 0;
    int bit_depth = 0, color_type = -1;
    std::vector<std::uint8_t> idat;
    std::vector<std::uint8_t> palette; // RGB triples

    std::size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t len = be32(bytes.data() + pos);
        const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + len + 4 > bytes.size()) raise(errc::bad_image, path.string() + ": PNG chunk truncated");

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) raise(errc::bad_image, path.string() + ": bad IHDR");
            width = be32(bytes.data() + body);
            height = be32(bytes.data() + body + 4);
            bit_depth = bytes[body + 8];
            color_type = bytes[body + 9];
            if (bytes[body + 12] != 0) raise(errc::bad_image, path.string() + ": interlaced PNG not supported");
        } else if (std::memcmp(type, "PLTE", 4) == 0) {
            palette.assign(bytes.begin() + static_cast<long>(body),
                           bytes.begin() + static_cast<long>(body + len));
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), bytes.begin() + static_cast<long>(body),
                        bytes.begin() + static_cast<long>(body + len));
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos = body + len + 4; // skip CRC
    }

    if (width == 0 || height == 0 || idat.empty()) raise(errc::bad_image, path.string() + ": incomplete PNG");
    if (bit_depth != 8) raise(errc::bad_image, path.string() + ": only 8-bit PNG supported");

    int channels;
    switch (color_type) {
        case 0: channels = 1; break; // gray
        case 2: channels = 3; break; // RGB
        case 3: channels = 1; break; // palette index
        case 4: channels = 2; break; // gray + alpha
        case 6: channels = 4; break; // RGBA
        default: raise(errc::bad_image, path.string() + ": unsupported PNG color type");
    }
    if (color_type == 3 && palette.empty()) raise(errc::bad_image, path.string() + ": palette PNG without PLTE");

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    const std::size_t raw_size = (stride + 1) * height;
    std::vector<std::uint8_t> raw(raw_size);
    uLongf out_len = raw_size;
    if (uncompress(raw.data(), &out_len, idat.data(), idat.size()) != Z_OK || out_len != raw_size) {
        raise(errc::bad_image, path.string() + ": PNG inflate failed");
    }

    // undo per-scanline filtering in place
    std::vector<std::uint8_t> prev(stride, 0);
    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    std::vector<std::uint8_t> line(stride);
    for (std::uint32_t y = 0; y < height; ++y) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (stride + 1);
        const int filter = src[0];
        ++src;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(channels) ? line[i - channels] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(channels) ? prev[i - channels] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += detail::paeth_predict(a, b, c); break;
                default: raise(errc::bad_image, path.string() + ": bad PNG filter type");
            }
            line[i] = static_cast<std::uint8_t>(v & 0xff);
        }
        for (std::uint32_t x = 0; x < width; ++x) {
            const std::uint8_t* px = line.data() + static_cast<std::size_t>(x) * channels;
            std::uint8_t g;
            switch (color_type) {
                case 0:
                case 4: g = px[0]; break;
                case 3: {
                    const std::size_t pi = static_cast<std::size_t>(px[0]) * 3;
                    if (pi + 2 >= palette.size())
                        raise(errc::bad_image, path.string() + ": palette index out of range");
                    g = luma601(palette[pi], palette[pi + 1], palette[pi + 2]);
                    break;
                }
                default: g = luma601(px[0], px[1], px[2]); break;
            }
            img.at(static_cast<int>(x), static_cast<int>(y)) = g;
        }
        prev = line;
    }
    return img;
}

// ---------------------------------------------------------------------------
// Frame directories: frame_000000.pgm / frame_000000.png, contiguous from 0
// ---------------------------------------------------------------------------

inline GrayImage read_frame_image(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".pgm") return read_pgm(path);
    if (ext == ".png") return read_png(path);
    raise(errc::unreadable_file, path.string() + ": unknown frame extension");
}

inline FrameSequence load_frame_sequence(const std::filesystem::path& dir, double frame_rate_hz) {
    if (frame_rate_hz <= 0.0) raise(errc::bad_argument, "frame rate must be positive");
    if (!std::filesystem::is_directory(dir)) {
        raise(errc::unreadable_file, dir.string() + ": not a directory");
    }

    FrameSequence seq;
    seq.frame_rate_hz = frame_rate_hz;
    char name[32];
    for (int idx = 0;; ++idx) {
        std::snprintf(name, sizeof(name), "frame_%06d", idx);
        std::filesystem::path candidate;
        for (const char* ext : {".pgm", ".png"}) {
            auto p = dir / (std::string(name) + ext);
            if (std::filesystem::exists(p)) {
                candidate = p;
                break;
            }
        }
        if (candidate.empty()) {
            // stop at the first gap; any higher-numbered leftover is a hole
            std::snprintf(name, sizeof(name), "frame_%06d", idx + 1);
            for (const char* ext : {".pgm", ".png"}) {
                if (std::filesystem::exists(dir / (std::string(name) + ext))) {
                    raise(errc::missing_frame_index,
                          dir.string() + ": missing frame index " + std::to_string(idx));
                }
            }
            break;
        }
        GrayImage img = read_frame_image(candidate);
        if (!seq.frames.empty() &&
            (img.width != seq.frames.front().width || img.height != seq.frames.front().height)) {
            raise(errc::mixed_dimensions, candidate.string() + ": frame dimensions differ from frame 0");
        }
        seq.frames.push_back(std::move(img));
    }
    if (seq.frames.empty()) raise(errc::missing_frame_index, dir.string() + ": no frames found");
    return seq;
}

} // namespace laughkit
