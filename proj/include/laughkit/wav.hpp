#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/types.hpp"

namespace laughkit {

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path, errc on_fail) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(on_fail, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

} // namespace detail

// Reads a RIFF/WAVE file holding 16-bit PCM, 1 or 2 channels. Stereo frames
// are averaged to mono before scaling by 1/32768, so output lies in [-1, 1).
inline AudioClip read_wav(const std::filesystem::path& path) {
    using detail::le16;
    using detail::le32;

    const auto bytes = detail::read_file_bytes(path, errc::not_a_wav);
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        raise(errc::not_a_wav, path.string() + ": not a RIFF/WAVE file");
    }

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const std::uint8_t* data = nullptr;
    std::uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = le32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (body + 16 > bytes.size()) raise(errc::not_a_wav, "fmt chunk truncated");
            format = le16(bytes.data() + body);
            channels = le16(bytes.data() + body + 2);
            sample_rate = le32(bytes.data() + body + 4);
            bits = le16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            if (body + size > bytes.size()) {
                raise(errc::truncated_data, path.string() + ": data chunk extends past end of file");
            }
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) raise(errc::not_a_wav, path.string() + ": missing fmt or data chunk");
    if (format != 1 || bits != 16) {
        raise(errc::unsupported_encoding,
              path.string() + ": only 16-bit PCM is supported (format " + std::to_string(format) +
                  ", " + std::to_string(bits) + " bits)");
    }
    if (channels != 1 && channels != 2) {
        raise(errc::unsupported_encoding,
              path.string() + ": unsupported channel count " + std::to_string(channels));
    }
    const std::uint32_t frame_bytes = channels * 2u;
    if (data_size % frame_bytes != 0) {
        raise(errc::truncated_data, path.string() + ": data chunk is not a whole number of frames");
    }

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(sample_rate);
    const std::uint32_t n_frames = data_size / frame_bytes;
    clip.samples.reserve(n_frames);
    for (std::uint32_t i = 0; i < n_frames; ++i) {
        const std::uint8_t* f = data + static_cast<std::size_t>(i) * frame_bytes;
        const auto s0 = static_cast<std::int16_t>(le16(f));
        if (channels == 1) {
            clip.samples.push_back(s0 / 32768.0);
        } else {
            const auto s1 = static_cast<std::int16_t>(le16(f + 2));
            clip.samples.push_back((s0 + s1) / 2.0 / 32768.0);
        }
    }
    return clip;
}

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] and scaled by 32767.
inline void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    std::vector<std::uint8_t> out;
    const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size()) * 2;
    out.reserve(44 + data_size);

    auto push_le32 = [&out](std::uint32_t v) {
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
        out.push_back((v >> 16) & 0xff);
        out.push_back((v >> 24) & 0xff);
    };
    auto push_le16 = [&out](std::uint16_t v) {
        out.push_back(v & 0xff);
        out.push_back((v >> 8) & 0xff);
    };
    auto push_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };

    push_tag("RIFF");
    push_le32(36 + data_size);
    push_tag("WAVE");
    push_tag("fmt ");
    push_le32(16);
    push_le16(1); // PCM
    push_le16(1); // mono
    push_le32(static_cast<std::uint32_t>(clip.sample_rate_hz));
    push_le32(static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
    push_le16(2);
    push_le16(16);
    push_tag("data");
    push_le32(data_size);
    for (double s : clip.samples) {
        const double c = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
        push_le16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0))));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) raise(errc::io_error, "cannot write " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) raise(errc::io_error, "short write to " + path.string());
}

} // namespace laughkit
