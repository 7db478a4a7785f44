#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/image_io.hpp"
#include "laughkit/manifest.hpp"
#include "laughkit/rng.hpp"
#include "laughkit/types.hpp"
#include "laughkit/wav.hpp"

namespace laughkit {

// Synthetic stand-in corpus with class signal in both modalities:
// positives carry a 220 Hz harmonic tone amplitude-gated at 5 Hz (a laughter
// bout rhythm) and a dark-light-dark stripe block stamped into 90% of their
// frames at a per-clip position; negatives alternate between a steady tone
// and white noise over plain noisy mid-gray frames. The stripe geometry is
// the one the built-in smile cascade's features respond to.
struct SynthParams {
    int sample_rate_hz = 16000;
    double clip_seconds = 2.0;
    double frame_rate_hz = 25.0;
    int frame_width = 64;
    int frame_height = 48;
    int pattern_size = 24;   // stripe block side, = cascade window
    int pattern_band_px = 8; // height of each of the three stripes
};

namespace detail {

inline void stamp_stripe_pattern(GrayImage& img, int x0, int y0, const SynthParams& sp, Rng& rng) {
    for (int dy = 0; dy < sp.pattern_size; ++dy) {
        const bool light = dy >= sp.pattern_band_px && dy < 2 * sp.pattern_band_px;
        const int base = light ? 220 : 40;
        for (int dx = 0; dx < sp.pattern_size; ++dx) {
            const int v = base + static_cast<int>(rng.uniform_int(-5, 5));
            img.pixels[static_cast<std::size_t>(y0 + dy) * img.width + (x0 + dx)] =
                static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
    }
}

inline GrayImage noise_frame(int w, int h, Rng& rng) {
    GrayImage img(w, h);
    for (auto& p : img.pixels) {
        p = static_cast<std::uint8_t>(rng.uniform_int(108, 148));
    }
    return img;
}

inline std::string frame_name(int idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d.pgm", idx);
    return buf;
}

} // namespace detail

inline CorpusManifest generate_synthetic_corpus(const std::filesystem::path& out_dir, int n_clips,
                                                std::uint64_t seed,
                                                const SynthParams& sp = SynthParams{}) {
    if (n_clips < 4 || n_clips % 2 != 0) {
        raise(errc::bad_argument, "n_clips must be even and at least 4");
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "audio", ec);
    fs::create_directories(out_dir / "frames", ec);
    if (!fs::is_directory(out_dir / "audio") || !fs::is_directory(out_dir / "frames")) {
        raise(errc::io_error, "cannot create corpus directories under " + out_dir.string());
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    Rng rng(seed);
    const int n_samples = static_cast<int>(std::lround(sp.clip_seconds * sp.sample_rate_hz));
    const int n_frames = static_cast<int>(std::lround(sp.clip_seconds * sp.frame_rate_hz));

    CorpusManifest manifest; // relative paths, resolved on re-parse
    std::vector<std::string> pos_ids, neg_ids;

    for (int i = 0; i < n_clips; ++i) {
        const bool positive = i % 2 == 0;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", positive ? "pos" : "neg", i / 2);
        const std::string id = idbuf;
        (positive ? pos_ids : neg_ids).push_back(id);

        // audio
        AudioClip clip;
        clip.sample_rate_hz = sp.sample_rate_hz;
        clip.samples.resize(n_samples);
        if (positive) {
            const double f0 = 220.0 + rng.uniform() * 20.0 - 10.0;
            const double phase1 = rng.uniform() * two_pi;
            const double phase2 = rng.uniform() * two_pi;
            const double phase3 = rng.uniform() * two_pi;
            const double amp = 0.55 + rng.uniform() * 0.1;
            for (int n = 0; n < n_samples; ++n) {
                const double t = static_cast<double>(n) / sp.sample_rate_hz;
                const double gate = 0.05 + 0.95 * std::max(0.0, std::sin(two_pi * 5.0 * t));
                const double tone = 0.6 * std::sin(two_pi * f0 * t + phase1) +
                                    0.3 * std::sin(two_pi * 2.0 * f0 * t + phase2) +
                                    0.15 * std::sin(two_pi * 3.0 * f0 * t + phase3);
                const double v = amp * gate * tone + 0.01 * rng.normal();
                clip.samples[n] = std::clamp(v, -1.0, 1.0);
            }
        } else if ((i / 2) % 2 == 0) {
            // steady tone: same band as positives but no bout rhythm
            const double f0 = 180.0 + rng.uniform() * 320.0;
            const double phase = rng.uniform() * two_pi;
            const double amp = 0.35 + rng.uniform() * 0.1;
            for (int n = 0; n < n_samples; ++n) {
                const double t = static_cast<double>(n) / sp.sample_rate_hz;
                const double v = amp * std::sin(two_pi * f0 * t + phase) + 0.01 * rng.normal();
                clip.samples[n] = std::clamp(v, -1.0, 1.0);
            }
        } else {
            for (int n = 0; n < n_samples; ++n) {
                clip.samples[n] = std::clamp(0.15 * rng.normal(), -1.0, 1.0);
            }
        }
        const std::string audio_rel = "audio/" + id + ".wav";
        write_wav((out_dir / audio_rel).string(), clip);

        // frames
        const std::string frames_rel = "frames/" + id;
        fs::create_directories(out_dir / frames_rel, ec);
        if (!fs::is_directory(out_dir / frames_rel)) {
            raise(errc::io_error, "cannot create frames dir for " + id);
        }
        int px = 0, py = 0;
        if (positive) {
            px = static_cast<int>(rng.uniform_int(2, sp.frame_width - sp.pattern_size - 2));
            py = static_cast<int>(rng.uniform_int(2, sp.frame_height - sp.pattern_size - 2));
        }
        for (int f = 0; f < n_frames; ++f) {
            GrayImage img = detail::noise_frame(sp.frame_width, sp.frame_height, rng);
            if (positive && f % 10 < 9) {
                detail::stamp_stripe_pattern(img, px, py, sp, rng);
            }
            write_pgm((out_dir / frames_rel / detail::frame_name(f)).string(), img);
        }

        ManifestEntry entry;
        entry.id = id;
        entry.audio_path = audio_rel;
        entry.frames_dir = frames_rel;
        entry.frame_rate_hz = sp.frame_rate_hz;
        entry.label = positive ? 1 : 0;
        entry.split = "train"; // reassigned below
        manifest.entries.push_back(std::move(entry));
    }

    // 70/30 split, stratified per class by seeded shuffle so both splits
    // carry both labels even for small corpora
    std::set<std::string> test_ids;
    for (auto* ids : {&pos_ids, &neg_ids}) {
        rng.shuffle(*ids);
        const std::size_t n_train = ids->size() * 7 / 10;
        for (std::size_t k = n_train; k < ids->size(); ++k) test_ids.insert((*ids)[k]);
    }
    for (ManifestEntry& e : manifest.entries) {
        e.split = test_ids.count(e.id) ? "test" : "train";
    }

    write_manifest(out_dir / "manifest.json", manifest);
    return parse_manifest(out_dir / "manifest.json");
}

} // namespace laughkit
