#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/mfcc.hpp"

namespace laughkit {

// Clip-level acoustic summary tuned to laughter: where the energy sits in
// frequency, how it is distributed, and how rhythmic the amplitude envelope is.
struct AcousticFeatureVector {
    std::array<double, 4> band_energy_ratio{}; // 0-500, 500-1000, 1000-2000, 2000-fmax Hz
    double spectral_centroid_hz = 0.0;
    double rolloff85_hz = 0.0;
    double zcr_per_s = 0.0;
    double rms_mean = 0.0;
    double rms_std = 0.0;
    double burst_rate_hz = 0.0;

    static constexpr int channel_count = 4 + 5; // ratios + [centroid, rolloff, zcr, rms_mean, rms_std]
};

inline AcousticFeatureVector compute_laughter_acoustics(const AudioClip& clip, const MfccConfig& cfg) {
    cfg.validate(clip.sample_rate_hz);
    const int sr = clip.sample_rate_hz;
    const int n_fft = cfg.effective_n_fft(sr);
    const double fmax = cfg.effective_fmax(sr);

    const auto frames = frame_and_window(clip.samples, cfg, sr);

    // mean one-sided power spectrum over frames
    std::vector<double> mean_p(static_cast<std::size_t>(n_fft) / 2 + 1, 0.0);
    for (const auto& f : frames) {
        const auto p = power_spectrum(f, static_cast<std::size_t>(n_fft));
        for (std::size_t k = 0; k < p.size(); ++k) mean_p[k] += p[k];
    }
    for (auto& v : mean_p) v /= static_cast<double>(frames.size());

    AcousticFeatureVector out;
    const double bin_hz = static_cast<double>(sr) / n_fft;

    double total = 0.0;
    std::array<double, 4> band{};
    double centroid_num = 0.0;
    for (std::size_t k = 0; k < mean_p.size(); ++k) {
        const double f = k * bin_hz;
        if (f > fmax) break;
        total += mean_p[k];
        centroid_num += f * mean_p[k];
        if (f < 500.0) band[0] += mean_p[k];
        else if (f < 1000.0) band[1] += mean_p[k];
        else if (f < 2000.0) band[2] += mean_p[k];
        else band[3] += mean_p[k];
    }

    if (total > 0.0) {
        for (int b = 0; b < 4; ++b) out.band_energy_ratio[b] = band[b] / total;
        out.spectral_centroid_hz = centroid_num / total;
        double cum = 0.0;
        for (std::size_t k = 0; k < mean_p.size(); ++k) {
            const double f = k * bin_hz;
            if (f > fmax) break;
            cum += mean_p[k];
            if (cum >= 0.85 * total) {
                out.rolloff85_hz = f;
                break;
            }
        }
    } else {
        // all-zero signal
        out.band_energy_ratio = {1.0, 0.0, 0.0, 0.0};
    }

    // zero crossings per second, strict sign flips only
    std::size_t crossings = 0;
    for (std::size_t n = 1; n < clip.samples.size(); ++n) {
        if (clip.samples[n - 1] * clip.samples[n] < 0.0) ++crossings;
    }
    const double duration = clip.duration_s();
    out.zcr_per_s = static_cast<double>(crossings) / duration;

    // per-frame RMS on the raw (unwindowed, un-emphasized) signal
    const int L = cfg.frame_len_samples(sr);
    const int hop = cfg.hop_samples(sr);
    std::vector<double> rms;
    rms.reserve(frames.size());
    for (std::size_t start = 0; start + static_cast<std::size_t>(L) <= clip.samples.size();
         start += static_cast<std::size_t>(hop)) {
        double acc = 0.0;
        for (int n = 0; n < L; ++n) acc += clip.samples[start + n] * clip.samples[start + n];
        rms.push_back(std::sqrt(acc / L));
    }
    double mean = 0.0;
    for (double v : rms) mean += v;
    mean /= static_cast<double>(rms.size());
    double var = 0.0;
    for (double v : rms) var += (v - mean) * (v - mean);
    var /= static_cast<double>(rms.size());
    out.rms_mean = mean;
    out.rms_std = std::sqrt(var);

    // bursts: envelope peaks above mean + 0.5 std; a plateau counts once
    const double thresh = mean + 0.5 * out.rms_std;
    std::size_t peaks = 0;
    for (std::size_t i = 1; i + 1 < rms.size(); ++i) {
        if (rms[i] > thresh && rms[i] > rms[i - 1] && rms[i] >= rms[i + 1]) ++peaks;
    }
    out.burst_rate_hz = static_cast<double>(peaks) / duration;
    return out;
}

} // namespace laughkit
