#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "laughkit/error.hpp"
#include "laughkit/fft.hpp"
#include "laughkit/types.hpp"

namespace laughkit {

enum class WindowKind { hamming, rectangular };

struct MfccConfig {
    double pre_emphasis = 0.97;
    double frame_len_ms = 25.0;
    double hop_ms = 10.0;
    WindowKind window = WindowKind::hamming;
    int n_fft = 0;        // 0 = next power of two >= frame length
    int n_mels = 26;
    int n_mfcc = 13;
    double fmin_hz = 0.0;
    double fmax_hz = 0.0; // 0 = sample_rate / 2
    double log_floor = 1e-10;

    int frame_len_samples(int sample_rate_hz) const {
        return static_cast<int>(std::lround(frame_len_ms / 1000.0 * sample_rate_hz));
    }
    int hop_samples(int sample_rate_hz) const {
        return static_cast<int>(std::lround(hop_ms / 1000.0 * sample_rate_hz));
    }
    int effective_n_fft(int sample_rate_hz) const {
        if (n_fft > 0) return n_fft;
        int n = 1;
        while (n < frame_len_samples(sample_rate_hz)) n <<= 1;
        return n;
    }
    double effective_fmax(int sample_rate_hz) const {
        return fmax_hz > 0.0 ? fmax_hz : sample_rate_hz / 2.0;
    }

    void validate(int sample_rate_hz) const {
        if (pre_emphasis < 0.0 || pre_emphasis >= 1.0) raise(errc::bad_config, "pre_emphasis must lie in [0,1)");
        if (n_mfcc > n_mels) raise(errc::bad_config, "n_mfcc must not exceed n_mels");
        if (n_mels < 1 || n_mfcc < 1) raise(errc::bad_config, "n_mels and n_mfcc must be positive");
        const double fmax = effective_fmax(sample_rate_hz);
        if (!(fmin_hz < fmax)) raise(errc::bad_config, "fmin must be below fmax");
        if (fmax > sample_rate_hz / 2.0) raise(errc::bad_config, "fmax exceeds Nyquist");
        if (log_floor <= 0.0) raise(errc::bad_config, "log_floor must be positive");
        const int nfft = effective_n_fft(sample_rate_hz);
        if (!is_power_of_two(static_cast<std::size_t>(nfft))) raise(errc::not_power_of_two, "n_fft must be a power of two");
        if (nfft < frame_len_samples(sample_rate_hz)) raise(errc::bad_config, "n_fft shorter than frame");
    }
};

struct MfccMatrix {
    std::vector<std::vector<double>> rows;   // n_frames x n_mfcc
    std::vector<double> frame_times_s;       // per-row frame-center timestamps
    double hop_s = 0.0;
    double frame_len_s = 0.0;

    std::size_t n_frames() const { return rows.size(); }
};

// y[0] = x[0]; y[n] = x[n] - alpha * x[n-1]
inline std::vector<double> pre_emphasize(const std::vector<double>& x, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0) raise(errc::bad_config, "pre-emphasis coefficient must lie in [0,1)");
    std::vector<double> y(x.size());
    if (x.empty()) return y;
    y[0] = x[0];
    for (std::size_t n = 1; n < x.size(); ++n) y[n] = x[n] - alpha * x[n - 1];
    return y;
}

inline std::vector<double> make_window(WindowKind kind, int length) {
    std::vector<double> w(static_cast<std::size_t>(length), 1.0);
    if (kind == WindowKind::hamming && length > 1) {
        for (int n = 0; n < length; ++n) {
            w[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (length - 1));
        }
    }
    return w;
}

// Frame k covers samples [k*hop, k*hop + L); the last partial frame is dropped.
inline std::vector<std::vector<double>> frame_and_window(const std::vector<double>& x,
                                                         const MfccConfig& cfg, int sample_rate_hz) {
    const int L = cfg.frame_len_samples(sample_rate_hz);
    const int hop = cfg.hop_samples(sample_rate_hz);
    if (L <= 0 || hop <= 0) raise(errc::bad_config, "frame and hop must be positive");
    if (static_cast<int>(x.size()) < L) raise(errc::too_short, "signal shorter than one frame");

    const std::size_t n_frames = 1 + (x.size() - static_cast<std::size_t>(L)) / static_cast<std::size_t>(hop);
    const auto w = make_window(cfg.window, L);

    std::vector<std::vector<double>> frames(n_frames, std::vector<double>(static_cast<std::size_t>(L)));
    for (std::size_t k = 0; k < n_frames; ++k) {
        const std::size_t start = k * static_cast<std::size_t>(hop);
        for (int n = 0; n < L; ++n) frames[k][n] = x[start + n] * w[n];
    }
    return frames;
}

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular mel filterbank, HTK convention, unit peak. Rows are n_mels
// filters over the one-sided spectrum (n_fft/2 + 1 bins). Center frequencies
// are mapped to bins by flooring (bin width = sample_rate / n_fft).
inline std::vector<std::vector<double>> build_mel_filterbank(const MfccConfig& cfg, int sample_rate_hz) {
    cfg.validate(sample_rate_hz);
    const int n_fft = cfg.effective_n_fft(sample_rate_hz);
    const double fmax = cfg.effective_fmax(sample_rate_hz);
    const std::size_t n_bins = static_cast<std::size_t>(n_fft) / 2 + 1;

    const double mel_lo = hz_to_mel(cfg.fmin_hz);
    const double mel_hi = hz_to_mel(fmax);
    std::vector<int> bin(static_cast<std::size_t>(cfg.n_mels) + 2);
    for (int i = 0; i < cfg.n_mels + 2; ++i) {
        const double mel = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);
        const double hz = mel_to_hz(mel);
        bin[i] = static_cast<int>(std::floor(hz * n_fft / sample_rate_hz));
    }

    std::vector<std::vector<double>> fb(static_cast<std::size_t>(cfg.n_mels),
                                        std::vector<double>(n_bins, 0.0));
    for (int m = 0; m < cfg.n_mels; ++m) {
        const int lo = bin[m], mid = bin[m + 1], hi = bin[m + 2];
        for (int k = lo; k < mid; ++k) {
            if (k >= 0 && k < static_cast<int>(n_bins)) {
                fb[m][k] = static_cast<double>(k - lo) / (mid - lo);
            }
        }
        for (int k = mid; k <= hi; ++k) {
            if (k >= 0 && k < static_cast<int>(n_bins)) {
                fb[m][k] = hi == mid ? 1.0 : static_cast<double>(hi - k) / (hi - mid);
            }
        }
    }
    return fb;
}

// e[m] = ln(max(sum_k FB[m,k] * P[k], log_floor))
inline std::vector<double> log_mel(const std::vector<double>& power,
                                   const std::vector<std::vector<double>>& filterbank,
                                   double log_floor) {
    std::vector<double> e(filterbank.size());
    for (std::size_t m = 0; m < filterbank.size(); ++m) {
        if (filterbank[m].size() != power.size()) raise(errc::shape_mismatch, "filterbank/spectrum size mismatch");
        double acc = 0.0;
        for (std::size_t k = 0; k < power.size(); ++k) acc += filterbank[m][k] * power[k];
        e[m] = std::log(std::max(acc, log_floor));
    }
    return e;
}

// Orthonormal DCT-II, first n_out coefficients.
inline std::vector<double> dct2(const std::vector<double>& e, int n_out) {
    const std::size_t M = e.size();
    if (n_out < 0 || static_cast<std::size_t>(n_out) > M) raise(errc::bad_config, "DCT output size exceeds input");
    std::vector<double> c(static_cast<std::size_t>(n_out));
    const double s0 = std::sqrt(1.0 / static_cast<double>(M));
    const double sk = std::sqrt(2.0 / static_cast<double>(M));
    for (int k = 0; k < n_out; ++k) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            acc += e[m] * std::cos(M_PI * k * (2.0 * m + 1.0) / (2.0 * static_cast<double>(M)));
        }
        c[k] = (k == 0 ? s0 : sk) * acc;
    }
    return c;
}

inline MfccMatrix compute_mfcc(const AudioClip& clip, const MfccConfig& cfg) {
    cfg.validate(clip.sample_rate_hz);
    const int sr = clip.sample_rate_hz;
    const int L = cfg.frame_len_samples(sr);
    const int hop = cfg.hop_samples(sr);
    const int n_fft = cfg.effective_n_fft(sr);

    const auto emphasized = pre_emphasize(clip.samples, cfg.pre_emphasis);
    const auto frames = frame_and_window(emphasized, cfg, sr);
    const auto fb = build_mel_filterbank(cfg, sr);

    MfccMatrix out;
    out.hop_s = static_cast<double>(hop) / sr;
    out.frame_len_s = static_cast<double>(L) / sr;
    out.rows.reserve(frames.size());
    out.frame_times_s.reserve(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const auto p = power_spectrum(frames[k], static_cast<std::size_t>(n_fft));
        const auto e = log_mel(p, fb, cfg.log_floor);
        out.rows.push_back(dct2(e, cfg.n_mfcc));
        out.frame_times_s.push_back((static_cast<double>(k) * hop + L / 2.0) / sr);
    }
    return out;
}

} // namespace laughkit
