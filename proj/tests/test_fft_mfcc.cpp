#include <catch_amalgamated.hpp>

#include "laughkit/fft.hpp"
#include "laughkit/mfcc.hpp"
#include "laughkit/rng.hpp"
#include "laughkit/types.hpp"

#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace laughkit;
using laugh_error = laughkit::error;

namespace {

std::vector<double> random_signal(std::size_t n, Rng& rng, double amp = 0.9) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-amp, amp);
    return x;
}

AudioClip make_clip(std::vector<double> samples, int sr = 16000) {
    AudioClip clip;
    clip.sample_rate_hz = sr;
    clip.samples = std::move(samples);
    return clip;
}

// Full MFCC pipeline recomputed from first principles with an O(N^2) DFT.
// Only the filterbank matrix is shared with the library; everything else
// (pre-emphasis, framing, window, transform, log, DCT) is independent.
std::vector<std::vector<double>> mfcc_reference(const AudioClip& clip, const MfccConfig& cfg) {
    const int sr = clip.sample_rate_hz;
    const int L = cfg.frame_len_samples(sr);
    const int hop = cfg.hop_samples(sr);
    const std::size_t n_fft = static_cast<std::size_t>(cfg.effective_n_fft(sr));

    std::vector<double> y(clip.samples.size());
    if (!y.empty()) {
        y[0] = clip.samples[0];
        for (std::size_t n = 1; n < y.size(); ++n)
            y[n] = clip.samples[n] - cfg.pre_emphasis * clip.samples[n - 1];
    }

    std::vector<double> w(static_cast<std::size_t>(L), 1.0);
    if (cfg.window == WindowKind::hamming && L > 1) {
        for (int n = 0; n < L; ++n)
            w[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * n / (L - 1));
    }

    const auto fb = build_mel_filterbank(cfg, sr);
    const std::size_t n_frames = 1 + (y.size() - static_cast<std::size_t>(L)) / static_cast<std::size_t>(hop);
    const std::size_t M = fb.size();

    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < n_frames; ++k) {
        std::vector<std::complex<double>> padded(n_fft, {0.0, 0.0});
        for (int n = 0; n < L; ++n)
            padded[static_cast<std::size_t>(n)] = {y[k * hop + static_cast<std::size_t>(n)] * w[n], 0.0};
        const auto spec = oracle::naive_dft(padded);

        std::vector<double> p(n_fft / 2 + 1);
        for (std::size_t b = 0; b <= n_fft / 2; ++b) p[b] = std::norm(spec[b]);

        std::vector<double> e(M);
        for (std::size_t m = 0; m < M; ++m) {
            double acc = 0.0;
            for (std::size_t b = 0; b < p.size(); ++b) acc += fb[m][b] * p[b];
            e[m] = std::log(std::max(acc, cfg.log_floor));
        }

        std::vector<double> c(static_cast<std::size_t>(cfg.n_mfcc));
        for (int q = 0; q < cfg.n_mfcc; ++q) {
            double acc = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                acc += e[m] * std::cos(M_PI * q * (2.0 * m + 1.0) / (2.0 * static_cast<double>(M)));
            c[static_cast<std::size_t>(q)] = (q == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M)) * acc;
        }
        rows.push_back(std::move(c));
    }
    return rows;
}

} // namespace

TEST_CASE("fft matches the naive DFT at every power-of-two size") {
    Rng rng(11);
    for (std::size_t n = 1; n <= 1024; n <<= 1) {
        std::vector<std::complex<double>> a(n);
        for (auto& v : a) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto expected = oracle::naive_dft(a);
        auto got = a;
        fft_inplace(got);
        double worst = 0.0;
        for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(got[k] - expected[k]));
        REQUIRE(worst < 1e-9 * static_cast<double>(n));
    }
}

TEST_CASE("fft rejects non power-of-two lengths") {
    std::vector<std::complex<double>> a(6, {1.0, 0.0});
    try {
        fft_inplace(a);
        FAIL("expected not_power_of_two");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::not_power_of_two);
    }
}

TEST_CASE("power spectrum of a constant frame concentrates at DC") {
    std::vector<double> frame(8, 1.0);
    const auto p = power_spectrum(frame, 8);
    REQUIRE(p.size() == 5);
    REQUIRE(p[0] == Catch::Approx(64.0).margin(1e-12));
    for (std::size_t k = 1; k < p.size(); ++k) REQUIRE(std::abs(p[k]) < 1e-12);
}

TEST_CASE("power spectrum of one cosine cycle lands in bin 1") {
    std::vector<double> frame(8);
    for (int n = 0; n < 8; ++n) frame[n] = std::cos(2.0 * M_PI * n / 8.0);
    const auto p = power_spectrum(frame, 8);
    REQUIRE(p[1] == Catch::Approx(16.0).margin(1e-9));
    REQUIRE(std::abs(p[0]) < 1e-12);
    REQUIRE(std::abs(p[2]) < 1e-12);
    REQUIRE(std::abs(p[3]) < 1e-12);
    REQUIRE(std::abs(p[4]) < 1e-12);
}

TEST_CASE("power spectrum satisfies Parseval's identity") {
    Rng rng(23);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n_fft = 1u << rng.uniform_int(3, 10);
        const std::size_t len = static_cast<std::size_t>(rng.uniform_int(1, static_cast<int>(n_fft)));
        const auto frame = random_signal(len, rng);

        double energy = 0.0;
        for (double v : frame) energy += v * v;

        const auto p = power_spectrum(frame, n_fft);
        double spectral = p[0] + p[n_fft / 2];
        for (std::size_t k = 1; k < n_fft / 2; ++k) spectral += 2.0 * p[k];
        spectral /= static_cast<double>(n_fft);

        REQUIRE(spectral == Catch::Approx(energy).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("power spectrum zero-pads short frames") {
    Rng rng(31);
    const auto frame = random_signal(5, rng);
    std::vector<std::complex<double>> padded(16, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) padded[i] = {frame[i], 0.0};
    const auto spec = oracle::naive_dft(padded);

    const auto p = power_spectrum(frame, 16);
    REQUIRE(p.size() == 9);
    for (std::size_t k = 0; k < p.size(); ++k)
        REQUIRE(p[k] == Catch::Approx(std::norm(spec[k])).margin(1e-9));
}

TEST_CASE("power spectrum validates its arguments") {
    std::vector<double> frame(10, 0.5);
    try {
        power_spectrum(frame, 8);
        FAIL("expected bad_config");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::bad_config);
    }
    try {
        power_spectrum(frame, 12);
        FAIL("expected not_power_of_two");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::not_power_of_two);
    }
}

TEST_CASE("pre-emphasis first-difference examples") {
    const auto y = pre_emphasize({1.0, 1.0, 1.0}, 0.97);
    REQUIRE(y.size() == 3);
    REQUIRE(y[0] == Catch::Approx(1.0).margin(1e-15));
    REQUIRE(y[1] == Catch::Approx(0.03).margin(1e-15));
    REQUIRE(y[2] == Catch::Approx(0.03).margin(1e-15));

    REQUIRE(pre_emphasize({}, 0.97).empty());
    REQUIRE(pre_emphasize({2.5}, 0.5) == std::vector<double>{2.5});
}

TEST_CASE("pre-emphasis is inverted by the matching one-pole filter") {
    Rng rng(47);
    const auto x = random_signal(1000, rng);
    const double alpha = 0.97;
    const auto y = pre_emphasize(x, alpha);

    std::vector<double> z(y.size());
    z[0] = y[0];
    for (std::size_t n = 1; n < y.size(); ++n) z[n] = y[n] + alpha * z[n - 1];

    for (std::size_t n = 0; n < x.size(); ++n)
        REQUIRE(z[n] == Catch::Approx(x[n]).margin(1e-12));
}

TEST_CASE("pre-emphasis rejects coefficients outside [0,1)") {
    for (double alpha : {-0.1, 1.0, 1.5}) {
        try {
            pre_emphasize({1.0, 2.0}, alpha);
            FAIL("expected bad_config");
        } catch (const laugh_error& e) {
            REQUIRE(e.code() == errc::bad_config);
        }
    }
}

TEST_CASE("Hamming window endpoints and symmetry") {
    const auto w = make_window(WindowKind::hamming, 400);
    REQUIRE(w.size() == 400);
    REQUIRE(w[0] == Catch::Approx(0.08).margin(1e-12));
    REQUIRE(w[399] == Catch::Approx(0.08).margin(1e-12));
    for (int n = 0; n < 400; ++n) REQUIRE(w[n] == Catch::Approx(w[399 - n]).margin(1e-12));

    const auto r = make_window(WindowKind::rectangular, 7);
    for (double v : r) REQUIRE(v == 1.0);
}

TEST_CASE("framing yields exactly one frame when the signal equals the frame length") {
    Rng rng(5);
    MfccConfig cfg; // 25 ms / 10 ms -> L = 400, hop = 160 at 16 kHz
    const auto x = random_signal(400, rng);
    const auto frames = frame_and_window(x, cfg, 16000);
    REQUIRE(frames.size() == 1);
    REQUIRE(frames[0].size() == 400);

    const auto w = make_window(WindowKind::hamming, 400);
    for (int n = 0; n < 400; ++n)
        REQUIRE(frames[0][n] == Catch::Approx(x[n] * w[n]).margin(1e-15));
}

TEST_CASE("framing advances by the hop and drops the trailing partial frame") {
    Rng rng(6);
    MfccConfig cfg;
    cfg.window = WindowKind::rectangular;
    const auto x = random_signal(560, rng);
    const auto frames = frame_and_window(x, cfg, 16000);
    REQUIRE(frames.size() == 2);
    for (int n = 0; n < 400; ++n) {
        REQUIRE(frames[0][n] == x[n]);
        REQUIRE(frames[1][n] == x[160 + n]);
    }
}

TEST_CASE("framing rejects signals shorter than one frame") {
    MfccConfig cfg;
    std::vector<double> x(399, 0.1);
    try {
        frame_and_window(x, cfg, 16000);
        FAIL("expected too_short");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::too_short);
    }
}

TEST_CASE("frame count follows 1 + (N - L) / hop") {
    Rng rng(7);
    MfccConfig cfg;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(400, 4000));
        const auto frames = frame_and_window(random_signal(n, rng), cfg, 16000);
        REQUIRE(frames.size() == 1 + (n - 400) / 160);
    }
}

TEST_CASE("mel scale hits the textbook anchor points") {
    REQUIRE(hz_to_mel(0.0) == 0.0);
    REQUIRE(hz_to_mel(700.0) == Catch::Approx(2595.0 * std::log10(2.0)).margin(1e-12));
    REQUIRE(hz_to_mel(700.0) == Catch::Approx(781.17).margin(0.005));

    Rng rng(9);
    for (int rep = 0; rep < 50; ++rep) {
        const double f = rng.uniform(0.0, 8000.0);
        REQUIRE(mel_to_hz(hz_to_mel(f)) == Catch::Approx(f).margin(1e-9));
        REQUIRE(hz_to_mel(f) <= hz_to_mel(f + 1.0)); // monotone
    }
}

TEST_CASE("mel filterbank rows are unit-peak triangles over contiguous bins") {
    MfccConfig cfg;
    const int sr = 16000;
    const auto fb = build_mel_filterbank(cfg, sr);
    REQUIRE(fb.size() == 26);
    const std::size_t n_bins = static_cast<std::size_t>(cfg.effective_n_fft(sr)) / 2 + 1;
    REQUIRE(n_bins == 257);

    for (const auto& row : fb) {
        REQUIRE(row.size() == n_bins);
        double peak = 0.0;
        std::size_t peak_at = 0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            REQUIRE(row[k] >= 0.0);
            REQUIRE(row[k] <= 1.0 + 1e-12);
            if (row[k] > peak) {
                peak = row[k];
                peak_at = k;
            }
        }
        REQUIRE(peak == Catch::Approx(1.0).margin(1e-12));

        // nondecreasing up to the peak, nonincreasing after, single support run
        for (std::size_t k = 1; k <= peak_at; ++k) REQUIRE(row[k] >= row[k - 1] - 1e-12);
        for (std::size_t k = peak_at + 1; k < row.size(); ++k) REQUIRE(row[k] <= row[k - 1] + 1e-12);
        bool in_support = false, support_done = false;
        for (double v : row) {
            if (v > 0.0) {
                REQUIRE_FALSE(support_done);
                in_support = true;
            } else if (in_support) {
                support_done = true;
            }
        }
    }

    // centers march upward in frequency
    std::size_t prev_peak = 0;
    for (const auto& row : fb) {
        std::size_t peak_at = 0;
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k] > row[peak_at]) peak_at = k;
        REQUIRE(peak_at >= prev_peak);
        prev_peak = peak_at;
    }
}

TEST_CASE("log-mel floors silence and turns gain into an additive offset") {
    MfccConfig cfg;
    const auto fb = build_mel_filterbank(cfg, 16000);
    const std::size_t n_bins = fb[0].size();

    const auto floored = log_mel(std::vector<double>(n_bins, 0.0), fb, cfg.log_floor);
    REQUIRE(floored.size() == 26);
    for (double e : floored) REQUIRE(e == Catch::Approx(std::log(1e-10)).margin(1e-12));

    Rng rng(13);
    std::vector<double> p(n_bins);
    for (auto& v : p) v = rng.uniform(0.5, 2.0); // well above the floor
    auto doubled = p;
    for (auto& v : doubled) v *= 2.0;
    const auto e1 = log_mel(p, fb, cfg.log_floor);
    const auto e2 = log_mel(doubled, fb, cfg.log_floor);
    for (std::size_t m = 0; m < e1.size(); ++m)
        REQUIRE(e2[m] - e1[m] == Catch::Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("log-mel rejects a power vector of the wrong width") {
    MfccConfig cfg;
    const auto fb = build_mel_filterbank(cfg, 16000);
    try {
        log_mel(std::vector<double>(10, 1.0), fb, cfg.log_floor);
        FAIL("expected shape_mismatch");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::shape_mismatch);
    }
}

TEST_CASE("DCT-II of a constant is a lone scaled first coefficient") {
    const double c = 1.7;
    const auto out = dct2(std::vector<double>(26, c), 13);
    REQUIRE(out.size() == 13);
    REQUIRE(out[0] == Catch::Approx(c * std::sqrt(26.0)).margin(1e-12));
    for (std::size_t k = 1; k < out.size(); ++k) REQUIRE(std::abs(out[k]) < 1e-12);
}

TEST_CASE("DCT-II hand-computed two-point case") {
    const auto out = dct2({1.0, -1.0}, 2);
    REQUIRE(std::abs(out[0]) < 1e-15);
    REQUIRE(out[1] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("orthonormal DCT-II is invertible") {
    Rng rng(17);
    const std::size_t M = 26;
    std::vector<double> e(M);
    for (auto& v : e) v = rng.uniform(-3.0, 3.0);
    const auto c = dct2(e, static_cast<int>(M));

    for (std::size_t m = 0; m < M; ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
            const double s = k == 0 ? std::sqrt(1.0 / M) : std::sqrt(2.0 / M);
            acc += s * c[k] * std::cos(M_PI * k * (2.0 * m + 1.0) / (2.0 * static_cast<double>(M)));
        }
        REQUIRE(acc == Catch::Approx(e[m]).margin(1e-9));
    }

    try {
        dct2({1.0, 2.0}, 3);
        FAIL("expected bad_config");
    } catch (const laugh_error& err) {
        REQUIRE(err.code() == errc::bad_config);
    }
}

TEST_CASE("MFCC of silence is a constant matrix determined by the floor") {
    MfccConfig cfg;
    const auto clip = make_clip(std::vector<double>(8000, 0.0));
    const auto m = compute_mfcc(clip, cfg);

    REQUIRE(m.n_frames() == 1 + (8000 - 400) / 160);
    const double c0 = std::log(1e-10) * std::sqrt(26.0);
    for (const auto& row : m.rows) {
        REQUIRE(row.size() == 13);
        REQUIRE(row[0] == Catch::Approx(c0).margin(1e-9));
        for (std::size_t k = 1; k < row.size(); ++k) REQUIRE(std::abs(row[k]) < 1e-9);
    }
}

TEST_CASE("MFCC frame timing metadata") {
    MfccConfig cfg;
    Rng rng(19);
    const auto m = compute_mfcc(make_clip(random_signal(1200, rng)), cfg);
    REQUIRE(m.hop_s == Catch::Approx(0.01).margin(1e-15));
    REQUIRE(m.frame_len_s == Catch::Approx(0.025).margin(1e-15));
    for (std::size_t k = 0; k < m.n_frames(); ++k)
        REQUIRE(m.frame_times_s[k] == Catch::Approx((k * 160.0 + 200.0) / 16000.0).margin(1e-12));
}

TEST_CASE("MFCC pipeline matches the quadratic-DFT reference") {
    Rng rng(21);
    MfccConfig cfg;
    for (int rep = 0; rep < 4; ++rep) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(4800, 9600));
        const auto clip = make_clip(random_signal(n, rng));
        const auto got = compute_mfcc(clip, cfg);
        const auto want = mfcc_reference(clip, cfg);

        REQUIRE(got.n_frames() == want.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < want.size(); ++k)
            for (std::size_t q = 0; q < want[k].size(); ++q)
                worst = std::max(worst, std::abs(got.rows[k][q] - want[k][q]));
        REQUIRE(worst < 1e-6);
    }
}

TEST_CASE("gain rescaling only moves the first MFCC coefficient") {
    Rng rng(25);
    MfccConfig cfg;
    const auto x = random_signal(3200, rng);
    auto scaled = x;
    const double g = 3.7;
    for (auto& v : scaled) v *= g;

    const auto a = compute_mfcc(make_clip(x), cfg);
    const auto b = compute_mfcc(make_clip(scaled), cfg);
    REQUIRE(a.n_frames() == b.n_frames());

    const double c0_shift = std::sqrt(26.0) * std::log(g * g);
    for (std::size_t k = 0; k < a.n_frames(); ++k) {
        REQUIRE(b.rows[k][0] - a.rows[k][0] == Catch::Approx(c0_shift).margin(1e-9));
        for (std::size_t q = 1; q < 13; ++q)
            REQUIRE(b.rows[k][q] == Catch::Approx(a.rows[k][q]).margin(1e-9));
    }
}

TEST_CASE("advancing the signal by one hop shifts the MFCC rows") {
    Rng rng(27);
    MfccConfig cfg;
    cfg.window = WindowKind::rectangular;
    const auto x = random_signal(2000, rng);
    const std::vector<double> shifted(x.begin() + 160, x.end());

    const auto a = compute_mfcc(make_clip(x), cfg);
    const auto b = compute_mfcc(make_clip(shifted), cfg);
    REQUIRE(b.n_frames() == a.n_frames() - 1);

    // row 0 of the shifted clip differs at its very first sample because
    // pre-emphasis has no predecessor there; every later row matches exactly
    for (std::size_t k = 1; k < b.n_frames(); ++k)
        for (std::size_t q = 0; q < 13; ++q)
            REQUIRE(b.rows[k][q] == Catch::Approx(a.rows[k + 1][q]).margin(1e-9));
}

TEST_CASE("MFCC configuration validation catches inconsistent setups") {
    AudioClip clip = make_clip(std::vector<double>(800, 0.1));

    MfccConfig bad = {};
    bad.n_mfcc = 30; // exceeds n_mels
    try {
        compute_mfcc(clip, bad);
        FAIL("expected bad_config");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::bad_config);
    }

    MfccConfig nyq = {};
    nyq.fmax_hz = 9000.0; // above Nyquist at 16 kHz
    try {
        compute_mfcc(clip, nyq);
        FAIL("expected bad_config");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::bad_config);
    }

    MfccConfig pow2 = {};
    pow2.n_fft = 500;
    try {
        compute_mfcc(clip, pow2);
        FAIL("expected not_power_of_two");
    } catch (const laugh_error& e) {
        REQUIRE(e.code() == errc::not_power_of_two);
    }
}
