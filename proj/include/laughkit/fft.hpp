#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "laughkit/error.hpp"

namespace laughkit {

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

// In-place iterative radix-2 Cooley-Tukey. Length must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) raise(errc::not_power_of_two, "FFT length must be a power of two");
    if (n == 1) return;

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// One-sided power spectrum of a real frame zero-padded to n_fft:
// P[k] = |DFT(frame)[k]|^2 for k = 0 .. n_fft/2.
inline std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft) {
    if (!is_power_of_two(n_fft)) raise(errc::not_power_of_two, "n_fft must be a power of two");
    if (frame.size() > n_fft) raise(errc::bad_config, "frame longer than n_fft");

    std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
    for (std::size_t i = 0; i < frame.size(); ++i) buf[i] = {frame[i], 0.0};
    fft_inplace(buf);

    std::vector<double> p(n_fft / 2 + 1);
    for (std::size_t k = 0; k <= n_fft / 2; ++k) p[k] = std::norm(buf[k]);
    return p;
}

} // namespace laughkit
