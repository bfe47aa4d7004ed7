#ifndef UPLAB_FFT_HPP
#define UPLAB_FFT_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "uplab/common.hpp"
#include "uplab/signal.hpp"

namespace uplab {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Radix-2 decimation-in-time FFT, in place. Forward is unnormalized,
/// inverse divides by N. Twiddles come from a directly evaluated table (no
/// recurrence), which keeps round-trip error near machine precision even at
/// N = 2^16.
inline void fft_in_place(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    require(is_power_of_two(n), "fft: length must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> twiddle(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        twiddle[k] = {std::cos(ang), std::sin(ang)};
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * twiddle[j * step];
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv_n;
    }
}

inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a,
                                             bool inverse = false) {
    fft_in_place(a, inverse);
    return a;
}

/// Forward FFT of a real vector (zero imaginary parts).
inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
    fft_in_place(a, false);
    return a;
}

} // namespace uplab

#endif
