#pragma once

// Self-contained complex FFT: iterative radix-2 for power-of-two lengths,
// Bluestein chirp-z for everything else.  Pure and reentrant so transforms
// can run from concurrent workers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "core.hpp"

namespace emm::detail {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place radix-2 Cooley-Tukey; a.size() must be a power of two.
inline void fft_pow2_inplace(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

// Bluestein: express the length-n DFT as a convolution of length >= 2n-1,
// evaluated with a power-of-two FFT.  The chirp exponent k^2 mod 2n is kept
// in integer arithmetic so the twiddle angles stay exact for large k.
inline std::vector<cplx> fft_bluestein(const std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = sign * pi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> a(m, cplx(0.0, 0.0));
    std::vector<cplx> b(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    for (std::size_t k = 0; k < n; ++k) {
        b[k] = std::conj(chirp[k]);
        if (k > 0) b[m - k] = std::conj(chirp[k]);
    }
    fft_pow2_inplace(a, false);
    fft_pow2_inplace(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2_inplace(a, true);
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    if (inverse) {
        for (auto& v : out) v /= static_cast<double>(n);
    }
    return out;
}

inline std::vector<cplx> fft(std::vector<cplx> x, bool inverse = false) {
    if (x.empty()) throw NumericError("fft of empty sequence");
    if (is_pow2(x.size())) {
        fft_pow2_inplace(x, inverse);
        return x;
    }
    return fft_bluestein(x, inverse);
}

inline std::vector<cplx> fft_real(const std::vector<double>& x, bool inverse = false) {
    std::vector<cplx> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = cplx(x[i], 0.0);
    return fft(std::move(c), inverse);
}

}  // namespace emm::detail
