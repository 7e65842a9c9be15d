#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace angspec::detail
{

using cplx = std::complex<double>;

// In-place iterative radix-2 transform, length a power of two.
// sign = -1: X_m = sum_j x_j exp(-2*pi*i*m*j/n)   (no 1/n factor)
// sign = +1: the conjugate kernel, also unnormalized.
// Twiddles come from a directly evaluated table; repeated-multiplication
// recurrences drift above 1e-14 round-trip error on long transforms.
inline void fft_pow2(std::vector<cplx>& a, int sign)
{
    const std::size_t n = a.size();
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    std::vector<cplx> tw(n / 2);
    const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j)
        tw[j] = std::polar(1.0, base * static_cast<double>(j));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cplx w = tw[j * stride];
                const cplx u = a[i + j];
                const cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

// Rotate by n/2: maps the origin-centered layout to DFT layout and back.
// For even n this is its own inverse (fftshift == ifftshift).
inline void rotate_half(std::vector<cplx>& a)
{
    const std::size_t h = a.size() / 2;
    for (std::size_t i = 0; i < h; ++i) std::swap(a[i], a[i + h]);
}

} // namespace angspec::detail
