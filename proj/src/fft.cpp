#include "boltzkit/fft.hpp"

#include <cmath>
#include <cstddef>

#include "boltzkit/common.hpp"

namespace boltz {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

// Bluestein's chirp-z algorithm expressed through a power-of-two convolution.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n avoids precision loss for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> x(m, cd(0, 0)), y(m, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(chirp[k]);
    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

}  // namespace

void fft(std::vector<cd>& a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_pow2(a.size()))
        fft_pow2(a, inverse);
    else
        fft_bluestein(a, inverse);
}

void fft3(std::vector<cd>& a, int n, bool inverse) {
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<cd> line(nn);
    // z lines (contiguous)
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j) {
            cd* base = a.data() + (i * nn + j) * nn;
            line.assign(base, base + nn);
            fft(line, inverse);
            std::copy(line.begin(), line.end(), base);
        }
    // y lines
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t k = 0; k < nn; ++k) {
            for (std::size_t j = 0; j < nn; ++j) line[j] = a[(i * nn + j) * nn + k];
            fft(line, inverse);
            for (std::size_t j = 0; j < nn; ++j) a[(i * nn + j) * nn + k] = line[j];
        }
    // x lines
    for (std::size_t j = 0; j < nn; ++j)
        for (std::size_t k = 0; k < nn; ++k) {
            for (std::size_t i = 0; i < nn; ++i) line[i] = a[(i * nn + j) * nn + k];
            fft(line, inverse);
            for (std::size_t i = 0; i < nn; ++i) a[(i * nn + j) * nn + k] = line[i];
        }
}

}  // namespace boltz
