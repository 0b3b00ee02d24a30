#ifndef BOLTZKIT_FFT_HPP
#define BOLTZKIT_FFT_HPP

#include <complex>
#include <vector>

namespace boltz {

// Complex FFT of arbitrary length (radix-2 for powers of two, Bluestein
// otherwise).  Forward transform is unnormalized; the inverse divides by n.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// In-place 3D transform of an n^3 row-major cube.
void fft3(std::vector<std::complex<double>>& a, int n, bool inverse);

// Signed frequency index for bin k of an n-point transform.
inline int freq_index(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace boltz

#endif
