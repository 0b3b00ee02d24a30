#include "boltzkit/interp.hpp"

#include <cmath>
#include <complex>

#include "boltzkit/fft.hpp"

namespace boltz {

double VelocitySlice::sample_linear(const Vec3& v) const {
    const double h = hv();
    const double tx = (v.x + R) / h, ty = (v.y + R) / h, tz = (v.z + R) / h;
    const int i = static_cast<int>(std::floor(tx));
    const int j = static_cast<int>(std::floor(ty));
    const int k = static_cast<int>(std::floor(tz));
    const double ux = tx - i, uy = ty - j, uz = tz - k;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a) {
        const double wa = a ? ux : 1.0 - ux;
        if (wa == 0.0) continue;
        for (int b = 0; b < 2; ++b) {
            const double wb = b ? uy : 1.0 - uy;
            if (wb == 0.0) continue;
            for (int c = 0; c < 2; ++c) {
                const double wc = c ? uz : 1.0 - uz;
                if (wc == 0.0) continue;
                acc += wa * wb * wc * value(i + a, j + b, k + c);
            }
        }
    }
    return acc;
}

double VelocitySlice::sample_cubic(const Vec3& v) const {
    const double h = hv();
    const double tx = (v.x + R) / h, ty = (v.y + R) / h, tz = (v.z + R) / h;
    const int i = static_cast<int>(std::floor(tx));
    const int j = static_cast<int>(std::floor(ty));
    const int k = static_cast<int>(std::floor(tz));
    if (i < -2 || i > nv + 1 || j < -2 || j > nv + 1 || k < -2 || k > nv + 1) return 0.0;
    double wx[4], wy[4], wz[4];
    catmull_rom_weights(tx - i, wx);
    catmull_rom_weights(ty - j, wy);
    catmull_rom_weights(tz - k, wz);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const int ia = i - 1 + a;
        if (static_cast<unsigned>(ia) >= static_cast<unsigned>(nv)) continue;
        double acc_a = 0.0;
        for (int b = 0; b < 4; ++b) {
            const int jb = j - 1 + b;
            if (static_cast<unsigned>(jb) >= static_cast<unsigned>(nv)) continue;
            const double* line = data + (static_cast<std::size_t>(ia) * nv + jb) * nv;
            double acc_b = 0.0;
            for (int c = 0; c < 4; ++c) {
                const int kc = k - 1 + c;
                if (static_cast<unsigned>(kc) >= static_cast<unsigned>(nv)) continue;
                acc_b += wz[c] * line[kc];
            }
            acc_a += wy[b] * acc_b;
        }
        acc += wx[a] * acc_a;
    }
    return acc;
}

double periodic_cubic(const double* line, int n, std::ptrdiff_t stride, double t) {
    t -= std::floor(t / n) * n;  // wrap into [0, n)
    const int i = static_cast<int>(std::floor(t));
    double w[4];
    catmull_rom_weights(t - i, w);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        int idx = i - 1 + a;
        idx %= n;
        if (idx < 0) idx += n;
        acc += w[a] * line[idx * stride];
    }
    return acc;
}

std::vector<double> upsample_slice(const double* src, int nv, int factor) {
    using cd = std::complex<double>;
    const int m = nv * factor;
    const std::size_t nvt = static_cast<std::size_t>(nv) * nv * nv;
    std::vector<cd> small(nvt);
    for (std::size_t i = 0; i < nvt; ++i) small[i] = cd(src[i], 0.0);
    fft3(small, nv, false);
    std::vector<cd> big(static_cast<std::size_t>(m) * m * m, cd(0.0, 0.0));
    const double scale = std::pow(static_cast<double>(factor), 3.0);
    auto wrap = [m](int f) { return f >= 0 ? f : f + m; };
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
            for (int c = 0; c < nv; ++c) {
                const int fa = freq_index(a, nv), fb = freq_index(b, nv),
                          fc = freq_index(c, nv);
                cd val = small[(static_cast<std::size_t>(a) * nv + b) * nv + c] * scale;
                // split Nyquist bins between +-nv/2 to keep the result real
                std::vector<int> fas{fa}, fbs{fb}, fcs{fc};
                if (fa == nv / 2) {
                    fas = {nv / 2, -nv / 2};
                    val *= 0.5;
                }
                if (fb == nv / 2) {
                    fbs = {nv / 2, -nv / 2};
                    val *= 0.5;
                }
                if (fc == nv / 2) {
                    fcs = {nv / 2, -nv / 2};
                    val *= 0.5;
                }
                for (int ga : fas)
                    for (int gb : fbs)
                        for (int gc : fcs)
                            big[(static_cast<std::size_t>(wrap(ga)) * m + wrap(gb)) * m +
                                wrap(gc)] += val;
            }
    fft3(big, m, true);
    std::vector<double> out(big.size());
    for (std::size_t i = 0; i < big.size(); ++i) out[i] = big[i].real();
    return out;
}

PaddedSampler::PaddedSampler(const double* src, int nv, double R, int upsample_factor) {
    std::vector<double> fine;
    if (upsample_factor > 1) {
        fine = upsample_slice(src, nv, upsample_factor);
        src = fine.data();
        nv *= upsample_factor;
    }
    n_ = nv;
    np_ = nv + 6;
    R_ = R;
    inv_h_ = nv / (2.0 * R);
    data_.assign(static_cast<std::size_t>(np_) * np_ * np_, 0.0);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < nv; ++j) {
            const double* line = src + (static_cast<std::size_t>(i) * nv + j) * nv;
            double* dst = data_.data() +
                          ((static_cast<std::size_t>(i) + 3) * np_ + (j + 3)) * np_ + 3;
            for (int k = 0; k < nv; ++k) dst[k] = line[k];
        }
}

double PaddedSampler::cubic(double vx, double vy, double vz) const {
    const double tx = (vx + R_) * inv_h_;
    const double ty = (vy + R_) * inv_h_;
    const double tz = (vz + R_) * inv_h_;
    const int i = static_cast<int>(std::floor(tx));
    const int j = static_cast<int>(std::floor(ty));
    const int k = static_cast<int>(std::floor(tz));
    if (static_cast<unsigned>(i + 2) >= static_cast<unsigned>(n_ + 4) ||
        static_cast<unsigned>(j + 2) >= static_cast<unsigned>(n_ + 4) ||
        static_cast<unsigned>(k + 2) >= static_cast<unsigned>(n_ + 4))
        return 0.0;
    double wx[4], wy[4], wz[4];
    catmull_rom_weights(tx - i, wx);
    catmull_rom_weights(ty - j, wy);
    catmull_rom_weights(tz - k, wz);
    const std::size_t base = ((static_cast<std::size_t>(i) + 2) * np_ + (j + 2)) * np_ + (k + 2);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double* plane = data_.data() + base + static_cast<std::size_t>(a) * np_ * np_;
        double acc_a = 0.0;
        for (int b = 0; b < 4; ++b) {
            const double* line = plane + static_cast<std::size_t>(b) * np_;
            acc_a += wy[b] *
                     (wz[0] * line[0] + wz[1] * line[1] + wz[2] * line[2] + wz[3] * line[3]);
        }
        acc += wx[a] * acc_a;
    }
    return acc;
}

double PaddedSampler::linear(double vx, double vy, double vz) const {
    const double tx = (vx + R_) * inv_h_;
    const double ty = (vy + R_) * inv_h_;
    const double tz = (vz + R_) * inv_h_;
    const int i = static_cast<int>(std::floor(tx));
    const int j = static_cast<int>(std::floor(ty));
    const int k = static_cast<int>(std::floor(tz));
    if (static_cast<unsigned>(i + 2) >= static_cast<unsigned>(n_ + 4) ||
        static_cast<unsigned>(j + 2) >= static_cast<unsigned>(n_ + 4) ||
        static_cast<unsigned>(k + 2) >= static_cast<unsigned>(n_ + 4))
        return 0.0;
    const double ux = tx - i, uy = ty - j, uz = tz - k;
    const std::size_t base = ((static_cast<std::size_t>(i) + 3) * np_ + (j + 3)) * np_ + (k + 3);
    const double* p0 = data_.data() + base;
    const double* p1 = p0 + static_cast<std::size_t>(np_) * np_;
    auto lerp2 = [&](const double* p) {
        const double a = p[0] + uz * (p[1] - p[0]);
        const double b = p[np_] + uz * (p[np_ + 1] - p[np_]);
        return a + uy * (b - a);
    };
    return lerp2(p0) + ux * (lerp2(p1) - lerp2(p0));
}

}  // namespace boltz
