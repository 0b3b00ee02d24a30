#ifndef BOLTZKIT_INTERP_HPP
#define BOLTZKIT_INTERP_HPP

#include <cstddef>
#include <vector>

#include "boltzkit/common.hpp"

namespace boltz {

enum class Interp { trilinear, tricubic };

// Read-only view of one nv^3 velocity slice on [-R, R)^3 with zero extension
// outside the cube.
struct VelocitySlice {
    const double* data = nullptr;
    int nv = 0;
    double R = 0.0;

    double hv() const { return 2.0 * R / nv; }

    double value(int i, int j, int k) const {
        if (static_cast<unsigned>(i) >= static_cast<unsigned>(nv) ||
            static_cast<unsigned>(j) >= static_cast<unsigned>(nv) ||
            static_cast<unsigned>(k) >= static_cast<unsigned>(nv))
            return 0.0;
        return data[(static_cast<std::size_t>(i) * nv + j) * nv + k];
    }

    double sample(const Vec3& v, Interp mode) const {
        return mode == Interp::trilinear ? sample_linear(v) : sample_cubic(v);
    }

    double sample_linear(const Vec3& v) const;
    double sample_cubic(const Vec3& v) const;
};

// Catmull-Rom weights for parameter u in [0,1); w[0..3] multiply samples at
// base-1 .. base+2.
inline void catmull_rom_weights(double u, double w[4]) {
    const double u2 = u * u, u3 = u2 * u;
    w[0] = 0.5 * (-u + 2.0 * u2 - u3);
    w[1] = 1.0 + 0.5 * (-5.0 * u2 + 3.0 * u3);
    w[2] = 0.5 * (u + 4.0 * u2 - 3.0 * u3);
    w[3] = 0.5 * (-u2 + u3);
}

// Periodic cubic interpolation of a length-n sequence at real position t
// (in index units); used by the semi-Lagrangian transport step.
double periodic_cubic(const double* line, int n, std::ptrdiff_t stride, double t);

// Zero-padded FFT upsampling of one nv^3 slice by an integer factor; node
// values on the original lattice are preserved exactly (trigonometric
// interpolation), and the tricubic error on the refined lattice drops by
// factor^4.
std::vector<double> upsample_slice(const double* src, int nv, int factor);

// Zero-padded copy of one velocity slice (optionally upsampled); the 3-cell
// margin makes the cubic stencil gather branch-free for any base index in
// [-2, nv+1].
class PaddedSampler {
  public:
    PaddedSampler(const double* src, int nv, double R, int upsample_factor = 1);

    double cubic(double vx, double vy, double vz) const;
    double linear(double vx, double vy, double vz) const;
    double sample(const Vec3& v, Interp mode) const {
        return mode == Interp::tricubic ? cubic(v.x, v.y, v.z) : linear(v.x, v.y, v.z);
    }

  private:
    int n_, np_;
    double R_, inv_h_;
    std::vector<double> data_;
};

}  // namespace boltz

#endif
