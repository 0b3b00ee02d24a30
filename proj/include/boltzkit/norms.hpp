#ifndef BOLTZKIT_NORMS_HPP
#define BOLTZKIT_NORMS_HPP

#include <array>
#include <vector>

#include "boltzkit/kernel.hpp"
#include "boltzkit/phase_field.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Velocity-side Fourier multipliers.  <D_v>^r acts on the periodic surrogate
// of the velocity cube: discrete frequencies eta = (pi/R) k over the Nyquist
// box.  Fields are required to decay at the cube boundary; the boundary tail
// is the caller's responsibility (reported by field constructors).
// ---------------------------------------------------------------------------

// <v>^a f
DistributionField weight_multiply(const DistributionField& f, double a);

// <D_v>^order ( <v>^pre_weight f )
DistributionField fractional_deriv_v(const DistributionField& f, double order,
                                     double pre_weight = 0.0);

// || <D_v>^order <v>^a f ||_{L^2_{x,v}}
double dv_weighted_l2(const DistributionField& f, double order, double a);

// ---------------------------------------------------------------------------
// Spherical fractional Laplacian (-Delta_{S^2})^{s/2} via a real spherical
// harmonic transform on radial shells.
// ---------------------------------------------------------------------------
struct SphereTransformConfig {
    int lmax = 16;
    int shells = 0;  // 0: max(nv, 16)
    // Shell sampling: tricubic is cheap and adequate wherever the result feeds
    // a fitted constant; spectral evaluates the trigonometric interpolant of
    // the periodic surrogate and recovers exact annihilation of radial fields.
    enum class Sampling { tricubic, spectral } sampling = Sampling::tricubic;
};

DistributionField sphere_fractional(const DistributionField& f, double s,
                                    const SphereTransformConfig& cfg = {});

// ---------------------------------------------------------------------------
// Triple norm |||h|||^2 = ||<D_v>^s <v>^{g/2} h||^2_{L2v}
//                       + ||(-Delta_{S2})^{s/2} <v>^{g/2} h||^2_{L2v}
// ---------------------------------------------------------------------------
struct TripleNormConfig {
    double s = 0.5;
    double gamma = 0.0;
    SphereTransformConfig sphere;
};

std::vector<double> triple_norm_per_x(const DistributionField& f, const TripleNormConfig& cfg);
double triple_norm_x(const DistributionField& f, const TripleNormConfig& cfg);

// ---------------------------------------------------------------------------
// Spatial multipliers and the ladder norms.  In homogeneous mode (nx = 1) the
// |alpha| = 3 terms vanish by convention and <D_x>^r is the identity.
// ---------------------------------------------------------------------------
std::vector<std::array<int, 3>> multi_indices_deg3(int dims);

// partial_x^alpha f as an exact Fourier multiplier (i 2 pi k)^alpha
DistributionField x_derivative(const DistributionField& f, const std::array<int, 3>& alpha);

// <D_x>^r f with symbol <k>^r on the torus lattice (k in 2 pi Z^3)
DistributionField x_bracket_deriv(const DistributionField& f, double r);

double x_norm(const DistributionField& f, const WeightLadder& ladder);
double y_norm(const DistributionField& f, const WeightLadder& ladder, const TripleNormConfig& cfg);
double z_norm(const DistributionField& f, const WeightLadder& ladder, double s, double gamma);

}  // namespace boltz

#endif
