#ifndef BOLTZKIT_COLLISION_HPP
#define BOLTZKIT_COLLISION_HPP

#include "boltzkit/interp.hpp"
#include "boltzkit/kernel.hpp"
#include "boltzkit/phase_field.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Direct quadrature of the non-cutoff collision operator
//   Q(g,f)(v) = int_{theta >= theta_min} B(v-v*, sigma)
//               [ g(v'*)(f(v') - f(v)) + f(v)(g(v'*) - g(v*)) ] dsigma dv*.
// The compensated integrand is mandatory: the raw difference g'* f' - g* f is
// not absolutely integrable near theta = 0 for s >= 1/2.
//
// v* runs over the velocity grid; sigma over a product rule with the polar
// nodes clustered geometrically toward theta_min.  Off-grid field values are
// interpolated with zero extension outside the cube.
// ---------------------------------------------------------------------------
struct QuadConfig {
    double theta_min = 0x1p-7;
    int n_theta = 8;
    int n_phi = 8;
    Interp interp = Interp::tricubic;
    double tol = 1e-6;
    // relative threshold defining the numerical support radius used to skip
    // (v, v*) pairs whose integrand vanishes identically
    double support_threshold = 1e-9;
    // optional |v - v*| <= r_rel truncation (0 = off); the skipped mass is the
    // caller's trade-off, not reported here
    double r_rel = 0.0;
    // clamp interpolated values at zero (used by the positivity-preserving
    // solver step; off for plain operator evaluation)
    bool clamp_nonneg = false;
    // spectral upsampling factor for the interpolation surrogate; the cutoff
    // angular mass ~ theta_min^{-2s} amplifies interpolation bias, and
    // sampling the trigonometric interpolant on a refined grid knocks the
    // tricubic error down by factor^4
    int upsample = 2;  // 1..8

    void validate() const;
};

// numerical support radius: largest |v_node| with |f| > threshold * max|f|
double support_radius(const DistributionField& f, double rel_threshold);

DistributionField q_apply(const DistributionField& g, const DistributionField& f,
                          const KernelParams& p, const QuadConfig& cfg);

// Split evaluation used by the implicit solver step:
//   Q(g,f) = gain - loss_coef .* f   with
//   gain(v)      = int B g(v'*) f(v') dsigma dv*   (>= 0 for f, g >= 0 when
//                                                   interpolation is clamped)
//   loss_coef(v) = int B g(v*) dsigma dv*          (>= 0)
struct CollisionSplit {
    DistributionField gain;
    DistributionField loss_coef;
};

CollisionSplit q_split(const DistributionField& g, const DistributionField& f,
                       const KernelParams& p, const QuadConfig& cfg);

// Cancellation-lemma closed form: v -> A_{gamma,s} int g(v*) |v-v*|^gamma dv*
DistributionField cancellation_convolution(const DistributionField& g, const KernelParams& p,
                                           double tol = 1e-10);

// ( <v>^l Q(g,f), h )_{L^2_{x,v}} by trapezoid quadrature of the q_apply output
double q_inner(const DistributionField& g, const DistributionField& f,
               const DistributionField& h, double l, const KernelParams& p,
               const QuadConfig& cfg);

}  // namespace boltz

#endif
