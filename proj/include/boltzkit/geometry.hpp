#ifndef BOLTZKIT_GEOMETRY_HPP
#define BOLTZKIT_GEOMETRY_HPP

#include <functional>
#include <string>
#include <vector>

#include "boltzkit/common.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Collision geometry in the sigma-representation:
//   v'  = (v+v*)/2 + |v-v*|/2 sigma,   v'* = (v+v*)/2 - |v-v*|/2 sigma,
//   cos theta = (v-v*)/|v-v*| . sigma.
// ---------------------------------------------------------------------------
struct CollisionTriple {
    Vec3 v;
    Vec3 v_star;
    Vec3 sigma;  // |sigma| = 1 up to 1e-12

    void validate() const;
};

struct DeviationFrame {
    double theta = 0.0;   // in [0, pi]
    Vec3 kappa;           // (v-v*)/|v-v*|
    Vec3 kappa_perp;      // unit, orthogonal to kappa, in span{kappa, sigma}
    bool fallback = false;  // kappa_perp chosen by Gram-Schmidt against a
                            // fixed basis vector because sigma ~ +-kappa
};

struct PostCollision {
    Vec3 v_prime;
    Vec3 v_star_prime;
};

PostCollision post_collision(const CollisionTriple& t);

// Throws DomainError when sigma is parallel to kappa (theta in {0, pi}).
DeviationFrame deviation_frame(const CollisionTriple& t);

// Same, but degenerate frames get a flagged fallback kappa_perp instead of an
// error; used where only theta and sin(theta/2)-weighted terms are needed.
DeviationFrame deviation_frame_lenient(const CollisionTriple& t);

// <v'>^l = <v>^l cos^l(t/2) + <v*>^l sin^l(t/2)
//        + l <v>^{l-2} |v-v*| (v.kappa_perp) cos^{l-1}(t/2) sin(t/2) + R_l
struct WeightExpansion {
    double term_v = 0.0;       // <v>^l cos^l(theta/2)
    double term_vstar = 0.0;   // <v*>^l sin^l(theta/2)
    double term_cross = 0.0;   // the kappa_perp term
    double remainder = 0.0;    // R_l, defined as the difference
    // the paper's majorant for |R_l| with unit constant:
    //   <v><v*>^{l-1} sin^{l-3}(t/2) + <v>^{l-2}<v*>^2 sin^2(t/2)
    // + <v>^{l-4}<v*>^4 sin^2(t/2)
    double remainder_majorant = 0.0;
};

WeightExpansion weight_expansion(const CollisionTriple& t, double l);

// ---------------------------------------------------------------------------
// Sphere quadrature: Gauss-Legendre in cos(theta) over a theta interval inside
// [0, pi/2], uniform trapezoid in phi (exact for the azimuthal polynomials of
// the polar decomposition).
// ---------------------------------------------------------------------------
struct SphereRule {
    std::vector<double> theta;     // polar nodes
    std::vector<double> w_theta;   // includes the d(cos theta) weight
    int n_phi = 0;

    static SphereRule over_theta(double theta_lo, double theta_hi, int n_theta, int n_phi);

    // integrates F(theta, phi) over the spherical cap/band
    double integrate(const std::function<double(double, double)>& F) const;
};

// Angular weight for the change-of-variable checks: arbitrary function of
// theta supported inside [support_lo, support_hi] \subset (0, pi/2].
struct AngularWeight {
    double support_lo = kPi / 8.0;
    double support_hi = kPi / 2.0;
    std::function<double(double)> h;  // evaluated on [support_lo, support_hi]

    double operator()(double theta) const {
        if (theta < support_lo || theta > support_hi) return 0.0;
        return h ? h(theta) : 1.0;
    }
};

enum class CovIdentity { pre_post, carleman_cos, carleman_sin };

struct CovQuadConfig {
    // numerical support radius of the test function; the carleman volume
    // integrals run in spherical coordinates around the fixed velocity out to
    // (support + |fixed|) / cos(hi/2) resp. / sin(lo/2), which is where the
    // primed argument leaves the support
    double support_radius = 6.5;
    int n_r = 48;      // radial Gauss order
    int n_dir_mu = 16;  // direction sphere: GL in cos, uniform in phi
    int n_dir_phi = 32;
    int n_theta = 16;  // sigma sphere over the support of H
    int n_phi = 32;
    double tol = 1e-4;
    double cube_radius = 6.0;    // pre_post tensor cubes
    int pre_post_gl_order = 14;  // the 6+2 dimensional variant runs coarser
};

struct IdentityReport {
    std::string kind;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_discrepancy = 0.0;  // |lhs-rhs| / max(|lhs|,|rhs|,1e-300)
    bool pass = false;
    double tol = 0.0;
};

using ScalarField3 = std::function<double(const Vec3&)>;

// Checks one of the change-of-variable identities by two independent
// quadratures:
//  - carleman_cos: fixed v*, integral over (v, sigma); RHS carries
//    1/cos^{3+gamma}(theta/2).
//  - carleman_sin: fixed v, integral over (v*, sigma); RHS carries
//    1/sin^{3+gamma}(theta/2).
//  - pre_post: integral over (v, v*, sigma) of f(v') g(v'*) vs f(v) g(v*),
//    where g is the test function translated by `fixed`.
IdentityReport check_cov_identity(CovIdentity kind, const ScalarField3& f, const Vec3& fixed,
                                  const AngularWeight& H, double gamma,
                                  const CovQuadConfig& quad);

}  // namespace boltz

#endif
