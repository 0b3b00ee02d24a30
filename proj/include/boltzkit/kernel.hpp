#ifndef BOLTZKIT_KERNEL_HPP
#define BOLTZKIT_KERNEL_HPP

#include <string>
#include <vector>

#include "boltzkit/common.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Collision kernel B(v-v*, sigma) = |v-v*|^gamma b(cos theta) for hard
// potentials (gamma >= 0) with a non-integrable angular singularity
// sin(theta) b(cos theta) = b0 theta^{-1-2s} on (0, pi/2], b = 0 beyond pi/2.
// The canonical representative fixes the equivalence class "~ theta^{-1-2s}"
// so every derived constant is concrete.
// ---------------------------------------------------------------------------
struct KernelParams {
    double gamma = 0.0;  // kinetic exponent, >= 0
    double s = 0.5;      // angular singularity, in (0,1)
    double b0 = 1.0;     // normalization of the angular part
    double theta_min = 0x1p-7;  // angular cutoff used by grid quadratures

    void validate() const;
};

struct HydroBounds {
    double m0 = 1.0;  // lower mass bound
    double M0 = 1.0;  // upper mass bound
    double E0 = 3.0;  // energy bound
    double H0 = 1.0;  // entropy bound

    void validate() const;
};

// Weight exponents tied together by
//   rho  = 1 + (14 s + 7 gamma) / 6,
//   ell  = 2 ell1 + 2 + gamma + 3 rho,
//   ell0 = ell + 3 + 7 s + 2 gamma.
struct WeightLadder {
    double ell1 = 0.0;
    double ell = 0.0;
    double ell0 = 0.0;
    double rho = 0.0;
    double tilde_c0 = 0.125;

    static WeightLadder from_ell1(double ell1, const KernelParams& p, double tilde_c0);
    void validate(const KernelParams& p) const;
};

struct BigL {
    double value = 1.0;
    void validate() const;
};

// sin(theta) b(cos theta) = b0 theta^{-1-2s} exactly; domain (0, pi/2].
double angular_b(double theta, const KernelParams& p);

enum class AngularKind { lambda, omega };

// lambda_l = 2^gamma 2pi int_0^{pi/2} sin(t) b(cos t) (1 - cos^l(t/2)) dt
// omega_l  = 2^gamma 2pi int_0^{pi/2} sin(t) b(cos t) sin^l(t/2) dt
// computed with no angular cutoff (both integrands are integrable at 0).
double angular_constant(AngularKind kind, double l, const KernelParams& p, double tol = 1e-10);

// A_{gamma,s} = int_0^{pi/2} sin(t) b(cos t) (cos^{-(3+gamma)}(t/2) - 1) dt
double a_gamma_s(const KernelParams& p, double tol = 1e-10);

struct SelectWeightsOptions {
    double step = 0.5;
    double l_max = 256.0;
    double quad_tol = 1e-10;
};

// Smallest ell1 on the half-integer grid above 13/2 + gamma satisfying
//   lambda_{2 ell1}            >= 2^{4+3 gamma} (M0/m0) A_{gamma,s}
//   omega_{ell1 - 2 - gamma}   <= tilde_c0 / (32 M0)
//   omega_{ell1} / lambda_{ell1} <= m0 / (4^{4+gamma} M0),
// then the full ladder.  Throws NumericalError listing the unmet constraints
// when the search passes l_max.
WeightLadder select_weights(const KernelParams& p, const HydroBounds& hydro, double tilde_c0,
                            const SelectWeightsOptions& opt = {});

struct AsymptoticFit {
    // log lambda_l vs log l (expected slope ~ s)
    double lambda_slope = 0.0;
    double lambda_residual = 0.0;
    // log(l omega_l) vs l (expected slope ~ -(log 2)/2)
    double omega_slope = 0.0;
    double omega_residual = 0.0;
    // bracket of l omega_l 2^{l/2} over the sample
    double omega_bracket_lo = 0.0;
    double omega_bracket_hi = 0.0;
    std::vector<double> l_values;
    std::vector<double> lambda_values;
    std::vector<double> omega_values;
};

// Least-squares fits against the paper's asymptotics lambda_l ~ l^s and
// omega_l ~ l^{-1} 2^{-l/2}.  Requires >= 4 sorted l with max/min >= 8.
AsymptoticFit asymptotic_report(const KernelParams& p, const std::vector<double>& l_values,
                                double tol = 1e-10);

}  // namespace boltz

#endif
