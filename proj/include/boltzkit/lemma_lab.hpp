#ifndef BOLTZKIT_LEMMA_LAB_HPP
#define BOLTZKIT_LEMMA_LAB_HPP

#include <map>
#include <string>
#include <vector>

#include "boltzkit/collision.hpp"
#include "boltzkit/norms.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Numerical verification and constant fitting for the named estimates.  The
// constants in the estimates are existential; the lab reifies them as audited
// empirical fits: upper constants by maximum observed ratio with 5% headroom,
// lower constants by minimum observed ratio with 5% shave.  A failed pass is
// numerical counter-evidence at the working resolution, never a refutation.
// ---------------------------------------------------------------------------
struct InequalityReport {
    std::string name;
    double lhs = 0.0;  // worst-case side over the sample set
    double rhs = 0.0;
    std::map<std::string, double> fitted_constants;
    double margin = 0.0;  // min over samples of rhs - lhs
    bool pass = false;
    std::string sample_digest;
    std::vector<double> sample_margins;
    // auxiliary fit data (exponent regressions etc.)
    std::map<std::string, double> extras;
};

// Seeded Maxwellian-mixture families used as sample inputs.
struct MixtureOptions {
    int bumps_min = 1, bumps_max = 3;
    double temp_min = 0.5, temp_max = 1.5;   // log-uniform
    double center_radius = 1.5;
    double mass_min = 0.5, mass_max = 1.5;
    bool homogeneous_x = true;  // when false, modulate by 1 + a cos(2 pi k.x)
    int x_mode_max = 4;
};

DistributionField random_mixture(const PhaseGrid& grid, Rng& rng, const MixtureOptions& opt);
std::vector<DistributionField> mixture_family(const PhaseGrid& grid, std::uint64_t seed,
                                              int count, const MixtureOptions& opt);

// --- cancellation lemma ------------------------------------------------------
struct CancellationConfig {
    int n_theta = 48;       // nodes of the geometric rule toward theta = 0
    int n_phi = 8;
    double theta_floor = 1e-12;
    Interp interp = Interp::tricubic;
    int upsample = 4;       // spectral refinement of the interpolation surrogate
    double tol = 1e-3;
    std::vector<Vec3> vstar_samples = {{0, 0, 0}};
};

// LHS = int B (f' - f) dsigma dv with f := g and v* fixed (swept over the
// sample), RHS = A_{gamma,s} int g |v - v*|^gamma dv.
InequalityReport verify_cancellation(const DistributionField& g, const KernelParams& p,
                                     const CancellationConfig& cfg);

// --- moment inequality (the <v>^l moment of Q) ------------------------------
struct MomentBoundConfig {
    QuadConfig quad;
    double abs_tol = 1e-9;
    double C_l = 0.0;  // 0: fit over the family, then freeze
};

InequalityReport verify_moment_bound(const std::vector<DistributionField>& f_family,
                                     const DistributionField& g, double l,
                                     const KernelParams& p, const HydroBounds& hydro,
                                     MomentBoundConfig& cfg);

// --- coercivity --------------------------------------------------------------
struct CoercivityConfig {
    QuadConfig quad;
    TripleNormConfig triple;
};

InequalityReport verify_coercivity(const std::vector<DistributionField>& f_family,
                                   const DistributionField& g, const KernelParams& p,
                                   const HydroBounds& hydro, const CoercivityConfig& cfg);

// --- trilinear upper bound ---------------------------------------------------
struct TrilinearConfig {
    QuadConfig quad;
    TripleNormConfig triple;
    int a_split_count = 5;  // grid of (a1, a2) with a1 + a2 = gamma + 2s
};

struct TrilinearSample {
    DistributionField g, f, h;
};

InequalityReport verify_trilinear(const std::vector<TrilinearSample>& family,
                                  const KernelParams& p, const TrilinearConfig& cfg);

// --- commutator --------------------------------------------------------------
struct CommutatorConfig {
    QuadConfig quad;
    double C_l = 0.0;  // 0: fit
};

InequalityReport verify_commutator(const std::vector<TrilinearSample>& family, double l,
                                   const KernelParams& p, CommutatorConfig& cfg);

// --- interpolation lemmas ----------------------------------------------------
enum class InterpolationLemma { embedding, spatial, smallness };

struct InterpolationConfig {
    std::vector<double> eps_list = {0.1, 1.0, 10.0};
    TripleNormConfig triple;
    WeightLadder ladder;
    // regression window for the exponent check: log-spaced grid between the
    // family's smallest and largest binding scales
    int regression_points = 17;
};

InequalityReport verify_interpolation(const std::vector<DistributionField>& family,
                                      InterpolationLemma which, const KernelParams& p,
                                      const InterpolationConfig& cfg);

// --- hypoelliptic symbol checks ----------------------------------------------
struct SymbolSampleSpec {
    std::uint64_t seed = 0;
    int n_samples = 4096;
    int k_max = 64;
    double v_box = 8.0;
    double eta_box_factor = 2.5;  // eta range relative to max <k>^{1/(1+2s)}
};

enum class SymbolKind { unweighted, weighted };

InequalityReport symbol_check(SymbolKind kind, const KernelParams& p,
                              const SymbolSampleSpec& spec);

// The fixed cutoff function: 1 on [-1,1], 0 outside [-2,2], degree-7
// smoothstep in between; exposed for tests.
double symbol_chi(double r);
double symbol_chi_prime(double r);

// phi_k(eta) = 2 k.eta <k>^{-(2+2s)/(1+2s)} chi(<eta>/<k>^{1/(1+2s)})
double symbol_phi(const Vec3& k, const Vec3& eta, double s);
// (1/2) sum_j k_j d_{eta_j} phi_k(eta), closed form
double symbol_phi_bracket(const Vec3& k, const Vec3& eta, double s);
// weighted variant: (1/2) {psi_k, v.k}
double symbol_psi_bracket(const Vec3& k, const Vec3& eta, const Vec3& v, double s, double gamma);

}  // namespace boltz

#endif
