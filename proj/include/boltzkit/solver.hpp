#ifndef BOLTZKIT_SOLVER_HPP
#define BOLTZKIT_SOLVER_HPP

#include <optional>
#include <vector>

#include "boltzkit/collision.hpp"
#include "boltzkit/norms.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Picard iteration for the regularized linear Boltzmann chain
//   (d_t + v.d_x) f_{n+1} + eps <v>^{s+2g} f_{n+1} = Q(f_n, f_{n+1}),
// operator-split per step: exact semi-Lagrangian transport, then a collision
// update whose nonnegative loss diagonal is treated implicitly,
//   f <- (f + dt gain) / (1 + dt (loss_coef + eps <v>^{s+2g})),
// which preserves positivity of the update for f, g >= 0.
// ---------------------------------------------------------------------------
struct SolverConfig {
    double dt = 1e-3;
    double T = 0.1;
    double epsilon = 0x1p-10;
    int n_picard = 4;
    double contraction_tol = 1e-6;  // stop when sup_t ||<v>^{l1}(f_{n+1}-f_n)|| <= tol

    KernelParams kernel;
    QuadConfig quad;
    WeightLadder ladder;
    HydroBounds hydro;
    BigL bigL;

    enum class F0Mode { initial_datum, paper_profile } f0_mode = F0Mode::initial_datum;
    int checkpoint_stride = 5;   // frozen-coefficient checkpoints every k steps
    int snapshot_stride = 10;    // diagnostics every k steps
    bool strang = false;         // Lie splitting by default
    double positivity_abort = 1e-6;  // abort when min f < -this
    double blowup_factor = 1e4;      // abort when max |f| exceeds this times the initial

    void validate() const;
};

struct TrajectorySample {
    int n = 0;        // Picard iterate index (1 = first solved iterate)
    double t = 0.0;
    double x_norm = 0.0;
    double l1_ell0 = 0.0;
    double l1_ell0_gamma = 0.0;
    double delta_integrand = 0.0;  // ||<D_v>^s <v>^{l1+g/2} f||^2
    double min_f = 0.0;
    double mass_lower_margin = 0.0, mass_upper_margin = 0.0;
    double energy_margin = 0.0, entropy_margin = 0.0;
    double diff_ell1 = 0.0;  // ||<v>^{l1}(f_n - f_{n-1})||_{L2} at this time
};

struct IterationTrajectory {
    std::vector<TrajectorySample> samples;  // ordered by (n, t)
    int iterations_run = 0;
    bool contraction_stop = false;
    std::vector<double> sup_diff_per_iterate;   // sup_t diff_ell1, index n-1
    std::vector<double> mt_streaming_per_iterate;
    DistributionField final_field;              // last iterate at t = T
    std::vector<double> snapshot_times;
    std::vector<DistributionField> final_snapshots;  // last iterate at those times
};

// One operator-split step of length cfg.dt with frozen coefficient g_coeff.
DistributionField linear_step(const DistributionField& f, const DistributionField& g_coeff,
                              const SolverConfig& cfg);

// Transport-only half of the step, exposed for verification.
DistributionField transport_step(const DistributionField& f, double dt);

IterationTrajectory picard_solve(const DistributionField& f_in, const SolverConfig& cfg);

struct DiagnosticsReport {
    // (a) M_T membership
    double mt_value = 0.0;
    double mt_streaming = 0.0;
    bool mt_member = false;
    // (b) E_T membership (c0, a0 are empirical fits fed in by the caller)
    double et_value = 0.0;
    bool et_member = false;
    double c0_used = 0.0, a0_used = 0.0;
    // (c) positivity
    double min_f_overall = 0.0;
    bool positivity_ok = false;
    // (d) condition (H) margins
    double worst_mass_lower = 0.0, worst_mass_upper = 0.0;
    double worst_energy = 0.0, worst_entropy = 0.0;
    bool condition_H_ok = false;
    // (e) contraction
    std::vector<double> sup_diffs;
    std::vector<double> ratios;
    // (f) the delta quantity of the smallness condition vs contraction_tol
    double delta_value = 0.0;
    bool delta_below_tol = false;
};

struct DiagnosticsConfig {
    double c0 = 0.1;   // coercivity fit (lemma_lab) or provisional default
    double a0 = 0.01;  // hypoelliptic fit or provisional default
    bool compute_et = true;
    SphereTransformConfig sphere;
    double positivity_tol = 1e-12;
};

DiagnosticsReport diagnostics(const IterationTrajectory& traj, const SolverConfig& cfg,
                              const DiagnosticsConfig& dcfg);

// sqrt of the time-trapezoid of ||<D_v>^s <v>^{l1+g/2} f||^2 over the final
// iterate of the trajectory
double delta_quantity(const IterationTrajectory& traj, const WeightLadder& ladder);

}  // namespace boltz

#endif
