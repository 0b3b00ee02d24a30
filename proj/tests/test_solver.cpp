#include "boltzkit/solver.hpp"

#include <cmath>

#include "boltzkit/lemma_lab.hpp"
#include "doctest.h"

using namespace boltz;

namespace {
SolverConfig base_config(double dt = 1e-3, double T = 0.01) {
    SolverConfig c;
    c.dt = dt;
    c.T = T;
    c.epsilon = 0.0;
    c.n_picard = 2;
    c.kernel.gamma = 0.0;
    c.kernel.s = 0.5;
    c.quad.n_theta = 8;
    c.quad.n_phi = 8;
    c.quad.interp = Interp::trilinear;
    c.ladder = WeightLadder::from_ell1(7.0, c.kernel, 0.125);
    c.hydro = HydroBounds{};
    c.bigL.value = 64.0;
    c.contraction_tol = 1e-12;
    c.snapshot_stride = 2;
    return c;
}

PhaseGrid homo_grid(int nv = 14, double R = 6.0) {
    PhaseGrid g;
    g.nx = 1;
    g.nv = nv;
    g.R = R;
    return g;
}
}  // namespace

TEST_CASE("transport: one-cell shift is exact on the lattice") {
    PhaseGrid g;
    g.nx = 16;
    g.dx_dims = 1;
    g.nv = 8;
    g.R = 4.0;
    DistributionField f(g);
    Rng rng(2);
    for (auto& v : f.values()) v = rng.uniform();
    // pick dt so that every velocity node with v_x = 1 moves exactly one cell;
    // check that particular v-slice
    const double dt = g.hx() / 1.0;
    const DistributionField out = transport_step(f, dt);
    // find a v index with v_x == 1
    int iv_sel = -1;
    for (std::size_t iv = 0; iv < g.n_v_total(); ++iv)
        if (std::abs(g.v_node(iv).x - 1.0) < 1e-12) {
            iv_sel = static_cast<int>(iv);
            break;
        }
    REQUIRE(iv_sel >= 0);
    for (int ix = 0; ix < g.nx; ++ix) {
        const int src = (ix - 1 + g.nx) % g.nx;  // f(x) <- f(x - v dt)
        CHECK(out.at(static_cast<std::size_t>(ix), static_cast<std::size_t>(iv_sel)) ==
              doctest::Approx(f.at(static_cast<std::size_t>(src),
                                   static_cast<std::size_t>(iv_sel)))
                  .epsilon(1e-13));
    }
    // homogeneous mode: transport is the identity
    const PhaseGrid hg = homo_grid(8, 4.0);
    DistributionField hf(hg, 1.25);
    const DistributionField hout = transport_step(hf, 0.37);
    CHECK(hout.values() == hf.values());
}

TEST_CASE("transport conserves mass and L2 on smooth fields") {
    PhaseGrid g;
    g.nx = 16;
    g.dx_dims = 1;
    g.nv = 8;
    g.R = 4.0;
    DistributionField f(g);
    for (std::size_t ix = 0; ix < g.n_x_total(); ++ix) {
        const double x = static_cast<double>(ix) / g.nx;
        for (std::size_t iv = 0; iv < g.n_v_total(); ++iv)
            f.at(ix, iv) = (1.0 + 0.5 * std::sin(2.0 * kPi * x)) *
                           std::exp(-0.5 * norm2(g.v_node(iv)));
    }
    const DistributionField out = transport_step(f, 3e-3);
    auto total = [&](const DistributionField& h) {
        double acc = 0.0;
        for (double v : h.values()) acc += v;
        return acc;
    };
    CHECK(total(out) == doctest::Approx(total(f)).epsilon(1e-12));
    CHECK(l2_norm(out) == doctest::Approx(l2_norm(f)).epsilon(1e-8));
}

TEST_CASE("step splitting: two half steps vs one full step is O(dt^2)") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config();
    const DistributionField mu = maxwellian(g, {1.0, 0.9, {0.3, 0, 0}});
    const DistributionField coeff = maxwellian(g, {});
    auto split_err = [&](double dt) {
        SolverConfig cf = c;
        cf.dt = dt;
        cf.T = dt;
        const DistributionField full = linear_step(mu, coeff, cf);
        cf.dt = 0.5 * dt;
        const DistributionField half1 = linear_step(mu, coeff, cf);
        const DistributionField half2 = linear_step(half1, coeff, cf);
        double worst = 0.0;
        for (std::size_t i = 0; i < full.values().size(); ++i)
            worst = std::max(worst, std::abs(full.values()[i] - half2.values()[i]));
        return worst;
    };
    const double e1 = split_err(2e-2);
    const double e2 = split_err(1e-2);
    CHECK(e2 < 0.35 * e1);  // ~ 1/4 for a first-order-consistent split
}

TEST_CASE("small-dt consistency with the collision operator") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config();
    c.epsilon = 0x1p-6;
    const DistributionField f = maxwellian(g, {1.0, 0.8, {0.4, 0, 0}});
    const DistributionField coeff = maxwellian(g, {});
    const double dt = 1e-5;
    SolverConfig cf = c;
    cf.dt = dt;
    cf.T = dt;
    const DistributionField stepped = linear_step(f, coeff, cf);
    QuadConfig qc = c.quad;
    qc.clamp_nonneg = true;
    const DistributionField q = q_apply(coeff, f, c.kernel, qc);
    double worst = 0.0;
    for (std::size_t iv = 0; iv < g.n_v_total(); ++iv) {
        const double reg = c.epsilon * std::pow(vweight(g.v_node(iv)),
                                                c.kernel.s + 2.0 * c.kernel.gamma);
        const double predicted = f.at(0, iv) + dt * (q.at(0, iv) - reg * f.at(0, iv));
        worst = std::max(worst, std::abs(stepped.at(0, iv) - predicted));
    }
    // the O(dt^2) defect of the implicit update
    CHECK(worst < 50.0 * dt * dt * (q.max_abs() + 1.0));
}

TEST_CASE("equilibrium is a fixed point of the Picard chain") {
    const PhaseGrid g = homo_grid(14, 6.0);
    SolverConfig c = base_config(2e-3, 0.02);
    c.n_picard = 2;
    const DistributionField mu = maxwellian(g, {});
    const IterationTrajectory traj = picard_solve(mu, c);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.final_field.values().size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.final_field.values()[i] - mu.values()[i]));
    CHECK(worst < 2e-3 * mu.max_abs());
    // positivity along the way
    for (const auto& s : traj.samples) CHECK(s.min_f >= -1e-10);
    // condition (H) margins positive throughout
    for (const auto& s : traj.samples) {
        CHECK(s.mass_lower_margin > 0.0);
        CHECK(s.mass_upper_margin > 0.0);
        CHECK(s.energy_margin > 0.0);
        CHECK(s.entropy_margin > 0.0);
    }
}

TEST_CASE("determinism: identical runs produce identical trajectories") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config(2.5e-3, 0.01);
    DistributionField f = maxwellian(g, {});
    Rng rng(9);
    MixtureOptions mo;
    const DistributionField bump = random_mixture(g, rng, mo);
    for (std::size_t i = 0; i < f.values().size(); ++i)
        f.values()[i] += 0.05 * bump.values()[i] * f.max_abs() / bump.max_abs();
    const IterationTrajectory t1 = picard_solve(f, c);
    const IterationTrajectory t2 = picard_solve(f, c);
    REQUIRE(t1.samples.size() == t2.samples.size());
    for (std::size_t i = 0; i < t1.samples.size(); ++i) {
        CHECK(t1.samples[i].x_norm == t2.samples[i].x_norm);
        CHECK(t1.samples[i].diff_ell1 == t2.samples[i].diff_ell1);
        CHECK(t1.samples[i].min_f == t2.samples[i].min_f);
    }
    CHECK(t1.final_field.values() == t2.final_field.values());
}

TEST_CASE("M_T functional: streaming equals post-hoc") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config(2.5e-3, 0.01);
    c.snapshot_stride = 1;
    const DistributionField mu = maxwellian(g, {});
    const IterationTrajectory traj = picard_solve(mu, c);
    DiagnosticsConfig dc;
    dc.compute_et = false;
    const DiagnosticsReport rep = diagnostics(traj, c, dc);
    CHECK(rep.mt_streaming ==
          doctest::Approx(rep.mt_value).epsilon(1e-12));
    CHECK(rep.mt_member);
    CHECK(rep.condition_H_ok);
    CHECK(rep.positivity_ok);
}

TEST_CASE("paper-mode f0 matches the initial mass") {
    PhaseGrid g;
    g.nx = 1;
    g.nv = 32;
    g.R = 2.0;  // fine spacing so the steep profile is resolvable
    SolverConfig c = base_config(1e-3, 1e-3);
    c.f0_mode = SolverConfig::F0Mode::paper_profile;
    c.n_picard = 1;
    c.hydro.E0 = 3.0;
    c.hydro.H0 = 2.0;
    // a cool Maxwellian fitting inside the small cube
    const DistributionField f_in = maxwellian(g, {1.0, 0.15, {0, 0, 0}});
    const IterationTrajectory traj = picard_solve(f_in, c);
    CHECK(traj.iterations_run == 1);
    // the first sample's diff against f0 is finite and the run completes
    CHECK(std::isfinite(traj.sup_diff_per_iterate[0]));
}

TEST_CASE("delta quantity: trapezoid logic and monotonicity in T") {
    WeightLadder lad = WeightLadder::from_ell1(7.0, KernelParams{}, 0.125);
    IterationTrajectory traj;
    traj.iterations_run = 1;
    CHECK(delta_quantity(traj, lad) == 0.0);
    // constant integrand c over [0, T] gives sqrt(c T)
    for (double t : {0.0, 0.05, 0.1}) {
        TrajectorySample s;
        s.n = 1;
        s.t = t;
        s.delta_integrand = 4.0;
        traj.samples.push_back(s);
    }
    CHECK(delta_quantity(traj, lad) == doctest::Approx(std::sqrt(4.0 * 0.1)).epsilon(1e-14));
    TrajectorySample s;
    s.n = 1;
    s.t = 0.2;
    s.delta_integrand = 4.0;
    traj.samples.push_back(s);
    CHECK(delta_quantity(traj, lad) == doctest::Approx(std::sqrt(4.0 * 0.2)).epsilon(1e-14));
}

TEST_CASE("static-field delta matches the closed form") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config(2.5e-3, 0.01);
    c.snapshot_stride = 1;
    const DistributionField mu = maxwellian(g, {});
    const IterationTrajectory traj = picard_solve(mu, c);
    const double expected =
        std::sqrt(c.T) * dv_weighted_l2(mu, c.kernel.s, c.ladder.ell1 + 0.5 * c.kernel.gamma);
    CHECK(delta_quantity(traj, c.ladder) == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("solver preconditions") {
    const PhaseGrid g = homo_grid(12, 5.0);
    SolverConfig c = base_config();
    DistributionField neg = maxwellian(g, {});
    neg.values()[0] = -1.0;
    CHECK_THROWS_AS(picard_solve(neg, c), DomainError);
    DistributionField tiny = maxwellian(g, {});
    for (auto& v : tiny.values()) v *= 1e-4;  // fails the lower mass bound
    CHECK_THROWS_AS(picard_solve(tiny, c), DomainError);
    SolverConfig bad = c;
    bad.dt = -1.0;
    CHECK_THROWS_AS(picard_solve(maxwellian(g, {}), bad), DomainError);
}
