#include "boltzkit/solver.hpp"

#include <algorithm>
#include <cmath>

#include "boltzkit/interp.hpp"

namespace boltz {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw DomainError("SolverConfig: dt must be positive");
    if (!(T >= dt)) throw DomainError("SolverConfig: T must be >= dt");
    if (!(epsilon >= 0.0)) throw DomainError("SolverConfig: epsilon must be >= 0");
    if (n_picard < 1) throw DomainError("SolverConfig: n_picard must be >= 1");
    kernel.validate();
    quad.validate();
    ladder.validate(kernel);
    hydro.validate();
    bigL.validate();
}

DistributionField transport_step(const DistributionField& f, double dt) {
    const PhaseGrid& g = f.grid();
    if (g.n_x_total() == 1) return f;
    DistributionField cur = f;
    const int nx = g.nx;
    const int d = g.dx_dims;
    const std::size_t nvt = g.n_v_total();
    const double hx = g.hx();
    // constant-coefficient advection factorizes exactly over dimensions
    for (int dim = 0; dim < d; ++dim) {
        DistributionField next = cur;
        std::size_t stride_x = 1;
        for (int dd = d - 1; dd > dim; --dd) stride_x *= static_cast<std::size_t>(nx);
        const std::size_t nlines = g.n_x_total() / static_cast<std::size_t>(nx);
        parallel_for_ranges(nvt, [&](std::size_t vb, std::size_t ve) {
            std::vector<double> line(static_cast<std::size_t>(nx));
            for (std::size_t iv = vb; iv < ve; ++iv) {
                const double vd = g.v_node(iv)[dim];
                const double shift = vd * dt / hx;  // in index units
                for (std::size_t ln = 0; ln < nlines; ++ln) {
                    std::size_t base = 0, rem = ln;
                    for (int dd = 0; dd < d; ++dd) {
                        if (dd == dim) continue;
                        std::size_t stride_dd = 1;
                        for (int q = d - 1; q > dd; --q) stride_dd *= static_cast<std::size_t>(nx);
                        base += (rem % static_cast<std::size_t>(nx)) * stride_dd;
                        rem /= static_cast<std::size_t>(nx);
                    }
                    for (int i = 0; i < nx; ++i)
                        line[static_cast<std::size_t>(i)] =
                            cur.at(base + static_cast<std::size_t>(i) * stride_x, iv);
                    for (int i = 0; i < nx; ++i)
                        next.at(base + static_cast<std::size_t>(i) * stride_x, iv) =
                            periodic_cubic(line.data(), nx, 1, i - shift);
                }
            }
        });
        cur = std::move(next);
    }
    return cur;
}

namespace {

std::vector<double> regularizer_table(const PhaseGrid& g, double s, double gamma, double eps) {
    std::vector<double> t(g.n_v_total(), 0.0);
    if (eps == 0.0) return t;
    for (std::size_t iv = 0; iv < t.size(); ++iv)
        t[iv] = eps * std::pow(vweight(g.v_node(iv)), s + 2.0 * gamma);
    return t;
}

DistributionField collision_update(const DistributionField& f, const DistributionField& g_coeff,
                                   const SolverConfig& cfg, double dt,
                                   const std::vector<double>& reg) {
    QuadConfig qc = cfg.quad;
    qc.clamp_nonneg = true;
    const CollisionSplit split = q_split(g_coeff, f, cfg.kernel, qc);
    DistributionField out = f;
    const std::size_t n = out.values().size();
    const std::size_t nvt = f.grid().n_v_total();
    for (std::size_t i = 0; i < n; ++i) {
        const double denom = 1.0 + dt * (split.loss_coef.values()[i] + reg[i % nvt]);
        out.values()[i] = (f.values()[i] + dt * split.gain.values()[i]) / denom;
    }
    return out;
}

struct StepContext {
    std::vector<double> reg;
    bool cfl_warned = false;
};

DistributionField do_step(const DistributionField& f, const DistributionField& g_coeff,
                          const SolverConfig& cfg, StepContext& ctx) {
    const PhaseGrid& grid = f.grid();
    if (grid.n_x_total() > 1 && !ctx.cfl_warned) {
        if (grid.R * cfg.dt > 0.5) ctx.cfl_warned = true;  // recorded, not fatal
    }
    if (cfg.strang) {
        DistributionField h = transport_step(f, 0.5 * cfg.dt);
        h = collision_update(h, g_coeff, cfg, cfg.dt, ctx.reg);
        return transport_step(h, 0.5 * cfg.dt);
    }
    DistributionField h = transport_step(f, cfg.dt);
    return collision_update(h, g_coeff, cfg, cfg.dt, ctx.reg);
}

double weighted_l2_diff(const DistributionField& a, const DistributionField& b, double lexp) {
    const PhaseGrid& g = a.grid();
    const std::size_t nvt = g.n_v_total();
    std::vector<double> w(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) w[iv] = std::pow(vweight(g.v_node(iv)), lexp);
    double acc = 0.0;
    for (std::size_t ix = 0; ix < g.n_x_total(); ++ix)
        for (std::size_t iv = 0; iv < nvt; ++iv) {
            const double d = (a.at(ix, iv) - b.at(ix, iv)) * w[iv];
            acc += d * d;
        }
    return std::sqrt(acc * g.wx() * g.wv());
}

}  // namespace

DistributionField linear_step(const DistributionField& f, const DistributionField& g_coeff,
                              const SolverConfig& cfg) {
    cfg.validate();
    if (!(f.grid() == g_coeff.grid())) throw DomainError("linear_step: grid mismatch");
    StepContext ctx;
    ctx.reg = regularizer_table(f.grid(), cfg.kernel.s, cfg.kernel.gamma, cfg.epsilon);
    return do_step(f, g_coeff, cfg, ctx);
}

IterationTrajectory picard_solve(const DistributionField& f_in, const SolverConfig& cfg) {
    cfg.validate();
    f_in.require_nonnegative(std::max(1e-12, 1e-9 * f_in.max_abs()));
    if (!check_condition_H(f_in, cfg.hydro).pass)
        throw DomainError("picard_solve: initial datum violates condition (H)");

    const PhaseGrid& grid = f_in.grid();
    const int nsteps = static_cast<int>(std::round(cfg.T / cfg.dt));
    const int ck = std::max(1, cfg.checkpoint_stride);
    const int sk = std::max(1, cfg.snapshot_stride);
    const double initial_max = f_in.max_abs();

    // f_0: either the initial datum or the paper's profile c <v>^{-2 l0}
    // normalized to the initial mass
    DistributionField f0(grid);
    if (cfg.f0_mode == SolverConfig::F0Mode::initial_datum) {
        f0 = f_in;
    } else {
        const std::size_t nvt = grid.n_v_total();
        double prof_mass = 0.0;
        std::vector<double> prof(nvt);
        for (std::size_t iv = 0; iv < nvt; ++iv) {
            prof[iv] = std::pow(vweight(grid.v_node(iv)), -2.0 * cfg.ladder.ell0);
            prof_mass += prof[iv];
        }
        prof_mass *= grid.wv();
        const double mass_in = hydro_moments(f_in).mass[0];
        const double c = mass_in / prof_mass;
        for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix)
            for (std::size_t iv = 0; iv < nvt; ++iv) f0.at(ix, iv) = c * prof[iv];
    }

    StepContext ctx;
    ctx.reg = regularizer_table(grid, cfg.kernel.s, cfg.kernel.gamma, cfg.epsilon);

    IterationTrajectory traj;
    const double wl_delta = cfg.ladder.ell1 + 0.5 * cfg.kernel.gamma;

    // checkpoints of the previous iterate (frozen coefficient), indexed by step/ck
    std::vector<DistributionField> prev_ck{f0};  // static coefficient for n = 0
    bool prev_static = true;
    std::vector<double> prev_times{0.0};

    auto coeff_at = [&](double t) -> DistributionField {
        if (prev_static || prev_ck.size() == 1) return prev_ck.front();
        // linear interpolation in time between bracketing checkpoints
        const double tl = prev_times.back();
        const double tc = std::clamp(t, 0.0, tl);
        std::size_t k = 0;
        while (k + 1 < prev_times.size() && prev_times[k + 1] < tc) ++k;
        const double t0 = prev_times[k], t1 = prev_times[k + 1];
        const double a = t1 > t0 ? (tc - t0) / (t1 - t0) : 0.0;
        DistributionField out = prev_ck[k];
        for (std::size_t i = 0; i < out.values().size(); ++i)
            out.values()[i] = (1.0 - a) * out.values()[i] + a * prev_ck[k + 1].values()[i];
        return out;
    };

    for (int n = 1; n <= cfg.n_picard; ++n) {
        DistributionField f = f_in;
        std::vector<DistributionField> cur_ck{f};
        std::vector<double> cur_times{0.0};
        std::vector<DistributionField> snapshots{f};
        std::vector<double> snap_times{0.0};
        double sup_diff = 0.0;
        double mt_stream = 0.0;
        double mt_integral = 0.0;
        double last_l1g = 0.0, last_t = 0.0;
        bool have_last = false;

        auto record = [&](int step, const DistributionField& field) {
            const double t = step * cfg.dt;
            TrajectorySample s;
            s.n = n;
            s.t = t;
            s.x_norm = x_norm(field, cfg.ladder);
            s.l1_ell0 = weighted_l1(field, cfg.ladder.ell0);
            s.l1_ell0_gamma = weighted_l1(field, cfg.ladder.ell0 + cfg.kernel.gamma);
            const double dq = dv_weighted_l2(field, cfg.kernel.s, wl_delta);
            s.delta_integrand = dq * dq;
            s.min_f = field.min_value();
            HydroReport hm = hydro_moments(field);
            double ml = 1e300, mu = 1e300, em = 1e300, sm = 1e300;
            for (std::size_t ix = 0; ix < hm.mass.size(); ++ix) {
                ml = std::min(ml, hm.mass[ix] - 0.5 * cfg.hydro.m0);
                mu = std::min(mu, 2.0 * cfg.hydro.M0 - hm.mass[ix]);
                em = std::min(em, 2.0 * cfg.hydro.E0 - hm.energy[ix]);
                sm = std::min(sm, 2.0 * cfg.hydro.H0 - hm.entropy[ix]);
            }
            s.mass_lower_margin = ml;
            s.mass_upper_margin = mu;
            s.energy_margin = em;
            s.entropy_margin = sm;
            // difference against the previous iterate at the same time
            const DistributionField gprev = coeff_at(t);
            s.diff_ell1 = weighted_l2_diff(field, gprev, cfg.ladder.ell1);
            sup_diff = std::max(sup_diff, s.diff_ell1);
            // streaming M_T functional over the same recorded times that the
            // post-hoc route integrates
            mt_stream = std::max(mt_stream, s.l1_ell0);
            if (have_last) mt_integral += 0.5 * (last_l1g + s.l1_ell0_gamma) * (t - last_t);
            last_l1g = s.l1_ell0_gamma;
            last_t = t;
            have_last = true;
            traj.samples.push_back(s);
        };

        record(0, f);
        for (int step = 1; step <= nsteps; ++step) {
            const double t_mid = (step - 0.5) * cfg.dt;
            const DistributionField g = coeff_at(t_mid);
            f = do_step(f, g, cfg, ctx);
            if (!f.all_finite() || f.max_abs() > cfg.blowup_factor * initial_max)
                throw NumericalError("picard_solve: instability detected (norm blow-up)",
                                     f.max_abs());
            if (f.min_value() < -cfg.positivity_abort)
                throw NumericalError("picard_solve: positivity violated beyond tolerance",
                                     f.min_value());
            if (step % ck == 0 || step == nsteps) {
                cur_ck.push_back(f);
                cur_times.push_back(step * cfg.dt);
            }
            if (step % sk == 0 || step == nsteps) {
                record(step, f);
                snapshots.push_back(f);
                snap_times.push_back(step * cfg.dt);
            }
        }

        const double lam_l0 =
            angular_constant(AngularKind::lambda, cfg.ladder.ell0, cfg.kernel, 1e-8);
        traj.mt_streaming_per_iterate.push_back(
            mt_stream + cfg.hydro.m0 * lam_l0 / std::pow(4.0, 1.0 + cfg.kernel.gamma) * mt_integral);
        traj.sup_diff_per_iterate.push_back(sup_diff);
        traj.iterations_run = n;
        traj.final_field = f;
        traj.snapshot_times = snap_times;
        traj.final_snapshots = snapshots;

        prev_ck = std::move(cur_ck);
        prev_times = std::move(cur_times);
        prev_static = false;

        if (sup_diff <= cfg.contraction_tol) {
            traj.contraction_stop = true;
            break;
        }
    }
    return traj;
}

double delta_quantity(const IterationTrajectory& traj, const WeightLadder& ladder) {
    // the integrand was recorded with this ladder's ell1 + gamma/2 exponent
    (void)ladder;
    if (traj.samples.empty()) return 0.0;
    const int last_n = traj.iterations_run;
    double acc = 0.0;
    const TrajectorySample* prev = nullptr;
    for (const auto& s : traj.samples) {
        if (s.n != last_n) continue;
        if (prev) acc += 0.5 * (prev->delta_integrand + s.delta_integrand) * (s.t - prev->t);
        prev = &s;
    }
    return std::sqrt(acc);
}

DiagnosticsReport diagnostics(const IterationTrajectory& traj, const SolverConfig& cfg,
                              const DiagnosticsConfig& dcfg) {
    DiagnosticsReport rep;
    rep.c0_used = dcfg.c0;
    rep.a0_used = dcfg.a0;
    const int last_n = traj.iterations_run;

    // (a) M_T from the recorded samples (post-hoc route)
    double sup_l1 = 0.0, integral_l1g = 0.0;
    const TrajectorySample* prev = nullptr;
    double sup_x2 = 0.0;
    rep.min_f_overall = 1e300;
    rep.worst_mass_lower = rep.worst_mass_upper = 1e300;
    rep.worst_energy = rep.worst_entropy = 1e300;
    for (const auto& s : traj.samples) {
        if (s.n == last_n) {
            sup_l1 = std::max(sup_l1, s.l1_ell0);
            if (prev) integral_l1g += 0.5 * (prev->l1_ell0_gamma + s.l1_ell0_gamma) * (s.t - prev->t);
            prev = &s;
            sup_x2 = std::max(sup_x2, s.x_norm * s.x_norm);
        }
        rep.min_f_overall = std::min(rep.min_f_overall, s.min_f);
        rep.worst_mass_lower = std::min(rep.worst_mass_lower, s.mass_lower_margin);
        rep.worst_mass_upper = std::min(rep.worst_mass_upper, s.mass_upper_margin);
        rep.worst_energy = std::min(rep.worst_energy, s.energy_margin);
        rep.worst_entropy = std::min(rep.worst_entropy, s.entropy_margin);
    }
    const double lam_l0 = angular_constant(AngularKind::lambda, cfg.ladder.ell0, cfg.kernel, 1e-8);
    rep.mt_value =
        sup_l1 + cfg.hydro.m0 * lam_l0 / std::pow(4.0, 1.0 + cfg.kernel.gamma) * integral_l1g;
    rep.mt_streaming = traj.mt_streaming_per_iterate.empty()
                           ? 0.0
                           : traj.mt_streaming_per_iterate.back();
    rep.mt_member = rep.mt_value <= cfg.bigL.value;

    // (b) E_T over the stored snapshots of the final iterate
    if (dcfg.compute_et && !traj.final_snapshots.empty()) {
        TripleNormConfig tnc;
        tnc.s = cfg.kernel.s;
        tnc.gamma = cfg.kernel.gamma;
        tnc.sphere = dcfg.sphere;
        double int_y2 = 0.0, int_z2 = 0.0;
        double prev_y2 = 0.0, prev_z2 = 0.0, prev_t = 0.0;
        for (std::size_t i = 0; i < traj.final_snapshots.size(); ++i) {
            const double y = y_norm(traj.final_snapshots[i], cfg.ladder, tnc);
            const double z = z_norm(traj.final_snapshots[i], cfg.ladder, cfg.kernel.s,
                                    cfg.kernel.gamma);
            const double t = traj.snapshot_times[i];
            if (i > 0) {
                int_y2 += 0.5 * (prev_y2 + y * y) * (t - prev_t);
                int_z2 += 0.5 * (prev_z2 + z * z) * (t - prev_t);
            }
            prev_y2 = y * y;
            prev_z2 = z * z;
            prev_t = t;
        }
        rep.et_value = sup_x2 + dcfg.c0 * int_y2 + dcfg.a0 * int_z2;
        rep.et_member = rep.et_value <= cfg.bigL.value * cfg.bigL.value;
    }

    // (c)-(d)
    rep.positivity_ok = rep.min_f_overall >= -10.0 * dcfg.positivity_tol;
    rep.condition_H_ok = rep.worst_mass_lower >= 0.0 && rep.worst_mass_upper >= 0.0 &&
                         rep.worst_energy >= 0.0 && rep.worst_entropy >= 0.0;

    // (e)
    rep.sup_diffs = traj.sup_diff_per_iterate;
    for (std::size_t i = 1; i < rep.sup_diffs.size(); ++i)
        rep.ratios.push_back(rep.sup_diffs[i] /
                             std::max(rep.sup_diffs[i - 1], 1e-300));

    // (f)
    rep.delta_value = delta_quantity(traj, cfg.ladder);
    rep.delta_below_tol = rep.delta_value <= cfg.contraction_tol;
    return rep;
}

}  // namespace boltz
