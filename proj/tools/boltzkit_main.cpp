// Command-line front end: reproducible batch runs over the kernel constants,
// geometry checks, operator evaluation, norms, estimate verification, and the
// Picard solver.  All outputs are JSON lines or CSV with the config digest and
// seed embedded; timestamps are excluded from digests.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "boltzkit/collision.hpp"
#include "boltzkit/geometry.hpp"
#include "boltzkit/lemma_lab.hpp"
#include "boltzkit/solver.hpp"

using nlohmann::json;
using namespace boltz;

namespace {

struct RunContext {
    json config;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool dry_run = false;
    std::string digest;
};

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::string config_digest(const json& cfg, std::uint64_t seed) {
    json c = cfg;
    c.erase("timestamp");
    return hex_digest(fnv1a(c.dump() + "#" + std::to_string(seed)));
}

KernelParams kernel_from(const json& cfg) {
    KernelParams p;
    if (cfg.contains("kernel")) {
        const auto& k = cfg.at("kernel");
        p.gamma = k.value("gamma", p.gamma);
        p.s = k.value("s", p.s);
        p.b0 = k.value("b0", p.b0);
        p.theta_min = k.value("theta_min", p.theta_min);
    }
    p.validate();
    return p;
}

PhaseGrid grid_from(const json& cfg) {
    PhaseGrid g;
    if (cfg.contains("grid")) {
        const auto& j = cfg.at("grid");
        g.nx = j.value("nx", g.nx);
        g.dx_dims = j.value("dx_dims", g.dx_dims);
        g.nv = j.value("nv", g.nv);
        g.R = j.value("R", g.R);
    }
    g.validate();
    return g;
}

HydroBounds hydro_from(const json& cfg) {
    HydroBounds h;
    if (cfg.contains("hydro")) {
        const auto& j = cfg.at("hydro");
        h.m0 = j.value("m0", h.m0);
        h.M0 = j.value("M0", h.M0);
        h.E0 = j.value("E0", h.E0);
        h.H0 = j.value("H0", h.H0);
    }
    h.validate();
    return h;
}

QuadConfig quad_from(const json& cfg, const KernelParams& p) {
    QuadConfig q;
    q.theta_min = p.theta_min;
    if (cfg.contains("quad")) {
        const auto& j = cfg.at("quad");
        q.theta_min = j.value("theta_min", q.theta_min);
        q.n_theta = j.value("n_theta", q.n_theta);
        q.n_phi = j.value("n_phi", q.n_phi);
        q.tol = j.value("tol", q.tol);
        q.r_rel = j.value("r_rel", q.r_rel);
        const std::string interp = j.value("interp", std::string("tricubic"));
        q.interp = interp == "trilinear" ? Interp::trilinear : Interp::tricubic;
    }
    q.validate();
    return q;
}

WeightLadder ladder_from(const json& cfg, const KernelParams& p, const HydroBounds& h) {
    if (cfg.contains("ladder") && cfg.at("ladder").contains("ell1")) {
        const auto& j = cfg.at("ladder");
        WeightLadder w = WeightLadder::from_ell1(j.at("ell1").get<double>(), p,
                                                 j.value("tilde_c0", 0.125));
        w.validate(p);
        return w;
    }
    const double tc0 = cfg.contains("ladder") ? cfg.at("ladder").value("tilde_c0", 0.125) : 0.125;
    return select_weights(p, h, tc0);
}

json report_to_json(const InequalityReport& rep, const RunContext& ctx) {
    json j;
    j["name"] = rep.name;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["margin"] = rep.margin;
    j["pass"] = rep.pass;
    j["fitted_constants"] = rep.fitted_constants;
    j["extras"] = rep.extras;
    j["sample_digest"] = rep.sample_digest;
    j["sample_margins"] = rep.sample_margins;
    j["config_digest"] = ctx.digest;
    j["seed"] = ctx.seed;
    return j;
}

void write_json_lines(const RunContext& ctx, const std::string& name,
                      const std::vector<json>& lines) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream os(ctx.out_dir + "/" + name);
    if (!os) throw DomainError("cannot open output file " + name);
    for (const auto& l : lines) os << l.dump() << "\n";
    // timestamp goes in a sidecar line so report payloads stay digest-stable
    os << json{{"timestamp", iso_timestamp()}, {"config_digest", ctx.digest}}.dump() << "\n";
}

std::vector<double> expand_l_range(const std::string& spec) {
    // "a..b" expands geometrically over powers of two within [a, b]
    const auto dots = spec.find("..");
    if (dots == std::string::npos) return {std::stod(spec)};
    const double a = std::stod(spec.substr(0, dots));
    const double b = std::stod(spec.substr(dots + 2));
    std::vector<double> out;
    for (double l = a; l <= b * (1.0 + 1e-12); l *= 2.0) out.push_back(l);
    return out;
}

// --------------------------------------------------------------------------
int cmd_constants(const RunContext& ctx, const KernelParams& p, const std::string& lrange,
                  double tol) {
    const auto ls = expand_l_range(lrange);
    std::vector<json> lines;
    for (double l : ls) {
        for (const char* kind : {"lambda", "omega"}) {
            const double v = angular_constant(
                kind[0] == 'l' ? AngularKind::lambda : AngularKind::omega, l, p, tol);
            lines.push_back(json{{"kind", kind},
                                 {"l", l},
                                 {"gamma", p.gamma},
                                 {"s", p.s},
                                 {"b0", p.b0},
                                 {"value", v},
                                 {"tol_achieved", tol}});
        }
    }
    lines.push_back(json{{"kind", "A_gamma_s"},
                         {"gamma", p.gamma},
                         {"s", p.s},
                         {"b0", p.b0},
                         {"value", a_gamma_s(p, tol)},
                         {"tol_achieved", tol}});
    if (ls.size() >= 4 && ls.back() / ls.front() >= 8.0) {
        const auto fit = asymptotic_report(p, ls, tol);
        lines.push_back(json{{"kind", "asymptotic_fit"},
                             {"lambda_slope", fit.lambda_slope},
                             {"lambda_residual", fit.lambda_residual},
                             {"omega_slope", fit.omega_slope},
                             {"omega_bracket_lo", fit.omega_bracket_lo},
                             {"omega_bracket_hi", fit.omega_bracket_hi}});
    }
    write_json_lines(ctx, "constants.jsonl", lines);
    return 0;
}

int cmd_weights(const RunContext& ctx, const KernelParams& p, const HydroBounds& h,
                double tilde_c0) {
    const WeightLadder w = select_weights(p, h, tilde_c0);
    write_json_lines(ctx, "weights.jsonl",
                     {json{{"ell1", w.ell1},
                           {"ell", w.ell},
                           {"ell0", w.ell0},
                           {"rho", w.rho},
                           {"tilde_c0", w.tilde_c0}}});
    return 0;
}

int cmd_geometry_check(const RunContext& ctx, const KernelParams& p) {
    CovQuadConfig qc;
    qc.tol = 1e-4;
    const ScalarField3 gaussian = [](const Vec3& v) { return std::exp(-0.5 * norm2(v)); };
    AngularWeight H;  // indicator of [pi/8, pi/2]
    std::vector<json> lines;
    for (auto kind : {CovIdentity::carleman_cos, CovIdentity::carleman_sin}) {
        const auto rep = check_cov_identity(kind, gaussian, {0.3, -0.2, 0.5}, H, p.gamma, qc);
        lines.push_back(json{{"kind", rep.kind},
                             {"lhs", rep.lhs},
                             {"rhs", rep.rhs},
                             {"rel_discrepancy", rep.rel_discrepancy},
                             {"pass", rep.pass}});
    }
    write_json_lines(ctx, "geometry.jsonl", lines);
    bool all = true;
    for (const auto& l : lines) all = all && l.at("pass").get<bool>();
    return all ? 0 : 3;
}

int cmd_qeval(const RunContext& ctx, const KernelParams& p, const PhaseGrid& grid,
              const QuadConfig& quad) {
    const DistributionField mu = maxwellian(grid, {});
    const DistributionField q = q_apply(mu, mu, p, quad);
    std::filesystem::create_directories(ctx.out_dir);
    write_field_file(ctx.out_dir + "/qeval_field.bin", q);
    const double mass_defect = [&] {
        double acc = 0.0;
        for (double v : q.values()) acc += v;
        return acc * grid.wv() * grid.wx();
    }();
    double l1 = 0.0;
    for (double v : q.values()) l1 += std::abs(v);
    l1 *= grid.wv() * grid.wx();
    write_json_lines(ctx, "qeval.jsonl",
                     {json{{"max_abs", q.max_abs()},
                           {"max_rel_vs_mu", q.max_abs() / mu.max_abs()},
                           {"mass_defect", mass_defect},
                           {"l1", l1},
                           {"theta_min", quad.theta_min}}});
    return 0;
}

int cmd_norms(const RunContext& ctx, const KernelParams& p, const PhaseGrid& grid,
              const WeightLadder& ladder) {
    const DistributionField mu = maxwellian(grid, {});
    TripleNormConfig tnc;
    tnc.s = p.s;
    tnc.gamma = p.gamma;
    std::vector<json> lines;
    auto emit = [&](const char* kind, double v) {
        lines.push_back(json{{"norm_kind", kind},
                             {"ladder", {{"ell1", ladder.ell1}, {"ell", ladder.ell},
                                         {"ell0", ladder.ell0}, {"rho", ladder.rho}}},
                             {"value", v},
                             {"config_digest", ctx.digest}});
    };
    emit("l2", l2_norm(mu));
    emit("triple_x", triple_norm_x(mu, tnc));
    emit("x_norm", x_norm(mu, ladder));
    emit("y_norm", y_norm(mu, ladder, tnc));
    emit("z_norm", z_norm(mu, ladder, p.s, p.gamma));
    emit("weighted_l1_ell0", weighted_l1(mu, ladder.ell0));
    write_json_lines(ctx, "norms.jsonl", lines);
    return 0;
}

int cmd_verify(const RunContext& ctx, const std::string& what, const KernelParams& p,
               const PhaseGrid& grid, const HydroBounds& hydro, const WeightLadder& ladder,
               const QuadConfig& quad) {
    TripleNormConfig tnc;
    tnc.s = p.s;
    tnc.gamma = p.gamma;
    InequalityReport rep;
    if (what == "cancellation") {
        CancellationConfig cc;
        rep = verify_cancellation(maxwellian(grid, {}), p, cc);
    } else if (what == "moment") {
        MixtureOptions mo;
        const auto fam = mixture_family(grid, ctx.seed, 8, mo);
        MomentBoundConfig mc;
        mc.quad = quad;
        rep = verify_moment_bound(fam, maxwellian(grid, {}), std::max(5.0, ladder.ell0), p,
                                  hydro, mc);
    } else if (what == "coercivity") {
        MixtureOptions mo;
        const auto fam = mixture_family(grid, ctx.seed, 10, mo);
        CoercivityConfig cc;
        cc.quad = quad;
        cc.triple = tnc;
        rep = verify_coercivity(fam, maxwellian(grid, {}), p, hydro, cc);
    } else if (what == "trilinear") {
        MixtureOptions mo;
        const auto fam = mixture_family(grid, ctx.seed, 24, mo);
        std::vector<TrilinearSample> tri;
        for (std::size_t i = 0; i + 2 < fam.size(); i += 3)
            tri.push_back({fam[i], fam[i + 1], fam[i + 2]});
        TrilinearConfig tc;
        tc.quad = quad;
        tc.triple = tnc;
        rep = verify_trilinear(tri, p, tc);
    } else if (what == "commutator") {
        MixtureOptions mo;
        const auto fam = mixture_family(grid, ctx.seed, 12, mo);
        std::vector<TrilinearSample> tri;
        for (std::size_t i = 0; i + 2 < fam.size(); i += 3)
            tri.push_back({fam[i], fam[i + 1], fam[i + 2]});
        CommutatorConfig cc;
        cc.quad = quad;
        rep = verify_commutator(tri, std::ceil(13.0 / 2.0 + p.gamma) + 0.5, p, cc);
    } else if (what.rfind("interpolation-", 0) == 0) {
        MixtureOptions mo;
        mo.temp_min = 0.1;
        mo.temp_max = 4.0;
        mo.center_radius = 4.0;
        const auto fam = mixture_family(grid, ctx.seed, 16, mo);
        InterpolationConfig ic;
        ic.triple = tnc;
        ic.ladder = ladder;
        const InterpolationLemma which =
            what == "interpolation-embedding"
                ? InterpolationLemma::embedding
                : (what == "interpolation-spatial" ? InterpolationLemma::spatial
                                                   : InterpolationLemma::smallness);
        rep = verify_interpolation(fam, which, p, ic);
    } else if (what == "symbol-unweighted" || what == "symbol-weighted") {
        SymbolSampleSpec spec;
        spec.seed = ctx.seed;
        rep = symbol_check(
            what == "symbol-unweighted" ? SymbolKind::unweighted : SymbolKind::weighted, p,
            spec);
    } else {
        std::cerr << "unknown verify target: " << what << "\n";
        return 2;
    }
    write_json_lines(ctx, "verify_" + what + ".jsonl", {report_to_json(rep, ctx)});
    return rep.pass ? 0 : 3;
}

int cmd_evolve(const RunContext& ctx, const json& cfg, const KernelParams& p,
               const PhaseGrid& grid, const HydroBounds& hydro, const WeightLadder& ladder,
               const QuadConfig& quad) {
    SolverConfig sc;
    sc.kernel = p;
    sc.quad = quad;
    sc.ladder = ladder;
    sc.hydro = hydro;
    if (cfg.contains("solver")) {
        const auto& j = cfg.at("solver");
        sc.dt = j.value("dt", sc.dt);
        sc.T = j.value("T", sc.T);
        sc.epsilon = j.value("epsilon", sc.epsilon);
        sc.n_picard = j.value("n_picard", sc.n_picard);
        sc.contraction_tol = j.value("contraction_tol", sc.contraction_tol);
        sc.checkpoint_stride = j.value("checkpoint_stride", sc.checkpoint_stride);
        sc.snapshot_stride = j.value("snapshot_stride", sc.snapshot_stride);
        if (j.value("f0_mode", std::string("initial")) == "paper")
            sc.f0_mode = SolverConfig::F0Mode::paper_profile;
    }
    sc.bigL.value = cfg.value("bigL", 8.0);
    sc.validate();

    MaxwellianSpec ms;
    if (cfg.contains("initial")) {
        const auto& j = cfg.at("initial");
        ms.density = j.value("density", 1.0);
        ms.temperature = j.value("temperature", 1.0);
    }
    DistributionField f_in = maxwellian(grid, ms);
    if (cfg.contains("initial") && cfg.at("initial").value("perturbation", 0.0) > 0.0) {
        const double amp = cfg.at("initial").at("perturbation").get<double>();
        Rng rng(ctx.seed);
        MixtureOptions mo;
        const DistributionField bump = random_mixture(grid, rng, mo);
        const double scale = amp * maxwellian(grid, ms).max_abs() / bump.max_abs();
        for (std::size_t i = 0; i < f_in.values().size(); ++i)
            f_in.values()[i] += scale * bump.values()[i];
    }

    const IterationTrajectory traj = picard_solve(f_in, sc);
    DiagnosticsConfig dc;
    const DiagnosticsReport rep = diagnostics(traj, sc, dc);

    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir + "/diagnostics.csv");
    csv << "n,t,x_norm,l1_ell0,min_f,massH_margin,energyH_margin,entropyH_margin,diff_ell1,"
           "delta_partial\n";
    csv.precision(17);
    for (const auto& s : traj.samples)
        csv << s.n << "," << s.t << "," << s.x_norm << "," << s.l1_ell0 << "," << s.min_f << ","
            << std::min(s.mass_lower_margin, s.mass_upper_margin) << "," << s.energy_margin
            << "," << s.entropy_margin << "," << s.diff_ell1 << "," << s.delta_integrand
            << "\n";
    write_field_file(ctx.out_dir + "/final_field.bin", traj.final_field);
    write_json_lines(
        ctx, "evolve.jsonl",
        {json{{"mt_value", rep.mt_value},
              {"mt_streaming", rep.mt_streaming},
              {"mt_member", rep.mt_member},
              {"et_value", rep.et_value},
              {"et_member", rep.et_member},
              {"min_f", rep.min_f_overall},
              {"positivity_ok", rep.positivity_ok},
              {"condition_H_ok", rep.condition_H_ok},
              {"sup_diffs", rep.sup_diffs},
              {"ratios", rep.ratios},
              {"delta", rep.delta_value},
              {"iterations", traj.iterations_run},
              {"contraction_stop", traj.contraction_stop}}});
    return 0;
}

int cmd_sweep(const RunContext& ctx, const json& cfg, const KernelParams& p,
              const PhaseGrid& grid, const QuadConfig& quad) {
    // theta_min convergence study: three halvings plus a Richardson estimate
    const std::string mode = cfg.value("sweep", json::object()).value("mode", "theta_min");
    std::vector<json> lines;
    if (mode == "theta_min") {
        const DistributionField mu = maxwellian(grid, {});
        QuadConfig q = quad;
        std::vector<double> norms;
        for (int k = 0; k < 3; ++k) {
            const DistributionField out = q_apply(mu, mu, p, q);
            norms.push_back(out.max_abs());
            lines.push_back(json{{"theta_min", q.theta_min}, {"max_abs", out.max_abs()}});
            q.theta_min *= 0.5;
        }
        const double rich = norms[2] + (norms[2] - norms[1]);
        lines.push_back(json{{"richardson_estimate", rich}});
    } else if (mode == "epsilon") {
        for (int e = 6; e <= 12; e += 2)
            lines.push_back(json{{"epsilon", std::pow(2.0, -e)}, {"note", "configure evolve"}});
    } else {
        std::cerr << "unknown sweep mode " << mode << "\n";
        return 2;
    }
    write_json_lines(ctx, "sweep.jsonl", lines);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boltzkit: non-cutoff Boltzmann collision toolbox"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", lrange = "2..256", verify_what;
    std::uint64_t seed = 0;
    int threads = 0;
    bool dry_run = false;
    double gamma = 0.0, s = 0.5, b0 = 1.0, tol = 1e-10, tilde_c0 = 0.125;

    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "64-bit seed (default 0)");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_flag("--dry-run", dry_run, "validate and print the plan, compute nothing");

    auto* c_const = app.add_subcommand("constants", "angular constants and asymptotics");
    c_const->add_option("--gamma", gamma);
    c_const->add_option("--s", s);
    c_const->add_option("--b0", b0);
    c_const->add_option("--l", lrange, "single l or geometric range a..b");
    c_const->add_option("--tol", tol);

    auto* c_weights = app.add_subcommand("weights", "weight-exponent ladder search");
    c_weights->add_option("--gamma", gamma);
    c_weights->add_option("--s", s);
    c_weights->add_option("--tilde-c0", tilde_c0);

    auto* c_geom = app.add_subcommand("geometry-check", "change-of-variable identities");
    auto* c_qeval = app.add_subcommand("qeval", "collision operator on a Maxwellian");
    auto* c_norms = app.add_subcommand("norms", "ladder norms of a Maxwellian");
    auto* c_verify = app.add_subcommand("verify", "verify a named estimate");
    c_verify->add_option("name", verify_what, "estimate name")->required();
    auto* c_evolve = app.add_subcommand("evolve", "Picard run with diagnostics");
    auto* c_sweep = app.add_subcommand("sweep", "theta_min / epsilon sweeps");

    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    ctx.dry_run = dry_run;
    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) {
                std::cerr << "cannot open config " << config_path << "\n";
                return 2;
            }
            ctx.config = json::parse(is);
        } else {
            ctx.config = json::object();
        }
        // CLI scalars override the config for the kernel block
        if (c_const->parsed() || c_weights->parsed()) {
            ctx.config["kernel"]["gamma"] = gamma;
            ctx.config["kernel"]["s"] = s;
            ctx.config["kernel"]["b0"] = b0;
        }
        ctx.digest = config_digest(ctx.config, seed);

        const KernelParams p = kernel_from(ctx.config);
        const PhaseGrid grid = grid_from(ctx.config);
        const HydroBounds hydro = hydro_from(ctx.config);
        const QuadConfig quad = quad_from(ctx.config, p);

        if (dry_run) {
            json plan{{"config", ctx.config}, {"digest", ctx.digest}, {"seed", seed}};
            std::cout << plan.dump(2) << "\n";
            return 0;
        }

        if (c_const->parsed()) return cmd_constants(ctx, p, lrange, tol);
        if (c_weights->parsed()) return cmd_weights(ctx, p, hydro, tilde_c0);
        if (c_geom->parsed()) return cmd_geometry_check(ctx, p);
        if (c_qeval->parsed()) return cmd_qeval(ctx, p, grid, quad);
        if (c_norms->parsed())
            return cmd_norms(ctx, p, grid, ladder_from(ctx.config, p, hydro));
        if (c_verify->parsed())
            return cmd_verify(ctx, verify_what, p, grid, hydro,
                              ladder_from(ctx.config, p, hydro), quad);
        if (c_evolve->parsed())
            return cmd_evolve(ctx, ctx.config, p, grid, hydro,
                              ladder_from(ctx.config, p, hydro), quad);
        if (c_sweep->parsed()) return cmd_sweep(ctx, ctx.config, p, grid, quad);
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical abort: " << e.what() << " (achieved " << e.achieved_tol()
                  << ")\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
