#include "boltzkit/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "boltzkit/quadrature.hpp"

namespace boltz {

namespace {

std::string digest_fields(const std::vector<const DistributionField*>& fields,
                          const std::string& tag) {
    std::uint64_t h = fnv1a(tag);
    for (const auto* f : fields) {
        double sum = 0.0, sum2 = 0.0;
        for (double v : f->values()) {
            sum += v;
            sum2 += v * v;
        }
        std::ostringstream os;
        os.precision(17);
        os << sum << "|" << sum2 << "|" << f->grid().nv << "|" << f->grid().R;
        h = fnv1a(os.str(), h);
    }
    return hex_digest(h);
}

// max over x of int <v>^r |f| dv
double linf_x_l1v(const DistributionField& f, double r) {
    const PhaseGrid& g = f.grid();
    const std::size_t nvt = g.n_v_total();
    std::vector<double> w(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) w[iv] = std::pow(vweight(g.v_node(iv)), r);
    double best = 0.0;
    for (std::size_t ix = 0; ix < g.n_x_total(); ++ix) {
        double acc = 0.0;
        for (std::size_t iv = 0; iv < nvt; ++iv) acc += w[iv] * std::abs(f.at(ix, iv));
        best = std::max(best, acc * g.wv());
    }
    return best;
}

double sq(double x) { return x * x; }

}  // namespace

DistributionField random_mixture(const PhaseGrid& grid, Rng& rng, const MixtureOptions& opt) {
    const int nb = opt.bumps_min +
                   static_cast<int>(rng.uniform() * (opt.bumps_max - opt.bumps_min + 1));
    DistributionField f(grid);
    const std::size_t nvt = grid.n_v_total();
    std::vector<double> slice(nvt, 0.0);
    for (int b = 0; b < std::max(1, nb); ++b) {
        const double T = opt.temp_min * std::pow(opt.temp_max / opt.temp_min, rng.uniform());
        const Vec3 c = rng.uniform_vec(-opt.center_radius, opt.center_radius);
        const double mass = rng.uniform(opt.mass_min, opt.mass_max);
        const double norm = mass * std::pow(2.0 * kPi * T, -1.5);
        const double inv2T = 1.0 / (2.0 * T);
        for (std::size_t iv = 0; iv < nvt; ++iv)
            slice[iv] += norm * std::exp(-norm2(grid.v_node(iv) - c) * inv2T);
    }
    if (opt.homogeneous_x || grid.n_x_total() == 1) {
        for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix)
            for (std::size_t iv = 0; iv < nvt; ++iv) f.at(ix, iv) = slice[iv];
    } else {
        const int kmode = 1 + static_cast<int>(rng.uniform() * opt.x_mode_max);
        const double amp = rng.uniform(0.1, 0.45);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix) {
            // modulate along the first spatial dimension
            const int i0 = static_cast<int>(ix / (grid.n_x_total() / grid.nx));
            const double x = static_cast<double>(i0) / grid.nx;
            const double mod = 1.0 + amp * std::cos(2.0 * kPi * kmode * x + phase);
            for (std::size_t iv = 0; iv < nvt; ++iv) f.at(ix, iv) = mod * slice[iv];
        }
    }
    return f;
}

std::vector<DistributionField> mixture_family(const PhaseGrid& grid, std::uint64_t seed,
                                              int count, const MixtureOptions& opt) {
    Rng rng(seed);
    std::vector<DistributionField> fam;
    fam.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) fam.push_back(random_mixture(grid, rng, opt));
    return fam;
}

// ---------------------------------------------------------------------------
// cancellation lemma
// ---------------------------------------------------------------------------
InequalityReport verify_cancellation(const DistributionField& g, const KernelParams& p,
                                     const CancellationConfig& cfg) {
    p.validate();
    g.require_nonnegative(std::max(1e-12, 1e-9 * g.max_abs()));
    const PhaseGrid& grid = g.grid();
    if (grid.n_x_total() != 1)
        throw DomainError("verify_cancellation: homogeneous fields only");

    InequalityReport rep;
    rep.name = "cancellation";
    rep.sample_digest = digest_fields({&g}, "cancellation");

    // theta rule down to theta_floor; the compensated integrand f' - f is
    // O(theta) there, so the truncated tail is O(theta_floor^{2-2s})
    const auto theta_rule = geometric_rule(cfg.theta_floor, kPi / 2.0, cfg.n_theta);
    const double dphi = 2.0 * kPi / cfg.n_phi;
    std::vector<double> cos_p(static_cast<std::size_t>(cfg.n_phi)),
        sin_p(static_cast<std::size_t>(cfg.n_phi));
    for (int m = 0; m < cfg.n_phi; ++m) {
        cos_p[static_cast<std::size_t>(m)] = std::cos((m + 0.5) * dphi);
        sin_p[static_cast<std::size_t>(m)] = std::sin((m + 0.5) * dphi);
    }
    const std::size_t nvt = grid.n_v_total();
    const PaddedSampler gs(g.values().data(), grid.nv, grid.R, cfg.upsample);
    const double r_g = support_radius(g, 1e-12) + 3.5 * grid.hv();

    // RHS field once: A_{gamma,s} int g(v) |v - v*|^gamma dv with the
    // |.|^gamma lattice kink corrected
    const DistributionField conv_field = cancellation_convolution(g, p, 1e-12);

    double worst = 0.0;
    double worst_lhs = 0.0, worst_rhs = 0.0;
    for (const Vec3& vstar : cfg.vstar_samples) {
        // LHS: sum over v of the compensated sphere integral
        const double lhs = grid.wv() * parallel_sum(nvt, [&](std::size_t iv) {
            const Vec3 v = grid.v_node(iv);
            const Vec3 w = v - vstar;
            const double wn = norm(w);
            if (wn < 1e-14) return 0.0;
            if (norm(v) > r_g && std::abs(0.5 * norm(v + vstar) - 0.5 * wn) > r_g)
                return 0.0;  // neither f(v) nor any f(v') can be nonzero
            const double fv = g.at(0, iv);
            const Vec3 kappa = w / wn;
            Vec3 e1, e2;
            orthonormal_frame(kappa, e1, e2);
            const Vec3 u = 0.5 * (v + vstar);
            const double kin = p.gamma == 0.0 ? 1.0 : std::pow(wn, p.gamma);
            double acc = 0.0;
            for (const auto& [theta, wt] : theta_rule) {
                const double sb = p.b0 * std::pow(theta, -1.0 - 2.0 * p.s);
                const Vec3 base = u + 0.5 * wn * std::cos(theta) * kappa;
                const double amp = 0.5 * wn * std::sin(theta);
                double ring = 0.0;
                for (int m = 0; m < cfg.n_phi; ++m) {
                    const Vec3 vp = base + amp * (cos_p[static_cast<std::size_t>(m)] * e1 +
                                                  sin_p[static_cast<std::size_t>(m)] * e2);
                    ring += gs.sample(vp, cfg.interp) - fv;
                }
                acc += wt * sb * ring * dphi;
            }
            return kin * acc;
        });

        const std::size_t iv_star = grid.v_index(
            std::clamp(static_cast<int>(std::round((vstar.x + grid.R) / grid.hv())), 0,
                       grid.nv - 1),
            std::clamp(static_cast<int>(std::round((vstar.y + grid.R) / grid.hv())), 0,
                       grid.nv - 1),
            std::clamp(static_cast<int>(std::round((vstar.z + grid.R) / grid.hv())), 0,
                       grid.nv - 1));
        const double rhs = conv_field.at(0, iv_star);

        const double gap = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        rep.sample_margins.push_back(cfg.tol - gap);
        if (gap > worst) {
            worst = gap;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    }
    rep.lhs = worst_lhs;
    rep.rhs = worst_rhs;
    rep.fitted_constants["rel_gap"] = worst;
    rep.margin = cfg.tol - worst;
    rep.pass = worst <= cfg.tol;
    return rep;
}

// ---------------------------------------------------------------------------
// moment inequality
// ---------------------------------------------------------------------------
InequalityReport verify_moment_bound(const std::vector<DistributionField>& f_family,
                                     const DistributionField& g, double l,
                                     const KernelParams& p, const HydroBounds& hydro,
                                     MomentBoundConfig& cfg) {
    if (!(l >= 5.0)) throw DomainError("verify_moment_bound: l must be >= 5");
    if (f_family.empty()) throw DomainError("verify_moment_bound: empty family");
    if (!check_condition_H(g, hydro).pass)
        throw DomainError("verify_moment_bound: g does not satisfy condition (H)");
    for (const auto& f : f_family) f.require_nonnegative(std::max(1e-12, 1e-9 * f.max_abs()));

    const double lam = angular_constant(AngularKind::lambda, l, p, 1e-10);
    const double om = angular_constant(AngularKind::omega, l, p, 1e-10);
    const double lead_coef = hydro.m0 * lam / std::pow(4.0, p.gamma + 1.0);

    const DistributionField ones(g.grid(), 1.0);
    const double g_l_gamma = weighted_l1(g, l + p.gamma);
    const double g_46 = linf_x_l1v(g, 4.0 + p.gamma);
    const double g_l = weighted_l1(g, l);

    struct Terms {
        double lhs, lead, gain, bracket;
    };
    std::vector<Terms> terms;
    for (const auto& f : f_family) {
        Terms t;
        t.lhs = q_inner(g, f, ones, l, p, cfg.quad);
        t.lead = lead_coef * weighted_l1(f, l + p.gamma);
        t.gain = 2.0 * om * linf_x_l1v(f, 0.0) * g_l_gamma;
        t.bracket = g_46 * weighted_l1(f, l) + linf_x_l1v(f, 4.0 + p.gamma) * g_l;
        terms.push_back(t);
    }
    if (cfg.C_l == 0.0) {
        double need = 0.0;
        for (const auto& t : terms)
            need = std::max(need, (t.lhs + t.lead - t.gain) / std::max(t.bracket, 1e-300));
        cfg.C_l = std::max(1e-6, 1.05 * need);
    }

    InequalityReport rep;
    rep.name = "moment_bound_l" + std::to_string(l);
    std::vector<const DistributionField*> ptrs{&g};
    for (const auto& f : f_family) ptrs.push_back(&f);
    rep.sample_digest = digest_fields(ptrs, rep.name);
    rep.fitted_constants["C_l"] = cfg.C_l;
    rep.fitted_constants["lambda_l"] = lam;
    rep.fitted_constants["omega_l"] = om;
    rep.margin = 1e300;
    rep.pass = true;
    for (const auto& t : terms) {
        const double rhs = -t.lead + t.gain + cfg.C_l * t.bracket;
        const double m = rhs - t.lhs;
        rep.sample_margins.push_back(m);
        if (m < rep.margin) {
            rep.margin = m;
            rep.lhs = t.lhs;
            rep.rhs = rhs;
        }
        rep.pass = rep.pass && (t.lhs <= rhs + cfg.abs_tol);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// coercivity
// ---------------------------------------------------------------------------
InequalityReport verify_coercivity(const std::vector<DistributionField>& f_family,
                                   const DistributionField& g, const KernelParams& p,
                                   const HydroBounds& hydro, const CoercivityConfig& cfg) {
    if (f_family.empty()) throw DomainError("verify_coercivity: empty family");
    if (!check_condition_H(g, hydro).pass)
        throw DomainError("verify_coercivity: g does not satisfy condition (H)");

    std::vector<double> I, T2, W2;
    for (const auto& f : f_family) {
        const double t2 = sq(triple_norm_x(f, cfg.triple));
        if (t2 < 1e-30) continue;  // zero samples satisfy the bound vacuously
        I.push_back(-q_inner(g, f, f, 0.0, p, cfg.quad));
        T2.push_back(t2);
        W2.push_back(sq(l2_norm(weight_multiply(f, p.s + 0.5 * p.gamma))));
    }
    if (I.empty()) throw DomainError("verify_coercivity: family has no nonzero samples");
    // smallest C0 on a doubling grid making the c0 fit positive, then c0 with
    // a 5% shave
    double scale0 = 0.0;
    for (std::size_t i = 0; i < I.size(); ++i)
        scale0 = std::max(scale0, std::abs(I[i]) / std::max(W2[i], 1e-300));
    double C0 = 0.0;
    auto c0_for = [&](double C) {
        double m = 1e300;
        for (std::size_t i = 0; i < I.size(); ++i)
            m = std::min(m, (I[i] + C * W2[i]) / std::max(T2[i], 1e-300));
        return m;
    };
    if (c0_for(0.0) <= 0.0) {
        C0 = std::max(scale0, 1.0) * std::pow(2.0, -10);
        while (c0_for(C0) <= 0.0 && C0 < 1e12) C0 *= 2.0;
    }
    const double c0 = 0.95 * c0_for(C0);

    InequalityReport rep;
    rep.name = "coercivity";
    std::vector<const DistributionField*> ptrs{&g};
    for (const auto& f : f_family) ptrs.push_back(&f);
    rep.sample_digest = digest_fields(ptrs, rep.name);
    rep.fitted_constants["c0"] = c0;
    rep.fitted_constants["C0"] = C0;
    rep.margin = 1e300;
    rep.pass = c0 > 0.0;
    for (std::size_t i = 0; i < I.size(); ++i) {
        const double m = I[i] - c0 * T2[i] + C0 * W2[i];
        rep.sample_margins.push_back(m);
        if (m < rep.margin) {
            rep.margin = m;
            rep.lhs = c0 * T2[i] - C0 * W2[i];
            rep.rhs = I[i];
        }
        rep.pass = rep.pass && m >= -1e-12 * std::max(1.0, std::abs(I[i]));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// trilinear upper bound
// ---------------------------------------------------------------------------
InequalityReport verify_trilinear(const std::vector<TrilinearSample>& family,
                                  const KernelParams& p, const TrilinearConfig& cfg) {
    if (family.empty()) throw DomainError("verify_trilinear: empty family");
    InequalityReport rep;
    rep.name = "trilinear";
    std::vector<const DistributionField*> ptrs;
    for (const auto& s : family) {
        ptrs.push_back(&s.g);
        ptrs.push_back(&s.f);
        ptrs.push_back(&s.h);
    }
    rep.sample_digest = digest_fields(ptrs, rep.name);

    double need = 0.0, need_split = 0.0;
    std::vector<double> lhs_list, rhs_core;
    for (const auto& s : family) {
        const double lhs = std::abs(q_inner(s.g, s.f, s.h, 0.0, p, cfg.quad));
        const double G = weighted_l1(s.g, p.gamma + 2.0 * p.s) + l2_norm(s.g);
        const double F = triple_norm_x(s.f, cfg.triple);
        const double H = triple_norm_x(s.h, cfg.triple) +
                         l2_norm(weight_multiply(s.h, p.s + 0.5 * p.gamma));
        const double core = G * F * H;
        lhs_list.push_back(lhs);
        rhs_core.push_back(core);
        need = std::max(need, lhs / std::max(core, 1e-300));
        // the flexible (a1, a2) split variant
        const double total = p.gamma + 2.0 * p.s;
        for (int i = 0; i < cfg.a_split_count; ++i) {
            const double a1 = total * i / std::max(1, cfg.a_split_count - 1);
            const double a2 = total - a1;
            const double r2 = G * dv_weighted_l2(s.f, p.s, a1) * dv_weighted_l2(s.h, p.s, a2);
            need_split = std::max(need_split, lhs / std::max(r2, 1e-300));
        }
    }
    const double C1 = 1.05 * need;
    rep.fitted_constants["C1"] = C1;
    rep.fitted_constants["C1_split"] = 1.05 * need_split;
    rep.margin = 1e300;
    rep.pass = std::isfinite(C1) && C1 > 0.0;
    for (std::size_t i = 0; i < lhs_list.size(); ++i) {
        const double m = C1 * rhs_core[i] - lhs_list[i];
        rep.sample_margins.push_back(m);
        if (m < rep.margin) {
            rep.margin = m;
            rep.lhs = lhs_list[i];
            rep.rhs = C1 * rhs_core[i];
        }
        rep.pass = rep.pass && m >= -1e-12 * std::max(1.0, lhs_list[i]);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// commutator
// ---------------------------------------------------------------------------
InequalityReport verify_commutator(const std::vector<TrilinearSample>& family, double l,
                                   const KernelParams& p, CommutatorConfig& cfg) {
    if (!(l >= 13.0 / 2.0 + p.gamma))
        throw DomainError("verify_commutator: hypothesis l >= 13/2 + gamma violated");
    if (family.empty()) throw DomainError("verify_commutator: empty family");

    const double om_shift = angular_constant(AngularKind::omega, l - 2.0 - p.gamma, p, 1e-10);
    struct Terms {
        double lhs, exact, fitted_bracket;
    };
    std::vector<Terms> terms;
    for (const auto& s : family) {
        const double lhs = std::abs(q_inner(s.g, s.f, s.h, l, p, cfg.quad) -
                                    q_inner(s.g, weight_multiply(s.f, l), s.h, 0.0, p, cfg.quad));
        const double g6 = l2_norm(weight_multiply(s.g, 6.0 + p.gamma));
        const double f6 = l2_norm(weight_multiply(s.f, 6.0 + p.gamma));
        const double hg2 = l2_norm(weight_multiply(s.h, 0.5 * p.gamma));
        const double glg2 = l2_norm(weight_multiply(s.g, l + 0.5 * p.gamma));
        const double t1 = g6 * hg2 * dv_weighted_l2(s.f, p.s, l + 0.5 * p.gamma);
        const double t2 = 2.0 * om_shift * weighted_l1(s.f, 0.0) * glg2 * hg2;
        const double t3 = f6 * glg2 * l2_norm(s.h);
        const double t4 = f6 * l2_norm(weight_multiply(s.g, l)) * hg2;
        terms.push_back({lhs, t2, t1 + t3 + t4});
    }
    if (cfg.C_l == 0.0) {
        double need = 0.0;
        for (const auto& t : terms)
            need = std::max(need, (t.lhs - t.exact) / std::max(t.fitted_bracket, 1e-300));
        cfg.C_l = std::max(1e-6, 1.05 * need);
    }

    InequalityReport rep;
    rep.name = "commutator_l" + std::to_string(l);
    std::vector<const DistributionField*> ptrs;
    for (const auto& s : family) {
        ptrs.push_back(&s.g);
        ptrs.push_back(&s.f);
        ptrs.push_back(&s.h);
    }
    rep.sample_digest = digest_fields(ptrs, rep.name);
    rep.fitted_constants["C_l"] = cfg.C_l;
    rep.fitted_constants["omega_shift"] = om_shift;
    rep.margin = 1e300;
    rep.pass = true;
    for (const auto& t : terms) {
        const double rhs = t.exact + cfg.C_l * t.fitted_bracket;
        const double m = rhs - t.lhs;
        rep.sample_margins.push_back(m);
        if (m < rep.margin) {
            rep.margin = m;
            rep.lhs = t.lhs;
            rep.rhs = rhs;
        }
        rep.pass = rep.pass && t.lhs <= rhs + 1e-12 * std::max(1.0, t.lhs);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// interpolation lemmas
// ---------------------------------------------------------------------------
namespace {

struct InterpTriple {
    double L;   // squared left-hand side
    double A;   // coefficient of epsilon
    double M2;  // squared moment factor
};

InterpTriple interp_quantities(const DistributionField& h, InterpolationLemma which,
                               const KernelParams& p, const InterpolationConfig& cfg) {
    InterpTriple t{0.0, 0.0, 0.0};
    const double s = p.s, gamma = p.gamma;
    const double hyw = gamma / (2.0 * (1.0 + 2.0 * s));
    const double hyr = s / (1.0 + 2.0 * s);
    switch (which) {
        case InterpolationLemma::embedding: {
            t.L = sq(l2_norm(weight_multiply(h, s + 0.5 * gamma)));
            const DistributionField hx = x_bracket_deriv(h, hyr);
            t.A = sq(l2_norm(weight_multiply(hx, hyw))) + sq(triple_norm_x(h, cfg.triple));
            t.M2 = sq(weighted_l1(h, 3.0 + 7.0 * s + 2.0 * gamma));
            break;
        }
        case InterpolationLemma::spatial: {
            const double tau = cfg.ladder.ell - 3.0 * cfg.ladder.rho;
            if (h.grid().n_x_total() > 1) {
                for (const auto& alpha : multi_indices_deg3(h.grid().dx_dims)) {
                    const DistributionField da = x_derivative(h, alpha);
                    t.L += sq(l2_norm(weight_multiply(da, tau + s + 0.5 * gamma)));
                    const DistributionField dax = x_bracket_deriv(da, hyr);
                    t.A += sq(l2_norm(weight_multiply(dax, tau + hyw)));
                }
            }
            t.M2 = sq(l2_norm(weight_multiply(h, tau + 3.0 * cfg.ladder.rho)));
            break;
        }
        case InterpolationLemma::smallness: {
            const DistributionField core =
                fractional_deriv_v(h, s, cfg.ladder.ell1 + 2.0 * s + 0.5 * gamma);
            // H^2_x L^2_v: sum over |beta| <= 2
            t.L = sq(l2_norm(core));
            if (h.grid().n_x_total() > 1) {
                for (int d = 0; d < h.grid().dx_dims; ++d) {
                    std::array<int, 3> b1{0, 0, 0};
                    b1[static_cast<std::size_t>(d)] = 1;
                    t.L += sq(l2_norm(x_derivative(core, b1)));
                    for (int d2 = d; d2 < h.grid().dx_dims; ++d2) {
                        std::array<int, 3> b2{0, 0, 0};
                        b2[static_cast<std::size_t>(d)] += 1;
                        b2[static_cast<std::size_t>(d2)] += 1;
                        t.L += sq(l2_norm(x_derivative(core, b2)));
                    }
                }
            }
            t.A = sq(y_norm(h, cfg.ladder, cfg.triple));
            t.M2 = sq(dv_weighted_l2(h, s, cfg.ladder.ell1 + 0.5 * gamma));
            break;
        }
    }
    return t;
}

}  // namespace

InequalityReport verify_interpolation(const std::vector<DistributionField>& family,
                                      InterpolationLemma which, const KernelParams& p,
                                      const InterpolationConfig& cfg) {
    if (family.empty()) throw DomainError("verify_interpolation: empty family");
    const double kappa =
        which == InterpolationLemma::smallness ? 5.0 : (3.0 + 6.0 * p.s) / p.s;

    std::vector<InterpTriple> q;
    for (const auto& h : family) q.push_back(interp_quantities(h, which, p, cfg));

    InequalityReport rep;
    rep.name = which == InterpolationLemma::embedding
                   ? "interpolation_embedding"
                   : (which == InterpolationLemma::spatial ? "interpolation_spatial"
                                                           : "interpolation_smallness");
    std::vector<const DistributionField*> ptrs;
    for (const auto& h : family) ptrs.push_back(&h);
    rep.sample_digest = digest_fields(ptrs, rep.name);

    // fit the single constant over (eps, sample)
    double need = 0.0;
    for (double eps : cfg.eps_list)
        for (const auto& t : q) {
            const double excess = t.L - eps * t.A;
            if (excess > 0.0)
                need = std::max(need, excess * std::pow(eps, kappa) / std::max(t.M2, 1e-300));
        }
    const double C = 1.05 * std::max(need, 0.0);
    rep.fitted_constants["C"] = C;
    rep.fitted_constants["kappa"] = kappa;

    rep.margin = 1e300;
    rep.pass = true;
    for (double eps : cfg.eps_list)
        for (const auto& t : q) {
            const double rhs = eps * t.A + C * std::pow(eps, -kappa) * t.M2;
            const double m = rhs - t.L;
            rep.sample_margins.push_back(m);
            if (m < rep.margin) {
                rep.margin = m;
                rep.lhs = t.L;
                rep.rhs = rhs;
            }
            rep.pass = rep.pass && t.L <= rhs * (1.0 + 1e-12);
        }

    // exponent regression on the binding envelope E(eps) = max_i (L - eps A)_+ / M^2
    // over a log grid spanning the family's binding scales
    double e_lo = 1e300, e_hi = 0.0;
    for (const auto& t : q)
        if (t.A > 0.0 && t.L > 0.0) {
            const double es = t.L / t.A;
            e_lo = std::min(e_lo, es);
            e_hi = std::max(e_hi, es);
        }
    if (e_hi > 0.0 && e_lo < 1e300) {
        std::vector<double> xs, ys;
        const int npts = std::max(5, cfg.regression_points);
        for (int i = 0; i < npts; ++i) {
            const double eps = 0.02 * e_lo *
                               std::pow((0.5 * e_hi) / (0.02 * e_lo),
                                        static_cast<double>(i) / (npts - 1));
            double E = 0.0;
            for (const auto& t : q)
                E = std::max(E, std::max(t.L - eps * t.A, 0.0) / std::max(t.M2, 1e-300));
            if (E > 0.0) {
                xs.push_back(std::log(eps));
                ys.push_back(std::log(E));
            }
        }
        if (xs.size() >= 4) {
            const double n = static_cast<double>(xs.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                sx += xs[i];
                sy += ys[i];
                sxx += xs[i] * xs[i];
                sxy += xs[i] * ys[i];
            }
            rep.extras["exponent"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            rep.extras["exponent_expected"] = -kappa;
            rep.extras["regression_points"] = n;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// hypoelliptic symbol checks
// ---------------------------------------------------------------------------
double symbol_chi(double r) {
    const double a = std::abs(r);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    // S(t) = 35 t^4 - 84 t^5 + 70 t^6 - 20 t^7, the C^3 smoothstep
    const double t = 2.0 - a;
    return t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

double symbol_chi_prime(double r) {
    const double a = std::abs(r);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double t = 2.0 - a;
    const double one_minus = 1.0 - t;
    const double dSdt = 140.0 * t * t * t * one_minus * one_minus * one_minus;
    return (r > 0.0 ? -1.0 : 1.0) * dSdt;
}

double symbol_phi(const Vec3& k, const Vec3& eta, double s) {
    const double kb = vweight(k);
    const double pexp = (2.0 + 2.0 * s) / (1.0 + 2.0 * s);
    const double u = vweight(eta) / std::pow(kb, 1.0 / (1.0 + 2.0 * s));
    return 2.0 * dot(k, eta) / std::pow(kb, pexp) * symbol_chi(u);
}

double symbol_phi_bracket(const Vec3& k, const Vec3& eta, double s) {
    const double kb = vweight(k);
    const double pexp = (2.0 + 2.0 * s) / (1.0 + 2.0 * s);
    const double kroot = std::pow(kb, 1.0 / (1.0 + 2.0 * s));
    const double eb = vweight(eta);
    const double u = eb / kroot;
    const double ke = dot(k, eta);
    return norm2(k) / std::pow(kb, pexp) * symbol_chi(u) +
           ke * ke / (std::pow(kb, pexp) * eb * kroot) * symbol_chi_prime(u);
}

double symbol_psi_bracket(const Vec3& k, const Vec3& eta, const Vec3& v, double s,
                          double gamma) {
    const double kb = vweight(k);
    const double pexp = (2.0 + 2.0 * s) / (1.0 + 2.0 * s);
    const double kroot = std::pow(kb, 1.0 / (1.0 + 2.0 * s));
    const double vb = std::pow(vweight(v), gamma / (1.0 + 2.0 * s));
    const double eb = vweight(eta);
    const double u = vb * eb / kroot;
    const double ke = dot(k, eta);
    return vb * norm2(k) / std::pow(kb, pexp) * symbol_chi(u) +
           vb * vb * ke * ke / (std::pow(kb, pexp) * eb * kroot) * symbol_chi_prime(u);
}

namespace {

// Latin hypercube over [lo, hi]^3
std::vector<Vec3> latin_hypercube(Rng& rng, int n, double lo, double hi) {
    std::vector<Vec3> pts(static_cast<std::size_t>(n));
    for (int d = 0; d < 3; ++d) {
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform() * (i + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < n; ++i) {
            const double u = (perm[static_cast<std::size_t>(i)] + rng.uniform()) / n;
            pts[static_cast<std::size_t>(i)][d] = lo + (hi - lo) * u;
        }
    }
    return pts;
}

double fit_symbol_constant(SymbolKind kind, const KernelParams& p, const SymbolSampleSpec& spec,
                           int n_samples) {
    Rng rng(spec.seed);
    const double s = p.s;
    const double eta_max =
        spec.eta_box_factor *
        std::pow(vweight(Vec3{static_cast<double>(spec.k_max), static_cast<double>(spec.k_max),
                              static_cast<double>(spec.k_max)}),
                 1.0 / (1.0 + 2.0 * s));
    const auto etas = latin_hypercube(rng, n_samples, -eta_max, eta_max);
    const auto vs = latin_hypercube(rng, n_samples, -spec.v_box, spec.v_box);
    double need = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        Vec3 k{1.0 + std::floor(rng.uniform() * spec.k_max),
               1.0 + std::floor(rng.uniform() * spec.k_max),
               1.0 + std::floor(rng.uniform() * spec.k_max)};
        const Vec3& eta = etas[static_cast<std::size_t>(i)];
        const double kb = vweight(k);
        const double target_k = std::pow(kb, 2.0 * s / (1.0 + 2.0 * s));
        if (kind == SymbolKind::unweighted) {
            const double E = symbol_phi_bracket(k, eta, s);
            const double deficit = target_k - E;
            if (deficit > 0.0)
                need = std::max(deficit / std::pow(vweight(eta), 2.0 * s), need);
        } else {
            const Vec3& v = vs[static_cast<std::size_t>(i)];
            const double W = symbol_psi_bracket(k, eta, v, s, p.gamma);
            const double lower =
                std::pow(vweight(v), p.gamma / (1.0 + 2.0 * s)) * target_k;
            const double deficit = lower - W;
            if (deficit > 0.0)
                need = std::max(deficit / (std::pow(vweight(v), p.gamma) *
                                           std::pow(vweight(eta), 2.0 * s)),
                                need);
        }
    }
    return 1.05 * need;
}

}  // namespace

InequalityReport symbol_check(SymbolKind kind, const KernelParams& p,
                              const SymbolSampleSpec& spec) {
    p.validate();
    InequalityReport rep;
    rep.name = kind == SymbolKind::unweighted ? "symbol_unweighted" : "symbol_weighted";
    const double C_half = fit_symbol_constant(kind, p, spec, spec.n_samples / 2);
    const double C_full = fit_symbol_constant(kind, p, spec, spec.n_samples);
    const double C_double = fit_symbol_constant(kind, p, spec, 2 * spec.n_samples);
    rep.fitted_constants["C"] = C_double;
    rep.extras["C_half"] = C_half;
    rep.extras["C_full"] = C_full;
    const double change =
        std::abs(C_double - C_full) / std::max(C_full, 1e-300);
    rep.extras["doubling_change"] = change;
    rep.pass = std::isfinite(C_double) && change <= 0.25;
    rep.margin = 0.25 - change;
    std::ostringstream os;
    os << "seed=" << spec.seed << ",n=" << spec.n_samples << ",kmax=" << spec.k_max;
    rep.sample_digest = hex_digest(fnv1a(os.str()));
    return rep;
}

}  // namespace boltz
