#include "boltzkit/lemma_lab.hpp"

#include <cmath>

#include "doctest.h"

using namespace boltz;

namespace {
PhaseGrid grid(int nv = 16, double R = 6.0) {
    PhaseGrid g;
    g.nx = 1;
    g.nv = nv;
    g.R = R;
    return g;
}

KernelParams params(double gamma = 0.0, double s = 0.5) {
    KernelParams p;
    p.gamma = gamma;
    p.s = s;
    return p;
}

QuadConfig quad8() {
    QuadConfig q;
    q.n_theta = 8;
    q.n_phi = 8;
    return q;
}
}  // namespace

TEST_CASE("cancellation: Gaussian gap, zero field, b0 scaling") {
    const PhaseGrid g = grid(24, 7.0);
    const auto p = params();
    const DistributionField mu = maxwellian(g, {});
    CancellationConfig cc;
    cc.tol = 1e-3;
    const auto rep = verify_cancellation(mu, p, cc);
    CHECK(rep.pass);
    CHECK(rep.fitted_constants.at("rel_gap") <= 1e-3);

    const DistributionField zero(g);
    const auto repz = verify_cancellation(zero, p, cc);
    CHECK(repz.lhs == 0.0);
    CHECK(repz.rhs == 0.0);
    CHECK(repz.pass);

    // doubling b0 doubles both sides, the ratio is unchanged
    KernelParams p2 = p;
    p2.b0 = 2.0;
    const auto rep2 = verify_cancellation(mu, p2, cc);
    CHECK(rep2.lhs == doctest::Approx(2.0 * rep.lhs).epsilon(1e-12));
    CHECK(rep2.rhs == doctest::Approx(2.0 * rep.rhs).epsilon(1e-12));
    CHECK(rep2.fitted_constants.at("rel_gap") ==
          doctest::Approx(rep.fitted_constants.at("rel_gap")).epsilon(1e-9));
}

TEST_CASE("moment bound: equilibrium, displaced bump, f-scaling") {
    const PhaseGrid g = grid(16, 7.0);
    const auto p = params();
    HydroBounds hydro;
    const DistributionField mu = maxwellian(g, {});

    SUBCASE("f = g = maxwellian at l = 5: LHS near zero, RHS positive") {
        MomentBoundConfig mc;
        mc.quad = quad8();
        const auto rep = verify_moment_bound({mu}, mu, 5.0, p, hydro, mc);
        CHECK(rep.pass);
        CHECK(std::abs(rep.lhs) < 0.05);
        CHECK(rep.rhs > 0.0);
    }
    SUBCASE("displaced Maxwellian family passes with reported margin") {
        MaxwellianSpec ms;
        ms.mean = {1.0, 0.0, 0.0};
        ms.temperature = 0.8;
        MomentBoundConfig mc;
        mc.quad = quad8();
        const auto rep = verify_moment_bound({maxwellian(g, ms), mu}, mu, 5.0, p, hydro, mc);
        CHECK(rep.pass);
        CHECK(rep.margin > 0.0);
        CHECK(mc.C_l > 0.0);  // fitted and frozen into the config

        // scaling f by alpha preserves the verdict under the frozen constant
        DistributionField f4 = maxwellian(g, ms);
        for (auto& v : f4.values()) v *= 4.0;
        MomentBoundConfig mc2;
        mc2.quad = quad8();
        mc2.C_l = mc.C_l;
        const auto rep4 = verify_moment_bound({f4}, mu, 5.0, p, hydro, mc2);
        CHECK(rep4.pass);
    }
    SUBCASE("precondition: g must satisfy condition (H)") {
        DistributionField tiny = mu;
        for (auto& v : tiny.values()) v *= 1e-3;
        MomentBoundConfig mc;
        mc.quad = quad8();
        CHECK_THROWS_AS(verify_moment_bound({mu}, tiny, 5.0, p, hydro, mc), DomainError);
        CHECK_THROWS_AS(verify_moment_bound({mu}, mu, 4.0, p, hydro, mc), DomainError);
    }
}

TEST_CASE("moment bound scales linearly in f") {
    const PhaseGrid g = grid(14, 6.0);
    const auto p = params();
    HydroBounds hydro;
    const DistributionField mu = maxwellian(g, {});
    MaxwellianSpec ms;
    ms.mean = {0.8, 0, 0};
    const DistributionField f1 = maxwellian(g, ms);
    DistributionField f3 = f1;
    for (auto& v : f3.values()) v *= 3.0;
    MomentBoundConfig mc;
    mc.quad = quad8();
    mc.C_l = 1.0;  // frozen constant so both runs use identical coefficients
    const auto r1 = verify_moment_bound({f1}, mu, 5.0, p, hydro, mc);
    const auto r3 = verify_moment_bound({f3}, mu, 5.0, p, hydro, mc);
    CHECK(r3.lhs == doctest::Approx(3.0 * r1.lhs).epsilon(1e-9));
    CHECK(r3.rhs == doctest::Approx(3.0 * r1.rhs).epsilon(1e-9));
}

TEST_CASE("coercivity fit: positive c0, out-of-sample revalidation") {
    const PhaseGrid g = grid(14, 6.0);
    const auto p = params();
    HydroBounds hydro;
    const DistributionField mu = maxwellian(g, {});
    // Maxwellian dilates
    std::vector<DistributionField> fam;
    for (double T : {0.6, 0.8, 1.0, 1.2, 1.4, 0.7, 0.9, 1.1, 1.3, 1.5})
        fam.push_back(maxwellian(g, {1.0, T, {0, 0, 0}}));
    CoercivityConfig cc;
    cc.quad = quad8();
    cc.triple.s = p.s;
    cc.triple.gamma = p.gamma;
    const auto rep = verify_coercivity(fam, mu, p, hydro, cc);
    CHECK(rep.pass);
    CHECK(rep.fitted_constants.at("c0") > 0.0);
    CHECK(rep.margin >= -1e-10);

    // held-out samples satisfy the fitted inequality
    const double c0 = rep.fitted_constants.at("c0");
    const double C0 = rep.fitted_constants.at("C0");
    for (double T : {0.65, 1.25}) {
        const DistributionField f = maxwellian(g, {1.0, T, {0.2, 0, 0}});
        const double I = -q_inner(mu, f, f, 0.0, p, cc.quad);
        const double T2 = std::pow(triple_norm_x(f, cc.triple), 2);
        const double W2 = std::pow(l2_norm(weight_multiply(f, p.s + 0.5 * p.gamma)), 2);
        CHECK(I >= c0 * T2 - C0 * W2 - 1e-6 * std::abs(I));
    }
}

TEST_CASE("trilinear fit: equilibrium, stability, homogeneity") {
    const PhaseGrid g = grid(14, 6.0);
    const auto p = params();
    const DistributionField mu = maxwellian(g, {});
    MixtureOptions mo;
    const auto fields = mixture_family(g, 17, 18, mo);
    std::vector<TrilinearSample> fam, fam_half;
    for (std::size_t i = 0; i + 2 < fields.size(); i += 3)
        fam.push_back({fields[i], fields[i + 1], fields[i + 2]});
    fam_half.assign(fam.begin(), fam.begin() + 3);
    TrilinearConfig tc;
    tc.quad = quad8();
    tc.triple.s = p.s;
    tc.triple.gamma = p.gamma;
    const auto rep_half = verify_trilinear(fam_half, p, tc);
    const auto rep = verify_trilinear(fam, p, tc);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.fitted_constants.at("C1")));
    CHECK(rep.fitted_constants.at("C1") > 0.0);
    // enlarging the family can only raise the max-ratio fit
    CHECK(rep.fitted_constants.at("C1") >= rep_half.fitted_constants.at("C1") - 1e-12);
    // doubling the family changes the fit by a bounded factor
    CHECK(rep.fitted_constants.at("C1") <= 1.2 * rep_half.fitted_constants.at("C1") + 1.0);
    CHECK(std::isfinite(rep.fitted_constants.at("C1_split")));

    // equilibrium sample: LHS vanishes within tolerance, bound trivially holds
    const auto rep_eq = verify_trilinear({{mu, mu, mu}}, p, tc);
    CHECK(std::abs(rep_eq.lhs) < 1e-5);

    // scaling g scales both sides linearly; pass preserved
    TrilinearSample scaled = fam[0];
    for (auto& v : scaled.g.values()) v *= 2.0;
    const auto rep_s = verify_trilinear({fam[0], scaled}, p, tc);
    CHECK(rep_s.pass);
}

TEST_CASE("commutator: preconditions and fitted pass") {
    const PhaseGrid g = grid(14, 6.0);
    const auto p = params();
    const DistributionField mu = maxwellian(g, {});
    CommutatorConfig cc;
    cc.quad = quad8();
    CHECK_THROWS_AS(verify_commutator({{mu, mu, mu}}, 0.0, p, cc), DomainError);

    MixtureOptions mo;
    const auto fields = mixture_family(g, 23, 9, mo);
    std::vector<TrilinearSample> fam;
    for (std::size_t i = 0; i + 2 < fields.size(); i += 3)
        fam.push_back({fields[i], fields[i + 1], fields[i + 2]});
    const double l = 7.0;  // >= 13/2 + gamma
    const auto rep = verify_commutator(fam, l, p, cc);
    CHECK(rep.pass);
    CHECK(rep.fitted_constants.at("C_l") > 0.0);
    CHECK(rep.fitted_constants.at("omega_shift") ==
          doctest::Approx(angular_constant(AngularKind::omega, l - 2.0, p, 1e-10)));

    // equilibrium triple: both inner products nearly cancel
    CommutatorConfig cc2;
    cc2.quad = quad8();
    const auto rep_eq = verify_commutator({{mu, mu, mu}}, l, p, cc2);
    CHECK(rep_eq.pass);
}

TEST_CASE("interpolation: trivial cases and fitted pass") {
    const PhaseGrid g = grid(14, 6.0);
    const auto p = params();
    InterpolationConfig ic;
    ic.ladder = WeightLadder::from_ell1(7.0, p, 0.125);
    ic.triple.s = p.s;
    ic.triple.gamma = p.gamma;

    SUBCASE("zero field passes every epsilon") {
        const auto rep = verify_interpolation({DistributionField(g)},
                                              InterpolationLemma::embedding, p, ic);
        CHECK(rep.pass);
        CHECK(rep.margin >= 0.0);
    }
    SUBCASE("embedding on a temperature family") {
        MixtureOptions mo;
        mo.temp_min = 0.2;
        mo.temp_max = 3.0;
        mo.center_radius = 3.0;
        const auto fam = mixture_family(g, 31, 8, mo);
        const auto rep = verify_interpolation(fam, InterpolationLemma::embedding, p, ic);
        CHECK(rep.pass);
        CHECK(rep.fitted_constants.at("C") >= 0.0);
        CHECK(rep.fitted_constants.at("kappa") == doctest::Approx((3.0 + 6.0 * p.s) / p.s));
    }
    SUBCASE("spatial lemma is trivial for homogeneous fields") {
        const auto fam = mixture_family(g, 37, 4, MixtureOptions{});
        const auto rep = verify_interpolation(fam, InterpolationLemma::spatial, p, ic);
        CHECK(rep.pass);
        CHECK(rep.lhs == 0.0);
    }
    SUBCASE("smallness lemma on a homogeneous family") {
        MixtureOptions mo;
        mo.temp_min = 0.4;
        mo.temp_max = 1.5;
        const auto fam = mixture_family(g, 41, 6, mo);
        const auto rep = verify_interpolation(fam, InterpolationLemma::smallness, p, ic);
        CHECK(rep.pass);
        CHECK(rep.fitted_constants.at("kappa") == doctest::Approx(5.0));
    }
}

TEST_CASE("symbol checks: closed forms, bounds, determinism") {
    const auto p = params(0.0, 0.5);
    const double s = p.s;
    const double pexp = (2.0 + 2.0 * s) / (1.0 + 2.0 * s);

    // chi: plateau, support, smooth transition
    CHECK(symbol_chi(0.5) == 1.0);
    CHECK(symbol_chi(-1.0) == 1.0);
    CHECK(symbol_chi(2.0) == 0.0);
    CHECK(symbol_chi(1.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(symbol_chi(1.2) > symbol_chi(1.8));
    CHECK(symbol_chi_prime(1.5) < 0.0);
    CHECK(symbol_chi_prime(0.5) == 0.0);
    // derivative matches a finite difference in the transition region
    const double fd = (symbol_chi(1.3 + 1e-6) - symbol_chi(1.3 - 1e-6)) / 2e-6;
    CHECK(symbol_chi_prime(1.3) == doctest::Approx(fd).epsilon(1e-6));

    // eta = 0: expression reduces to |k|^2 <k>^{-p}; C = 1 suffices
    for (const Vec3 k : {Vec3{1, 2, 3}, Vec3{10, 0, 5}, Vec3{40, 40, 40}}) {
        const double E = symbol_phi_bracket(k, {0, 0, 0}, s);
        const double kb = vweight(k);
        CHECK(E == doctest::Approx(norm2(k) / std::pow(kb, pexp)).epsilon(1e-12));
        CHECK(E >= std::pow(kb, 2.0 * s / (1.0 + 2.0 * s)) - 1.0 - 1e-12);
    }

    // |phi_k| <= 2 * 2^{1/(1+2s)} <= 4 everywhere
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const Vec3 k = rng.uniform_vec(1.0, 64.0);
        const Vec3 eta = rng.uniform_vec(-40.0, 40.0);
        worst = std::max(worst, std::abs(symbol_phi(k, eta, s)));
    }
    CHECK(worst <= 2.0 * std::pow(2.0, 1.0 / (1.0 + 2.0 * s)) + 1e-9);
    CHECK(worst <= 4.0);

    SymbolSampleSpec spec;
    spec.n_samples = 2048;
    const auto rep = symbol_check(SymbolKind::unweighted, p, spec);
    CHECK(rep.pass);
    CHECK(std::isfinite(rep.fitted_constants.at("C")));
    const auto rep_w = symbol_check(SymbolKind::weighted, params(1.0, 0.5), spec);
    CHECK(rep_w.pass);

    // bit-identical reports on re-run with the same seed
    const auto rep2 = symbol_check(SymbolKind::unweighted, p, spec);
    CHECK(rep.fitted_constants.at("C") == rep2.fitted_constants.at("C"));
    CHECK(rep.sample_digest == rep2.sample_digest);
}

TEST_CASE("mixture families are deterministic and nonnegative") {
    const PhaseGrid g = grid(12, 5.0);
    const auto fam1 = mixture_family(g, 5, 4, MixtureOptions{});
    const auto fam2 = mixture_family(g, 5, 4, MixtureOptions{});
    REQUIRE(fam1.size() == 4);
    for (std::size_t i = 0; i < fam1.size(); ++i) {
        CHECK(fam1[i].min_value() >= 0.0);
        double diff = 0.0;
        for (std::size_t j = 0; j < fam1[i].values().size(); ++j)
            diff = std::max(diff, std::abs(fam1[i].values()[j] - fam2[i].values()[j]));
        CHECK(diff == 0.0);
    }
}
