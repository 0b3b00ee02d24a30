#include "boltzkit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "boltzkit/quadrature.hpp"

namespace boltz {

void CollisionTriple::validate() const {
    if (std::abs(norm(sigma) - 1.0) > 1e-12)
        throw DomainError("CollisionTriple: sigma must be a unit vector");
}

PostCollision post_collision(const CollisionTriple& t) {
    t.validate();
    const Vec3 u = 0.5 * (t.v + t.v_star);
    const double r = 0.5 * norm(t.v - t.v_star);
    return {u + r * t.sigma, u - r * t.sigma};
}

namespace {
DeviationFrame make_frame(const CollisionTriple& t, bool lenient) {
    t.validate();
    const Vec3 w = t.v - t.v_star;
    const double wn = norm(w);
    if (wn == 0.0) throw DomainError("deviation_frame: v == v_star");
    DeviationFrame fr;
    fr.kappa = w / wn;
    const double c = std::clamp(dot(fr.kappa, t.sigma), -1.0, 1.0);
    fr.theta = std::acos(c);
    const Vec3 perp = t.sigma - c * fr.kappa;
    const double pn = norm(perp);
    if (pn < 1e-10) {
        if (!lenient)
            throw DomainError("deviation_frame: sigma parallel to kappa, kappa_perp undefined");
        Vec3 e1, e2;
        orthonormal_frame(fr.kappa, e1, e2);
        fr.kappa_perp = e1;
        fr.fallback = true;
    } else {
        fr.kappa_perp = perp / pn;
    }
    return fr;
}
}  // namespace

DeviationFrame deviation_frame(const CollisionTriple& t) { return make_frame(t, false); }
DeviationFrame deviation_frame_lenient(const CollisionTriple& t) { return make_frame(t, true); }

WeightExpansion weight_expansion(const CollisionTriple& t, double l) {
    if (!(l >= 5.0)) throw DomainError("weight_expansion: l must be >= 5");
    const DeviationFrame fr = deviation_frame_lenient(t);
    const double ch = std::cos(0.5 * fr.theta);
    const double sh = std::sin(0.5 * fr.theta);
    const double av = vweight(t.v);
    const double avs = vweight(t.v_star);
    const double wn = norm(t.v - t.v_star);

    WeightExpansion e;
    e.term_v = std::pow(av, l) * std::pow(ch, l);
    e.term_vstar = std::pow(avs, l) * std::pow(sh, l);
    e.term_cross =
        l * std::pow(av, l - 2.0) * wn * dot(t.v, fr.kappa_perp) * std::pow(ch, l - 1.0) * sh;
    const double lhs = std::pow(vweight(post_collision(t).v_prime), l);
    e.remainder = lhs - e.term_v - e.term_vstar - e.term_cross;
    e.remainder_majorant = av * std::pow(avs, l - 1.0) * std::pow(sh, l - 3.0) +
                           std::pow(av, l - 2.0) * avs * avs * sh * sh +
                           std::pow(av, l - 4.0) * std::pow(avs, 4.0) * sh * sh;
    return e;
}

SphereRule SphereRule::over_theta(double theta_lo, double theta_hi, int n_theta, int n_phi) {
    if (!(0.0 <= theta_lo && theta_lo < theta_hi && theta_hi <= kPi))
        throw DomainError("SphereRule: bad theta interval");
    SphereRule r;
    r.n_phi = n_phi;
    const auto& x = GaussLegendre::nodes(n_theta);
    const auto& w = GaussLegendre::weights(n_theta);
    // GL in mu = cos(theta) over [cos hi, cos lo]
    const double mu_lo = std::cos(theta_hi), mu_hi = std::cos(theta_lo);
    const double mid = 0.5 * (mu_lo + mu_hi), half = 0.5 * (mu_hi - mu_lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double mu = mid + half * x[i];
        r.theta.push_back(std::acos(std::clamp(mu, -1.0, 1.0)));
        r.w_theta.push_back(w[i] * half);
    }
    return r;
}

double SphereRule::integrate(const std::function<double(double, double)>& F) const {
    const double dphi = 2.0 * kPi / n_phi;
    double acc = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        double ring = 0.0;
        for (int j = 0; j < n_phi; ++j) ring += F(theta[i], (j + 0.5) * dphi);
        acc += w_theta[i] * ring * dphi;
    }
    return acc;
}

namespace {

// Spherical-coordinate integral of G over the ball of radius R centered at c:
// int_0^R r^2 dr int_{S^2} G(c + r n) dn.  The weight |v - c|^gamma enters
// smoothly as r^gamma, avoiding the kink a tensor rule would see.
double ball_integral(const std::function<double(const Vec3&, double)>& G, const Vec3& c,
                     double R, int n_r, int n_mu, int n_phi) {
    const auto& xr = GaussLegendre::nodes(n_r);
    const auto& wr = GaussLegendre::weights(n_r);
    const auto& xm = GaussLegendre::nodes(n_mu);
    const auto& wm = GaussLegendre::weights(n_mu);
    const double dphi = 2.0 * kPi / n_phi;
    return parallel_sum(xr.size(), [&](std::size_t ir) {
        const double r = 0.5 * R * (xr[ir] + 1.0);
        double acc = 0.0;
        for (std::size_t im = 0; im < xm.size(); ++im) {
            const double mu = xm[im];
            const double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int ip = 0; ip < n_phi; ++ip) {
                const double ph = (ip + 0.5) * dphi;
                const Vec3 n{smu * std::cos(ph), smu * std::sin(ph), mu};
                acc += wm[im] * G(c + r * n, r);
            }
        }
        return wr[ir] * 0.5 * R * r * r * acc * dphi;
    });
}

// Tensor Gauss-Legendre sum of G over the cube [-L, L]^3 (pre_post only).
double cube_integral(const std::function<double(const Vec3&)>& G, double L, int order) {
    const auto& x = GaussLegendre::nodes(order);
    const auto& w = GaussLegendre::weights(order);
    const std::size_t n = x.size();
    return parallel_sum(n, [&](std::size_t i) {
        double acc_i = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double acc_j = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc_j += w[k] * G({L * x[i], L * x[j], L * x[k]});
            acc_i += w[j] * acc_j;
        }
        return w[i] * acc_i * L * L * L;
    });
}

// 2pi int sin(theta) H(theta) extra(theta) d(theta) over the support of H.
double angular_factor(const AngularWeight& H, const std::function<double(double)>& extra,
                      int order) {
    return 2.0 * kPi *
           integrate_gl(
               [&](double th) { return std::sin(th) * H(th) * (extra ? extra(th) : 1.0); },
               H.support_lo, H.support_hi, order);
}

}  // namespace

IdentityReport check_cov_identity(CovIdentity kind, const ScalarField3& f, const Vec3& fixed,
                                  const AngularWeight& H, double gamma,
                                  const CovQuadConfig& quad) {
    if (!(H.support_lo > 0.0 && H.support_hi <= kPi / 2.0 && H.support_lo < H.support_hi))
        throw DomainError("check_cov_identity: H must be supported inside (0, pi/2]");

    IdentityReport rep;
    rep.tol = quad.tol;
    const SphereRule sphere = SphereRule::over_theta(H.support_lo, H.support_hi, quad.n_theta,
                                                     quad.n_phi);

    // sphere integral of H(theta) f(v') for one (v, v*) pair
    auto primed_sphere = [&](const Vec3& v, const Vec3& vstar) {
        const Vec3 w = v - vstar;
        const double wn = norm(w);
        if (wn < 1e-14) return 0.0;
        const Vec3 kappa = w / wn;
        Vec3 e1, e2;
        orthonormal_frame(kappa, e1, e2);
        const Vec3 u = 0.5 * (v + vstar);
        return sphere.integrate([&](double th, double ph) {
            const Vec3 sigma = std::cos(th) * kappa +
                               std::sin(th) * (std::cos(ph) * e1 + std::sin(ph) * e2);
            return H(th) * f(u + 0.5 * wn * sigma);
        });
    };

    if (kind == CovIdentity::carleman_cos) {
        rep.kind = "carleman_cos";
        const Vec3 vstar = fixed;
        // |v' - v*| = |w| cos(theta/2) >= |w| cos(hi/2): beyond R_cos the
        // primed argument leaves the support of f
        const double R_cos =
            (quad.support_radius + norm(vstar)) / std::cos(0.5 * H.support_hi) + 1.0;
        rep.lhs = ball_integral(
            [&](const Vec3& v, double r) {
                return (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * primed_sphere(v, vstar);
            },
            vstar, R_cos, quad.n_r, quad.n_dir_mu, quad.n_dir_phi);
        const double ang = angular_factor(
            H, [&](double th) { return std::pow(std::cos(0.5 * th), -(3.0 + gamma)); },
            2 * quad.n_theta + 8);
        const double vol = ball_integral(
            [&](const Vec3& v, double r) {
                return (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * f(v);
            },
            vstar, quad.support_radius + norm(vstar) + 1.0, quad.n_r + 8, quad.n_dir_mu + 4,
            quad.n_dir_phi + 8);
        rep.rhs = ang * vol;
    } else if (kind == CovIdentity::carleman_sin) {
        rep.kind = "carleman_sin";
        const Vec3 v = fixed;
        // |v' - v| = |w| sin(theta/2) >= |w| sin(lo/2)
        const double R_sin =
            (quad.support_radius + norm(v)) / std::sin(0.5 * H.support_lo) + 1.0;
        rep.lhs = ball_integral(
            [&](const Vec3& vstar, double r) {
                return (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * primed_sphere(v, vstar);
            },
            v, R_sin, quad.n_r + 16, quad.n_dir_mu, quad.n_dir_phi);
        const double ang = angular_factor(
            H, [&](double th) { return std::pow(std::sin(0.5 * th), -(3.0 + gamma)); },
            2 * quad.n_theta + 8);
        const double vol = ball_integral(
            [&](const Vec3& vstar, double r) {
                return (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * f(vstar);
            },
            v, quad.support_radius + norm(v) + 1.0, quad.n_r + 8, quad.n_dir_mu + 4,
            quad.n_dir_phi + 8);
        rep.rhs = ang * vol;
    } else {
        rep.kind = "pre_post";
        // g is f translated by `fixed`; the product f(u + z/2) g(u - z/2) is
        // then concentrated in u around fixed/2, so the u box sits there.
        auto g = [&](const Vec3& z) { return f(z - fixed); };
        // Direct quadrature of both sides in (u, w) = ((v+v*)/2, v-v*) with w
        // spherical: the (v, v*) tensor form sees a cone at v = v* and
        // converges only algebraically.
        // the product of the two translated copies is centered at fixed/2 and
        // narrower than either factor by sqrt(2)
        const Vec3 u0 = 0.5 * fixed;
        const double Lu = 0.55 * quad.support_radius;
        const double Rw = 1.6 * quad.support_radius + norm(fixed) + 2.0;
        const int n = quad.pre_post_gl_order;

        auto uw_integral = [&](int nu, int n_r, int n_mu, int n_ph,
                               const std::function<double(const Vec3&, double, const Vec3&,
                                                          const Vec3&, const Vec3&)>& inner) {
            const auto& xu = GaussLegendre::nodes(nu);
            const auto& wu = GaussLegendre::weights(nu);
            const std::size_t nn = xu.size();
            const auto& xr = GaussLegendre::nodes(n_r);
            const auto& wr = GaussLegendre::weights(n_r);
            const auto& xm = GaussLegendre::nodes(n_mu);
            const auto& wm = GaussLegendre::weights(n_mu);
            const double dphw = 2.0 * kPi / n_ph;
            return parallel_sum(nn * nn * nn, [&](std::size_t idx) {
                const std::size_t i = idx / (nn * nn);
                const std::size_t j = (idx / nn) % nn;
                const std::size_t k = idx % nn;
                const Vec3 u = u0 + Vec3{Lu * xu[i], Lu * xu[j], Lu * xu[k]};
                const double wvol = wu[i] * wu[j] * wu[k] * Lu * Lu * Lu;
                double acc_r = 0.0;
                for (std::size_t ir = 0; ir < xr.size(); ++ir) {
                    const double r = 0.5 * Rw * (xr[ir] + 1.0);
                    const double kin = (gamma == 0.0 ? 1.0 : std::pow(r, gamma)) * r * r;
                    double acc_w = 0.0;
                    for (std::size_t im = 0; im < xm.size(); ++im) {
                        const double mu = xm[im];
                        const double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                        for (int ip = 0; ip < n_ph; ++ip) {
                            const double ph = (ip + 0.5) * dphw;
                            const Vec3 what{smu * std::cos(ph), smu * std::sin(ph), mu};
                            Vec3 e1, e2;
                            orthonormal_frame(what, e1, e2);
                            acc_w += wm[im] * inner(u, r, what, e1, e2) * dphw;
                        }
                    }
                    acc_r += wr[ir] * 0.5 * Rw * kin * acc_w;
                }
                return wvol * acc_r;
            });
        };

        // pre-collision side: f(v') g(v'*) against the sigma sphere around w
        rep.lhs = uw_integral(
            n + 4, 2 * n, n, 2 * n,
            [&](const Vec3& u, double r, const Vec3& what, const Vec3& e1, const Vec3& e2) {
                (void)what;
                return sphere.integrate([&](double th, double phs) {
                    const Vec3 sigma = std::cos(th) * what +
                                       std::sin(th) * (std::cos(phs) * e1 + std::sin(phs) * e2);
                    return H(th) * f(u + 0.5 * r * sigma) * g(u - 0.5 * r * sigma);
                });
            });
        // post-collision side: the angular factor times f(v) g(v*)
        const double ang = angular_factor(H, nullptr, 2 * quad.n_theta + 8);
        rep.rhs = ang * uw_integral(
                            n + 6, 2 * n + 4, n + 2, 2 * n + 4,
                            [&](const Vec3& u, double r, const Vec3& what, const Vec3&,
                                const Vec3&) { return f(u + 0.5 * r * what) * g(u - 0.5 * r * what); });
    }
    rep.rel_discrepancy =
        std::abs(rep.lhs - rep.rhs) / std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
    rep.pass = rep.rel_discrepancy <= quad.tol;
    return rep;
}

}  // namespace boltz
