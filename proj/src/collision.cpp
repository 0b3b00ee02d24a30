#include "boltzkit/collision.hpp"

#include <algorithm>
#include <cmath>
#include "boltzkit/quadrature.hpp"

namespace boltz {

void QuadConfig::validate() const {
    if (!(theta_min > 0.0 && theta_min <= kPi / 8.0))
        throw DomainError("QuadConfig: theta_min must lie in (0, pi/8]");
    if (n_theta < 8 || n_phi < 8) throw DomainError("QuadConfig: sphere orders must be >= 8");
    if (!(tol > 0.0)) throw DomainError("QuadConfig: tol must be positive");
    if (upsample < 1 || upsample > 8) throw DomainError("QuadConfig: upsample must be 1..8");
}

double support_radius(const DistributionField& f, double rel_threshold) {
    const double cutoff = rel_threshold * f.max_abs();
    if (cutoff == 0.0) return 0.0;
    const PhaseGrid& g = f.grid();
    const std::size_t nvt = g.n_v_total();
    double r2max = 0.0;
    for (std::size_t ix = 0; ix < g.n_x_total(); ++ix)
        for (std::size_t iv = 0; iv < nvt; ++iv)
            if (std::abs(f.at(ix, iv)) > cutoff)
                r2max = std::max(r2max, norm2(g.v_node(iv)));
    return std::sqrt(r2max);
}

namespace {

struct SigmaRule {
    std::vector<double> cos_t, sin_t, wb;  // wb = w_theta * sin(theta) b(cos theta) * dphi
    std::vector<double> cos_p, sin_p;
    double b_total = 0.0;  // int_{theta>=theta_min} b dsigma = 2 pi sum w sin b
};

SigmaRule make_sigma_rule(const KernelParams& p, const QuadConfig& cfg) {
    SigmaRule r;
    const auto theta_rule = geometric_rule(cfg.theta_min, kPi / 2.0, cfg.n_theta);
    const double dphi = 2.0 * kPi / cfg.n_phi;
    for (const auto& [theta, w] : theta_rule) {
        r.cos_t.push_back(std::cos(theta));
        r.sin_t.push_back(std::sin(theta));
        // sin(theta) b(cos theta) = b0 theta^{-1-2s} by the canonical choice
        const double sb = p.b0 * std::pow(theta, -1.0 - 2.0 * p.s);
        r.wb.push_back(w * sb * dphi);
        r.b_total += w * sb * 2.0 * kPi;
    }
    for (int m = 0; m < cfg.n_phi; ++m) {
        const double phi = (m + 0.5) * dphi;
        r.cos_p.push_back(std::cos(phi));
        r.sin_p.push_back(std::sin(phi));
    }
    return r;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

enum class EvalMode { compensated, gain, loss_coef };

// One output field of the collision quadrature.  All three modes share the
// pair loop and pruning logic; the sigma loop is only entered when the primed
// points can see the support of both fields.
DistributionField evaluate(const DistributionField& gfield, const DistributionField& ffield,
                           const KernelParams& p, const QuadConfig& cfg, EvalMode mode) {
    const PhaseGrid& grid = gfield.grid();
    if (!(ffield.grid() == grid)) throw DomainError("collision: fields on different grids");
    p.validate();
    cfg.validate();

    const SigmaRule rule = make_sigma_rule(p, cfg);
    const std::size_t nvt = grid.n_v_total();
    const std::size_t nxt = grid.n_x_total();
    const double gamma = p.gamma;
    const double wv = grid.wv();
    // support radii padded by the interpolation stencil reach, so skipped
    // pairs contribute at most O(threshold * max)
    const double stencil_pad = 3.5 * grid.hv();
    const double r_g = support_radius(gfield, cfg.support_threshold) + stencil_pad;
    const double r_f = support_radius(ffield, cfg.support_threshold) + stencil_pad;
    const double energy_cap = r_g * r_g + r_f * r_f;
    const std::size_t nt = rule.cos_t.size();
    const std::size_t np = rule.cos_p.size();
    const bool clamp = cfg.clamp_nonneg;

    std::vector<Vec3> nodes(nvt);
    std::vector<double> node_r(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) {
        nodes[iv] = grid.v_node(iv);
        node_r[iv] = norm(nodes[iv]);
    }

    DistributionField out(grid);
    for (std::size_t ix = 0; ix < nxt; ++ix) {
        const PaddedSampler gs(gfield.values().data() + ix * nvt, grid.nv, grid.R,
                               cfg.upsample);
        const PaddedSampler fs(ffield.values().data() + ix * nvt, grid.nv, grid.R,
                               cfg.upsample);
        parallel_for_ranges(nvt, [&](std::size_t vb, std::size_t ve) {
            for (std::size_t iv = vb; iv < ve; ++iv) {
                const Vec3 v = nodes[iv];
                const double rv = node_r[iv];
                const double fv = ffield.at(ix, iv);
                double acc = 0.0;
                for (std::size_t is = 0; is < nvt; ++is) {
                    const Vec3 vs = nodes[is];
                    const double gstar = gfield.at(ix, is);
                    const Vec3 w = v - vs;
                    const double wn2 = norm2(w);
                    if (wn2 < 1e-28) continue;
                    const double wn = std::sqrt(wn2);
                    if (cfg.r_rel > 0.0 && wn > cfg.r_rel) continue;
                    const double kin = gamma == 0.0 ? 1.0 : std::pow(wn, gamma);

                    if (mode == EvalMode::loss_coef) {
                        if (gstar != 0.0) acc += kin * gstar;
                        continue;
                    }

                    // |v'*| >= max(|v*| - |w| sin(theta/2), ||u| - |w|/2|) with
                    // sin(theta/2) <= 1/sqrt2 on the kernel support; moreover
                    // |v'|^2 + |v'*|^2 = |v|^2 + |v*|^2, so the product
                    // g(v'*) f(v') vanishes for every sigma once the pair
                    // energy exceeds r_f^2 + r_g^2.
                    const Vec3 u = 0.5 * (v + vs);
                    const double un = norm(u);
                    const double reach = std::abs(un - 0.5 * wn);
                    const double rvs = norm(vs);
                    const bool g_reachable =
                        std::max(rvs - wn * kInvSqrt2, reach) <= r_g;
                    const bool f_reachable =
                        std::max(rv - wn * kInvSqrt2, reach) <= r_f;
                    const bool gain_possible =
                        g_reachable && f_reachable && rv * rv + rvs * rvs <= energy_cap;

                    if (mode == EvalMode::gain) {
                        if (!gain_possible) continue;
                    } else if (!gain_possible) {
                        // every sigma kills the primed products; the surviving
                        // part of the compensated integrand is -f(v) g(v*)
                        if (fv != 0.0 && gstar != 0.0)
                            acc -= kin * fv * gstar * rule.b_total;
                        continue;
                    }

                    const Vec3 kappa = w / wn;
                    Vec3 e1, e2;
                    orthonormal_frame(kappa, e1, e2);
                    const double half_wn = 0.5 * wn;
                    const bool cubicm = cfg.interp == Interp::tricubic;
                    double pair_acc = 0.0;
                    for (std::size_t jt = 0; jt < nt; ++jt) {
                        const double bx = u.x + half_wn * rule.cos_t[jt] * kappa.x;
                        const double by = u.y + half_wn * rule.cos_t[jt] * kappa.y;
                        const double bz = u.z + half_wn * rule.cos_t[jt] * kappa.z;
                        const double mx = 2.0 * u.x - bx, my = 2.0 * u.y - by,
                                     mz = 2.0 * u.z - bz;
                        const double amp = half_wn * rule.sin_t[jt];
                        double ring = 0.0;
                        for (std::size_t jp = 0; jp < np; ++jp) {
                            const double ox = amp * (rule.cos_p[jp] * e1.x + rule.sin_p[jp] * e2.x);
                            const double oy = amp * (rule.cos_p[jp] * e1.y + rule.sin_p[jp] * e2.y);
                            const double oz = amp * (rule.cos_p[jp] * e1.z + rule.sin_p[jp] * e2.z);
                            double gp = cubicm ? gs.cubic(mx - ox, my - oy, mz - oz)
                                               : gs.linear(mx - ox, my - oy, mz - oz);
                            if (clamp && gp < 0.0) gp = 0.0;
                            double fp = cubicm ? fs.cubic(bx + ox, by + oy, bz + oz)
                                               : fs.linear(bx + ox, by + oy, bz + oz);
                            if (clamp && fp < 0.0) fp = 0.0;
                            if (mode == EvalMode::gain)
                                ring += gp * fp;
                            else
                                ring += gp * (fp - fv) + fv * (gp - gstar);
                        }
                        pair_acc += rule.wb[jt] * ring;
                    }
                    acc += kin * pair_acc;
                }
                out.at(ix, iv) = acc * wv;
            }
        });
    }
    return out;
}

}  // namespace

DistributionField q_apply(const DistributionField& g, const DistributionField& f,
                          const KernelParams& p, const QuadConfig& cfg) {
    g.require_nonnegative(std::max(1e-12, 1e-9 * g.max_abs()));
    return evaluate(g, f, p, cfg, EvalMode::compensated);
}

CollisionSplit q_split(const DistributionField& g, const DistributionField& f,
                       const KernelParams& p, const QuadConfig& cfg) {
    g.require_nonnegative(std::max(1e-12, 1e-9 * g.max_abs()));
    CollisionSplit parts{evaluate(g, f, p, cfg, EvalMode::gain),
                         evaluate(g, f, p, cfg, EvalMode::loss_coef)};
    // the loss mode accumulates only int |v-v*|^gamma g(v*) dv*; the angular
    // mass over theta >= theta_min multiplies it
    const SigmaRule rule = make_sigma_rule(p, cfg);
    for (auto& v : parts.loss_coef.values()) v *= rule.b_total;
    return parts;
}

namespace {

// The lattice sum of |w|^gamma g(v - w) carries an O(h^{3+gamma}) error from
// the cone at w = 0.  Replacing the 27 cells around the kink by exact cell
// integrals of |w|^gamma (times the local g values) removes the leading term.
std::vector<double> kink_cell_corrections(double h, double gamma) {
    std::vector<double> delta(27, 0.0);
    if (gamma == 0.0) return delta;
    const auto& x = GaussLegendre::nodes(8);
    const auto& w = GaussLegendre::weights(8);
    int idx = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
            for (int c = -1; c <= 1; ++c, ++idx) {
                // integrate |w|^gamma over the cell centered at h(a,b,c),
                // split into octants so the kink sits at a panel corner
                double cell = 0.0;
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob)
                        for (int oc = 0; oc < 2; ++oc) {
                            const double ax = h * (a - 0.5 + 0.5 * oa), bx = ax + 0.5 * h;
                            const double ay = h * (b - 0.5 + 0.5 * ob), by = ay + 0.5 * h;
                            const double az = h * (c - 0.5 + 0.5 * oc), bz = az + 0.5 * h;
                            for (std::size_t i = 0; i < x.size(); ++i)
                                for (std::size_t j = 0; j < x.size(); ++j)
                                    for (std::size_t k = 0; k < x.size(); ++k) {
                                        const double px = 0.5 * (ax + bx) + 0.25 * h * x[i];
                                        const double py = 0.5 * (ay + by) + 0.25 * h * x[j];
                                        const double pz = 0.5 * (az + bz) + 0.25 * h * x[k];
                                        cell += w[i] * w[j] * w[k] *
                                                std::pow(px * px + py * py + pz * pz,
                                                         0.5 * gamma);
                                    }
                        }
                cell *= std::pow(0.25 * h, 3.0);
                const double node = std::pow(h, 3.0) *
                                    std::pow(static_cast<double>(a * a + b * b + c * c),
                                             0.5 * gamma) *
                                    std::pow(h, gamma);
                delta[static_cast<std::size_t>(idx)] = cell - node;
            }
    return delta;
}

}  // namespace

DistributionField cancellation_convolution(const DistributionField& g, const KernelParams& p,
                                           double tol) {
    p.validate();
    const double A = a_gamma_s(p, tol);
    const PhaseGrid& grid = g.grid();
    const std::size_t nvt = grid.n_v_total();
    std::vector<Vec3> nodes(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) nodes[iv] = grid.v_node(iv);
    const auto kink = kink_cell_corrections(grid.hv(), p.gamma);

    DistributionField out(grid);
    const double wv = grid.wv();
    const int nv = grid.nv;
    for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix) {
        parallel_for_ranges(nvt, [&](std::size_t vb, std::size_t ve) {
            for (std::size_t iv = vb; iv < ve; ++iv) {
                const Vec3 v = nodes[iv];
                double acc = 0.0;
                if (p.gamma == 0.0) {
                    for (std::size_t is = 0; is < nvt; ++is) acc += g.at(ix, is);
                    out.at(ix, iv) = A * wv * acc;
                    continue;
                }
                for (std::size_t is = 0; is < nvt; ++is) {
                    const double gv = g.at(ix, is);
                    if (gv == 0.0) continue;
                    acc += gv * std::pow(norm(v - nodes[is]), p.gamma);
                }
                acc *= wv;
                // local kink correction around v
                const int i0 = static_cast<int>(iv / (static_cast<std::size_t>(nv) * nv));
                const int j0 = static_cast<int>((iv / nv) % static_cast<std::size_t>(nv));
                const int k0 = static_cast<int>(iv % static_cast<std::size_t>(nv));
                int idx = 0;
                for (int a = -1; a <= 1; ++a)
                    for (int b = -1; b <= 1; ++b)
                        for (int c = -1; c <= 1; ++c, ++idx) {
                            const int i = i0 + a, j = j0 + b, k = k0 + c;
                            if (static_cast<unsigned>(i) >= static_cast<unsigned>(nv) ||
                                static_cast<unsigned>(j) >= static_cast<unsigned>(nv) ||
                                static_cast<unsigned>(k) >= static_cast<unsigned>(nv))
                                continue;
                            acc += kink[static_cast<std::size_t>(idx)] *
                                   g.at(ix, grid.v_index(i, j, k));
                        }
                out.at(ix, iv) = A * acc;
            }
        });
    }
    return out;
}

double q_inner(const DistributionField& g, const DistributionField& f,
               const DistributionField& h, double l, const KernelParams& p,
               const QuadConfig& cfg) {
    if (!(h.grid() == f.grid())) throw DomainError("q_inner: grid mismatch");
    const DistributionField q = q_apply(g, f, p, cfg);
    const PhaseGrid& grid = f.grid();
    const std::size_t nvt = grid.n_v_total();
    std::vector<double> wl(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) wl[iv] = std::pow(vweight(grid.v_node(iv)), l);
    const double scale = grid.wx() * grid.wv();
    double acc = 0.0;
    for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix)
        for (std::size_t iv = 0; iv < nvt; ++iv)
            acc += wl[iv] * q.at(ix, iv) * h.at(ix, iv);
    return acc * scale;
}

}  // namespace boltz
