#include "boltzkit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>

#include "boltzkit/fft.hpp"
#include "boltzkit/interp.hpp"
#include "boltzkit/quadrature.hpp"

namespace boltz {

namespace {
using cd = std::complex<double>;

std::vector<double> weight_table(const PhaseGrid& g, double a) {
    std::vector<double> w(g.n_v_total());
    for (std::size_t iv = 0; iv < w.size(); ++iv) w[iv] = std::pow(vweight(g.v_node(iv)), a);
    return w;
}
}  // namespace

DistributionField weight_multiply(const DistributionField& f, double a) {
    DistributionField out = f;
    if (a == 0.0) return out;
    const auto w = weight_table(f.grid(), a);
    const std::size_t nvt = f.grid().n_v_total();
    for (std::size_t ix = 0; ix < f.grid().n_x_total(); ++ix)
        for (std::size_t iv = 0; iv < nvt; ++iv) out.at(ix, iv) = f.at(ix, iv) * w[iv];
    return out;
}

DistributionField fractional_deriv_v(const DistributionField& f, double order,
                                     double pre_weight) {
    if (!(order >= 0.0)) throw DomainError("fractional_deriv_v: order must be >= 0");
    const PhaseGrid& g = f.grid();
    const int n = g.nv;
    const std::size_t nvt = g.n_v_total();
    const double eta0 = kPi / g.R;

    std::vector<double> mult(nvt);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double ex = eta0 * freq_index(i, n);
                const double ey = eta0 * freq_index(j, n);
                const double ez = eta0 * freq_index(k, n);
                mult[g.v_index(i, j, k)] =
                    std::pow(1.0 + ex * ex + ey * ey + ez * ez, 0.5 * order);
            }
    const auto wpre =
        pre_weight == 0.0 ? std::vector<double>() : weight_table(g, pre_weight);

    DistributionField out(g);
    parallel_for_ranges(g.n_x_total(), [&](std::size_t b, std::size_t e) {
        std::vector<cd> cube(nvt);
        for (std::size_t ix = b; ix < e; ++ix) {
            for (std::size_t iv = 0; iv < nvt; ++iv) {
                const double v = f.at(ix, iv);
                cube[iv] = cd(wpre.empty() ? v : v * wpre[iv], 0.0);
            }
            fft3(cube, n, false);
            for (std::size_t iv = 0; iv < nvt; ++iv) cube[iv] *= mult[iv];
            fft3(cube, n, true);
            for (std::size_t iv = 0; iv < nvt; ++iv) out.at(ix, iv) = cube[iv].real();
        }
    });
    return out;
}

double dv_weighted_l2(const DistributionField& f, double order, double a) {
    return l2_norm(fractional_deriv_v(f, order, a));
}

// ---------------------------------------------------------------------------
// Real spherical harmonics.  Normalized so that the basis is orthonormal on
// S^2; index layout n^2 + n + m with m < 0 the sin branch.
// ---------------------------------------------------------------------------
namespace {

void normalized_legendre(int lmax, double mu, std::vector<double>& p) {
    // p[(n,m)] = Nbar_n^m P_n^m(mu) for 0 <= m <= n, layout n*(n+1)/2 + m
    const double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    p.assign(static_cast<std::size_t>((lmax + 1) * (lmax + 2) / 2), 0.0);
    auto idx = [](int n, int m) { return static_cast<std::size_t>(n * (n + 1) / 2 + m); };
    p[idx(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
    for (int m = 1; m <= lmax; ++m)
        p[idx(m, m)] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * smu * p[idx(m - 1, m - 1)];
    for (int m = 0; m < lmax; ++m)
        p[idx(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * mu * p[idx(m, m)];
    for (int m = 0; m <= lmax; ++m)
        for (int n = m + 2; n <= lmax; ++n) {
            const double a =
                std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - m * m));
            const double b = std::sqrt(((2.0 * n + 1.0) * ((n - 1.0) * (n - 1.0) - m * m)) /
                                       ((2.0 * n - 3.0) * (static_cast<double>(n) * n - m * m)));
            p[idx(n, m)] = a * mu * p[idx(n - 1, m)] - b * p[idx(n - 2, m)];
        }
}

void real_sph_basis(int lmax, double mu, double phi, std::vector<double>& plm,
                    double* out) {
    normalized_legendre(lmax, mu, plm);
    auto pidx = [](int n, int m) { return static_cast<std::size_t>(n * (n + 1) / 2 + m); };
    for (int n = 0; n <= lmax; ++n) {
        out[n * n + n] = plm[pidx(n, 0)];
        for (int m = 1; m <= n; ++m) {
            const double base = std::sqrt(2.0) * plm[pidx(n, m)];
            out[n * n + n + m] = base * std::cos(m * phi);
            out[n * n + n - m] = base * std::sin(m * phi);
        }
    }
}

struct SphereTables {
    int nv = 0, lmax = 0, shells = 0;
    double R = 0.0;
    int n_mu = 0, n_phi = 0;
    std::vector<double> mu, wmu;         // GL nodes/weights on [-1,1]
    std::vector<Vec3> dirs;              // unit sample directions (n_mu*n_phi)
    std::vector<double> analysis;        // [(lmax+1)^2][n_mu*n_phi] incl weights
    std::vector<double> grid_basis;      // [nv^3][(lmax+1)^2]
    std::vector<double> grid_r;          // |v| per node
};

std::mutex g_sphere_mu;
std::shared_ptr<SphereTables> g_sphere_cache;

std::shared_ptr<SphereTables> sphere_tables(const PhaseGrid& g, int lmax, int shells) {
    {
        std::lock_guard<std::mutex> lock(g_sphere_mu);
        if (g_sphere_cache && g_sphere_cache->nv == g.nv && g_sphere_cache->R == g.R &&
            g_sphere_cache->lmax == lmax && g_sphere_cache->shells == shells)
            return g_sphere_cache;
    }
    auto t = std::make_shared<SphereTables>();
    t->nv = g.nv;
    t->R = g.R;
    t->lmax = lmax;
    t->shells = shells;
    t->n_mu = lmax + 1;
    t->n_phi = 2 * lmax + 2;
    t->mu = GaussLegendre::nodes(t->n_mu);
    t->wmu = GaussLegendre::weights(t->n_mu);
    const int nb = (lmax + 1) * (lmax + 1);
    const std::size_t nsamp = static_cast<std::size_t>(t->n_mu) * t->n_phi;
    t->dirs.resize(nsamp);
    t->analysis.assign(static_cast<std::size_t>(nb) * nsamp, 0.0);
    std::vector<double> plm, basis(static_cast<std::size_t>(nb));
    const double dphi = 2.0 * kPi / t->n_phi;
    for (int i = 0; i < t->n_mu; ++i) {
        const double mu = t->mu[static_cast<std::size_t>(i)];
        const double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int j = 0; j < t->n_phi; ++j) {
            const double phi = (j + 0.5) * dphi;
            const std::size_t samp = static_cast<std::size_t>(i) * t->n_phi + j;
            t->dirs[samp] = {smu * std::cos(phi), smu * std::sin(phi), mu};
            real_sph_basis(lmax, mu, phi, plm, basis.data());
            const double w = t->wmu[static_cast<std::size_t>(i)] * dphi;
            for (int b = 0; b < nb; ++b)
                t->analysis[static_cast<std::size_t>(b) * nsamp + samp] = basis[static_cast<std::size_t>(b)] * w;
        }
    }
    // synthesis basis at every Cartesian node direction
    const std::size_t nvt = g.n_v_total();
    t->grid_basis.assign(nvt * static_cast<std::size_t>(nb), 0.0);
    t->grid_r.assign(nvt, 0.0);
    for (std::size_t iv = 0; iv < nvt; ++iv) {
        const Vec3 v = g.v_node(iv);
        const double r = norm(v);
        t->grid_r[iv] = r;
        if (r < 1e-14) continue;
        const Vec3 d = v / r;
        const double phi = std::atan2(d.y, d.x);
        real_sph_basis(lmax, std::clamp(d.z, -1.0, 1.0), phi, plm,
                       t->grid_basis.data() + iv * static_cast<std::size_t>(nb));
    }
    std::lock_guard<std::mutex> lock(g_sphere_mu);
    g_sphere_cache = t;
    return t;
}

}  // namespace

namespace {

// Evaluates the trigonometric interpolant of one velocity slice at arbitrary
// points: nested tensor contraction of the FFT coefficients against per-axis
// exponentials, O(nv^3) per point.
class SpectralSampler {
  public:
    SpectralSampler(const double* data, int nv, double R) : nv_(nv), R_(R) {
        const std::size_t nvt = static_cast<std::size_t>(nv) * nv * nv;
        modes_.resize(nvt);
        for (std::size_t i = 0; i < nvt; ++i) modes_[i] = cd(data[i], 0.0);
        fft3(modes_, nv, false);
        const double inv = 1.0 / static_cast<double>(nvt);
        for (auto& m : modes_) m *= inv;
    }

    double eval(const Vec3& v) const {
        const double eta0 = kPi / R_;
        std::vector<cd> ax(static_cast<std::size_t>(nv_)), ay(static_cast<std::size_t>(nv_)),
            az(static_cast<std::size_t>(nv_));
        for (int k = 0; k < nv_; ++k) {
            // node 0 sits at -R; e^{i eta (v + R)} carries the shift
            const double fq = eta0 * freq_index(k, nv_);
            ax[static_cast<std::size_t>(k)] = std::polar(1.0, fq * (v.x + R_));
            ay[static_cast<std::size_t>(k)] = std::polar(1.0, fq * (v.y + R_));
            az[static_cast<std::size_t>(k)] = std::polar(1.0, fq * (v.z + R_));
        }
        cd acc(0.0, 0.0);
        for (int i = 0; i < nv_; ++i) {
            cd acc_i(0.0, 0.0);
            for (int j = 0; j < nv_; ++j) {
                const cd* line =
                    modes_.data() + (static_cast<std::size_t>(i) * nv_ + j) * nv_;
                cd acc_j(0.0, 0.0);
                for (int k = 0; k < nv_; ++k) acc_j += line[k] * az[static_cast<std::size_t>(k)];
                acc_i += ay[static_cast<std::size_t>(j)] * acc_j;
            }
            acc += ax[static_cast<std::size_t>(i)] * acc_i;
        }
        return acc.real();
    }

  private:
    int nv_;
    double R_;
    std::vector<cd> modes_;
};

}  // namespace

DistributionField sphere_fractional(const DistributionField& f, double s,
                                    const SphereTransformConfig& cfg) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("sphere_fractional: s must lie in (0,1)");
    const PhaseGrid& g = f.grid();
    const int lmax = std::max(8, cfg.lmax);
    const int shells = cfg.shells > 0 ? cfg.shells : std::max(g.nv, 16);
    auto tab = sphere_tables(g, lmax, shells);
    const int nb = (lmax + 1) * (lmax + 1);
    const std::size_t nsamp = tab->dirs.size();
    const double dr = g.R / shells;
    const std::size_t nvt = g.n_v_total();
    const bool spectral = cfg.sampling == SphereTransformConfig::Sampling::spectral;

    std::vector<double> eig(static_cast<std::size_t>(nb));
    for (int n = 0; n <= lmax; ++n)
        for (int m = -n; m <= n; ++m)
            eig[static_cast<std::size_t>(n * n + n + m)] =
                std::pow(static_cast<double>(n) * (n + 1.0), 0.5 * s);

    DistributionField out(g);
    parallel_for_ranges(g.n_x_total(), [&](std::size_t xb, std::size_t xe) {
        std::vector<double> samples(nsamp);
        std::vector<double> coef(static_cast<std::size_t>(shells) * nb, 0.0);
        for (std::size_t ix = xb; ix < xe; ++ix) {
            const VelocitySlice slice{f.values().data() + ix * nvt, g.nv, g.R};
            std::unique_ptr<SpectralSampler> spectral_sampler;
            if (spectral)
                spectral_sampler = std::make_unique<SpectralSampler>(
                    f.values().data() + ix * nvt, g.nv, g.R);
            std::fill(coef.begin(), coef.end(), 0.0);
            for (int m = 0; m < shells; ++m) {
                const double r = (m + 0.5) * dr;
                for (std::size_t sIdx = 0; sIdx < nsamp; ++sIdx)
                    samples[sIdx] = spectral
                                        ? spectral_sampler->eval(r * tab->dirs[sIdx])
                                        : slice.sample_cubic(r * tab->dirs[sIdx]);
                double* c = coef.data() + static_cast<std::size_t>(m) * nb;
                for (int b = 0; b < nb; ++b) {
                    const double* arow = tab->analysis.data() + static_cast<std::size_t>(b) * nsamp;
                    double acc = 0.0;
                    for (std::size_t sIdx = 0; sIdx < nsamp; ++sIdx)
                        acc += arow[sIdx] * samples[sIdx];
                    c[static_cast<std::size_t>(b)] = acc * eig[static_cast<std::size_t>(b)];
                }
            }
            // synthesize on the Cartesian grid with cubic radial interpolation;
            // parity extension (-1)^n below the first shell, zero beyond R.
            for (std::size_t iv = 0; iv < nvt; ++iv) {
                const double r = tab->grid_r[iv];
                if (r < 1e-14 || r >= g.R) {
                    out.at(ix, iv) = 0.0;
                    continue;
                }
                const double tpos = r / dr - 0.5;
                const int m1 = static_cast<int>(std::floor(tpos));
                double w[4];
                catmull_rom_weights(tpos - m1, w);
                const double* basis = tab->grid_basis.data() + iv * static_cast<std::size_t>(nb);
                double acc = 0.0;
                for (int b = 1; b < nb; ++b) {  // n = 0 annihilated
                    const int n = static_cast<int>(std::sqrt(static_cast<double>(b)));
                    double cval = 0.0;
                    for (int a = 0; a < 4; ++a) {
                        int mm = m1 - 1 + a;
                        double sign = 1.0;
                        if (mm < 0) {
                            mm = -mm - 1;  // mirrored shell
                            sign = (n % 2 == 0) ? 1.0 : -1.0;
                        }
                        if (mm >= shells) continue;
                        cval += w[a] * sign *
                                coef[static_cast<std::size_t>(mm) * nb + b];
                    }
                    acc += cval * basis[static_cast<std::size_t>(b)];
                }
                out.at(ix, iv) = acc;
            }
        }
    });
    return out;
}

std::vector<double> triple_norm_per_x(const DistributionField& f, const TripleNormConfig& cfg) {
    const PhaseGrid& g = f.grid();
    const DistributionField wf = weight_multiply(f, 0.5 * cfg.gamma);
    const DistributionField dv = fractional_deriv_v(wf, cfg.s);
    const DistributionField sp = sphere_fractional(wf, cfg.s, cfg.sphere);
    const std::size_t nvt = g.n_v_total();
    std::vector<double> out(g.n_x_total(), 0.0);
    for (std::size_t ix = 0; ix < out.size(); ++ix) {
        double acc = 0.0;
        for (std::size_t iv = 0; iv < nvt; ++iv) {
            acc += dv.at(ix, iv) * dv.at(ix, iv) + sp.at(ix, iv) * sp.at(ix, iv);
        }
        out[ix] = std::sqrt(acc * g.wv());
    }
    return out;
}

double triple_norm_x(const DistributionField& f, const TripleNormConfig& cfg) {
    const auto per_x = triple_norm_per_x(f, cfg);
    double acc = 0.0;
    for (double t : per_x) acc += t * t;
    return std::sqrt(acc * f.grid().wx());
}

std::vector<std::array<int, 3>> multi_indices_deg3(int dims) {
    std::vector<std::array<int, 3>> out;
    for (int a = 3; a >= 0; --a)
        for (int b = 3 - a; b >= 0; --b) {
            const int c = 3 - a - b;
            if ((dims < 2 && (b > 0 || c > 0)) || (dims < 3 && c > 0)) continue;
            out.push_back({a, b, c});
        }
    return out;
}

namespace {

// Applies a complex multiplier M(k) over the x-lattice; k components in
// 2 pi Z.  No-op lattice (nx = 1) leaves only M(0).
DistributionField apply_x_multiplier(const DistributionField& f,
                                     const std::function<cd(const Vec3&)>& M) {
    const PhaseGrid& g = f.grid();
    const std::size_t nvt = g.n_v_total();
    const int nx = g.nx;
    const int d = g.dx_dims;
    if (g.n_x_total() == 1) {
        const cd m0 = M({0, 0, 0});
        DistributionField out = f;
        for (auto& v : out.values()) v *= m0.real();
        return out;
    }
    const std::size_t nxt = g.n_x_total();
    // multiplier table over the x lattice
    std::vector<cd> mult(nxt);
    for (std::size_t ix = 0; ix < nxt; ++ix) {
        int rem = static_cast<int>(ix);
        std::array<int, 3> kidx{0, 0, 0};
        for (int dim = d - 1; dim >= 0; --dim) {
            kidx[static_cast<std::size_t>(dim)] = rem % nx;
            rem /= nx;
        }
        Vec3 k{0, 0, 0};
        for (int dim = 0; dim < d; ++dim)
            k[dim] = 2.0 * kPi * freq_index(kidx[static_cast<std::size_t>(dim)], nx);
        mult[ix] = M(k);
    }
    DistributionField out(g);
    parallel_for_ranges(nvt, [&](std::size_t vb, std::size_t ve) {
        std::vector<cd> lattice(nxt);
        std::vector<cd> line(static_cast<std::size_t>(nx));
        for (std::size_t iv = vb; iv < ve; ++iv) {
            for (std::size_t ix = 0; ix < nxt; ++ix) lattice[ix] = cd(f.at(ix, iv), 0.0);
            // FFT along each active dimension
            for (int dim = 0; dim < d; ++dim) {
                std::size_t stride = 1;
                for (int dd = d - 1; dd > dim; --dd) stride *= static_cast<std::size_t>(nx);
                const std::size_t nlines = nxt / static_cast<std::size_t>(nx);
                for (std::size_t ln = 0; ln < nlines; ++ln) {
                    // decompose line index into the base offset
                    std::size_t base = 0, rem = ln;
                    std::size_t placed = 0;
                    for (int dd = 0; dd < d; ++dd) {
                        if (dd == dim) continue;
                        std::size_t stride_dd = 1;
                        for (int q = d - 1; q > dd; --q) stride_dd *= static_cast<std::size_t>(nx);
                        const std::size_t idx = rem % static_cast<std::size_t>(nx);
                        rem /= static_cast<std::size_t>(nx);
                        base += idx * stride_dd;
                        ++placed;
                    }
                    (void)placed;
                    for (int i = 0; i < nx; ++i)
                        line[static_cast<std::size_t>(i)] =
                            lattice[base + static_cast<std::size_t>(i) * stride];
                    fft(line, false);
                    for (int i = 0; i < nx; ++i)
                        lattice[base + static_cast<std::size_t>(i) * stride] =
                            line[static_cast<std::size_t>(i)];
                }
            }
            for (std::size_t ix = 0; ix < nxt; ++ix) lattice[ix] *= mult[ix];
            for (int dim = 0; dim < d; ++dim) {
                std::size_t stride = 1;
                for (int dd = d - 1; dd > dim; --dd) stride *= static_cast<std::size_t>(nx);
                const std::size_t nlines = nxt / static_cast<std::size_t>(nx);
                for (std::size_t ln = 0; ln < nlines; ++ln) {
                    std::size_t base = 0, rem = ln;
                    for (int dd = 0; dd < d; ++dd) {
                        if (dd == dim) continue;
                        std::size_t stride_dd = 1;
                        for (int q = d - 1; q > dd; --q) stride_dd *= static_cast<std::size_t>(nx);
                        const std::size_t idx = rem % static_cast<std::size_t>(nx);
                        rem /= static_cast<std::size_t>(nx);
                        base += idx * stride_dd;
                    }
                    for (int i = 0; i < nx; ++i)
                        line[static_cast<std::size_t>(i)] =
                            lattice[base + static_cast<std::size_t>(i) * stride];
                    fft(line, true);
                    for (int i = 0; i < nx; ++i)
                        lattice[base + static_cast<std::size_t>(i) * stride] =
                            line[static_cast<std::size_t>(i)];
                }
            }
            for (std::size_t ix = 0; ix < nxt; ++ix) out.at(ix, iv) = lattice[ix].real();
        }
    });
    return out;
}

}  // namespace

DistributionField x_derivative(const DistributionField& f, const std::array<int, 3>& alpha) {
    return apply_x_multiplier(f, [&](const Vec3& k) {
        cd m(1.0, 0.0);
        for (int d = 0; d < 3; ++d)
            for (int p = 0; p < alpha[static_cast<std::size_t>(d)]; ++p) m *= cd(0.0, k[d]);
        return m;
    });
}

DistributionField x_bracket_deriv(const DistributionField& f, double r) {
    return apply_x_multiplier(f, [&](const Vec3& k) {
        return cd(std::pow(1.0 + norm2(k), 0.5 * r), 0.0);
    });
}

double x_norm(const DistributionField& f, const WeightLadder& ladder) {
    const PhaseGrid& g = f.grid();
    double acc = std::pow(l2_norm(weight_multiply(f, ladder.ell)), 2);
    if (g.n_x_total() > 1) {
        if (g.nx < 8)
            throw DomainError("x_norm: inhomogeneous mode needs nx >= 8 for |alpha| = 3");
        for (const auto& alpha : multi_indices_deg3(g.dx_dims)) {
            const DistributionField da = x_derivative(f, alpha);
            acc += std::pow(l2_norm(weight_multiply(da, ladder.ell - 3.0 * ladder.rho)), 2);
        }
    }
    return std::sqrt(acc);
}

double y_norm(const DistributionField& f, const WeightLadder& ladder,
              const TripleNormConfig& cfg) {
    const PhaseGrid& g = f.grid();
    double acc = std::pow(triple_norm_x(weight_multiply(f, ladder.ell), cfg), 2);
    if (g.n_x_total() > 1) {
        if (g.nx < 8)
            throw DomainError("y_norm: inhomogeneous mode needs nx >= 8 for |alpha| = 3");
        for (const auto& alpha : multi_indices_deg3(g.dx_dims)) {
            const DistributionField da = x_derivative(f, alpha);
            acc += std::pow(
                triple_norm_x(weight_multiply(da, ladder.ell - 3.0 * ladder.rho), cfg), 2);
        }
    }
    return std::sqrt(acc);
}

double z_norm(const DistributionField& f, const WeightLadder& ladder, double s, double gamma) {
    const PhaseGrid& g = f.grid();
    const double r = s / (1.0 + 2.0 * s);
    const double wz = gamma / (2.0 * (1.0 + 2.0 * s));
    const DistributionField hz = x_bracket_deriv(f, r);
    double acc = std::pow(l2_norm(weight_multiply(hz, wz + ladder.ell)), 2);
    if (g.n_x_total() > 1) {
        if (g.nx < 8)
            throw DomainError("z_norm: inhomogeneous mode needs nx >= 8 for |alpha| = 3");
        for (const auto& alpha : multi_indices_deg3(g.dx_dims)) {
            const DistributionField da = x_derivative(hz, alpha);
            acc += std::pow(
                l2_norm(weight_multiply(da, wz + ladder.ell - 3.0 * ladder.rho)), 2);
        }
    }
    return std::sqrt(acc);
}

}  // namespace boltz
