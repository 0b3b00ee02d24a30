#include "boltzkit/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "boltzkit/quadrature.hpp"

namespace boltz {

void KernelParams::validate() const {
    if (!(gamma >= 0.0)) throw DomainError("KernelParams: gamma must be >= 0 (hard potentials)");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("KernelParams: s must lie in (0,1)");
    if (!(b0 > 0.0)) throw DomainError("KernelParams: b0 must be positive");
    if (!(theta_min > 0.0 && theta_min < kPi / 4.0))
        throw DomainError("KernelParams: theta_min must lie in (0, pi/4)");
}

void HydroBounds::validate() const {
    if (!(m0 > 0.0 && M0 > 0.0 && E0 > 0.0 && H0 > 0.0))
        throw DomainError("HydroBounds: all bounds must be positive");
    if (!(m0 <= M0)) throw DomainError("HydroBounds: m0 must not exceed M0");
}

void BigL::validate() const {
    if (!(value >= 1.0)) throw DomainError("BigL: value must be >= 1");
}

WeightLadder WeightLadder::from_ell1(double ell1, const KernelParams& p, double tilde_c0) {
    WeightLadder w;
    w.ell1 = ell1;
    w.rho = 1.0 + (14.0 * p.s + 7.0 * p.gamma) / 6.0;
    w.ell = 2.0 * ell1 + 2.0 + p.gamma + 3.0 * w.rho;
    w.ell0 = w.ell + 3.0 + 7.0 * p.s + 2.0 * p.gamma;
    w.tilde_c0 = tilde_c0;
    return w;
}

void WeightLadder::validate(const KernelParams& p) const {
    const double rho_expect = 1.0 + (14.0 * p.s + 7.0 * p.gamma) / 6.0;
    if (std::abs(rho - rho_expect) > 1e-12 * std::max(1.0, rho_expect))
        throw DomainError("WeightLadder: rho does not match 1 + (14s+7gamma)/6");
    if (std::abs(ell - (2.0 * ell1 + 2.0 + p.gamma + 3.0 * rho)) > 1e-10)
        throw DomainError("WeightLadder: ell does not match 2 ell1 + 2 + gamma + 3 rho");
    if (std::abs(ell0 - (ell + 3.0 + 7.0 * p.s + 2.0 * p.gamma)) > 1e-10)
        throw DomainError("WeightLadder: ell0 does not match ell + 3 + 7s + 2gamma");
    if (!(ell1 > 13.0 / 2.0 + p.gamma))
        throw DomainError("WeightLadder: ell1 must exceed 13/2 + gamma");
    if (!(tilde_c0 > 0.0 && tilde_c0 <= 0.25))
        throw DomainError("WeightLadder: tilde_c0 must lie in (0, 1/4]");
}

double angular_b(double theta, const KernelParams& p) {
    p.validate();
    if (!(theta > 0.0 && theta <= kPi / 2.0))
        throw DomainError("angular_b: theta must lie in (0, pi/2]");
    return p.b0 * std::pow(theta, -1.0 - 2.0 * p.s) / std::sin(theta);
}

double angular_constant(AngularKind kind, double l, const KernelParams& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw DomainError("angular_constant: tol must be positive");
    if (kind == AngularKind::lambda && !(l >= 2.0))
        throw DomainError("angular_constant: lambda requires l >= 2");
    if (kind == AngularKind::omega && !(l > 2.0 * p.s))
        throw DomainError("angular_constant: omega requires l > 2s");

    const double prefac = std::pow(2.0, p.gamma) * 2.0 * kPi * p.b0;
    const double s = p.s;
    std::function<double(double)> f, tail;
    if (kind == AngularKind::lambda) {
        // 1 - cos^l(t/2) = -expm1(l log1p(-2 sin^2(t/4))), stable at t -> 0
        f = [l, s](double t) {
            const double sh = std::sin(0.25 * t);
            return std::pow(t, -1.0 - 2.0 * s) *
                   (-std::expm1(l * std::log1p(-2.0 * sh * sh)));
        };
        // 1 - cos^l(t/2) <= min(1, l t^2 / 8)
        tail = [l, s](double t) {
            const double q = std::min(1.0, l * t * t / 8.0);
            return q >= 1.0 ? std::pow(t, -2.0 * s) / (2.0 * s)
                            : (l / 8.0) * std::pow(t, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        };
    } else {
        f = [l, s](double t) {
            return std::pow(t, -1.0 - 2.0 * s) * std::pow(std::sin(0.5 * t), l);
        };
        // sin^l(t/2) <= (t/2)^l
        tail = [l, s](double t) {
            return std::pow(0.5, l) * std::pow(t, l - 2.0 * s) / (l - 2.0 * s);
        };
    }
    // sin^l(t/2) (and 1 - cos^l) develop an O(1/l) boundary layer at pi/2
    const int sub = std::clamp(static_cast<int>(l / 16.0), 1, 64);
    const auto r = integrate_dyadic_to_zero(f, kPi / 2.0, tol, tail, 400, 24, sub);
    return prefac * r.value;
}

double a_gamma_s(const KernelParams& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw DomainError("a_gamma_s: tol must be positive");
    const double s = p.s, m = 3.0 + p.gamma;
    // cos^{-m}(t/2) - 1 = expm1(-m log1p(-2 sin^2(t/4))), stable at t -> 0
    auto f = [s, m](double t) {
        const double sh = std::sin(0.25 * t);
        return std::pow(t, -1.0 - 2.0 * s) *
               std::expm1(-m * std::log1p(-2.0 * sh * sh));
    };
    // sec^m(x) - 1 <= m x^2 on x <= 0.5 (crude but valid for the tail panels)
    auto tail = [s, m](double t) {
        return (m / 4.0) * std::pow(t, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) * 2.0;
    };
    const auto r = integrate_dyadic_to_zero(f, kPi / 2.0, tol, tail);
    return p.b0 * r.value;
}

WeightLadder select_weights(const KernelParams& p, const HydroBounds& hydro, double tilde_c0,
                            const SelectWeightsOptions& opt) {
    p.validate();
    hydro.validate();
    if (!(tilde_c0 > 0.0 && tilde_c0 <= 0.25))
        throw DomainError("select_weights: tilde_c0 must lie in (0, 1/4]");

    const double A = a_gamma_s(p, opt.quad_tol);
    const double lambda_floor = std::pow(2.0, 4.0 + 3.0 * p.gamma) * hydro.M0 / hydro.m0 * A;
    const double omega_cap = tilde_c0 / (32.0 * hydro.M0);
    const double ratio_cap = hydro.m0 / (std::pow(4.0, 4.0 + p.gamma) * hydro.M0);

    const double base = 13.0 / 2.0 + p.gamma;
    // first grid point strictly above 13/2 + gamma
    double l1 = std::ceil(base / opt.step) * opt.step;
    if (l1 <= base) l1 += opt.step;

    std::string last_unmet;
    for (; l1 <= opt.l_max; l1 += opt.step) {
        const double lam2 = angular_constant(AngularKind::lambda, 2.0 * l1, p, opt.quad_tol);
        const double om_shift = angular_constant(AngularKind::omega, l1 - 2.0 - p.gamma, p, opt.quad_tol);
        const double om = angular_constant(AngularKind::omega, l1, p, opt.quad_tol);
        const double lam = angular_constant(AngularKind::lambda, l1, p, opt.quad_tol);
        std::ostringstream unmet;
        if (lam2 < lambda_floor) unmet << "lambda_{2 ell1} >= 2^{4+3g}(M0/m0) A; ";
        if (om_shift > omega_cap) unmet << "omega_{ell1-2-gamma} <= tilde_c0/(32 M0); ";
        if (om / lam > ratio_cap) unmet << "omega_{ell1}/lambda_{ell1} <= m0/(4^{4+g} M0); ";
        last_unmet = unmet.str();
        if (last_unmet.empty()) return WeightLadder::from_ell1(l1, p, tilde_c0);
    }
    throw NumericalError("select_weights: search exceeded l_max; unmet: " + last_unmet, 0.0);
}

namespace {
// slope/intercept least squares with max |residual|
void lsq(const std::vector<double>& x, const std::vector<double>& y, double& slope,
         double& max_resid) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    max_resid = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        max_resid = std::max(max_resid, std::abs(y[i] - slope * x[i] - icept));
}
}  // namespace

AsymptoticFit asymptotic_report(const KernelParams& p, const std::vector<double>& l_values,
                                double tol) {
    if (l_values.size() < 4) throw DomainError("asymptotic_report: need >= 4 l values");
    if (!std::is_sorted(l_values.begin(), l_values.end()))
        throw DomainError("asymptotic_report: l values must be sorted");
    if (!(l_values.back() / l_values.front() >= 8.0))
        throw DomainError("asymptotic_report: need max/min >= 8");

    AsymptoticFit fit;
    fit.l_values = l_values;
    std::vector<double> logl, loglam, lw;
    fit.omega_bracket_lo = 1e300;
    fit.omega_bracket_hi = 0.0;
    for (double l : l_values) {
        const double lam = angular_constant(AngularKind::lambda, l, p, tol);
        const double om = angular_constant(AngularKind::omega, l, p, tol);
        fit.lambda_values.push_back(lam);
        fit.omega_values.push_back(om);
        logl.push_back(std::log(l));
        loglam.push_back(std::log(lam));
        lw.push_back(std::log(l * om));
        const double braket = l * om * std::pow(2.0, 0.5 * l);
        fit.omega_bracket_lo = std::min(fit.omega_bracket_lo, braket);
        fit.omega_bracket_hi = std::max(fit.omega_bracket_hi, braket);
    }
    lsq(logl, loglam, fit.lambda_slope, fit.lambda_residual);
    lsq(l_values, lw, fit.omega_slope, fit.omega_residual);
    return fit;
}

}  // namespace boltz
