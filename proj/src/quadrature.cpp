#include "boltzkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace boltz {

namespace {

// Newton iteration on Legendre polynomials; standard Golub-Welsch-free
// construction, accurate to ~1e-15 for the orders used here.
void build_gl(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
}

struct GlCache {
    std::mutex mu;
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> table;

    const std::pair<std::vector<double>, std::vector<double>>& get(int n) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = table.find(n);
        if (it == table.end()) {
            std::pair<std::vector<double>, std::vector<double>> nw;
            build_gl(n, nw.first, nw.second);
            it = table.emplace(n, std::move(nw)).first;
        }
        return it->second;
    }
};

GlCache& cache() {
    static GlCache c;
    return c;
}

}  // namespace

const std::vector<double>& GaussLegendre::nodes(int n) { return cache().get(n).first; }
const std::vector<double>& GaussLegendre::weights(int n) { return cache().get(n).second; }

double integrate_gl(const std::function<double(double)>& f, double a, double b, int order) {
    const auto& x = GaussLegendre::nodes(order);
    const auto& w = GaussLegendre::weights(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(mid + half * x[i]);
    return acc * half;
}

PanelIntegral integrate_dyadic_to_zero(const std::function<double(double)>& f, double b,
                                       double rel_tol, const std::function<double(double)>& tail_bound,
                                       int max_panels, int gl_order, int sub_panels) {
    std::vector<double> panels;
    double hi = b;
    double acc = 0.0;
    int k = 0;
    double last_rel = 1.0;
    const int sub = std::max(1, sub_panels);
    for (; k < max_panels; ++k) {
        const double lo = hi * 0.5;
        double p = 0.0;
        for (int j = 0; j < sub; ++j)
            p += integrate_gl(f, lo + (hi - lo) * j / sub, lo + (hi - lo) * (j + 1) / sub,
                              gl_order);
        panels.push_back(p);
        acc += p;
        hi = lo;
        const double scale = std::max(std::abs(acc), 1e-300);
        double tail = std::abs(p);  // panels decay geometrically for our integrands
        if (tail_bound) tail = std::max(tail, std::abs(tail_bound(lo)));
        last_rel = tail / scale;
        if (k >= 4 && last_rel < rel_tol) break;
    }
    if (k >= max_panels)
        throw NumericalError("integrate_dyadic_to_zero: no convergence after max panels",
                             last_rel);
    // Sum smallest panels first.
    double total = 0.0;
    for (auto it = panels.rbegin(); it != panels.rend(); ++it) total += *it;
    return {total, last_rel, static_cast<int>(panels.size())};
}

std::vector<std::pair<double, double>> geometric_rule(double theta_min, double theta_max,
                                                      int n_nodes) {
    // theta(u) = theta_min * exp(u*L), u in [0,1]; d theta = L theta du.
    // Composite GL in u keeps the rule accurate for theta^{-1-2s}-type factors.
    const double L = std::log(theta_max / theta_min);
    const int per_panel = 8;
    const int npanel = std::max(1, (n_nodes + per_panel - 1) / per_panel);
    const int order = std::max(2, n_nodes / npanel);
    const auto& x = GaussLegendre::nodes(order);
    const auto& w = GaussLegendre::weights(order);
    std::vector<std::pair<double, double>> rule;
    rule.reserve(static_cast<std::size_t>(npanel * order));
    for (int p = 0; p < npanel; ++p) {
        const double ua = static_cast<double>(p) / npanel;
        const double ub = static_cast<double>(p + 1) / npanel;
        const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = mid + half * x[i];
            const double theta = theta_min * std::exp(u * L);
            rule.emplace_back(theta, w[i] * half * L * theta);
        }
    }
    return rule;
}

std::vector<std::pair<double, double>> composite_gl_rule(double a, double b, int n_nodes,
                                                         bool log_spaced) {
    const int per_panel = 8;
    const int npanel = std::max(1, (n_nodes + per_panel - 1) / per_panel);
    const int order = std::max(2, n_nodes / npanel);
    const auto& x = GaussLegendre::nodes(order);
    const auto& w = GaussLegendre::weights(order);
    std::vector<std::pair<double, double>> rule;
    for (int p = 0; p < npanel; ++p) {
        double pa, pb;
        if (log_spaced) {
            const double la = std::log(a), lb = std::log(b);
            pa = std::exp(la + (lb - la) * p / npanel);
            pb = std::exp(la + (lb - la) * (p + 1) / npanel);
        } else {
            pa = a + (b - a) * p / npanel;
            pb = a + (b - a) * (p + 1) / npanel;
        }
        const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (std::size_t i = 0; i < x.size(); ++i)
            rule.emplace_back(mid + half * x[i], w[i] * half);
    }
    return rule;
}

}  // namespace boltz
