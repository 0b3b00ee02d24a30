#ifndef BOLTZKIT_QUADRATURE_HPP
#define BOLTZKIT_QUADRATURE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "boltzkit/common.hpp"

namespace boltz {

// Gauss-Legendre nodes and weights on [-1,1], cached per order.
struct GaussLegendre {
    static const std::vector<double>& nodes(int n);
    static const std::vector<double>& weights(int n);
};

// Fixed-order Gauss-Legendre on [a,b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int order);

struct PanelIntegral {
    double value = 0.0;
    double achieved_rel = 0.0;
    int panels = 0;
};

// Integrates f over (0, b] where f may have an algebraic singularity at 0 but
// the integral converges.  Dyadic panels [b 2^{-k-1}, b 2^{-k}] with a fixed
// Gauss rule per panel are accumulated until the running tail estimate drops
// below rel_tol; tail_bound(t), when supplied, bounds |int_0^t f| and is used
// as the rigorous stopping criterion.  sub_panels subdivides every dyadic
// panel uniformly (needed when f has a boundary layer at b, e.g. sin^l(t/2)
// with large l).
PanelIntegral integrate_dyadic_to_zero(const std::function<double(double)>& f, double b,
                                       double rel_tol,
                                       const std::function<double(double)>& tail_bound = nullptr,
                                       int max_panels = 400, int gl_order = 24,
                                       int sub_panels = 1);

// One-dimensional rule {theta_j, w_j} on [theta_min, theta_max] clustered
// geometrically toward theta_min via the substitution theta = theta_min e^{u L}.
// Intended for integrands behaving like theta^{-1-2s} near the cutoff.
std::vector<std::pair<double, double>> geometric_rule(double theta_min, double theta_max,
                                                      int n_nodes);

// Composite Gauss rule on [a,b] (panels uniform in log when log_spaced).
std::vector<std::pair<double, double>> composite_gl_rule(double a, double b, int n_nodes,
                                                         bool log_spaced = false);

}  // namespace boltz

#endif
