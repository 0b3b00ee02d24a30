#ifndef BOLTZKIT_PHASE_FIELD_HPP
#define BOLTZKIT_PHASE_FIELD_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "boltzkit/common.hpp"
#include "boltzkit/kernel.hpp"

namespace boltz {

// ---------------------------------------------------------------------------
// Phase space: unit torus in x (dx_dims active dimensions, nx points each,
// volume normalized to 1) times the velocity cube [-R, R)^3 with nv points
// per dimension.  nx = 1 is the spatially homogeneous mode.
// ---------------------------------------------------------------------------
struct PhaseGrid {
    int nx = 1;
    int dx_dims = 1;
    int nv = 24;
    double R = 8.0;

    void validate() const;

    std::size_t n_x_total() const {
        std::size_t n = 1;
        for (int d = 0; d < dx_dims; ++d) n *= static_cast<std::size_t>(nx);
        return nx == 1 ? 1 : n;
    }
    std::size_t n_v_total() const {
        return static_cast<std::size_t>(nv) * nv * nv;
    }
    double hv() const { return 2.0 * R / nv; }
    double hx() const { return 1.0 / nx; }
    // x-quadrature weight per node (torus has unit volume)
    double wx() const { return 1.0 / static_cast<double>(n_x_total()); }
    double wv() const { return hv() * hv() * hv(); }

    double v_coord(int i) const { return -R + i * hv(); }
    Vec3 v_node(std::size_t iv) const {
        const int n = nv;
        const int k = static_cast<int>(iv % n);
        const int j = static_cast<int>((iv / n) % n);
        const int i = static_cast<int>(iv / (static_cast<std::size_t>(n) * n));
        return {v_coord(i), v_coord(j), v_coord(k)};
    }
    std::size_t v_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * nv + j) * nv + k;
    }

    bool operator==(const PhaseGrid& o) const {
        return nx == o.nx && dx_dims == o.dx_dims && nv == o.nv && R == o.R;
    }
};

// ---------------------------------------------------------------------------
// A grid function f(x, v); storage is x-major, v-minor.
// ---------------------------------------------------------------------------
class DistributionField {
  public:
    DistributionField() = default;
    explicit DistributionField(const PhaseGrid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.n_x_total() * grid.n_v_total(), fill) {
        grid.validate();
    }

    const PhaseGrid& grid() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double& at(std::size_t ix, std::size_t iv) { return values_[ix * grid_.n_v_total() + iv]; }
    double at(std::size_t ix, std::size_t iv) const {
        return values_[ix * grid_.n_v_total() + iv];
    }

    double min_value() const;
    double max_abs() const;
    bool all_finite() const;

    // fails when any value < -positivity_tol
    void require_nonnegative(double positivity_tol = 1e-12) const;

  private:
    PhaseGrid grid_;
    std::vector<double> values_;
};

struct HydroReport {
    // one entry per spatial node
    std::vector<double> mass;
    std::vector<double> px, py, pz;
    std::vector<double> energy;
    std::vector<double> entropy;
    bool entropy_clamped = false;  // negative values clamped to 0 inside the log
};

struct ConditionHReport {
    bool pass = false;
    // worst margins across spatial nodes; positive = satisfied
    double mass_lower_margin = 0.0;   // min_x (mass - m0/2)
    double mass_upper_margin = 0.0;   // min_x (2 M0 - mass)
    double energy_margin = 0.0;       // min_x (2 E0 - energy)
    double entropy_margin = 0.0;      // min_x (2 H0 - entropy)
};

struct MaxwellianSpec {
    double density = 1.0;
    double temperature = 1.0;
    Vec3 mean = {0.0, 0.0, 0.0};
};

// rho (2 pi T)^{-3/2} exp(-|v-u|^2 / (2T)) at every node, x-independent.
// Throws when the tail mass outside the cube exceeds 1e-3 of the total; a
// tail above 1e-6 is reported through *tail_mass when requested.
DistributionField maxwellian(const PhaseGrid& grid, const MaxwellianSpec& spec,
                             double* tail_mass = nullptr);

HydroReport hydro_moments(const DistributionField& f);

ConditionHReport check_condition_H(const DistributionField& f, const HydroBounds& hydro);

// || <v>^r f ||_{L^1} over the full phase space (torus volume 1)
double weighted_l1(const DistributionField& f, double r);

// plain L^2 norm over phase space
double l2_norm(const DistributionField& f);

// ---------------------------------------------------------------------------
// Serialization: one JSON header line {nx, dx_dims, nv, R} followed by the
// values as little-endian 64-bit floats.
// ---------------------------------------------------------------------------
void write_field(std::ostream& os, const DistributionField& f);
DistributionField read_field(std::istream& is);
void write_field_file(const std::string& path, const DistributionField& f);
DistributionField read_field_file(const std::string& path);

// CSV export: x_index, mass, px, py, pz, energy, entropy
void write_hydro_csv(std::ostream& os, const HydroReport& rep);

}  // namespace boltz

#endif
