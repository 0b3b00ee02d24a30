#include "boltzkit/phase_field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace boltz {

void PhaseGrid::validate() const {
    if (!(nx >= 1)) throw DomainError("PhaseGrid: nx must be >= 1");
    if (!(dx_dims >= 1 && dx_dims <= 3)) throw DomainError("PhaseGrid: dx_dims must be 1..3");
    if (!(nv >= 8 && nv % 2 == 0)) throw DomainError("PhaseGrid: nv must be even and >= 8");
    if (!(R > 0.0)) throw DomainError("PhaseGrid: R must be positive");
}

double DistributionField::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values_) m = std::min(m, v);
    return m;
}

double DistributionField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool DistributionField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

void DistributionField::require_nonnegative(double positivity_tol) const {
    if (min_value() < -positivity_tol)
        throw DomainError("DistributionField: field flagged nonnegative has values below -tol");
}

DistributionField maxwellian(const PhaseGrid& grid, const MaxwellianSpec& spec,
                             double* tail_mass) {
    grid.validate();
    if (!(spec.density > 0.0)) throw DomainError("maxwellian: density must be positive");
    if (!(spec.temperature > 0.0)) throw DomainError("maxwellian: temperature must be positive");

    DistributionField f(grid);
    const double norm = spec.density * std::pow(2.0 * kPi * spec.temperature, -1.5);
    const double inv2T = 1.0 / (2.0 * spec.temperature);
    const std::size_t nvt = grid.n_v_total();
    std::vector<double> slice(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) {
        const Vec3 v = grid.v_node(iv);
        slice[iv] = norm * std::exp(-norm2(v - spec.mean) * inv2T);
    }
    for (std::size_t ix = 0; ix < grid.n_x_total(); ++ix)
        std::copy(slice.begin(), slice.end(), f.values().begin() + ix * nvt);

    // tail mass outside the cube, per the 1D marginal bound erfc-style estimate
    double tail = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double a = (grid.R - std::abs(spec.mean[d])) / std::sqrt(2.0 * spec.temperature);
        tail += spec.density * std::erfc(std::max(a, 0.0));
    }
    if (tail_mass) *tail_mass = tail;
    if (tail > 1e-3) throw DomainError("maxwellian: tail mass outside the velocity cube > 1e-3");
    return f;
}

HydroReport hydro_moments(const DistributionField& f) {
    const PhaseGrid& g = f.grid();
    if (!f.all_finite()) throw DomainError("hydro_moments: field has non-finite values");
    HydroReport rep;
    const std::size_t nxt = g.n_x_total();
    const std::size_t nvt = g.n_v_total();
    rep.mass.assign(nxt, 0.0);
    rep.px.assign(nxt, 0.0);
    rep.py.assign(nxt, 0.0);
    rep.pz.assign(nxt, 0.0);
    rep.energy.assign(nxt, 0.0);
    rep.entropy.assign(nxt, 0.0);
    const double wv = g.wv();
    bool clamped = false;
    for (std::size_t ix = 0; ix < nxt; ++ix) {
        double m = 0, px = 0, py = 0, pz = 0, en = 0, ent = 0;
        for (std::size_t iv = 0; iv < nvt; ++iv) {
            const double fv = f.at(ix, iv);
            const Vec3 v = g.v_node(iv);
            m += fv;
            px += fv * v.x;
            py += fv * v.y;
            pz += fv * v.z;
            en += fv * norm2(v);
            if (fv > 0.0) {
                ent += fv * std::log(fv);
            } else if (fv < 0.0) {
                clamped = true;  // 0 log 0 = 0 convention, negatives clamped
            }
        }
        rep.mass[ix] = m * wv;
        rep.px[ix] = px * wv;
        rep.py[ix] = py * wv;
        rep.pz[ix] = pz * wv;
        rep.energy[ix] = en * wv;
        rep.entropy[ix] = ent * wv;
    }
    rep.entropy_clamped = clamped;
    return rep;
}

ConditionHReport check_condition_H(const DistributionField& f, const HydroBounds& hydro) {
    hydro.validate();
    f.require_nonnegative();
    const HydroReport rep = hydro_moments(f);
    ConditionHReport out;
    out.mass_lower_margin = std::numeric_limits<double>::infinity();
    out.mass_upper_margin = std::numeric_limits<double>::infinity();
    out.energy_margin = std::numeric_limits<double>::infinity();
    out.entropy_margin = std::numeric_limits<double>::infinity();
    for (std::size_t ix = 0; ix < rep.mass.size(); ++ix) {
        out.mass_lower_margin = std::min(out.mass_lower_margin, rep.mass[ix] - 0.5 * hydro.m0);
        out.mass_upper_margin = std::min(out.mass_upper_margin, 2.0 * hydro.M0 - rep.mass[ix]);
        out.energy_margin = std::min(out.energy_margin, 2.0 * hydro.E0 - rep.energy[ix]);
        out.entropy_margin = std::min(out.entropy_margin, 2.0 * hydro.H0 - rep.entropy[ix]);
    }
    out.pass = out.mass_lower_margin >= 0.0 && out.mass_upper_margin >= 0.0 &&
               out.energy_margin >= 0.0 && out.entropy_margin >= 0.0;
    return out;
}

double weighted_l1(const DistributionField& f, double r) {
    const PhaseGrid& g = f.grid();
    const std::size_t nvt = g.n_v_total();
    std::vector<double> wr(nvt);
    for (std::size_t iv = 0; iv < nvt; ++iv) wr[iv] = std::pow(vweight(g.v_node(iv)), r);
    const double scale = g.wx() * g.wv();
    return scale * parallel_sum(g.n_x_total(), [&](std::size_t ix) {
        double acc = 0.0;
        for (std::size_t iv = 0; iv < nvt; ++iv) acc += wr[iv] * std::abs(f.at(ix, iv));
        return acc;
    });
}

double l2_norm(const DistributionField& f) {
    const PhaseGrid& g = f.grid();
    const double scale = g.wx() * g.wv();
    double acc = 0.0;
    for (double v : f.values()) acc += v * v;
    return std::sqrt(scale * acc);
}

void write_field(std::ostream& os, const DistributionField& f) {
    nlohmann::json header = {{"nx", f.grid().nx},
                             {"dx_dims", f.grid().dx_dims},
                             {"nv", f.grid().nv},
                             {"R", f.grid().R}};
    os << header.dump() << "\n";
    static_assert(std::endian::native == std::endian::little,
                  "field serialization assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(double)));
}

DistributionField read_field(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("read_field: missing header line");
    const auto header = nlohmann::json::parse(line);
    PhaseGrid g;
    g.nx = header.at("nx").get<int>();
    g.dx_dims = header.at("dx_dims").get<int>();
    g.nv = header.at("nv").get<int>();
    g.R = header.at("R").get<double>();
    DistributionField f(g);
    is.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!is) throw DomainError("read_field: truncated payload");
    return f;
}

void write_field_file(const std::string& path, const DistributionField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("write_field_file: cannot open " + path);
    write_field(os, f);
}

DistributionField read_field_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("read_field_file: cannot open " + path);
    return read_field(is);
}

void write_hydro_csv(std::ostream& os, const HydroReport& rep) {
    os << "x_index,mass,px,py,pz,energy,entropy\n";
    std::ostringstream buf;
    buf.precision(17);
    for (std::size_t ix = 0; ix < rep.mass.size(); ++ix) {
        buf.str("");
        buf << ix << "," << rep.mass[ix] << "," << rep.px[ix] << "," << rep.py[ix] << ","
            << rep.pz[ix] << "," << rep.energy[ix] << "," << rep.entropy[ix] << "\n";
        os << buf.str();
    }
}

}  // namespace boltz
