#include "boltzkit/phase_field.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"

using namespace boltz;

TEST_CASE("maxwellian moments against closed forms") {
    PhaseGrid g;
    g.nx = 1;
    g.nv = 32;
    g.R = 8.0;
    const DistributionField mu = maxwellian(g, {});
    const HydroReport rep = hydro_moments(mu);
    CHECK(rep.mass[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(rep.px[0]) < 1e-12);
    CHECK(rep.energy[0] == doctest::Approx(3.0).epsilon(1e-5));
    // int mu log mu = -(3/2)(1 + log 2 pi)
    CHECK(rep.entropy[0] ==
          doctest::Approx(-1.5 * (1.0 + std::log(2.0 * kPi))).epsilon(1e-5));

    // drifting, scaled Maxwellian
    MaxwellianSpec ms;
    ms.density = 2.0;
    ms.temperature = 0.5;
    ms.mean = {1.0, 0.0, -0.5};
    const HydroReport r2 = hydro_moments(maxwellian(g, ms));
    CHECK(r2.mass[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r2.px[0] == doctest::Approx(2.0 * 1.0).epsilon(1e-5));
    // int |v|^2 f = rho (3T + |u|^2)
    CHECK(r2.energy[0] == doctest::Approx(2.0 * (1.5 + 1.25)).epsilon(1e-5));
}

TEST_CASE("maxwellian tail escalation") {
    PhaseGrid g;
    g.nv = 16;
    g.R = 3.0;
    MaxwellianSpec ms;
    ms.mean = {2.8, 0.0, 0.0};  // bulk of the mass outside the cube
    CHECK_THROWS_AS(maxwellian(g, ms), DomainError);
    // R = 4 leaves a tail that is reported but below the failure threshold
    g.R = 4.0;
    ms.mean = {0.0, 0.0, 0.0};
    double tail = 0.0;
    maxwellian(g, ms, &tail);
    CHECK(tail > 1e-6);
    CHECK(tail < 1e-3);
}

TEST_CASE("hydro moments: zero field, additivity, linearity") {
    PhaseGrid g;
    g.nv = 16;
    g.R = 6.0;
    const DistributionField zero(g);
    const HydroReport rz = hydro_moments(zero);
    CHECK(rz.mass[0] == 0.0);
    CHECK(rz.energy[0] == 0.0);
    CHECK(rz.entropy[0] == 0.0);

    MaxwellianSpec a, b;
    a.mean = {2.0, 0, 0};
    a.temperature = 0.3;
    b.mean = {-2.0, 0, 0};
    b.temperature = 0.4;
    const DistributionField fa = maxwellian(g, a);
    const DistributionField fb = maxwellian(g, b);
    DistributionField sum = fa;
    for (std::size_t i = 0; i < sum.values().size(); ++i) sum.values()[i] += fb.values()[i];
    const HydroReport ra = hydro_moments(fa), rb = hydro_moments(fb), rs = hydro_moments(sum);
    CHECK(rs.mass[0] == doctest::Approx(ra.mass[0] + rb.mass[0]).epsilon(1e-12));
    CHECK(rs.px[0] == doctest::Approx(ra.px[0] + rb.px[0]).epsilon(1e-10));
    CHECK(rs.energy[0] == doctest::Approx(ra.energy[0] + rb.energy[0]).epsilon(1e-12));

    DistributionField scaled = fa;
    for (auto& v : scaled.values()) v *= 3.0;
    CHECK(hydro_moments(scaled).mass[0] == doctest::Approx(3.0 * ra.mass[0]).epsilon(1e-13));
    CHECK(weighted_l1(scaled, 2.0) == doctest::Approx(3.0 * weighted_l1(fa, 2.0)).epsilon(1e-13));
}

TEST_CASE("condition (H) checker") {
    PhaseGrid g;
    g.nv = 24;
    g.R = 8.0;
    const DistributionField mu = maxwellian(g, {});
    HydroBounds hb;
    hb.m0 = 1.0;
    hb.M0 = 1.0;
    hb.E0 = 3.0;
    hb.H0 = 1.0;
    const auto rep = check_condition_H(mu, hb);
    CHECK(rep.pass);
    CHECK(rep.mass_lower_margin == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(rep.mass_upper_margin == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(rep.energy_margin == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(rep.entropy_margin > 2.0);  // entropy is negative here

    const DistributionField zero(g);
    CHECK_FALSE(check_condition_H(zero, hb).pass);
    CHECK(check_condition_H(zero, hb).mass_lower_margin < 0.0);

    DistributionField big = mu;
    for (auto& v : big.values()) v *= 4.0;
    const auto rep4 = check_condition_H(big, hb);
    CHECK_FALSE(rep4.pass);
    CHECK(rep4.mass_upper_margin < 0.0);
}

TEST_CASE("weighted L1: values and monotonicity in r") {
    PhaseGrid g;
    g.nv = 32;
    g.R = 8.0;
    const DistributionField mu = maxwellian(g, {});
    CHECK(weighted_l1(mu, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    // int <v>^2 mu = 1 + 3T = 4
    CHECK(weighted_l1(mu, 2.0) == doctest::Approx(4.0).epsilon(1e-5));
    double prev = 0.0;
    for (double r : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        const double v = weighted_l1(mu, r);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("field serialization round trip") {
    PhaseGrid g;
    g.nx = 4;
    g.dx_dims = 1;
    g.nv = 8;
    g.R = 6.0;
    DistributionField f(g);
    Rng rng(99);
    for (auto& v : f.values()) v = rng.normal();
    std::stringstream ss;
    write_field(ss, f);
    const DistributionField back = read_field(ss);
    CHECK(back.grid() == f.grid());
    REQUIRE(back.values().size() == f.values().size());
    for (std::size_t i = 0; i < f.values().size(); ++i)
        CHECK(back.values()[i] == f.values()[i]);  // bit-exact

    std::stringstream truncated(ss.str().substr(0, 64));
    CHECK_THROWS_AS(read_field(truncated), DomainError);
}

TEST_CASE("hydro CSV export") {
    PhaseGrid g;
    g.nx = 1;
    g.nv = 8;
    g.R = 6.0;
    const auto rep = hydro_moments(DistributionField(g, 0.5));
    std::stringstream ss;
    write_hydro_csv(ss, rep);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "x_index,mass,px,py,pz,energy,entropy");
    std::string row;
    CHECK(static_cast<bool>(std::getline(ss, row)));
    CHECK(row.substr(0, 2) == "0,");
}

TEST_CASE("grid and field validation") {
    PhaseGrid g;
    g.nv = 9;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.nv = 6;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.nv = 16;
    g.dx_dims = 4;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g.dx_dims = 1;
    CHECK_NOTHROW(g.validate());

    DistributionField f(g);
    f.values()[3] = -1e-6;
    CHECK_THROWS_AS(f.require_nonnegative(), DomainError);
    CHECK_NOTHROW(f.require_nonnegative(1e-5));
}
