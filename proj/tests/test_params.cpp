#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nvcom/errors.hpp"
#include "nvcom/params.hpp"

using namespace nvcom;

namespace {

PhysicalParams example() {
    PhysicalParams p;
    p.mass = 6.2e-18;
    p.omega_z = 1e5;
    p.b0_gradient = 1e2;
    p.d_splitting = kTwoPi * 2.87e9;
    p.theta = 0.0;
    return p;
}

}  // namespace

TEST_CASE("derive_scales evaluates the closed forms") {
    const DerivedScales s = derive_scales(example());
    CHECK(s.z0_shift == doctest::Approx(9.81e-10).epsilon(1e-15));
    // sqrt(hbar / (2 m w)) evaluated independently in Python.
    CHECK(s.z_zpf == doctest::Approx(9.222045015840768e-12).epsilon(1e-12));
    CHECK(s.e_shift == doctest::Approx(0.5 * 6.2e-18 * 1e10 * 9.81e-10 * 9.81e-10).epsilon(1e-14));
    CHECK(s.lambda_coupling == doctest::Approx(1e2 * 2.0 * kBohrMagneton * s.z_zpf).epsilon(1e-14));
    CHECK(s.sector_separation ==
          doctest::Approx(8.0 * s.lambda_coupling * s.z_zpf / (kHbar * 1e5)).epsilon(1e-14));
    CHECK(s.b_cancel == doctest::Approx(-2.0 * 1e2 * 9.81e-10).epsilon(1e-14));
}

TEST_CASE("horizontal trap axis has no gravity shift") {
    PhysicalParams p = example();
    p.theta = kPi / 2;
    const DerivedScales s = derive_scales(p);
    CHECK(s.z0_shift == 0.0);
    CHECK(s.e_shift == 0.0);
    CHECK(s.b_cancel == 0.0);
    CHECK(eval_phi(nondimensionalize(p), 5) == 0.0);
}

TEST_CASE("zero gradient switches the coupling off") {
    PhysicalParams p = example();
    p.b0_gradient = 0.0;
    const DerivedScales s = derive_scales(p);
    CHECK(s.lambda_coupling == 0.0);
    CHECK(s.sector_separation == 0.0);
    CHECK(cancellation_field(p) == 0.0);
    CHECK(nondimensionalize(p).kappa == 0.0);
}

TEST_CASE("validation names the offending field") {
    auto field_of = [](PhysicalParams p) -> std::string {
        try {
            derive_scales(p);
        } catch (const ValidationError& e) {
            return e.field();
        }
        return "";
    };
    PhysicalParams p = example();
    p.mass = std::numeric_limits<double>::quiet_NaN();
    CHECK(field_of(p) == "mass");
    p = example();
    p.omega_z = -1.0;
    CHECK(field_of(p) == "omega_z");
    p = example();
    p.b0_gradient = std::numeric_limits<double>::infinity();
    CHECK(field_of(p) == "b0_gradient");
    p = example();
    p.theta = 4.0;
    CHECK(field_of(p) == "theta");
    p = example();
    p.gravity = -9.81;
    CHECK(field_of(p) == "gravity");
    p = example();
    p.g_nv = 0.0;
    CHECK(field_of(p) == "g_nv");
    p = example();
    p.mu_b = 0.0;
    CHECK(field_of(p) == "mu_b");
    CHECK_THROWS_AS(nondimensionalize(example(), 1), ValidationError);
}

TEST_CASE("nondimensionalize round-trips to SI") {
    const PhysicalParams p = example();
    const DerivedScales s = derive_scales(p);
    const DimensionlessParams d = nondimensionalize(p, 32, 1.5);
    CHECK(d.kappa * kHbar * p.omega_z == doctest::Approx(s.lambda_coupling).epsilon(1e-15));
    CHECK(d.u0 * s.z_zpf == doctest::Approx(s.z0_shift).epsilon(1e-15));
    CHECK(d.dD * p.omega_z == doctest::Approx(p.d_splitting).epsilon(1e-15));
    CHECK(d.n_cutoff == 32);
    CHECK(d.n_bar == 1.5);
    CHECK(d.u_offset == 0.0);

    // z0 = z_zpf gives u0 = 1.
    PhysicalParams q = p;
    q.gravity = s.z_zpf * p.omega_z * p.omega_z;
    CHECK(nondimensionalize(q).u0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eta and phi formulas") {
    DimensionlessParams d;
    d.kappa = 0.0;
    d.dD = 0.3;
    CHECK(eval_eta(d, 1) == doctest::Approx(-0.6 * kPi).epsilon(1e-15));
    CHECK(eval_eta(d, 1) == doctest::Approx(-1.8849556).epsilon(1e-7));
    d.kappa = 0.1;
    d.dD = 0.0;
    CHECK(eval_eta(d, 1) == doctest::Approx(0.2513274).epsilon(1e-7));
    CHECK(eval_eta(d, 0) == 0.0);

    d.u0 = 1.0;
    CHECK(eval_phi(d, 1) == doctest::Approx(2.5132741).epsilon(1e-7));
    CHECK(eval_phi(d, 3) == doctest::Approx(3.0 * eval_phi(d, 1)).epsilon(1e-15));
    d.u0 = 0.0;
    CHECK(eval_phi(d, 7) == 0.0);

    d.u0 = 1.0;
    const PhaseFormulas f = phase_formulas(d, 2);
    CHECK(f.delta_phi_grav == f.phi);
    CHECK(f.phi == eval_phi(d, 2));
    CHECK(f.eta == eval_eta(d, 2));
}

TEST_CASE("z0 scales as 1/omega^2") {
    PhysicalParams p = example();
    const double z = derive_scales(p).z0_shift;
    p.omega_z *= 2.0;
    CHECK(derive_scales(p).z0_shift == z / 4.0);
}

TEST_CASE("phi is bilinear in kappa and u0") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    DimensionlessParams unit;
    unit.kappa = 1.0;
    unit.u0 = 1.0;
    const double base = eval_phi(unit, 1);
    for (int i = 0; i < 200; ++i) {
        DimensionlessParams d;
        d.kappa = u(rng);
        d.u0 = u(rng);
        CHECK(eval_phi(d, 1) == doctest::Approx(d.kappa * d.u0 * base).epsilon(1e-15));
    }
}

TEST_CASE("SI and dimensionless phi agree") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lg(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        PhysicalParams p;
        p.mass = std::pow(10.0, -20.0 + 4.0 * lg(rng));
        p.omega_z = std::pow(10.0, 3.0 + 3.0 * lg(rng));
        p.b0_gradient = std::pow(10.0, 4.0 * lg(rng)) * (lg(rng) < 0.5 ? -1.0 : 1.0);
        p.theta = kPi * lg(rng);
        p.gravity = 9.81;
        const double si = eval_phi_si(p, 3);
        const double dimless = eval_phi(nondimensionalize(p), 3);
        CHECK(dimless == doctest::Approx(si).epsilon(1e-12));
    }
}

TEST_CASE("cancellation field nulls the S_z-linear term") {
    const PhysicalParams p = example();
    const DimensionlessParams d = nondimensionalize(p);
    const double b = cancellation_field(p);
    CHECK(std::abs(b) == doctest::Approx(2.0 * p.b0_gradient * derive_scales(p).z0_shift));
    const double offset = uniform_field_offset(p, b);
    CHECK(offset == doctest::Approx(cancel_offset(d)).epsilon(1e-12));
    DimensionlessParams corrected = d;
    corrected.u_offset = offset;
    CHECK(std::abs(effective_phi(corrected, 1)) < 1e-10 * std::abs(eval_phi(d, 1)));

    DimensionlessParams exact = d;
    exact.u_offset = cancel_offset(d);
    CHECK(effective_phi(exact, 5) == 0.0);

    PhysicalParams flat = p;
    flat.theta = kPi / 2;
    CHECK(cancellation_field(flat) == 0.0);
}

TEST_CASE("effective phi reduces to phi without an offset") {
    DimensionlessParams d;
    d.kappa = 0.17;
    d.u0 = -0.4;
    CHECK(effective_phi(d, 3) == doctest::Approx(eval_phi(d, 3)).epsilon(1e-15));
}
