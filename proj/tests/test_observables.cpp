#include <doctest.h>

#include <cmath>
#include <random>

#include "nvcom/errors.hpp"
#include "nvcom/observables.hpp"
#include "nvcom/propagators.hpp"

using namespace nvcom;

namespace {

DimensionlessParams make(double kappa, double u0, double dD, std::size_t n = 64) {
    DimensionlessParams d;
    d.kappa = kappa;
    d.u0 = u0;
    d.dD = dD;
    d.n_cutoff = n;
    return d;
}

FockVector random_vector(std::mt19937_64& rng, std::size_t n, int support) {
    std::normal_distribution<double> g;
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    for (int k = 0; k < support; ++k) v(k) = cplx(g(rng), g(rng));
    v.normalize();
    return FockVector{v, 0.0, std::nullopt};
}

std::array<cplx, 3> random_weights(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::array<cplx, 3> w;
    double total = 0.0;
    for (auto& x : w) {
        x = cplx(g(rng), g(rng));
        total += std::norm(x);
    }
    for (auto& x : w) x /= std::sqrt(total);
    return w;
}

}  // namespace

TEST_CASE("product state has a pure spin density") {
    const SpinSectorState st = initial_state(coherent_vector(cplx(0.4, 0.2), 32));
    const SpinDensity rho = reduce_spin(st);
    CHECK(std::abs(rho.coherence() - cplx(0.5)) < 1e-14);
    CHECK(std::abs(rho.at(0, 0)) == 0.0);
    const EntanglementReport e = entanglement(rho);
    CHECK(e.purity == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.entropy < 1e-12);
    CHECK(e.coherence_mag == doctest::Approx(0.5));
}

TEST_CASE("maximally mixed qubit pair") {
    // Orthogonal oscillator partners: the +1/-1 coherence vanishes.
    SpinSectorState st;
    st.sector(+1) = fock_vector(0, 8);
    st.sector(+1).amplitudes /= std::sqrt(2.0);
    st.sector(0).amplitudes = Vector::Zero(8);
    st.sector(-1) = fock_vector(1, 8);
    st.sector(-1).amplitudes /= std::sqrt(2.0);
    const EntanglementReport e = entanglement(st);
    CHECK(e.purity == doctest::Approx(0.5));
    CHECK(e.entropy == doctest::Approx(std::log(2.0)));
    CHECK(e.coherence_mag == 0.0);
    CHECK_THROWS_AS(phase_extract(st, st), PhaseUndefinedError);
}

TEST_CASE("reduced density is a valid state") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const SpinSectorState st = initial_state(random_vector(rng, 16, 8), random_weights(rng));
        const SpinDensity rho = reduce_spin(st);
        CHECK(std::abs(rho.rho.trace() - cplx(1.0)) < 1e-13);
        CHECK((rho.rho - rho.rho.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(rho.rho);
        CHECK(eig.eigenvalues().minCoeff() > -1e-13);
        const EntanglementReport e = entanglement(rho);
        CHECK(e.purity <= 1.0 + 1e-12);
        CHECK(e.purity >= 1.0 / 3.0 - 1e-12);
        CHECK(e.entropy >= -1e-12);
        CHECK(e.entropy <= std::log(3.0) + 1e-12);
    }
}

TEST_CASE("H2 leaves populations and purity untouched") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        const double kappa = 0.1 * u(rng);
        const DimensionlessParams with_h2 = make(kappa, u(rng), 0.3, 48);
        const DimensionlessParams without = make(kappa, 0.0, 0.3, 48);
        const SpinSectorState st = initial_state(random_vector(rng, 48, 4));
        const double t = 1.0 + std::abs(u(rng));
        const SpinDensity a = reduce_spin(evolve_oracle(st, with_h2, t).state);
        const SpinDensity b = reduce_spin(evolve_oracle(st, without, t).state);
        for (int s : kSpins) CHECK(std::abs(a.at(s, s) - b.at(s, s)) < 1e-12);
        CHECK(entanglement(a).purity == doctest::Approx(entanglement(b).purity).epsilon(1e-12));
        CHECK(std::abs(a.coherence()) == doctest::Approx(std::abs(b.coherence())).epsilon(1e-12));
    }
}

TEST_CASE("coherence returns to 1/2 at integer periods") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const DimensionlessParams d = make(0.2 * u(rng), 2.0 * u(rng), u(rng), 64);
        const SpinSectorState st = initial_state(random_vector(rng, 64, 5));
        const int periods = 1 + static_cast<int>(3.0 * u(rng));
        const SpinSectorState out = evolve_oracle(st, d, kTwoPi * periods).state;
        const PhaseReport r = phase_extract(out, st);
        CHECK(r.coherence_mag == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(std::abs(wrap_phase(r.coherence_shift + periods * eval_phi(d, 1))) < 1e-9);
        CHECK(entanglement(out).purity == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("purity dips between periods") {
    const DimensionlessParams d = make(0.3, 1.0, 0.3, 64);
    const SpinSectorState st = initial_state(coherent_vector(0.0, 64));
    const double p_half = entanglement(evolve_oracle(st, d, kPi).state).purity;
    // Sector orbits sit at +-4 kappa, so |rho_{+-}| = exp(-|8 kappa|^2 / 2) / 2.
    const double mag = 0.5 * std::exp(-0.5 * std::norm(cplx(8.0 * d.kappa)));
    CHECK(p_half == doctest::Approx(0.5 + 2.0 * mag * mag).epsilon(1e-10));
    CHECK(p_half < 1.0 - 1e-4);
}

TEST_CASE("sector positions") {
    PhysicalParams p;
    p.mass = 6.2e-18;
    p.omega_z = 1e5;
    p.b0_gradient = 1e2;
    const DerivedScales scales = derive_scales(p);
    const DimensionlessParams d = nondimensionalize(p, 64);

    const SpinSectorState st = initial_state(coherent_vector(0.0, 64));
    const OraclePropagator prop(d);
    const int samples = 64;
    double mean_separation = 0.0;
    for (int k = 0; k < samples; ++k) {
        const SectorPositions pos = sector_positions(prop.evolve(st, kTwoPi * k / samples).state, scales);
        mean_separation += (*pos.shifted_at(+1) - *pos.shifted_at(-1)) / samples;
    }
    CHECK(mean_separation == doctest::Approx(scales.sector_separation).epsilon(1e-9));

    const SectorPositions pos = sector_positions(prop.evolve(st, kPi).state, scales);
    REQUIRE(pos.shifted_at(+1).has_value());
    CHECK_FALSE(pos.shifted_at(0).has_value());
    const double separation = *pos.shifted_at(+1) - *pos.shifted_at(-1);
    // The orbits reach twice their equilibrium offset at half a period.
    CHECK(separation == doctest::Approx(2.0 * scales.sector_separation).epsilon(1e-9));
    CHECK(*pos.shifted_at(+1) - *pos.lab_at(+1) == doctest::Approx(scales.z0_shift).epsilon(1e-12));
    CHECK(pos.overall_lab == doctest::Approx(-scales.z0_shift).epsilon(1e-9));

    // The separation does not depend on u0.
    DimensionlessParams flat = d;
    flat.u0 = 0.0;
    const SectorPositions pos0 = sector_positions(evolve_oracle(st, flat, kPi).state, scales);
    CHECK(*pos0.shifted_at(+1) - *pos0.shifted_at(-1) == doctest::Approx(separation).epsilon(1e-12));
}

TEST_CASE("average of densities") {
    SpinDensity a;
    a.rho(0, 0) = 1.0;
    SpinDensity b;
    b.rho(2, 2) = 1.0;
    const std::array<SpinDensity, 2> both = {a, b};
    const SpinDensity m = average(both);
    CHECK(m.at(+1, +1) == cplx(0.5));
    CHECK(m.at(-1, -1) == cplx(0.5));
    CHECK(entanglement(m).purity == doctest::Approx(0.5));
}

TEST_CASE("norm checks and phase wrapping") {
    SpinSectorState st = initial_state(coherent_vector(0.0, 16));
    st.sector(+1).amplitudes *= 1.01;
    CHECK_THROWS_AS(reduce_spin(st), NormError);

    CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_phase(0.5 + 4.0 * kPi) == doctest::Approx(0.5));
    CHECK(wrap_phase(-0.5 - 2.0 * kPi) == doctest::Approx(-0.5));
}
