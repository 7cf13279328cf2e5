#include <doctest.h>

#include <string>

#include "nvcom/config.hpp"
#include "nvcom/errors.hpp"

using namespace nvcom;

namespace {

const char* kMinimal = "mass = 6.2e-18\nomega_z = 1e5\nb0_gradient = 100\n";

std::string failing_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
    const RunConfig cfg = parse_config(kMinimal);
    CHECK(cfg.physical.mass == 6.2e-18);
    CHECK(cfg.physical.omega_z == 1e5);
    CHECK(cfg.physical.b0_gradient == 100.0);
    CHECK(cfg.physical.gravity == 9.81);
    CHECK(cfg.physical.g_nv == 2.0);
    CHECK(cfg.physical.theta == 0.0);
    CHECK(cfg.n_cutoff == 64);
    CHECK(cfg.n_bar == 0.0);
    CHECK_FALSE(cfg.kappa.has_value());
}

TEST_CASE("comments, blank lines and units") {
    const std::string text = std::string("# header\n\n") + kMinimal +
                             "theta = 90 deg   # horizontal\n"
                             "d_splitting = 2.87e9 Hz\n"
                             "n_cutoff = 32\n";
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.physical.theta == kPi / 2);
    CHECK(cfg.physical.d_splitting == doctest::Approx(kTwoPi * 2.87e9));
    CHECK(cfg.n_cutoff == 32);
    CHECK(derive_scales(cfg.physical).z0_shift == 0.0);

    const RunConfig rad = parse_config(std::string(kMinimal) + "theta = 0.5 rad\n");
    CHECK(rad.physical.theta == 0.5);
    const RunConfig deg = parse_config(std::string(kMinimal) + "theta = 60 deg\n");
    CHECK(deg.physical.theta == doctest::Approx(kPi / 3));
}

TEST_CASE("dimensionless overrides replace derived values") {
    const RunConfig cfg = parse_config(std::string(kMinimal) + "kappa = 0.1\nu0 = 1\ndD = 0.3\n");
    const DimensionlessParams d = resolve_dimensionless(cfg);
    CHECK(d.kappa == 0.1);
    CHECK(d.u0 == 1.0);
    CHECK(d.dD == 0.3);
}

TEST_CASE("errors name the key") {
    CHECK(failing_field("omega_z = 1e5\nb0_gradient = 1\n") == "mass");
    CHECK(failing_field(std::string(kMinimal) + "mass = 1\n") == "mass");
    CHECK(failing_field(std::string(kMinimal) + "colour = 3\n") == "colour");
    CHECK(failing_field(std::string(kMinimal) + "gravity = abc\n") == "gravity");
    CHECK(failing_field(std::string(kMinimal) + "gravity = inf\n") == "gravity");
    CHECK(failing_field(std::string(kMinimal) + "theta = 10 grad\n") == "theta");
    CHECK(failing_field(std::string(kMinimal) + "mu_b = 1 T\n") == "mu_b");
    CHECK(failing_field(std::string(kMinimal) + "n_cutoff = 1\n") == "n_cutoff");
    CHECK(failing_field(std::string(kMinimal) + "n_cutoff = 2.5\n") == "n_cutoff");
    CHECK(failing_field(std::string(kMinimal) + "n_bar = -1\n") == "n_bar");
    CHECK(failing_field("mass = 1\nomega_z = -1\nb0_gradient = 1\n") == "omega_z");
    CHECK(failing_field(std::string(kMinimal) + "just words\n") == "line 4");
}

TEST_CASE("canonical text parses back to the same config") {
    const RunConfig cfg =
        parse_config(std::string(kMinimal) + "theta = 0.25\nn_bar = 2\nkappa = 0.1\n");
    const std::string text = canonical_text(cfg);
    const RunConfig again = parse_config(text);
    CHECK(canonical_text(again) == text);
    CHECK(again.physical.theta == cfg.physical.theta);
    CHECK(again.physical.mu_b == cfg.physical.mu_b);
    CHECK(*again.kappa == 0.1);
}
