#include "nvcom/params.hpp"

#include <cmath>
#include <string>

#include "nvcom/errors.hpp"

namespace nvcom {

namespace {

void require_finite(double value, const char* field) {
    if (!std::isfinite(value)) throw ValidationError(field, "must be finite");
}

void require_positive(double value, const char* field) {
    require_finite(value, field);
    if (!(value > 0.0)) throw ValidationError(field, "must be > 0");
}

}  // namespace

void validate(const PhysicalParams& p) {
    require_positive(p.mass, "mass");
    require_positive(p.omega_z, "omega_z");
    require_finite(p.b0_gradient, "b0_gradient");
    require_finite(p.d_splitting, "d_splitting");
    require_finite(p.theta, "theta");
    if (p.theta < 0.0 || p.theta > kPi) throw ValidationError("theta", "must lie in [0, pi]");
    require_finite(p.gravity, "gravity");
    if (p.gravity < 0.0) throw ValidationError("gravity", "must be >= 0");
    require_positive(p.g_nv, "g_nv");
    require_positive(p.mu_b, "mu_b");
}

void validate(const DimensionlessParams& d) {
    require_finite(d.kappa, "kappa");
    require_finite(d.u0, "u0");
    require_finite(d.dD, "dD");
    require_finite(d.u_offset, "u_offset");
    require_finite(d.n_bar, "n_bar");
    if (d.n_bar < 0.0) throw ValidationError("n_bar", "must be >= 0");
    if (d.n_cutoff < 2) throw ValidationError("n_cutoff", "must be >= 2");
}

DerivedScales derive_scales(const PhysicalParams& p) {
    validate(p);
    DerivedScales s;
    s.z_zpf = std::sqrt(kHbar / (2.0 * p.mass * p.omega_z));
    s.lambda_coupling = p.b0_gradient * p.g_nv * p.mu_b * s.z_zpf;
    // cos(pi/2) is 6e-17, not zero; pin the horizontal case.
    const double cos_theta = p.theta == kPi / 2 ? 0.0 : std::cos(p.theta);
    s.z0_shift = p.gravity * cos_theta / (p.omega_z * p.omega_z);
    s.e_shift = 0.5 * p.mass * p.omega_z * p.omega_z * s.z0_shift * s.z0_shift;
    s.sector_separation = 8.0 * s.lambda_coupling * s.z_zpf / (kHbar * p.omega_z);
    s.b_cancel = -2.0 * p.b0_gradient * s.z0_shift;
    return s;
}

DimensionlessParams nondimensionalize(const PhysicalParams& p, std::size_t n_cutoff,
                                      double n_bar) {
    const DerivedScales s = derive_scales(p);
    DimensionlessParams d;
    const double energy_unit = kHbar * p.omega_z;
    d.kappa = s.lambda_coupling / energy_unit;
    d.u0 = s.z0_shift / s.z_zpf;
    d.dD = p.d_splitting / p.omega_z;
    d.n_cutoff = n_cutoff;
    d.n_bar = n_bar;
    validate(d);
    return d;
}

double eval_eta(const DimensionlessParams& d, long periods) {
    return static_cast<double>(periods) * (8.0 * kPi * d.kappa * d.kappa - kTwoPi * d.dD);
}

double eval_phi(const DimensionlessParams& d, long periods) {
    return static_cast<double>(periods) * 8.0 * kPi * d.kappa * d.u0;
}

double eval_phi_si(const PhysicalParams& p, long periods) {
    const DerivedScales s = derive_scales(p);
    const double energy_unit = kHbar * p.omega_z;
    return static_cast<double>(periods) * 8.0 * kPi * s.lambda_coupling * s.z0_shift *
           std::sqrt(2.0 * p.mass * p.omega_z / kHbar) / energy_unit;
}

PhaseFormulas phase_formulas(const DimensionlessParams& d, long periods) {
    PhaseFormulas f;
    f.eta = eval_eta(d, periods);
    f.phi = eval_phi(d, periods);
    f.delta_phi_grav = f.phi;
    return f;
}

double effective_phi(const DimensionlessParams& d, long periods) {
    return static_cast<double>(periods) * 2.0 * kTwoPi * (2.0 * d.kappa * d.u0 + d.u_offset);
}

double cancellation_field(const PhysicalParams& p) { return derive_scales(p).b_cancel; }

double uniform_field_offset(const PhysicalParams& p, double b_uniform) {
    validate(p);
    return p.g_nv * p.mu_b * b_uniform / (kHbar * p.omega_z);
}

double cancel_offset(const DimensionlessParams& d) { return -2.0 * d.kappa * d.u0; }

}  // namespace nvcom
