#pragma once

#include <cstddef>
#include <numbers>

namespace nvcom {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduced Planck constant (CODATA 2018, exact), J s.
inline constexpr double kHbar = 1.054571817e-34;
/// Bohr magneton (CODATA 2018), J/T.
inline constexpr double kBohrMagneton = 9.2740100783e-24;

/// SI description of the levitated nanodiamond and its NV spin.
///
/// The field profile is B = b0_gradient * (-x, -y, 2z); only the z component
/// enters the 1D model. The zero-field splitting is given as an angular
/// frequency D/hbar; a splitting quoted in Hz converts as 2*pi*f.
struct PhysicalParams {
    double mass = 0.0;            // kg
    double omega_z = 0.0;         // rad/s
    double b0_gradient = 0.0;     // T/m
    double d_splitting = 0.0;     // rad/s
    double theta = 0.0;           // rad, angle between trap z-axis and vertical
    double gravity = 9.81;        // m/s^2
    double g_nv = 2.0;
    double mu_b = kBohrMagneton;  // J/T
};

struct DerivedScales {
    double lambda_coupling = 0.0;    // J
    double z_zpf = 0.0;              // m
    double z0_shift = 0.0;           // m
    double e_shift = 0.0;            // J
    double sector_separation = 0.0;  // m, between the s=+1 and s=-1 displaced equilibria
    double b_cancel = 0.0;           // T, z-component of the uniform field nulling the S_z-linear term
};

/// Reduced model with hbar = omega_z = 1; time is measured in units of 1/omega_z,
/// so one trap period is t = 2*pi.
///
/// Round trip to SI: lambda = kappa*hbar*omega_z, z0 = u0*z_zpf,
/// D/hbar = dD*omega_z, uniform field B_u = u_offset*hbar*omega_z/(g_nv*mu_b).
struct DimensionlessParams {
    double kappa = 0.0;
    double u0 = 0.0;
    double dD = 0.0;
    std::size_t n_cutoff = 64;
    double n_bar = 0.0;
    double u_offset = 0.0;
};

struct PhaseFormulas {
    double eta = 0.0;
    double phi = 0.0;
    double delta_phi_grav = 0.0;  // identical to phi
};

/// Throws ValidationError naming the first field that is non-finite or out of range.
void validate(const PhysicalParams& p);
void validate(const DimensionlessParams& d);

DerivedScales derive_scales(const PhysicalParams& p);

DimensionlessParams nondimensionalize(const PhysicalParams& p, std::size_t n_cutoff = 64,
                                      double n_bar = 0.0);

/// Spin-sector phase accumulated by H1 over `periods` trap periods: N*(8*pi*kappa^2 - 2*pi*dD).
double eval_eta(const DimensionlessParams& d, long periods);

/// Relative +1/-1 phase generated by the gravity-shift term over `periods` periods: N*8*pi*kappa*u0.
double eval_phi(const DimensionlessParams& d, long periods);

/// Same quantity evaluated directly from SI inputs: N*8*pi*lambda*z0*sqrt(2 m w/hbar)/(hbar w).
double eval_phi_si(const PhysicalParams& p, long periods);

PhaseFormulas phase_formulas(const DimensionlessParams& d, long periods);

/// Relative +1/-1 phase per period actually produced by the model including any
/// uniform-field offset: 4*pi*(2*kappa*u0 + u_offset).
double effective_phi(const DimensionlessParams& d, long periods);

/// z-component of the uniform field that nulls the S_z-linear term: -2*B0*z0.
/// Its magnitude is 2*|B0*z0|; the sign opposes the gradient field at the
/// gravity-shifted equilibrium.
double cancellation_field(const PhysicalParams& p);

/// Dimensionless u_offset produced by a uniform field b_uniform (T) along z.
double uniform_field_offset(const PhysicalParams& p, double b_uniform);

/// u_offset that cancels the S_z-linear term in the reduced model: -2*kappa*u0.
double cancel_offset(const DimensionlessParams& d);

}  // namespace nvcom
