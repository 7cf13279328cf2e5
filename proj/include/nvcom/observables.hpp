#pragma once

#include <array>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "nvcom/fockspace.hpp"
#include "nvcom/params.hpp"

namespace nvcom {

/// Reduced spin density matrix, rows/columns ordered s = +1, 0, -1.
struct SpinDensity {
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();

    cplx at(int s, int s_prime) const { return rho(spin_index(s), spin_index(s_prime)); }
    /// rho_{+1,-1}
    cplx coherence() const { return at(+1, -1); }
};

struct EntanglementReport {
    double purity = 1.0;
    double entropy = 0.0;
    double coherence_mag = 0.0;
    double coherence_phase = 0.0;
};

/// Partial trace over the oscillator: rho_{s,s'} = <v_s'|v_s>, then
/// Hermitian-symmetrized and trace-normalized. Throws NormError when the
/// state norm is off unity by more than 1e-10.
SpinDensity reduce_spin(const SpinSectorState& state);

/// Mean of several densities (ensemble average over pure runs).
SpinDensity average(std::span<const SpinDensity> densities);

/// Purity Tr(rho^2) and von Neumann entropy (natural log, eigenvalues
/// clipped at 1e-15) of a spin density.
EntanglementReport entanglement(const SpinDensity& rho);
EntanglementReport entanglement(const SpinSectorState& state);

struct SectorPositions {
    /// <z_shifted>_s in metres, nullopt for an empty sector.
    std::array<std::optional<double>, 3> shifted;
    /// <z>_s = <z_shifted>_s - z0 in metres.
    std::array<std::optional<double>, 3> lab;
    /// Norm-weighted mean over sectors, lab frame.
    double overall_lab = 0.0;

    std::optional<double> lab_at(int s) const { return lab[spin_index(s)]; }
    std::optional<double> shifted_at(int s) const { return shifted[spin_index(s)]; }
};

/// <v_s|quadrature|v_s>/<v_s|v_s>, nullopt for an empty sector.
std::array<std::optional<double>, 3> sector_quadratures(const SpinSectorState& state);

SectorPositions sector_positions(const SpinSectorState& state, const DerivedScales& scales);

/// Phases read off a pair of states.
///
/// `coherence_shift` is arg rho_{+1,-1}(t) - arg rho_{+1,-1}(0) in (-pi, pi].
/// `sector_phases[s]` is arg <v_s(0)|v_s(t)> and `sector_fidelity[s]` is
/// |<v_s(0)|v_s(t)>| / ||v_s(0)||^2; both are nullopt for empty sectors.
struct PhaseReport {
    double coherence_shift = 0.0;
    double coherence_mag = 0.0;
    std::array<std::optional<double>, 3> sector_phases;
    std::array<std::optional<double>, 3> sector_fidelity;

    std::optional<double> sector_phase(int s) const { return sector_phases[spin_index(s)]; }
};

/// Coherence below this magnitude has no defined phase.
inline constexpr double kMinCoherence = 1e-6;

/// Throws PhaseUndefinedError when either coherence is below kMinCoherence.
PhaseReport phase_extract(const SpinSectorState& state_t, const SpinSectorState& state_0);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace nvcom
