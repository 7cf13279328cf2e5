#include "nvcom/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nvcom/errors.hpp"

namespace nvcom {

namespace {

constexpr double kNormTolerance = 1e-10;
constexpr double kEigenClip = 1e-15;

}  // namespace

double wrap_phase(double angle) {
    double r = std::remainder(angle, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

SpinDensity reduce_spin(const SpinSectorState& state) {
    const double norm = state.norm_squared();
    if (std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "reduce_spin: state norm " << norm << " differs from 1 by more than "
            << kNormTolerance;
        throw NormError(msg.str());
    }
    SpinDensity out;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            // Eigen's dot conjugates its left operand: <v_j|v_i>.
            out.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                state.sectors[j].amplitudes.dot(state.sectors[i].amplitudes);
        }
    }
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    out.rho /= out.rho.trace().real();
    return out;
}

SpinDensity average(std::span<const SpinDensity> densities) {
    SpinDensity out;
    if (densities.empty()) return out;
    for (const auto& d : densities) out.rho += d.rho;
    out.rho /= static_cast<double>(densities.size());
    return out;
}

EntanglementReport entanglement(const SpinDensity& density) {
    EntanglementReport r;
    r.purity = (density.rho * density.rho).trace().real();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> eig(density.rho, Eigen::EigenvaluesOnly);
    double entropy = 0.0;
    for (Eigen::Index k = 0; k < 3; ++k) {
        const double p = eig.eigenvalues()(k);
        if (p > kEigenClip) entropy -= p * std::log(p);
    }
    r.entropy = std::max(0.0, entropy);
    const cplx c = density.coherence();
    r.coherence_mag = std::abs(c);
    r.coherence_phase = std::arg(c);
    return r;
}

EntanglementReport entanglement(const SpinSectorState& state) {
    return entanglement(reduce_spin(state));
}

std::array<std::optional<double>, 3> sector_quadratures(const SpinSectorState& state) {
    std::array<std::optional<double>, 3> out;
    for (std::size_t k = 0; k < 3; ++k) {
        const Vector& v = state.sectors[k].amplitudes;
        const double norm = v.squaredNorm();
        if (norm == 0.0) continue;
        // <v|(c + c^dag)|v> = 2 Re sum_n sqrt(n) conj(v_{n-1}) v_n
        cplx acc = 0.0;
        for (Eigen::Index n = 1; n < v.size(); ++n) {
            acc += std::sqrt(static_cast<double>(n)) * std::conj(v(n - 1)) * v(n);
        }
        out[k] = 2.0 * acc.real() / norm;
    }
    return out;
}

SectorPositions sector_positions(const SpinSectorState& state, const DerivedScales& scales) {
    SectorPositions out;
    const auto quads = sector_quadratures(state);
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        if (!quads[k]) continue;
        const double shifted = scales.z_zpf * *quads[k];
        out.shifted[k] = shifted;
        out.lab[k] = shifted - scales.z0_shift;
        const double w = state.sectors[k].norm_squared();
        weighted += w * *out.lab[k];
        total += w;
    }
    out.overall_lab = total > 0.0 ? weighted / total : 0.0;
    return out;
}

PhaseReport phase_extract(const SpinSectorState& state_t, const SpinSectorState& state_0) {
    const cplx c_t = reduce_spin(state_t).coherence();
    const cplx c_0 = reduce_spin(state_0).coherence();
    if (std::abs(c_t) < kMinCoherence || std::abs(c_0) < kMinCoherence) {
        throw PhaseUndefinedError("phase_extract: spin coherence magnitude below 1e-6");
    }
    PhaseReport r;
    r.coherence_mag = std::abs(c_t);
    r.coherence_shift = wrap_phase(std::arg(c_t) - std::arg(c_0));
    for (std::size_t k = 0; k < 3; ++k) {
        const Vector& v0 = state_0.sectors[k].amplitudes;
        const double norm = v0.squaredNorm();
        if (norm == 0.0) continue;
        const cplx overlap = v0.dot(state_t.sectors[k].amplitudes);
        r.sector_phases[k] = std::arg(overlap);
        r.sector_fidelity[k] = std::abs(overlap) / norm;
    }
    return r;
}

}  // namespace nvcom
