#pragma once

#include <array>
#include <optional>

#include "nvcom/fockspace.hpp"
#include "nvcom/params.hpp"

namespace nvcom {

/// One spin sector of the reduced Hamiltonian (hbar = omega_z = 1).
///
/// The H1 block is dD*s^2*I + number - 2*kappa*s*quadrature. The scalar
/// dD*s^2 part is kept separately in `splitting` so that large NV splittings
/// enter only through an exact phase. `h2_rate` is the S_z-linear term
/// (2*kappa*u0 + u_offset)*s, a multiple of the identity on the block.
struct SectorHamiltonian {
    int s = 0;
    OperatorMatrix matrix;  // number - 2*kappa*s*quadrature
    double splitting = 0.0;
    double h2_rate = 0.0;

    /// Full H1 block including the scalar splitting.
    Matrix h1_block() const;
};

SectorHamiltonian sector_hamiltonian(int s, const DimensionlessParams& d);

/// Lab-frame sector Hamiltonian with gravity as a linear potential:
/// dD*s^2 + number - 2*kappa*s*quadrature + (u0/2)*quadrature. No S_z-linear
/// scalar and no constant E_s; `h2_rate` is just u_offset*s.
SectorHamiltonian unshifted_sector_hamiltonian(int s, const DimensionlessParams& d);

enum class Method { analytic, oracle };

/// The s=0 vacuum at kappa = dD = 0 has phase zero: H contains omega*n, not
/// omega*(n + 1/2), and E_s is dropped.
enum class PhaseConvention { normal_ordered };

struct PropagationResult {
    SpinSectorState state;
    PhaseConvention global_phase_convention = PhaseConvention::normal_ordered;
    Method method = Method::oracle;
    double leakage = 0.0;
};

/// Closed-form evolution by `duration`. Every nonzero sector must carry a
/// coherent expansion; each term evolves as
///   |beta> -> exp(i theta) |delta + (beta - delta) e^{-it}>,
///   delta = 2*kappa*s,
///   theta = -dD s^2 t + delta^2 t + Im[delta (beta - delta)(1 - e^{-it})],
/// followed by the H2 phase exp(-i h2_rate t). Throws UnsupportedStateError
/// otherwise.
PropagationResult evolve_analytic(const SpinSectorState& state, const DimensionlessParams& d,
                                  double duration);

/// Numerical propagator for all three sectors built from the Hermitian
/// eigendecomposition of each H1 block. Reusable across many states/times.
class OraclePropagator {
public:
    enum class Frame { shifted, unshifted };

    explicit OraclePropagator(const DimensionlessParams& d, Frame frame = Frame::shifted);

    /// A state expanded in each sector's eigenbasis, so that evolving it to
    /// many times costs one matrix-vector product per sector and time.
    struct Spectral {
        SpinSectorState initial;
        std::array<Vector, 3> coefficients;
    };

    Spectral decompose(const SpinSectorState& state) const;
    PropagationResult evolve(const Spectral& spectral, double duration) const;

    /// Evolves by `duration`. Throws TruncationError when the edge population
    /// of any evolved sector exceeds kLeakageError.
    PropagationResult evolve(const SpinSectorState& state, double duration) const;

    /// Single-sector evolution without the leakage check.
    Vector evolve_sector(int s, const Vector& v, double duration) const;

    const SectorHamiltonian& hamiltonian(int s) const { return blocks_[spin_index(s)].h; }
    const DimensionlessParams& params() const { return params_; }

private:
    struct Block {
        SectorHamiltonian h;
        Eigen::VectorXd energies;
        Matrix vectors;
    };
    DimensionlessParams params_;
    std::array<Block, 3> blocks_;
};

PropagationResult evolve_oracle(const SpinSectorState& state, const DimensionlessParams& d,
                                double duration);

/// Oracle evolution in the lab frame. `state` must already be in the lab
/// frame (see to_unshifted_frame).
PropagationResult evolve_unshifted_oracle(const SpinSectorState& state,
                                          const DimensionlessParams& d, double duration);

/// Maps a shifted-frame state to the lab frame by applying D(-u0/2) to every
/// sector: quadrature means move by -u0, i.e. z = z_shifted - z0.
SpinSectorState to_unshifted_frame(const SpinSectorState& state, double u0);

/// Operator norm of [H1, H2] assembled over the full spin x Fock space.
double commutator_check(const DimensionlessParams& d);

/// <v|H1 block|v> / <v|v> for sector s (nullopt for an empty sector).
std::optional<double> sector_energy(const SpinSectorState& state, const DimensionlessParams& d,
                                    int s);

}  // namespace nvcom
