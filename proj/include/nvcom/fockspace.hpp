#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace nvcom {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Truncation leakage above this is logged as a warning.
inline constexpr double kLeakageWarn = 1e-8;
/// Truncation leakage above this aborts the producing operation.
inline constexpr double kLeakageError = 1e-4;

/// Spin projections in storage order. Index 0 is s=+1, 1 is s=0, 2 is s=-1,
/// matching the row/column order of SpinDensity.
inline constexpr std::array<int, 3> kSpins = {+1, 0, -1};

constexpr std::size_t spin_index(int s) { return static_cast<std::size_t>(1 - s); }

struct CoherentTerm {
    cplx weight;
    cplx beta;
};

/// Finite superposition sum_k weight_k |beta_k> of normalized coherent states.
/// An empty expansion is the zero vector.
struct CoherentExpansion {
    std::vector<CoherentTerm> terms;

    /// Exact squared norm from the coherent-state overlap formula (no truncation).
    double norm_squared() const;
};

/// Oscillator amplitudes in the truncated number basis.
///
/// `leakage` is the truncation diagnostic recorded by whatever produced the
/// vector. `coherent` is set when the vector is known in closed form as a
/// coherent superposition, which is what the analytic propagator consumes.
struct FockVector {
    Vector amplitudes;
    double leakage = 0.0;
    std::optional<CoherentExpansion> coherent;

    std::size_t size() const { return static_cast<std::size_t>(amplitudes.size()); }
    double norm_squared() const { return amplitudes.squaredNorm(); }
};

/// Spin-1 x oscillator state stored as one unnormalized oscillator vector per
/// spin projection. The Hamiltonian commutes with S_z, so sectors never mix.
struct SpinSectorState {
    std::array<FockVector, 3> sectors;
    double time = 0.0;

    FockVector& sector(int s) { return sectors[spin_index(s)]; }
    const FockVector& sector(int s) const { return sectors[spin_index(s)]; }
    double norm_squared() const;
    std::size_t n_cutoff() const { return sectors[0].size(); }
};

enum class OperatorRole { lowering, raising, number, quadrature, hamiltonian_sector };

struct OperatorMatrix {
    OperatorRole role;
    Matrix matrix;
};

struct LadderSet {
    OperatorMatrix lowering;
    OperatorMatrix raising;
    OperatorMatrix number;
    OperatorMatrix quadrature;  // lowering + raising, i.e. z / z_zpf
};

LadderSet ladder_matrices(std::size_t n_cutoff);

/// Truncated coherent state e^{-|a|^2/2} a^n / sqrt(n!), renormalized.
/// `leakage` is the exact weight beyond the cutoff. Throws TruncationError
/// above kLeakageError.
FockVector coherent_vector(cplx alpha, std::size_t n_cutoff);

/// Number state |n>.
FockVector fock_vector(std::size_t n, std::size_t n_cutoff);

/// Renders a coherent expansion into the truncated basis. Amplitudes are
/// rescaled to the exact expansion norm; leakage is the relative weight lost.
FockVector materialize(const CoherentExpansion& expansion, std::size_t n_cutoff);

/// Weight in the highest retained number state relative to the total: the
/// leakage proxy for vectors with no closed form.
double edge_population(const Vector& v);

/// Applies the displacement operator D(alpha). Coherent expansions are
/// displaced in closed form; other vectors are displaced numerically in a
/// padded basis and truncated back, with the lost weight reported as leakage.
FockVector displace(const FockVector& v, cplx alpha);

/// Default spin weights (+1, 0, -1) = (1, 0, 1)/sqrt(2).
std::array<cplx, 3> symmetric_spin_weights();

/// sectors[s] = spin_weights[s] * psi0. Throws NormError for zero-norm inputs.
SpinSectorState initial_state(const FockVector& psi0,
                              const std::array<cplx, 3>& spin_weights = symmetric_spin_weights());

/// Coherent labels drawn from the circular complex Gaussian with E|alpha|^2 = n_bar.
///
/// Label k uses its own stream: a std::mt19937_64 seeded with
/// splitmix64(seed ^ splitmix64(k)). Two uniforms u1, u2 are formed from the
/// top 53 bits of consecutive draws, and alpha = sqrt(-n_bar ln(1-u1)) e^{2 pi i u2}
/// (Box-Muller in polar form). The sequence is therefore identical across
/// platforms and independent of how labels are partitioned across threads.
std::vector<cplx> sample_thermal_labels(double n_bar, std::size_t count, std::uint64_t seed);

/// Single label `index` of the stream above.
cplx thermal_label(double n_bar, std::uint64_t seed, std::uint64_t index);

}  // namespace nvcom
