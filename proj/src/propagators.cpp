#include "nvcom/propagators.hpp"

#include <cmath>
#include <sstream>

#include "nvcom/errors.hpp"
#include "nvcom/log.hpp"

namespace nvcom {

namespace {

SectorHamiltonian assemble(int s, const DimensionlessParams& d, double linear_potential,
                           double h2_rate) {
    validate(d);
    const LadderSet ops = ladder_matrices(d.n_cutoff);
    const double ds = static_cast<double>(s);
    SectorHamiltonian h;
    h.s = s;
    h.matrix.role = OperatorRole::hamiltonian_sector;
    h.matrix.matrix = ops.number.matrix - (2.0 * d.kappa * ds) * ops.quadrature.matrix;
    if (linear_potential != 0.0) h.matrix.matrix += linear_potential * ops.quadrature.matrix;
    h.splitting = d.dD * ds * ds;
    h.h2_rate = h2_rate;
    return h;
}

void check_sizes(const SpinSectorState& state, const DimensionlessParams& d) {
    for (const auto& sector : state.sectors) {
        if (sector.size() != d.n_cutoff) {
            throw ValidationError("n_cutoff", "state dimension does not match parameters");
        }
    }
}

}  // namespace

Matrix SectorHamiltonian::h1_block() const {
    Matrix full = matrix.matrix;
    full.diagonal().array() += splitting;
    return full;
}

SectorHamiltonian sector_hamiltonian(int s, const DimensionlessParams& d) {
    const double ds = static_cast<double>(s);
    return assemble(s, d, 0.0, (2.0 * d.kappa * d.u0) * ds + d.u_offset * ds);
}

SectorHamiltonian unshifted_sector_hamiltonian(int s, const DimensionlessParams& d) {
    return assemble(s, d, 0.5 * d.u0, d.u_offset * static_cast<double>(s));
}

PropagationResult evolve_analytic(const SpinSectorState& state, const DimensionlessParams& d,
                                  double duration) {
    validate(d);
    check_sizes(state, d);
    const cplx rotation = std::polar(1.0, -duration);
    PropagationResult result;
    result.method = Method::analytic;
    result.state.time = state.time + duration;
    for (int s : kSpins) {
        const FockVector& in = state.sector(s);
        if (!in.coherent) {
            if (in.norm_squared() == 0.0) {
                result.state.sector(s) = materialize(CoherentExpansion{}, d.n_cutoff);
                continue;
            }
            throw UnsupportedStateError(
                "evolve_analytic: sector s=" + std::to_string(s) +
                " has no coherent-state expansion; use the matrix-exponential oracle");
        }
        const SectorHamiltonian h = sector_hamiltonian(s, d);
        const double ds = static_cast<double>(s);
        const double delta = 2.0 * d.kappa * ds;
        CoherentExpansion out;
        for (const auto& term : in.coherent->terms) {
            const cplx offset = term.beta - delta;
            const double theta = -h.splitting * duration + delta * delta * duration +
                                 std::imag(delta * offset * (1.0 - rotation));
            const double total = theta - h.h2_rate * duration;
            out.terms.push_back({term.weight * std::polar(1.0, total), delta + offset * rotation});
        }
        result.state.sector(s) = materialize(out, d.n_cutoff);
        result.leakage = std::max(result.leakage, result.state.sector(s).leakage);
    }
    return result;
}

OraclePropagator::OraclePropagator(const DimensionlessParams& d, Frame frame) : params_(d) {
    validate(d);
    for (int s : kSpins) {
        Block& b = blocks_[spin_index(s)];
        b.h = frame == Frame::shifted ? sector_hamiltonian(s, d) : unshifted_sector_hamiltonian(s, d);
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(b.h.matrix.matrix);
        if (eig.info() != Eigen::Success) throw Error("OraclePropagator: eigendecomposition failed");
        b.energies = eig.eigenvalues();
        b.vectors = eig.eigenvectors();
    }
}

Vector OraclePropagator::evolve_sector(int s, const Vector& v, double duration) const {
    const Block& b = blocks_[spin_index(s)];
    Vector coeffs = b.vectors.adjoint() * v;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        coeffs(k) *= std::polar(1.0, -b.energies(k) * duration);
    }
    const cplx scalar = std::polar(1.0, -(b.h.splitting + b.h.h2_rate) * duration);
    return scalar * (b.vectors * coeffs);
}

OraclePropagator::Spectral OraclePropagator::decompose(const SpinSectorState& state) const {
    check_sizes(state, params_);
    Spectral out;
    out.initial = state;
    for (int s : kSpins) {
        const Vector& v = state.sector(s).amplitudes;
        const std::size_t k = spin_index(s);
        out.coefficients[k] = v.squaredNorm() == 0.0 ? Vector() : Vector(blocks_[k].vectors.adjoint() * v);
    }
    return out;
}

PropagationResult OraclePropagator::evolve(const SpinSectorState& state, double duration) const {
    return evolve(decompose(state), duration);
}

PropagationResult OraclePropagator::evolve(const Spectral& spectral, double duration) const {
    PropagationResult result;
    result.method = Method::oracle;
    result.state.time = spectral.initial.time + duration;
    for (int s : kSpins) {
        const std::size_t k = spin_index(s);
        const FockVector& in = spectral.initial.sectors[k];
        FockVector& out = result.state.sectors[k];
        if (spectral.coefficients[k].size() == 0) {
            out.amplitudes = Vector::Zero(in.amplitudes.size());
            out.coherent = CoherentExpansion{};
            continue;
        }
        const Block& b = blocks_[k];
        Vector coeffs = spectral.coefficients[k];
        for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
            coeffs(j) *= std::polar(1.0, -b.energies(j) * duration);
        }
        const cplx scalar = std::polar(1.0, -(b.h.splitting + b.h.h2_rate) * duration);
        out.amplitudes.noalias() = b.vectors * coeffs;
        out.amplitudes *= scalar;
        out.leakage = std::max(in.leakage, edge_population(out.amplitudes));
        result.leakage = std::max(result.leakage, out.leakage);
    }
    if (result.leakage > kLeakageError) {
        std::ostringstream msg;
        msg << "oracle propagation to t=" << result.state.time << ": edge population "
            << result.leakage << " exceeds " << kLeakageError << "; increase n_cutoff";
        throw TruncationError(result.leakage, msg.str());
    }
    if (result.leakage > kLeakageWarn) {
        std::ostringstream msg;
        msg << "oracle propagation: edge population " << result.leakage;
        log::warn(msg.str());
    }
    return result;
}

PropagationResult evolve_oracle(const SpinSectorState& state, const DimensionlessParams& d,
                                double duration) {
    return OraclePropagator(d).evolve(state, duration);
}

PropagationResult evolve_unshifted_oracle(const SpinSectorState& state,
                                          const DimensionlessParams& d, double duration) {
    return OraclePropagator(d, OraclePropagator::Frame::unshifted).evolve(state, duration);
}

SpinSectorState to_unshifted_frame(const SpinSectorState& state, double u0) {
    SpinSectorState out;
    out.time = state.time;
    for (std::size_t k = 0; k < 3; ++k) {
        const FockVector& in = state.sectors[k];
        if (in.norm_squared() == 0.0) {
            out.sectors[k] = in;
            continue;
        }
        out.sectors[k] = displace(in, cplx(-0.5 * u0, 0.0));
    }
    return out;
}

double commutator_check(const DimensionlessParams& d) {
    validate(d);
    const auto n = static_cast<Eigen::Index>(d.n_cutoff);
    Matrix h1 = Matrix::Zero(3 * n, 3 * n);
    Matrix h2 = Matrix::Zero(3 * n, 3 * n);
    for (int s : kSpins) {
        const SectorHamiltonian h = sector_hamiltonian(s, d);
        const auto offset = static_cast<Eigen::Index>(spin_index(s)) * n;
        h1.block(offset, offset, n, n) = h.h1_block();
        h2.block(offset, offset, n, n).diagonal().setConstant(h.h2_rate);
    }
    const Matrix commutator = h1 * h2 - h2 * h1;
    if (commutator.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const Eigen::JacobiSVD<Matrix> svd(commutator);
    return svd.singularValues()(0);
}

std::optional<double> sector_energy(const SpinSectorState& state, const DimensionlessParams& d,
                                    int s) {
    const Vector& v = state.sector(s).amplitudes;
    const double norm = v.squaredNorm();
    if (norm == 0.0) return std::nullopt;
    const SectorHamiltonian h = sector_hamiltonian(s, d);
    return std::real(v.dot(h.h1_block() * v)) / norm;
}

}  // namespace nvcom
