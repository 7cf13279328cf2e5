#include "nvcom/fockspace.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "nvcom/errors.hpp"
#include "nvcom/log.hpp"
#include "nvcom/params.hpp"

namespace nvcom {

namespace {

void require_cutoff(std::size_t n_cutoff) {
    if (n_cutoff < 2) throw ValidationError("n_cutoff", "must be >= 2");
}

/// Truncated, unnormalized coherent amplitudes evaluated in log space.
Vector raw_coherent(cplx alpha, std::size_t n_cutoff) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n_cutoff));
    const double mag = std::abs(alpha);
    if (mag == 0.0) {
        v(0) = 1.0;
        return v;
    }
    const double log_mag = std::log(mag);
    const double arg = std::arg(alpha);
    const double half_mag2 = 0.5 * mag * mag;
    for (std::size_t n = 0; n < n_cutoff; ++n) {
        const double dn = static_cast<double>(n);
        const double log_amp = -half_mag2 + dn * log_mag - 0.5 * std::lgamma(dn + 1.0);
        v(static_cast<Eigen::Index>(n)) = std::polar(std::exp(log_amp), dn * arg);
    }
    return v;
}

void check_leakage(double leakage, const char* origin) {
    if (leakage > kLeakageError) {
        std::ostringstream msg;
        msg << origin << ": truncation leakage " << leakage << " exceeds " << kLeakageError
            << "; increase n_cutoff";
        throw TruncationError(leakage, msg.str());
    }
    if (leakage > kLeakageWarn) {
        std::ostringstream msg;
        msg << origin << ": truncation leakage " << leakage;
        log::warn(msg.str());
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

double CoherentExpansion::norm_squared() const {
    cplx total = 0.0;
    for (const auto& a : terms) {
        for (const auto& b : terms) {
            // <beta_a|beta_b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
            const cplx overlap = std::exp(-0.5 * std::norm(a.beta) - 0.5 * std::norm(b.beta) +
                                          std::conj(a.beta) * b.beta);
            total += std::conj(a.weight) * b.weight * overlap;
        }
    }
    return std::max(0.0, total.real());
}

double SpinSectorState::norm_squared() const {
    double total = 0.0;
    for (const auto& s : sectors) total += s.norm_squared();
    return total;
}

LadderSet ladder_matrices(std::size_t n_cutoff) {
    require_cutoff(n_cutoff);
    const auto n = static_cast<Eigen::Index>(n_cutoff);
    Matrix lowering = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) lowering(k - 1, k) = std::sqrt(static_cast<double>(k));
    Matrix raising = lowering.adjoint();
    Matrix number = raising * lowering;
    Matrix quadrature = lowering + raising;
    return LadderSet{{OperatorRole::lowering, std::move(lowering)},
                     {OperatorRole::raising, std::move(raising)},
                     {OperatorRole::number, std::move(number)},
                     {OperatorRole::quadrature, std::move(quadrature)}};
}

FockVector materialize(const CoherentExpansion& expansion, std::size_t n_cutoff) {
    require_cutoff(n_cutoff);
    FockVector out;
    out.amplitudes = Vector::Zero(static_cast<Eigen::Index>(n_cutoff));
    out.coherent = expansion;
    for (const auto& term : expansion.terms) {
        if (term.weight == 0.0) continue;
        out.amplitudes += term.weight * raw_coherent(term.beta, n_cutoff);
    }
    const double exact = expansion.norm_squared();
    const double kept = out.amplitudes.squaredNorm();
    if (exact > 0.0) {
        if (kept > 0.0) {
            out.leakage = std::max(0.0, 1.0 - kept / exact);
            out.amplitudes *= std::sqrt(exact / kept);
        } else {
            out.leakage = 1.0;
        }
    }
    check_leakage(out.leakage, "materialize");
    return out;
}

FockVector coherent_vector(cplx alpha, std::size_t n_cutoff) {
    require_cutoff(n_cutoff);
    if (std::norm(alpha) > static_cast<double>(n_cutoff) / 4.0) {
        std::ostringstream msg;
        msg << "coherent_vector: |alpha|^2 = " << std::norm(alpha) << " exceeds n_cutoff/4 = "
            << static_cast<double>(n_cutoff) / 4.0;
        log::warn(msg.str());
    }
    return materialize(CoherentExpansion{{{1.0, alpha}}}, n_cutoff);
}

FockVector fock_vector(std::size_t n, std::size_t n_cutoff) {
    require_cutoff(n_cutoff);
    if (n >= n_cutoff) throw ValidationError("fock_n", "must be below n_cutoff");
    FockVector out;
    out.amplitudes = Vector::Zero(static_cast<Eigen::Index>(n_cutoff));
    out.amplitudes(static_cast<Eigen::Index>(n)) = 1.0;
    out.leakage = edge_population(out.amplitudes);
    check_leakage(out.leakage, "fock_vector");
    return out;
}

double edge_population(const Vector& v) {
    const double total = v.squaredNorm();
    if (total == 0.0) return 0.0;
    return std::norm(v(v.size() - 1)) / total;
}

FockVector displace(const FockVector& v, cplx alpha) {
    const std::size_t n_cutoff = v.size();
    if (v.coherent) {
        CoherentExpansion shifted;
        for (const auto& term : v.coherent->terms) {
            // D(a)|b> = exp(i Im(a conj(b))) |a + b>
            const double phase = std::imag(alpha * std::conj(term.beta));
            shifted.terms.push_back({term.weight * std::polar(1.0, phase), alpha + term.beta});
        }
        return materialize(shifted, n_cutoff);
    }

    const double mag = std::abs(alpha);
    const auto pad = static_cast<std::size_t>(32.0 + std::ceil(4.0 * mag * mag + 8.0 * mag));
    const std::size_t dim = n_cutoff + pad;
    const LadderSet ops = ladder_matrices(dim);
    // D(a) = exp(-i G) with Hermitian G = i (a c^dag - conj(a) c).
    const Matrix generator =
        cplx(0.0, 1.0) * (alpha * ops.raising.matrix - std::conj(alpha) * ops.lowering.matrix);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(generator);
    const auto d = static_cast<Eigen::Index>(dim);
    Vector padded = Vector::Zero(d);
    padded.head(v.amplitudes.size()) = v.amplitudes;
    Vector coeffs = eig.eigenvectors().adjoint() * padded;
    for (Eigen::Index k = 0; k < d; ++k) coeffs(k) *= std::polar(1.0, -eig.eigenvalues()(k));
    const Vector moved = eig.eigenvectors() * coeffs;

    FockVector out;
    out.amplitudes = moved.head(v.amplitudes.size());
    const double total = moved.squaredNorm();
    const double lost = total > 0.0 ? 1.0 - out.amplitudes.squaredNorm() / total : 0.0;
    out.leakage = std::max({0.0, lost, edge_population(out.amplitudes)});
    check_leakage(out.leakage, "displace");
    return out;
}

std::array<cplx, 3> symmetric_spin_weights() {
    const double r = 1.0 / std::sqrt(2.0);
    return {cplx(r), cplx(0.0), cplx(r)};
}

SpinSectorState initial_state(const FockVector& psi0, const std::array<cplx, 3>& spin_weights) {
    const double psi_norm = psi0.norm_squared();
    if (!(psi_norm > 0.0)) throw NormError("initial_state: oscillator vector has zero norm");
    double w_norm = 0.0;
    for (const cplx& w : spin_weights) w_norm += std::norm(w);
    if (!(w_norm > 0.0)) throw NormError("initial_state: spin weights have zero norm");
    if (std::abs(psi_norm - 1.0) > 1e-8 || std::abs(w_norm - 1.0) > 1e-8) {
        throw NormError("initial_state: oscillator vector and spin weights must be normalized");
    }

    SpinSectorState state;
    for (std::size_t k = 0; k < 3; ++k) {
        FockVector& sector = state.sectors[k];
        const cplx w = spin_weights[k];
        sector.amplitudes = w * psi0.amplitudes;
        sector.leakage = psi0.leakage;
        if (psi0.coherent) {
            CoherentExpansion scaled;
            if (w != 0.0) {
                for (const auto& term : psi0.coherent->terms) {
                    scaled.terms.push_back({w * term.weight, term.beta});
                }
            }
            sector.coherent = std::move(scaled);
        } else if (w == 0.0) {
            sector.coherent = CoherentExpansion{};
        }
    }
    return state;
}

cplx thermal_label(double n_bar, std::uint64_t seed, std::uint64_t index) {
    if (n_bar == 0.0) return {0.0, 0.0};
    std::mt19937_64 engine(splitmix64(seed ^ splitmix64(index)));
    const double u1 = unit_uniform(engine);
    const double u2 = unit_uniform(engine);
    const double radius = std::sqrt(-n_bar * std::log1p(-u1));
    return std::polar(radius, kTwoPi * u2);
}

std::vector<cplx> sample_thermal_labels(double n_bar, std::size_t count, std::uint64_t seed) {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw ValidationError("n_bar", "must be >= 0");
    if (count < 1) throw ValidationError("count", "must be >= 1");
    std::vector<cplx> labels(count);
    for (std::size_t k = 0; k < count; ++k) labels[k] = thermal_label(n_bar, seed, k);
    return labels;
}

}  // namespace nvcom
