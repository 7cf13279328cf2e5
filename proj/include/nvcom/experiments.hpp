#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nvcom/fockspace.hpp"
#include "nvcom/observables.hpp"
#include "nvcom/params.hpp"
#include "nvcom/propagators.hpp"

namespace nvcom {

namespace initial {
struct Vacuum {};
struct Coherent {
    cplx alpha;
};
struct Fock {
    std::size_t n = 0;
};
struct Thermal {
    double n_bar = 0.0;
    std::size_t count = 1000;
    std::uint64_t seed = 42;
};
}  // namespace initial

using InitialSpec =
    std::variant<initial::Vacuum, initial::Coherent, initial::Fock, initial::Thermal>;

std::string describe(const InitialSpec& spec);

enum class MethodChoice { analytic, oracle, both };
enum class OffsetMode { none, cancel };
enum class Frame { shifted, unshifted };

struct ProtocolConfig {
    DimensionlessParams params;
    long n_periods = 1;
    int samples_per_period = 32;
    InitialSpec initial = initial::Vacuum{};
    MethodChoice method = MethodChoice::oracle;
    OffsetMode offset = OffsetMode::none;
    Frame frame = Frame::shifted;
    std::array<cplx, 3> spin_weights = symmetric_spin_weights();
};

/// Throws ValidationError for out-of-range settings.
void validate(const ProtocolConfig& cfg);

/// Parameters actually evolved: `cfg.params` with u_offset set by the offset mode.
DimensionlessParams effective_params(const ProtocolConfig& cfg);

struct TimeRow {
    double t = 0.0;
    SpinDensity rho;
    double coherence_mag = 0.0;
    /// arg rho_{+1,-1}(t) - arg rho_{+1,-1}(0) in (-pi, pi]; NaN when the
    /// coherence is below kMinCoherence.
    double coherence_phase = 0.0;
    double purity = 1.0;
    double entropy = 0.0;
    /// Quadrature means <c + c^dag>_s in the frame the run was evolved in.
    std::array<std::optional<double>, 3> quadrature;
    /// Same, expressed in the lab frame (shifted-frame value minus u0).
    std::array<std::optional<double>, 3> lab_quadrature;
    /// arg <v_s(0)|v_s(t)> (ensemble-averaged overlap for thermal runs).
    std::array<std::optional<double>, 3> sector_phase;
    /// |<v_s(0)|v_s(t)>| / ||v_s(0)||^2.
    std::array<std::optional<double>, 3> sector_fidelity;
    /// |<psi_analytic|psi_oracle>|^2, minimum over samples; only for method=both.
    std::optional<double> fidelity_analytic_oracle;
};

/// Formula-vs-measured comparison at t = 2*pi*N.
struct ProtocolSummary {
    PhaseFormulas formulas;           // eta and phi over N periods, no offset
    double phi_expected = 0.0;        // N-period +1/-1 phase including the offset
    double coherence_shift = 0.0;     // measured, wrapped
    double total_phase_measured = 0.0;  // minus the coherence phase, unwrapped along the series
    double phi_measured = 0.0;        // total_phase_measured / N
    long winding_measured = 0;
    long winding_formula = 0;
    /// Largest phase step between consecutive samples. A coherence that passes
    /// through zero (e.g. Fock inputs) flips sign between samples, and the
    /// winding is then not recoverable from the series.
    double unwrap_max_step = 0.0;
    bool winding_reliable = true;
    double phi_residual = 0.0;        // |wrap(coherence_shift + phi_expected)|
    std::array<std::optional<double>, 3> sector_phase_residual;
    double eta_residual = 0.0;        // max over populated sectors
    double min_return_fidelity = 1.0;
    double purity_min = 1.0;
    double max_entropy_at_periods = 0.0;
    double coherence_mag_at_periods_min = 0.0;
    double coherence_mag_at_periods_max = 0.0;
    std::optional<double> min_fidelity_analytic_oracle;
    std::size_t ensemble_size = 1;
};

struct TimeSeries {
    ProtocolConfig config;
    DimensionlessParams evolved_params;
    std::vector<TimeRow> rows;
    ProtocolSummary summary;

    /// Rows at t = 2*pi*k for k = 1..N.
    std::vector<const TimeRow*> period_rows() const;
};

/// Sample times: N*M + 1 points, t = 2*pi*q + 2*pi*r/M, so integer periods
/// land exactly on 2*pi*q.
std::vector<double> sample_times(long n_periods, int samples_per_period);

/// Evolves the initial state and records observables at every sample time.
/// Thermal initial specs are delegated to run_thermal. Failures are rethrown
/// as ProtocolError carrying the sample index.
TimeSeries run_protocol(const ProtocolConfig& cfg);

/// Ensemble average over seeded coherent labels. The spin density, sector
/// overlaps and positions are averaged over samples before observables are
/// formed. Throws TruncationError up front when n_cutoff is too small for
/// the requested n_bar (see thermal_cutoff_requirement).
TimeSeries run_thermal(const ProtocolConfig& cfg);

/// Smallest n_cutoff accepted for a thermal ensemble: with R the largest
/// expected |alpha(t)| (sqrt(n_bar (ln count + 1)) plus the orbit excursion
/// 4*kappa), require R^2 + 6R + 10.
std::size_t thermal_cutoff_requirement(double n_bar, std::size_t count, double kappa);

/// Pass/fail thresholds for verify_comment, gathered in one place.
struct VerdictTolerances {
    double return_fidelity = 1e-8;
    double phi = 1e-8;
    double eta = 1e-8;
    double cancellation = 1e-10;
    double entropy = 1e-7;
    double frame = 1e-8;
    double linearity = 1e-8;
};

enum class ClaimStatus { pass, fail, unverifiable };

struct ClaimCheck {
    char id = '?';
    std::string claim;
    ClaimStatus status = ClaimStatus::unverifiable;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Verdict {
    std::vector<ClaimCheck> checks;

    bool all_pass() const;
    /// 0 when all pass, 1 when any check fails, 4 when none fail but some are unverifiable.
    int exit_code() const;
};

struct VerifyOptions {
    VerdictTolerances tolerances;
    /// Negative control: compares the measured phase against +N*phi instead of -N*phi.
    bool mis_signed_phi = false;
};

/// Desk-scale reference configuration: kappa=0.1, u0=1, dD=0.3, n_cutoff=64, N=2.
ProtocolConfig desk_scale_config();

/// Runs the claim battery:
///   a  [H1, H2] = 0
///   b  integer-period return fidelity
///   c  phi residual
///   d  eta residual (per-sector return phases)
///   e  the cancelling offset nulls the integer-period phase
///   f  entropy at integer periods
///   g  shifted vs. unshifted frame agree on spin observables; positions differ by z0
///   h  doubling u0 doubles the measured phi
/// A check whose run throws is marked unverifiable.
Verdict verify_comment(const ProtocolConfig& cfg, const VerifyOptions& options = {});

enum class SweepAxis { kappa, u0, dD, n_bar, n_periods, theta };

/// Accepts kappa, u0, dD, n_bar, N_periods, theta. Throws ValidationError otherwise.
SweepAxis parse_axis(std::string_view name);
std::string_view axis_name(SweepAxis axis);

struct SweepRow {
    double value = 0.0;
    long n_periods = 1;
    double phi_formula = 0.0;   // per period
    double phi_measured = 0.0;  // per period
    double total_phase_measured = 0.0;
    double phi_residual = 0.0;
    double purity_min = 1.0;
};

/// One protocol run per value, in input order. For the theta axis, cfg.params.u0
/// is taken as the vertical (theta = 0) value and scaled by cos(theta). The
/// n_bar axis uses cfg's thermal count/seed when cfg is thermal, otherwise
/// 200 samples with seed 42.
std::vector<SweepRow> sweep(const ProtocolConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values);

}  // namespace nvcom
