#include "nvcom/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nvcom/errors.hpp"
#include "nvcom/log.hpp"

namespace nvcom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Running sums for one sample time, accumulated over ensemble members.
struct Accumulator {
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    std::array<cplx, 3> overlap{};
    std::array<double, 3> norm0{};
    std::array<double, 3> quad_weighted{};
    std::array<double, 3> quad_weight{};
    std::optional<double> fidelity;
    std::size_t members = 0;
};

std::string what_of(const std::exception_ptr& ptr) {
    try {
        std::rethrow_exception(ptr);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

SpinSectorState prepare_pure(const InitialSpec& spec, const ProtocolConfig& cfg) {
    const std::size_t n = cfg.params.n_cutoff;
    const FockVector psi0 = std::visit(
        [n](const auto& s) -> FockVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, initial::Vacuum>) {
                return coherent_vector(0.0, n);
            } else if constexpr (std::is_same_v<T, initial::Coherent>) {
                return coherent_vector(s.alpha, n);
            } else if constexpr (std::is_same_v<T, initial::Fock>) {
                return fock_vector(s.n, n);
            } else {
                throw ValidationError("initial", "thermal spec is not a pure state");
            }
        },
        spec);
    return initial_state(psi0, cfg.spin_weights);
}

/// Evolves one pure shifted-frame state through every sample time and adds
/// its observables into `acc`.
void accumulate_pure(const SpinSectorState& shifted_initial, const ProtocolConfig& cfg,
                     const DimensionlessParams& d, const std::vector<double>& times,
                     const OraclePropagator* oracle, std::vector<Accumulator>& acc) {
    const bool use_oracle = cfg.method != MethodChoice::analytic;
    const bool use_analytic = cfg.method != MethodChoice::oracle;
    const SpinSectorState initial = cfg.frame == Frame::unshifted
                                        ? to_unshifted_frame(shifted_initial, d.u0)
                                        : shifted_initial;
    std::optional<OraclePropagator::Spectral> spectral;
    if (use_oracle) spectral = oracle->decompose(initial);

    for (std::size_t k = 0; k < times.size(); ++k) {
        try {
            std::optional<PropagationResult> numeric;
            std::optional<PropagationResult> closed;
            if (use_oracle) numeric = oracle->evolve(*spectral, times[k]);
            if (use_analytic) closed = evolve_analytic(initial, d, times[k]);
            const SpinSectorState& state = numeric ? numeric->state : closed->state;

            Accumulator& a = acc[k];
            a.rho += reduce_spin(state).rho;
            const auto quads = sector_quadratures(state);
            for (std::size_t s = 0; s < 3; ++s) {
                const Vector& v0 = initial.sectors[s].amplitudes;
                const double n0 = v0.squaredNorm();
                if (n0 == 0.0) continue;
                a.overlap[s] += v0.dot(state.sectors[s].amplitudes);
                a.norm0[s] += n0;
                if (quads[s]) {
                    const double w = state.sectors[s].norm_squared();
                    a.quad_weighted[s] += w * *quads[s];
                    a.quad_weight[s] += w;
                }
            }
            if (numeric && closed) {
                cplx inner = 0.0;
                for (std::size_t s = 0; s < 3; ++s) {
                    inner += closed->state.sectors[s].amplitudes.dot(numeric->state.sectors[s].amplitudes);
                }
                const double fid = std::norm(inner);
                a.fidelity = a.fidelity ? std::min(*a.fidelity, fid) : fid;
            }
            ++a.members;
        } catch (const ProtocolError&) {
            throw;
        } catch (...) {
            const auto cause = std::current_exception();
            throw ProtocolError(k, cause, what_of(cause));
        }
    }
}

std::vector<TimeRow> finish_rows(const std::vector<Accumulator>& acc,
                                 const std::vector<double>& times, const ProtocolConfig& cfg,
                                 const DimensionlessParams& d) {
    std::vector<TimeRow> rows(acc.size());
    cplx reference = 0.0;
    for (std::size_t k = 0; k < acc.size(); ++k) {
        const Accumulator& a = acc[k];
        TimeRow& r = rows[k];
        r.t = times[k];
        r.rho.rho = a.rho / static_cast<double>(a.members);
        const EntanglementReport e = entanglement(r.rho);
        r.purity = e.purity;
        r.entropy = e.entropy;
        r.coherence_mag = e.coherence_mag;
        const cplx c = r.rho.coherence();
        if (k == 0) reference = c;
        if (std::abs(c) >= kMinCoherence && std::abs(reference) >= kMinCoherence) {
            r.coherence_phase = wrap_phase(std::arg(c) - std::arg(reference));
        } else {
            r.coherence_phase = kNaN;
        }
        for (std::size_t s = 0; s < 3; ++s) {
            if (a.norm0[s] > 0.0) {
                r.sector_phase[s] = std::arg(a.overlap[s]);
                r.sector_fidelity[s] = std::abs(a.overlap[s]) / a.norm0[s];
            }
            if (a.quad_weight[s] > 0.0) {
                const double q = a.quad_weighted[s] / a.quad_weight[s];
                r.quadrature[s] = q;
                r.lab_quadrature[s] = cfg.frame == Frame::shifted ? q - d.u0 : q;
            }
        }
        r.fidelity_analytic_oracle = a.fidelity;
    }
    return rows;
}

long winding_of(double total) {
    return std::lround((total - wrap_phase(total)) / kTwoPi);
}

ProtocolSummary summarize(const std::vector<TimeRow>& rows, const ProtocolConfig& cfg,
                          const DimensionlessParams& d) {
    const long n = cfg.n_periods;
    ProtocolSummary sum;
    sum.formulas = phase_formulas(cfg.params, n);
    sum.phi_expected = effective_phi(d, n);

    const TimeRow& last = rows.back();
    if (std::isnan(last.coherence_phase)) {
        throw ProtocolError(rows.size() - 1,
                            std::make_exception_ptr(PhaseUndefinedError("coherence below 1e-6")),
                            "final coherence too small to define a phase");
    }
    sum.coherence_shift = last.coherence_phase;

    double unwrapped = 0.0;
    double previous = 0.0;
    double max_step = 0.0;
    bool gap = false;
    for (const TimeRow& r : rows) {
        if (std::isnan(r.coherence_phase)) {
            gap = true;
            continue;
        }
        const double step = wrap_phase(r.coherence_phase - previous);
        max_step = std::max(max_step, std::abs(step));
        unwrapped += step;
        previous = r.coherence_phase;
    }
    sum.total_phase_measured = -unwrapped;
    sum.unwrap_max_step = max_step;
    sum.winding_reliable = !gap && max_step < kTwoPi / 4.0;
    sum.phi_measured = n > 0 ? sum.total_phase_measured / static_cast<double>(n) : 0.0;
    sum.winding_measured = winding_of(sum.total_phase_measured);
    sum.winding_formula = winding_of(sum.phi_expected);
    sum.phi_residual = std::abs(wrap_phase(sum.coherence_shift + sum.phi_expected));

    // Lab-frame evolution carries the dropped constant E_s = u0^2/4 as a common phase.
    const double constant_phase =
        cfg.frame == Frame::unshifted ? static_cast<double>(n) * kTwoPi * d.u0 * d.u0 / 4.0 : 0.0;
    sum.eta_residual = 0.0;
    for (int s : kSpins) {
        const std::size_t k = spin_index(s);
        if (!last.sector_phase[k]) continue;
        const double ds = static_cast<double>(s);
        const double expected =
            sum.formulas.eta * ds * ds - 0.5 * sum.phi_expected * ds + constant_phase;
        const double residual = std::abs(wrap_phase(*last.sector_phase[k] - expected));
        sum.sector_phase_residual[k] = residual;
        sum.eta_residual = std::max(sum.eta_residual, residual);
    }

    sum.min_return_fidelity = 1.0;
    sum.coherence_mag_at_periods_min = std::numeric_limits<double>::infinity();
    sum.coherence_mag_at_periods_max = 0.0;
    const int m = cfg.samples_per_period;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const TimeRow& r = rows[k];
        sum.purity_min = std::min(sum.purity_min, r.purity);
        if (r.fidelity_analytic_oracle) {
            sum.min_fidelity_analytic_oracle =
                std::min(sum.min_fidelity_analytic_oracle.value_or(1.0), *r.fidelity_analytic_oracle);
        }
        if (k == 0 || k % static_cast<std::size_t>(m) != 0) continue;
        sum.max_entropy_at_periods = std::max(sum.max_entropy_at_periods, r.entropy);
        sum.coherence_mag_at_periods_min = std::min(sum.coherence_mag_at_periods_min, r.coherence_mag);
        sum.coherence_mag_at_periods_max = std::max(sum.coherence_mag_at_periods_max, r.coherence_mag);
        for (const auto& f : r.sector_fidelity) {
            if (f) sum.min_return_fidelity = std::min(sum.min_return_fidelity, *f);
        }
    }
    return sum;
}

TimeSeries run_ensemble(const ProtocolConfig& cfg, const std::vector<SpinSectorState>& members) {
    TimeSeries out;
    out.config = cfg;
    out.evolved_params = effective_params(cfg);
    const DimensionlessParams& d = out.evolved_params;
    const std::vector<double> times = sample_times(cfg.n_periods, cfg.samples_per_period);

    std::optional<OraclePropagator> oracle;
    if (cfg.method != MethodChoice::analytic) {
        oracle.emplace(d, cfg.frame == Frame::shifted ? OraclePropagator::Frame::shifted
                                                      : OraclePropagator::Frame::unshifted);
    }
    std::vector<Accumulator> acc(times.size());
    for (const auto& member : members) {
        accumulate_pure(member, cfg, d, times, oracle ? &*oracle : nullptr, acc);
    }
    out.rows = finish_rows(acc, times, cfg, d);
    out.summary = summarize(out.rows, cfg, d);
    out.summary.ensemble_size = members.size();
    return out;
}

}  // namespace

std::string describe(const InitialSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, initial::Vacuum>) {
                os << "vacuum";
            } else if constexpr (std::is_same_v<T, initial::Coherent>) {
                os << "coherent(" << s.alpha.real() << (s.alpha.imag() < 0 ? "" : "+")
                   << s.alpha.imag() << "i)";
            } else if constexpr (std::is_same_v<T, initial::Fock>) {
                os << "fock(" << s.n << ")";
            } else {
                os << "thermal(n_bar=" << s.n_bar << ", count=" << s.count << ", seed=" << s.seed
                   << ")";
            }
        },
        spec);
    return os.str();
}

void validate(const ProtocolConfig& cfg) {
    validate(cfg.params);
    if (cfg.n_periods < 1) throw ValidationError("periods", "must be >= 1");
    if (cfg.samples_per_period < 8) throw ValidationError("samples", "must be >= 8");
    if (cfg.frame == Frame::unshifted && cfg.method != MethodChoice::oracle) {
        throw ValidationError("method", "the unshifted frame is only available with the oracle");
    }
    if (const auto* t = std::get_if<initial::Thermal>(&cfg.initial)) {
        if (!(t->n_bar >= 0.0) || !std::isfinite(t->n_bar)) {
            throw ValidationError("n_bar", "must be >= 0");
        }
        if (t->count < 1) throw ValidationError("count", "must be >= 1");
    }
    if (const auto* c = std::get_if<initial::Coherent>(&cfg.initial)) {
        if (!std::isfinite(c->alpha.real()) || !std::isfinite(c->alpha.imag())) {
            throw ValidationError("alpha", "must be finite");
        }
    }
}

DimensionlessParams effective_params(const ProtocolConfig& cfg) {
    DimensionlessParams d = cfg.params;
    if (cfg.offset == OffsetMode::cancel) d.u_offset = cancel_offset(d);
    return d;
}

std::vector<const TimeRow*> TimeSeries::period_rows() const {
    std::vector<const TimeRow*> out;
    const auto m = static_cast<std::size_t>(config.samples_per_period);
    for (std::size_t k = m; k < rows.size(); k += m) out.push_back(&rows[k]);
    return out;
}

std::vector<double> sample_times(long n_periods, int samples_per_period) {
    std::vector<double> times;
    const long m = samples_per_period;
    times.reserve(static_cast<std::size_t>(n_periods * m + 1));
    for (long k = 0; k <= n_periods * m; ++k) {
        const long q = k / m;
        const long r = k % m;
        times.push_back(kTwoPi * static_cast<double>(q) +
                        kTwoPi * static_cast<double>(r) / static_cast<double>(m));
    }
    return times;
}

TimeSeries run_protocol(const ProtocolConfig& cfg) {
    validate(cfg);
    if (std::holds_alternative<initial::Thermal>(cfg.initial)) return run_thermal(cfg);
    return run_ensemble(cfg, {prepare_pure(cfg.initial, cfg)});
}

std::size_t thermal_cutoff_requirement(double n_bar, std::size_t count, double kappa) {
    const double radius =
        std::sqrt(n_bar * (std::log(static_cast<double>(count)) + 1.0)) + 4.0 * std::abs(kappa);
    return static_cast<std::size_t>(std::ceil(radius * radius + 6.0 * radius + 10.0));
}

TimeSeries run_thermal(const ProtocolConfig& cfg) {
    validate(cfg);
    const auto* spec = std::get_if<initial::Thermal>(&cfg.initial);
    if (spec == nullptr) throw ValidationError("initial", "run_thermal needs a thermal spec");

    const std::size_t required = thermal_cutoff_requirement(spec->n_bar, spec->count, cfg.params.kappa);
    if (cfg.params.n_cutoff < required) {
        std::ostringstream msg;
        msg << "thermal ensemble with n_bar=" << spec->n_bar << " needs n_cutoff >= " << required
            << ", got " << cfg.params.n_cutoff;
        throw TruncationError(1.0, msg.str());
    }

    // Every label is zero when n_bar = 0, so one member is the exact average.
    const std::size_t count = spec->n_bar == 0.0 ? 1 : spec->count;
    const auto labels = sample_thermal_labels(spec->n_bar, count, spec->seed);
    std::vector<SpinSectorState> members;
    members.reserve(count);
    for (const cplx& alpha : labels) {
        members.push_back(initial_state(coherent_vector(alpha, cfg.params.n_cutoff), cfg.spin_weights));
    }
    TimeSeries out = run_ensemble(cfg, members);
    out.summary.ensemble_size = count;
    return out;
}

bool Verdict::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ClaimCheck& c) { return c.status == ClaimStatus::pass; });
}

int Verdict::exit_code() const {
    bool unverifiable = false;
    for (const auto& c : checks) {
        if (c.status == ClaimStatus::fail) return 1;
        if (c.status == ClaimStatus::unverifiable) unverifiable = true;
    }
    return unverifiable ? 4 : 0;
}

ProtocolConfig desk_scale_config() {
    ProtocolConfig cfg;
    cfg.params.kappa = 0.1;
    cfg.params.u0 = 1.0;
    cfg.params.dD = 0.3;
    cfg.params.n_cutoff = 64;
    cfg.n_periods = 2;
    cfg.samples_per_period = 32;
    cfg.method = MethodChoice::oracle;
    return cfg;
}

namespace {

template <class F>
ClaimCheck run_check(char id, std::string claim, double tolerance, F&& body) {
    ClaimCheck c;
    c.id = id;
    c.claim = std::move(claim);
    c.tolerance = tolerance;
    try {
        body(c);
    } catch (const std::exception& e) {
        c.status = ClaimStatus::unverifiable;
        c.detail = e.what();
    }
    return c;
}

void grade(ClaimCheck& c, double value, bool ok, std::string detail = {}) {
    c.value = value;
    c.status = ok ? ClaimStatus::pass : ClaimStatus::fail;
    c.detail = std::move(detail);
}

}  // namespace

Verdict verify_comment(const ProtocolConfig& cfg, const VerifyOptions& options) {
    const VerdictTolerances& tol = options.tolerances;
    Verdict v;

    // Runs shared by several checks are evaluated lazily so one failure only
    // marks the checks that depend on it.
    std::optional<TimeSeries> base;
    std::exception_ptr base_error;
    auto base_run = [&]() -> const TimeSeries& {
        if (base_error) std::rethrow_exception(base_error);
        if (!base) {
            try {
                base = run_protocol(cfg);
            } catch (...) {
                base_error = std::current_exception();
                throw;
            }
        }
        return *base;
    };

    v.checks.push_back(run_check('a', "H1 and H2 commute", 0.0, [&](ClaimCheck& c) {
        const double norm = commutator_check(effective_params(cfg));
        grade(c, norm, norm == 0.0);
    }));

    v.checks.push_back(run_check('b', "state returns after integer periods", tol.return_fidelity,
                                 [&](ClaimCheck& c) {
        std::vector<InitialSpec> specs = {cfg.initial, initial::Vacuum{},
                                          initial::Coherent{{1.0, 1.0}}, initial::Fock{3}};
        double worst = 0.0;
        std::string detail;
        for (const auto& spec : specs) {
            ProtocolConfig run = cfg;
            run.initial = spec;
            // Number states have no coherent expansion.
            if (std::holds_alternative<initial::Fock>(spec)) run.method = MethodChoice::oracle;
            const TimeSeries ts = run_protocol(run);
            const double deficit = 1.0 - ts.summary.min_return_fidelity;
            if (deficit >= worst) {
                worst = deficit;
                detail = "worst initial state: " + describe(spec);
            }
        }
        grade(c, worst, worst <= tol.return_fidelity, detail);
    }));

    v.checks.push_back(run_check('c', "spin phase after N periods is -N*phi", tol.phi, [&](ClaimCheck& c) {
        const TimeSeries& ts = base_run();
        const double expected = options.mis_signed_phi ? ts.summary.phi_expected : -ts.summary.phi_expected;
        const double residual = std::abs(wrap_phase(ts.summary.coherence_shift - expected));
        grade(c, residual, residual <= tol.phi);
    }));

    v.checks.push_back(run_check('d', "sector phases are N*eta*s^2 - N*phi*s/2", tol.eta, [&](ClaimCheck& c) {
        const TimeSeries& ts = base_run();
        grade(c, ts.summary.eta_residual, ts.summary.eta_residual <= tol.eta);
    }));

    v.checks.push_back(run_check('e', "uniform field cancels the phase", tol.cancellation, [&](ClaimCheck& c) {
        ProtocolConfig run = cfg;
        run.offset = OffsetMode::cancel;
        const TimeSeries ts = run_protocol(run);
        double worst = 0.0;
        for (const TimeRow* r : ts.period_rows()) {
            worst = std::max(worst, std::abs(r->coherence_phase));
        }
        grade(c, worst, worst <= tol.cancellation);
    }));

    v.checks.push_back(run_check('f', "no spin-COM entanglement at integer periods", tol.entropy,
                                 [&](ClaimCheck& c) {
        const TimeSeries& ts = base_run();
        grade(c, ts.summary.max_entropy_at_periods, ts.summary.max_entropy_at_periods <= tol.entropy);
    }));

    v.checks.push_back(run_check('g', "shifted and unshifted frames agree", tol.frame, [&](ClaimCheck& c) {
        ProtocolConfig shifted = cfg;
        shifted.method = MethodChoice::oracle;
        shifted.frame = Frame::shifted;
        ProtocolConfig lab = shifted;
        lab.frame = Frame::unshifted;
        const TimeSeries a = run_protocol(shifted);
        const TimeSeries b = run_protocol(lab);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.rows.size(); ++k) {
            worst = std::max(worst, (a.rows[k].rho.rho - b.rows[k].rho.rho).cwiseAbs().maxCoeff());
            for (std::size_t s = 0; s < 3; ++s) {
                if (!a.rows[k].lab_quadrature[s] || !b.rows[k].lab_quadrature[s]) continue;
                worst = std::max(worst, std::abs(*a.rows[k].lab_quadrature[s] - *b.rows[k].lab_quadrature[s]));
            }
        }
        grade(c, worst, worst <= tol.frame);
    }));

    v.checks.push_back(run_check('h', "phi doubles when the gravity shift doubles", tol.linearity,
                                 [&](ClaimCheck& c) {
        const TimeSeries& ts = base_run();
        ProtocolConfig doubled = cfg;
        doubled.params.u0 *= 2.0;
        const TimeSeries td = run_protocol(doubled);
        const double gap = std::abs(td.summary.phi_measured - 2.0 * ts.summary.phi_measured);
        std::ostringstream detail;
        detail.precision(12);
        detail << "phi(u0)=" << ts.summary.phi_measured << " phi(2u0)=" << td.summary.phi_measured;
        grade(c, gap, gap <= tol.linearity, detail.str());
    }));

    return v;
}

SweepAxis parse_axis(std::string_view name) {
    if (name == "kappa") return SweepAxis::kappa;
    if (name == "u0") return SweepAxis::u0;
    if (name == "dD") return SweepAxis::dD;
    if (name == "n_bar") return SweepAxis::n_bar;
    if (name == "N_periods" || name == "N") return SweepAxis::n_periods;
    if (name == "theta") return SweepAxis::theta;
    throw ValidationError("axis", "unknown sweep axis '" + std::string(name) +
                                      "' (expected kappa, u0, dD, n_bar, N_periods, theta)");
}

std::string_view axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::kappa: return "kappa";
        case SweepAxis::u0: return "u0";
        case SweepAxis::dD: return "dD";
        case SweepAxis::n_bar: return "n_bar";
        case SweepAxis::n_periods: return "N_periods";
        case SweepAxis::theta: return "theta";
    }
    return "?";
}

std::vector<SweepRow> sweep(const ProtocolConfig& cfg, SweepAxis axis,
                            const std::vector<double>& values) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const double value : values) {
        ProtocolConfig run = cfg;
        switch (axis) {
            case SweepAxis::kappa: run.params.kappa = value; break;
            case SweepAxis::u0: run.params.u0 = value; break;
            case SweepAxis::dD: run.params.dD = value; break;
            case SweepAxis::n_bar: {
                initial::Thermal t{value, 200, 42};
                if (const auto* base = std::get_if<initial::Thermal>(&cfg.initial)) {
                    t.count = base->count;
                    t.seed = base->seed;
                }
                run.initial = t;
                break;
            }
            case SweepAxis::n_periods:
                if (value < 1 || value != std::floor(value)) {
                    throw ValidationError("values", "N_periods values must be integers >= 1");
                }
                run.n_periods = static_cast<long>(value);
                break;
            case SweepAxis::theta: {
                if (value < 0.0 || value > kPi) throw ValidationError("values", "theta must lie in [0, pi]");
                const double c = value == kPi / 2 ? 0.0 : std::cos(value);
                run.params.u0 = cfg.params.u0 * c;
                break;
            }
        }
        const TimeSeries ts = run_protocol(run);
        SweepRow r;
        r.value = value;
        r.n_periods = run.n_periods;
        r.phi_formula = eval_phi(run.params, 1);
        r.phi_measured = ts.summary.phi_measured;
        r.total_phase_measured = ts.summary.total_phase_measured;
        r.phi_residual = ts.summary.phi_residual;
        r.purity_min = ts.summary.purity_min;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace nvcom
