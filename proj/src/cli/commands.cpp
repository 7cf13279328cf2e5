#include "nvcom/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "nvcom/config.hpp"
#include "nvcom/errors.hpp"
#include "nvcom/experiments.hpp"
#include "nvcom/params.hpp"

#ifndef NVCOM_VERSION
#define NVCOM_VERSION "0.0.0"
#endif

namespace nvcom::cli {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// "1e<k>" with k the nearest decade of |value|; "0" for zero.
std::string order_of_magnitude(double value) {
    if (value == 0.0) return "0";
    return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(std::abs(value)))));
}

MethodChoice parse_method(const std::string& name) {
    if (name == "analytic") return MethodChoice::analytic;
    if (name == "oracle") return MethodChoice::oracle;
    if (name == "both") return MethodChoice::both;
    throw ValidationError("method", "expected analytic, oracle or both");
}

Frame parse_frame(const std::string& name) {
    if (name == "shifted") return Frame::shifted;
    if (name == "unshifted") return Frame::unshifted;
    throw ValidationError("frame", "expected shifted or unshifted");
}

/// Writes `content` to `path`, or to `out` when no path is given. The file
/// only appears once its content is complete.
void emit(const std::optional<std::filesystem::path>& path, const std::string& content,
          std::ostream& out) {
    if (!path) {
        out << content;
        return;
    }
    std::filesystem::path tmp = *path;
    tmp += ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ValidationError("out", "cannot open " + path->string());
        f << content;
        if (!f) {
            std::filesystem::remove(tmp);
            throw ValidationError("out", "write failed for " + path->string());
        }
    }
    std::filesystem::rename(tmp, *path);
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kPropagationFailed;
    }
}

InitialSpec initial_from(const EvolveOptions& o, const RunConfig& cfg) {
    std::string kind = o.initial;
    if (kind == "auto") kind = cfg.n_bar > 0.0 ? "thermal" : "vacuum";
    if (kind == "vacuum") return initial::Vacuum{};
    if (kind == "coherent") return initial::Coherent{o.alpha};
    if (kind == "fock") return initial::Fock{o.fock_n};
    if (kind == "thermal") return initial::Thermal{cfg.n_bar, o.thermal_count, o.seed};
    throw ValidationError("initial", "expected auto, vacuum, coherent, fock or thermal");
}

std::string cell(const std::optional<double>& v, double scale = 1.0) {
    return v ? format_number(*v * scale) : std::string();
}

}  // namespace

std::string_view version() { return NVCOM_VERSION; }

std::string format_number(double value) {
    if (std::isnan(value)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::uint64_t RunManifest::hash() const {
    std::string text = "nvcom " + std::string(version()) + '\n' + command + '\n' +
                       std::to_string(seed) + '\n' + output_path + '\n' + config_text;
    for (const auto& [k, v] : options) text += k + '=' + v + '\n';
    return fnv1a64(text);
}

std::string RunManifest::header() const {
    std::ostringstream os;
    os << "# nvcom " << version() << '\n';
    os << "# command: " << command << '\n';
    os << "# timestamp: " << timestamp_utc() << '\n';
    os << "# seed: " << seed << '\n';
    os << "# config_hash: fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << hash()
       << std::dec << '\n';
    if (!output_path.empty()) os << "# output: " << output_path << '\n';
    std::istringstream lines(config_text);
    for (std::string line; std::getline(lines, line);) os << "# config " << line << '\n';
    for (const auto& [k, v] : options) os << "# option " << k << " = " << v << '\n';
    return os.str();
}

std::vector<double> parse_values(std::string_view text) {
    auto number = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ValidationError("values", "not a number: '" + std::string(s) + "'");
        }
        return v;
    };
    std::vector<double> out;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const double lo = number(text.substr(0, dots));
        const double hi = number(text.substr(dots + 2));
        if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo || hi - lo > 1e6) {
            throw ValidationError("values", "range must be 'a..b' with integers a <= b");
        }
        for (double v = lo; v <= hi; v += 1.0) out.push_back(v);
        return out;
    }
    while (true) {
        const auto comma = text.find(',');
        out.push_back(number(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

int cmd_derive(const DeriveOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load_config(options.config);
        const DerivedScales s = derive_scales(cfg.physical);
        const DimensionlessParams d = resolve_dimensionless(cfg);
        const PhaseFormulas f = phase_formulas(d, 1);
        const double ratio = s.z0_shift != 0.0 ? s.sector_separation / s.z0_shift : 0.0;

        struct Item {
            const char* key;
            std::string value;
            const char* unit;
        };
        const Item items[] = {
            {"z_zpf", format_number(s.z_zpf), "m"},
            {"z0_shift", format_number(s.z0_shift), "m"},
            {"z0_order", order_of_magnitude(s.z0_shift), "m"},
            {"sector_separation", format_number(s.sector_separation), "m"},
            {"separation_order", order_of_magnitude(s.sector_separation), "m"},
            {"separation_over_z0", format_number(ratio), ""},
            {"lambda_coupling", format_number(s.lambda_coupling), "J"},
            {"e_shift", format_number(s.e_shift), "J"},
            {"b_cancel", format_number(s.b_cancel), "T"},
            {"kappa", format_number(d.kappa), ""},
            {"u0", format_number(d.u0), ""},
            {"dD", format_number(d.dD), ""},
            {"eta_per_period", format_number(f.eta), "rad"},
            {"phi_per_period", format_number(f.phi), "rad"},
            {"delta_phi_grav_per_period", format_number(f.delta_phi_grav), "rad"},
            {"u_offset_cancel", format_number(uniform_field_offset(cfg.physical, s.b_cancel)), ""},
        };

        out << "Derived scales and per-period phases\n";
        for (const auto& it : items) {
            out << "  " << std::left << std::setw(28) << it.key << std::right << std::setw(26)
                << it.value << ' ' << it.unit << '\n';
        }
        if (cfg.kappa || cfg.u0 || cfg.dD) {
            out << "  (kappa/u0/dD overridden by config; SI scales are unaffected)\n";
        }
        out << '\n';
        for (const auto& it : items) out << it.key << " = " << it.value << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_evolve(const EvolveOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const RunConfig rc = load_config(o.config);
        const DerivedScales scales = derive_scales(rc.physical);
        ProtocolConfig cfg;
        cfg.params = resolve_dimensionless(rc);
        cfg.n_periods = o.periods;
        cfg.samples_per_period = o.samples;
        cfg.method = parse_method(o.method);
        cfg.frame = parse_frame(o.frame);
        cfg.offset = o.cancel ? OffsetMode::cancel : OffsetMode::none;
        cfg.initial = initial_from(o, rc);
        validate(cfg);

        RunManifest manifest;
        manifest.command = "evolve";
        manifest.config_text = canonical_text(rc);
        manifest.seed = o.seed;
        manifest.output_path = o.out ? o.out->string() : std::string();
        manifest.options = {{"periods", std::to_string(o.periods)},
                            {"samples", std::to_string(o.samples)},
                            {"method", o.method},
                            {"frame", o.frame},
                            {"cancel", o.cancel ? "true" : "false"},
                            {"initial", describe(cfg.initial)}};

        TimeSeries ts;
        try {
            ts = run_protocol(cfg);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            err << "error: propagation failed: " << e.what() << '\n';
            return kPropagationFailed;
        }

        std::ostringstream csv;
        csv << manifest.header();
        csv << "t,coh_mag,coh_phase,purity,entropy,z_plus,z_minus,z_zero,fid_analytic_oracle\n";
        for (const TimeRow& r : ts.rows) {
            csv << format_number(r.t) << ',' << format_number(r.coherence_mag) << ','
                << format_number(r.coherence_phase) << ',' << format_number(r.purity) << ','
                << format_number(r.entropy) << ','
                << cell(r.lab_quadrature[spin_index(+1)], scales.z_zpf) << ','
                << cell(r.lab_quadrature[spin_index(-1)], scales.z_zpf) << ','
                << cell(r.lab_quadrature[spin_index(0)], scales.z_zpf) << ','
                << cell(r.fidelity_analytic_oracle) << '\n';
        }
        const ProtocolSummary& s = ts.summary;
        auto put = [&csv](const char* key, double value) {
            csv << "# summary " << key << " = " << format_number(value) << '\n';
        };
        put("periods", static_cast<double>(cfg.n_periods));
        put("eta_formula", s.formulas.eta);
        put("phi_formula", s.formulas.phi);
        put("delta_phi_grav", s.formulas.delta_phi_grav);
        put("phi_expected", s.phi_expected);
        put("coherence_shift", s.coherence_shift);
        put("total_phase_measured", s.total_phase_measured);
        put("phi_measured_per_period", s.phi_measured);
        put("winding_measured", static_cast<double>(s.winding_measured));
        put("winding_formula", static_cast<double>(s.winding_formula));
        put("winding_reliable", s.winding_reliable ? 1.0 : 0.0);
        put("phi_residual", s.phi_residual);
        put("eta_residual", s.eta_residual);
        put("min_return_fidelity", s.min_return_fidelity);
        put("purity_min", s.purity_min);
        put("max_entropy_at_periods", s.max_entropy_at_periods);
        if (s.min_fidelity_analytic_oracle) {
            put("min_fidelity_analytic_oracle", *s.min_fidelity_analytic_oracle);
        }
        put("ensemble_size", static_cast<double>(s.ensemble_size));
        emit(o.out, csv.str(), out);
        return kOk;
    });
}

int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        ProtocolConfig cfg = desk_scale_config();
        if (o.n_cutoff) cfg.params.n_cutoff = *o.n_cutoff;
        if (o.thermal_n_bar) cfg.initial = initial::Thermal{*o.thermal_n_bar, o.thermal_count, o.seed};
        validate(cfg);
        VerifyOptions vo;
        vo.mis_signed_phi = o.negative_control;
        const Verdict v = verify_comment(cfg, vo);

        out << "nvcom validate: kappa=" << cfg.params.kappa << " u0=" << cfg.params.u0
            << " dD=" << cfg.params.dD << " n_cutoff=" << cfg.params.n_cutoff
            << " N=" << cfg.n_periods << " initial=" << describe(cfg.initial)
            << (o.negative_control ? " [negative control]" : "") << '\n';
        for (const ClaimCheck& c : v.checks) {
            const char* status = c.status == ClaimStatus::pass   ? "PASS"
                                 : c.status == ClaimStatus::fail ? "FAIL"
                                                                 : "UNVERIFIABLE";
            out << "  (" << c.id << ") " << std::left << std::setw(48) << c.claim << std::right
                << std::setw(13) << status << "  value=" << std::setprecision(3)
                << std::scientific << c.value << " tol=" << c.tolerance << std::defaultfloat
                << std::setprecision(6);
            if (!c.detail.empty()) out << "  " << c.detail;
            out << '\n';
        }
        return v.exit_code();
    });
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const RunConfig rc = load_config(o.config);
        const SweepAxis axis = parse_axis(o.axis);
        const std::vector<double> values = parse_values(o.values);
        ProtocolConfig cfg;
        cfg.params = resolve_dimensionless(rc);
        cfg.n_periods = o.periods;
        cfg.samples_per_period = o.samples;
        cfg.method = parse_method(o.method);
        if (rc.n_bar > 0.0 || axis == SweepAxis::n_bar) {
            cfg.initial = initial::Thermal{rc.n_bar, o.thermal_count, o.seed};
        }
        validate(cfg);

        RunManifest manifest;
        manifest.command = "sweep";
        manifest.config_text = canonical_text(rc);
        manifest.seed = o.seed;
        manifest.output_path = o.out ? o.out->string() : std::string();
        manifest.options = {{"axis", std::string(axis_name(axis))},
                            {"values", o.values},
                            {"periods", std::to_string(o.periods)},
                            {"samples", std::to_string(o.samples)},
                            {"method", o.method},
                            {"thermal_count", std::to_string(o.thermal_count)}};

        std::vector<SweepRow> rows;
        try {
            rows = sweep(cfg, axis, values);
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception& e) {
            err << "error: propagation failed: " << e.what() << '\n';
            return kPropagationFailed;
        }

        std::ostringstream csv;
        csv << manifest.header();
        csv << "value,N_periods,phi_formula,phi_measured,total_phase_measured,phi_residual,purity_min\n";
        for (const SweepRow& r : rows) {
            csv << format_number(r.value) << ',' << r.n_periods << ',' << format_number(r.phi_formula)
                << ',' << format_number(r.phi_measured) << ','
                << format_number(r.total_phase_measured) << ',' << format_number(r.phi_residual)
                << ',' << format_number(r.purity_min) << '\n';
        }
        emit(o.out, csv.str(), out);
        return kOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin-1 NV centre coupled to a levitated nanodiamond's centre-of-mass mode"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    DeriveOptions derive;
    auto* c_derive = app.add_subcommand("derive", "Print derived scales and per-period phases");
    c_derive->add_option("config", derive.config, "Config file")->required();

    EvolveOptions evolve;
    double alpha_re = 0.0;
    double alpha_im = 0.0;
    std::string out_evolve;
    auto* c_evolve = app.add_subcommand("evolve", "Evolve and write the time series as CSV");
    c_evolve->add_option("config", evolve.config, "Config file")->required();
    c_evolve->add_option("--periods", evolve.periods, "Number of trap periods")->check(CLI::PositiveNumber);
    c_evolve->add_option("--samples", evolve.samples, "Samples per period (>= 8)");
    c_evolve->add_option("--method", evolve.method, "analytic | oracle | both");
    c_evolve->add_option("--initial", evolve.initial, "auto | vacuum | coherent | fock | thermal");
    c_evolve->add_option("--alpha-re", alpha_re, "Coherent amplitude, real part");
    c_evolve->add_option("--alpha-im", alpha_im, "Coherent amplitude, imaginary part");
    c_evolve->add_option("--fock-n", evolve.fock_n, "Number state index");
    c_evolve->add_option("--thermal-count", evolve.thermal_count, "Thermal ensemble size");
    c_evolve->add_option("--frame", evolve.frame, "shifted | unshifted");
    c_evolve->add_flag("--cancel", evolve.cancel, "Apply the cancelling uniform field");
    c_evolve->add_option("--seed", evolve.seed, "RNG seed");
    c_evolve->add_option("--out", out_evolve, "Output CSV path (stdout if omitted)");

    ValidateOptions validate_opts;
    std::size_t n_cutoff = 0;
    double n_bar = 0.0;
    auto* c_validate = app.add_subcommand("validate", "Run the claim battery on the desk-scale model");
    c_validate->add_flag("--negative-control", validate_opts.negative_control,
                         "Compare against a mis-signed phi (must fail)");
    auto* opt_cutoff = c_validate->add_option("--n-cutoff", n_cutoff, "Override the Fock cutoff");
    auto* opt_nbar = c_validate->add_option("--thermal-nbar", n_bar, "Use a thermal initial state");
    c_validate->add_option("--thermal-count", validate_opts.thermal_count, "Thermal ensemble size");
    c_validate->add_option("--seed", validate_opts.seed, "RNG seed");

    SweepOptions sweep_opts;
    std::string out_sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Sweep one parameter and tabulate phases");
    c_sweep->add_option("config", sweep_opts.config, "Config file")->required();
    c_sweep->add_option("--axis", sweep_opts.axis, "kappa | u0 | dD | n_bar | N_periods | theta")->required();
    c_sweep->add_option("--values", sweep_opts.values, "Comma list or integer range a..b")->required();
    c_sweep->add_option("--periods", sweep_opts.periods, "Number of trap periods")->check(CLI::PositiveNumber);
    c_sweep->add_option("--samples", sweep_opts.samples, "Samples per period (>= 8)");
    c_sweep->add_option("--method", sweep_opts.method, "analytic | oracle | both");
    c_sweep->add_option("--thermal-count", sweep_opts.thermal_count, "Thermal ensemble size");
    c_sweep->add_option("--seed", sweep_opts.seed, "RNG seed");
    c_sweep->add_option("--out", out_sweep, "Output CSV path (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadInput;
    }

    if (*c_derive) return cmd_derive(derive, out, err);
    if (*c_evolve) {
        evolve.alpha = {alpha_re, alpha_im};
        if (!out_evolve.empty()) evolve.out = out_evolve;
        return cmd_evolve(evolve, out, err);
    }
    if (*c_validate) {
        if (*opt_cutoff) validate_opts.n_cutoff = n_cutoff;
        if (*opt_nbar) validate_opts.thermal_n_bar = n_bar;
        return cmd_validate(validate_opts, out, err);
    }
    if (*c_sweep) {
        if (!out_sweep.empty()) sweep_opts.out = out_sweep;
        return cmd_sweep(sweep_opts, out, err);
    }
    return kBadInput;
}

}  // namespace nvcom::cli
