#include "nvcom/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nvcom/errors.hpp"

namespace nvcom {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    double number;
    std::string unit;
};

Entry parse_value(const std::string& key, std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ValidationError(key, "missing value");
    double number = 0.0;
    const auto* begin = text.data();
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, number);
    if (ec != std::errc{}) throw ValidationError(key, "not a number: '" + std::string(text) + "'");
    if (!std::isfinite(number)) throw ValidationError(key, "must be finite");
    Entry e{number, std::string(trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr))))};
    return e;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void reject_unit(const std::string& key, const Entry& e) {
    if (!e.unit.empty()) throw ValidationError(key, "unexpected unit '" + e.unit + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_no), "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ValidationError("line " + std::to_string(line_no), "empty key");
        if (!seen.insert(key).second) throw ValidationError(key, "duplicate key");
        const Entry e = parse_value(key, line.substr(eq + 1));

        PhysicalParams& p = cfg.physical;
        if (key == "theta") {
            if (e.unit == "deg") {
                p.theta = e.number == 90.0 ? kPi / 2 : e.number * kPi / 180.0;
            } else if (e.unit.empty() || e.unit == "rad") {
                p.theta = e.number;
            } else {
                throw ValidationError(key, "unit must be deg or rad");
            }
        } else if (key == "d_splitting") {
            if (e.unit == "Hz") {
                p.d_splitting = kTwoPi * e.number;
            } else if (e.unit.empty() || e.unit == "rad/s") {
                p.d_splitting = e.number;
            } else {
                throw ValidationError(key, "unit must be Hz or rad/s");
            }
        } else {
            reject_unit(key, e);
            if (key == "mass") p.mass = e.number;
            else if (key == "omega_z") p.omega_z = e.number;
            else if (key == "b0_gradient") p.b0_gradient = e.number;
            else if (key == "gravity") p.gravity = e.number;
            else if (key == "g_nv") p.g_nv = e.number;
            else if (key == "mu_b") p.mu_b = e.number;
            else if (key == "n_bar") cfg.n_bar = e.number;
            else if (key == "kappa") cfg.kappa = e.number;
            else if (key == "u0") cfg.u0 = e.number;
            else if (key == "dD") cfg.dD = e.number;
            else if (key == "n_cutoff") {
                if (e.number < 2 || e.number != std::floor(e.number) || e.number > 1e6) {
                    throw ValidationError(key, "must be an integer >= 2");
                }
                cfg.n_cutoff = static_cast<std::size_t>(e.number);
            } else {
                throw ValidationError(key, "unknown key");
            }
        }
    }
    for (const char* required : {"mass", "omega_z", "b0_gradient"}) {
        if (!seen.contains(required)) throw ValidationError(required, "required key is missing");
    }
    validate(cfg.physical);
    validate(resolve_dimensionless(cfg));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

DimensionlessParams resolve_dimensionless(const RunConfig& cfg) {
    DimensionlessParams d = nondimensionalize(cfg.physical, cfg.n_cutoff, cfg.n_bar);
    if (cfg.kappa) d.kappa = *cfg.kappa;
    if (cfg.u0) d.u0 = *cfg.u0;
    if (cfg.dD) d.dD = *cfg.dD;
    validate(d);
    return d;
}

std::string canonical_text(const RunConfig& cfg) {
    const PhysicalParams& p = cfg.physical;
    std::string out;
    auto put = [&out](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    put("mass", fmt17(p.mass));
    put("omega_z", fmt17(p.omega_z));
    put("b0_gradient", fmt17(p.b0_gradient));
    put("d_splitting", fmt17(p.d_splitting));
    put("theta", fmt17(p.theta));
    put("gravity", fmt17(p.gravity));
    put("g_nv", fmt17(p.g_nv));
    put("mu_b", fmt17(p.mu_b));
    put("n_cutoff", std::to_string(cfg.n_cutoff));
    put("n_bar", fmt17(cfg.n_bar));
    if (cfg.kappa) put("kappa", fmt17(*cfg.kappa));
    if (cfg.u0) put("u0", fmt17(*cfg.u0));
    if (cfg.dD) put("dD", fmt17(*cfg.dD));
    return out;
}

}  // namespace nvcom
