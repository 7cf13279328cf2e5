#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "nvcom/params.hpp"

namespace nvcom {

/// Contents of a flat `key = number [unit]` config file.
///
/// Grammar, one entry per line:
///
///     # comment                      (also allowed after a value)
///     mass        = 6.2e-18
///     theta       = 30 deg           (deg | rad, default rad)
///     d_splitting = 2.87e9 Hz        (Hz converts to rad/s; default rad/s)
///
/// `mass`, `omega_z` and `b0_gradient` are required. Every other key falls
/// back to the default in PhysicalParams / below. `kappa`, `u0` and `dD`,
/// when present, replace the values derived from the SI inputs so that
/// desk-scale reduced models can be run directly.
struct RunConfig {
    PhysicalParams physical;
    std::size_t n_cutoff = 64;
    double n_bar = 0.0;
    std::optional<double> kappa;
    std::optional<double> u0;
    std::optional<double> dD;
};

/// Throws ValidationError naming the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Reduced model for a config, applying any kappa/u0/dD overrides.
DimensionlessParams resolve_dimensionless(const RunConfig& cfg);

/// Every key with its resolved value, one `key = value` per line in a fixed
/// order, printed with 17 significant digits. Absent overrides are omitted.
std::string canonical_text(const RunConfig& cfg);

}  // namespace nvcom
