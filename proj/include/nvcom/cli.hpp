#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nvcom::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kClaimFailed = 1,
    kBadInput = 2,
    kPropagationFailed = 3,
    kUnverifiable = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 42;

std::string_view version();

/// Resolved run description echoed as `#` lines at the top of every output.
/// The timestamp line is the only line excluded from `hash()`; it comes from
/// SOURCE_DATE_EPOCH when set, otherwise the current UTC time.
struct RunManifest {
    std::string command;
    std::string config_text;                                  // canonical key = value lines
    std::vector<std::pair<std::string, std::string>> options;  // resolved flags
    std::uint64_t seed = kDefaultSeed;
    std::string output_path;

    /// FNV-1a 64 over everything except the timestamp.
    std::uint64_t hash() const;
    std::string header() const;
};

struct DeriveOptions {
    std::filesystem::path config;
};

struct EvolveOptions {
    std::filesystem::path config;
    long periods = 1;
    int samples = 32;
    std::string method = "oracle";   // analytic | oracle | both
    std::string initial = "auto";    // auto | vacuum | coherent | fock | thermal
    std::complex<double> alpha{0.0, 0.0};
    std::size_t fock_n = 3;
    std::size_t thermal_count = 1000;
    std::string frame = "shifted";   // shifted | unshifted
    bool cancel = false;
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::filesystem::path> out;
};

struct ValidateOptions {
    bool negative_control = false;
    std::optional<std::size_t> n_cutoff;
    std::optional<double> thermal_n_bar;
    std::size_t thermal_count = 1000;
    std::uint64_t seed = kDefaultSeed;
};

struct SweepOptions {
    std::filesystem::path config;
    std::string axis;
    std::string values;   // "a,b,c" or an inclusive integer range "1..5"
    long periods = 1;
    int samples = 32;
    std::string method = "oracle";
    std::size_t thermal_count = 200;
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::filesystem::path> out;
};

/// Expands "0,0.5,1" or "1..5". Throws ValidationError("values", ...).
std::vector<double> parse_values(std::string_view text);

/// `%.17g`, empty for NaN.
std::string format_number(double value);

int cmd_derive(const DeriveOptions& options, std::ostream& out, std::ostream& err);
int cmd_evolve(const EvolveOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nvcom::cli
