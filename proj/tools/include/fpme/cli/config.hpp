#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpme::cli {

/// Rejected configuration. The message starts with the origin of the
/// offending value (`file:line` or `--flag`).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double nehari = 1e-8;
    double closed_form = 1e-10;
    double uniqueness = 1e-6;    // relative to ||w||_inf
    double lyapunov = 1e-10;     // per step, relative to the initial scale
    double step_residual = 1e-10;
    double terminal = 1e-4;      // critical residual at T
    double plateau = 1e-6;       // |plateau - Lambda1| / scale
    double string_energy = 1e-10;
    double saddle = 1e-4;
    double convexity = 1e-10;
};

struct RunConfig {
    double a = -1.0;
    double b = 1.0;
    int n = 256;
    double s = 0.5;
    double m = 2.0;
    double alpha = 1.0;          // 1/(m-1) unless set
    double h = 0.02;             // time step
    double T = 15.0;
    double tol = 1e-3;           // stabilization distance
    double window = 0.0;         // trailing window; 0 uses 20% of T
    int n_images = 32;
    int quad_order = 8;
    std::uint64_t seed = 1;
    std::string datum = "bump_mix(0.008, -0.8, 0.4)";
    std::vector<double> snapshots;  // empty: t = 0 and t = T
    std::optional<double> lambda2_est;
    int samples = 100000;        // inequality pairs drawn by `check`
    int uniqueness_trials = 5;
    bool plot = true;
    std::filesystem::path output_dir = "fpme_out";
    Tolerances tols;

    /// Every key with its value as it would be written in a config file.
    std::map<std::string, std::string> echo() const;
};

/// Key/value pairs from the command line, in the order given.
using FlagValues = std::vector<std::pair<std::string, std::string>>;

/// Reads the optional file, applies the flags over it and validates.
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const FlagValues& flags);

/// Keys accepted in files and as `--key` flags.
const std::vector<std::string>& config_keys();

}  // namespace fpme::cli
