#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levygal/solver.hpp"

namespace levygal {

/// Config text error; line is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Parameters of the analysis subcommands.
struct StudyParams {
    std::string axis = "n";
    std::vector<double> values{8, 16, 32, 64};
    double delta0 = 1e-8;
    double level_M = 1.0;
    double gronwall_C = 1.0;
    int paths = 200;
    int increment_paths = 32;
    int pairs = 10000;
    int samples = 1000;
    std::vector<double> R_values{2, 4, 8, 16};
    double alpha = 0.25;
    std::optional<double> m;  // default 0.9 p/(p-1)
    std::string space = "H";
    std::vector<int> lags{1, 2, 4, 8, 16};
    int lag_samples = 64;

    double m_or_default(double p) const { return m.value_or(0.9 * p / (p - 1.0)); }
};

struct RunConfig {
    SolverConfig solver;
    StudyParams study;
    /// Noise spectrum as configured, so the echo can be re-parsed.
    double q0 = 0.0;
    double q_decay = 1.0;
    std::vector<double> q_explicit;
    std::vector<double> sigma{1.0};
    std::vector<std::string> warnings;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every resolved parameter as `key = value` lines; parse_config of the
/// result reproduces the same configuration.
std::string echo_config(const RunConfig& config);

/// Exponent of the configured operator (4 when F = 0).
double effective_p(const SolverConfig& config);

/// Rebuilds the per-mode noise spectrum after n or the study grid changed.
void resolve_noise_spectrum(RunConfig& config);

}  // namespace levygal
