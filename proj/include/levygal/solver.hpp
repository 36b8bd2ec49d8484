#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levygal/convection.hpp"
#include "levygal/noise.hpp"
#include "levygal/operators.hpp"
#include "levygal/spaces.hpp"

namespace levygal {

struct InitialCondition {
    enum class Kind { zero, deterministic, random };
    Kind kind = Kind::zero;
    /// Deterministic coefficients (zero-padded or truncated to n).
    Coeffs coeffs;
    /// Random: a_j ~ amplitude * Normal(0, j^{-2r}) on per-mode streams.
    double decay_r = 1.0;
    double amplitude = 1.0;
    std::optional<std::uint64_t> seed;
};

struct SolverConfig {
    Domain domain = Domain::interval();
    int n = 16;
    int n_quad = 0;  // 0 selects the anti-aliasing floor
    double T = 1.0;
    double dt = 0.01;
    double gamma = 1.0;
    /// Absent means F = 0.
    std::optional<OperatorChoice> op;
    std::optional<TruncationParams> truncation;
    CutoffParams cutoff{1.0};
    bool convection_enabled = false;
    NoiseDescriptor noise;
    InitialCondition initial;
    bool implicit_F = false;
    std::uint64_t seed = 0;

    /// Throws ConfigInvalid on hard violations; returns advisory warnings.
    std::vector<std::string> validate() const;
};

class ConfigInvalid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Discrete analogue of each term of the Ito expansion of |u|^2 over a step.
/// The scheme satisfies
///   dH + viscous + convection + f_pairing - wiener_work - jump_work
///      - quadratic_variation + numerical_dissipation = residual ~ 0.
struct LedgerEntry {
    double dH = 0.0;                     // |u^{k+1}|^2 - |u^k|^2
    double viscous = 0.0;                // 2 gamma dt ||u^{k+1}||^2
    double convection = 0.0;             // 2 dt <B(u^k), u^{k+1}>
    double f_pairing = 0.0;              // 2 dt <F^R(u*), u^{k+1}>
    double wiener_work = 0.0;            // 2 <G dW, u^k>
    double jump_work = 0.0;              // 2 <K-terms, u^k>
    double quadratic_variation = 0.0;    // |noise increment|^2
    double numerical_dissipation = 0.0;  // |u^{k+1} - u^k - noise|^2
    double residual = 0.0;
    double scale = 1.0;  // 1 + max(|u^k|^2, |u^{k+1}|^2)

    double relative_residual() const { return std::abs(residual) / scale; }
};

struct AppliedJump {
    int step;
    double t;
    int mark;
    bool large;
};

struct Trajectory {
    BasisPtr basis;
    double dt = 0.0;
    std::vector<double> times;
    /// One row per time, n columns.
    Eigen::MatrixXd states;
    std::vector<LedgerEntry> ledger;
    std::vector<AppliedJump> jump_log;
    /// Parameters of ||.||_X used in reports.
    double x_p = 4.0;
    std::vector<Channel> x_channels{Channel::value, Channel::gradient};

    int size() const { return int(times.size()); }
    Coeffs state(int k) const { return states.row(k).transpose(); }
};

class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, int step, Trajectory partial, std::vector<double> history = {})
        : std::runtime_error(what), step_(step), partial_(std::move(partial)), history_(std::move(history)) {}
    int step() const { return step_; }
    const Trajectory& partial() const { return partial_; }
    /// Residual norms of the implicit iteration when it failed to converge.
    const std::vector<double>& iterate_history() const { return history_; }

private:
    int step_;
    Trajectory partial_;
    std::vector<double> history_;
};

/// Semi-implicit Euler-Maruyama integrator of the Galerkin system.
class Simulator {
public:
    explicit Simulator(SolverConfig config);

    const SolverConfig& config() const { return config_; }
    BasisPtr basis() const { return basis_; }
    const std::optional<OperatorAssembler>& assembler() const { return assembler_; }

    Coeffs initial_state() const;
    LevyNoisePath sample_noise() const;

    /// One step from u^k using step k of the noise path.
    Coeffs step(const Coeffs& u, int k, const LevyNoisePath& path, LedgerEntry* ledger = nullptr,
                std::vector<AppliedJump>* jumps = nullptr) const;

    Trajectory run(const Coeffs& u0, const LevyNoisePath& path) const;
    Trajectory run() const { return run(initial_state(), sample_noise()); }

    /// Drift terms without the linear part: B_R~(u) + F^R(u).
    Coeffs explicit_drift(const Coeffs& u) const;

private:
    Coeffs solve_implicit(const Coeffs& rhs, const Coeffs& guess, int step) const;
    Trajectory make_trajectory() const;

    SolverConfig config_;
    BasisPtr basis_;
    std::optional<OperatorAssembler> assembler_;
};

Trajectory simulate(const SolverConfig& config);

struct EnergyReport {
    double sup_h2 = 0.0;
    double int_v2 = 0.0;
    double int_xp = 0.0;
    double max_ledger_residual = 0.0;
};

EnergyReport energy_report(const Trajectory& traj);

/// ||u||_X^p for a trajectory's norm settings.
double trajectory_x_norm_pow(const Trajectory& traj, const Coeffs& u);

}  // namespace levygal
