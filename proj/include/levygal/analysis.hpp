#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levygal/operators.hpp"
#include "levygal/rng.hpp"
#include "levygal/solver.hpp"

namespace levygal {

// ---------------------------------------------------------------------------
// Utilities shared by the studies and the property suite

/// Worker count from LEVYGAL_THREADS (default: hardware concurrency).
int thread_count();

/// Runs body(i) for i in [0, count); results must be written by index so
/// the outcome does not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

/// Neumaier-compensated sum, order fixed by the input.
double compensated_sum(std::span<const double> values);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean with its jackknife standard error.
MeanEstimate jackknife_mean(std::span<const double> values);

/// Random coefficient vectors with spectral decay j^{-decay} and an H-norm
/// drawn log-uniformly in [amp_min, amp_max].
struct RandomFieldSampler {
    double decay = 1.0;
    double amp_min = 1e-2;
    double amp_max = 1e1;

    Coeffs draw(CounterStream& rng, int n) const;
};

/// Estimates |g|_{X'} = sup_{||phi||_X = 1} <g, phi>: the best of a fixed
/// set of random unit test fields and the Riesz directions of g, refined by
/// gradient ascent. Always a lower bound of the true dual norm.
class DualNormEstimator {
public:
    DualNormEstimator(const SpectralBasis& basis, double p, std::vector<Channel> channels, int count = 200,
                      std::uint64_t seed = 0x5eed);
    double operator()(const Coeffs& g) const;

private:
    double norm_pow(const Coeffs& phi, Coeffs* gradient) const;

    double p_;
    Eigen::VectorXd weights_;
    Eigen::VectorXd eigenvalues_;
    std::vector<Eigen::MatrixXd> tables_;
    Eigen::MatrixXd tests_;  // one unit test field per column
};

// ---------------------------------------------------------------------------
// Time regularity

enum class SeminormSpace { H, dual };

/// (int int |v(t)-v(s)|^m / |t-s|^{1+alpha m} ds dt)^{1/m} as a double
/// Riemann sum over grid cells, diagonal excluded.
double gagliardo_seminorm(const Trajectory& traj, double alpha, double m, SeminormSpace space = SeminormSpace::H);

struct IncrementReport {
    std::vector<double> lags;  // in time units
    std::vector<MeanEstimate> increments;
    double fitted_exponent = 0.0;
};

/// Monte Carlo E||u(tau + delta) - u(tau)|| in V' plus the sampled X'
/// estimate, at uniformly random grid times tau.
IncrementReport increment_statistics(std::span<const Trajectory> ensemble, const std::vector<int>& lag_steps,
                                     int samples_per_path = 64, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Limit passages

enum class StudyAxis { n, R, R_tilde };

StudyAxis parse_axis(const std::string& name);
std::string axis_name(StudyAxis axis);

struct ConvergenceReport {
    StudyAxis axis = StudyAxis::n;
    std::vector<double> values;
    /// Consecutive distances in L^2(0,T;H); size values.size() - 1.
    std::vector<double> l2_distances;
    std::vector<double> terminal_distances;
    bool monotone_cauchy = false;
    bool complete = true;
    std::string failure;
};

SolverConfig with_axis_value(const SolverConfig& base, StudyAxis axis, double value);

/// L^2(0,T;H) distance of two trajectories on the same time grid
/// (left-endpoint rule); shorter coefficient vectors are zero-padded.
double l2_time_distance(const Trajectory& a, const Trajectory& b);

ConvergenceReport convergence_study(const SolverConfig& base, StudyAxis axis, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Monotonicity

struct MintyReport {
    int pairs = 0;
    double min_pairing = 0.0;
    /// min of <F(u)-F(v), u-v> / ((||u||_X + ||v||_X)^{p-1} ||u-v||_X)
    double min_scaled_pairing = 0.0;
    int violations = 0;
    /// min of <F(u)-F(v), u-v> / ||u - v||^2 (V-norm)
    double strong_slope = 0.0;
    /// min of <F(u)-F(v), u-v> / ||u - v||_X^p
    double strong_p_constant = 0.0;
    bool passed = false;
};

constexpr double kMonotonicityTolerance = 1e-10;

MintyReport minty_residual(const OperatorAssembler& assembler, int pairs, std::uint64_t seed = 7,
                           const std::optional<TruncationParams>& trunc = std::nullopt,
                           const RandomFieldSampler& sampler = {});

// ---------------------------------------------------------------------------
// Pathwise uniqueness

struct UniquenessReport {
    double initial_distance = 0.0;
    double sup_distance = 0.0;
    bool bit_identical = false;
    double gronwall_integral = 0.0;  // int ||u_1||_X^2 dt
    double gronwall_weight = 1.0;    // exp(C * gronwall_integral)
    double level_M = 0.0;
    std::optional<double> tau_M;     // first t with int_0^t ||u_1||_X^p > M
    std::vector<double> distances;   // |u_1(t) - u_2(t)| per grid time
};

/// Runs both configurations on one noise path; they must agree in every
/// setting except the initial condition.
UniquenessReport compare_runs(const SolverConfig& a, const SolverConfig& b, double level_M = 1.0,
                              double gronwall_C = 1.0);

/// Second run starts from u_0 + delta0 w_1.
UniquenessReport uniqueness_experiment(const SolverConfig& config, double delta0, double level_M = 1.0,
                                       double gronwall_C = 1.0);

// ---------------------------------------------------------------------------
// Moments and truncation occupancy

struct MomentReport {
    int paths = 0;
    MeanEstimate sup_h2;
    MeanEstimate int_v2;
    MeanEstimate int_xp;
    int aborted = 0;
};

/// Path i uses derive_seed(config.seed, i) for its noise and random data.
SolverConfig ensemble_member(const SolverConfig& config, int index);

MomentReport moment_study(const SolverConfig& config, int paths);

struct OccupancyReport {
    std::vector<double> R;
    std::vector<double> occupancy;
    std::vector<double> scaled;  // occupancy * R^p
    std::vector<double> max_gradient;
    bool monotone_decreasing = false;
};

OccupancyReport occupancy_study(const SolverConfig& config, const std::vector<double>& R_values);

}  // namespace levygal
