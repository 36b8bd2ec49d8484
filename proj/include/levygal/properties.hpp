#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "levygal/analysis.hpp"
#include "levygal/noise.hpp"
#include "levygal/operators.hpp"

namespace levygal {

struct PropertyResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Pointwise integrand checks

struct GradientCheck {
    double max_gradient_error = 0.0;  // f_i against central differences of J_i
    double max_hessian_error = 0.0;   // D^2 J_i against central differences of f_i
    int points = 0;
};

/// Random points with |x| log-uniform in [1e-1, 3]; errors are relative
/// to max(|f|_inf, 1).
GradientCheck gradient_consistency(const MonotoneOperator& op, int points = 200, std::uint64_t seed = 11);

/// Largest J((x+y)/2) - (J(x)+J(y))/2 over random pairs, per convex term.
double midpoint_convexity_defect(const MonotoneOperator& op, int pairs = 1000, std::uint64_t seed = 12);

struct TruncationCheck {
    double inside_max_difference = 0.0;  // |f^R - f| inside the ball (should be exactly 0)
    double continuity_max_relative = 0.0;
};

TruncationCheck truncation_consistency(const MonotoneOperator& op, const std::vector<double>& R_values,
                                       int directions = 200, double eps = 1e-6, std::uint64_t seed = 13);

// ---------------------------------------------------------------------------
// Functional-level fits

struct EquicoercivityFit {
    double R = 0.0;
    double c1 = 0.0;
    double c5 = 0.0;
    double fr4_ratio = 0.0;  // sup |F^R v|_{V'} / (R^{p-2} ||v||)
};

/// Fits <F^R v, v> >= c1 ||v||^2 - c5 with c5 = |O| + max(-<F^R v, v>)_+ and
/// c1 = min (<F^R v, v> + c5) / ||v||^2 over the samples.
EquicoercivityFit equicoercivity_fit(const OperatorAssembler& assembler, double R, int samples = 1000,
                                     std::uint64_t seed = 14);

struct CoercivityBounds {
    double f3_min = 0.0;  // min <F v, v> / ||v||_X^p
    double f4_max = 0.0;  // max |F v|_{X'} / (||v||_X^{p-1} + 1)
};

CoercivityBounds coercivity_bounds(const OperatorAssembler& assembler, int samples = 1000, std::uint64_t seed = 15);

struct PointwiseConstants {
    double c1_lower = 0.0;  // min x D^2J x / |x|_p^p and J(x)/|x|_p^p over |x|_p >= 1
    double c1_upper = 0.0;  // max |f(x)|_{p'} / |x|_p^{p-1} over |x|_p >= 1
    double c2 = 0.0;
    double c3 = 0.0;
    double c6 = 0.0;
};

PointwiseConstants pointwise_constants(const MonotoneOperator& op, int points = 2000, std::uint64_t seed = 16);

// ---------------------------------------------------------------------------
// Convection

struct ConvectionBounds {
    int n = 0;
    double cancellation = 0.0;  // max |<B_R~(u), u>| / (||u|| |u|^2)
    double ratio_DA = 0.0;      // max |B(v,w)|_{D(A)'} / (|v| ||w||)
    double ratio_V = 0.0;       // max |B(v,v)|_{V'} / (|v|^{1/2} ||v||^{3/2})
    double ratio_X = 0.0;       // max |B(v,v)|_{X'} / (|v| ||v||)
};

ConvectionBounds convection_bounds(int n, int pairs = 1000, std::uint64_t seed = 17, double R_tilde = 1.0);

/// max |theta(s) - theta(t)| / |s - t| over random pairs.
double theta_lipschitz_ratio(double R_tilde, int pairs = 10000, std::uint64_t seed = 18);

// ---------------------------------------------------------------------------
// Noise

struct CountCheck {
    double mean = 0.0;
    double expected = 0.0;
    double std_error = 0.0;  // of the mean, from the Poisson variance
};

CountCheck poisson_count_check(const NoiseDescriptor& desc, double T, int paths = 2000, std::uint64_t seed = 19);

struct MartingaleCheck {
    double max_z = 0.0;  // max componentwise |mean| / standard error
    double second_moment = 0.0;
    double second_moment_se = 0.0;
    double isometry_target = 0.0;  // dt sum_m lambda_m |K(u, xi_m)|^2
};

MartingaleCheck compensated_jump_check(const NoiseDescriptor& desc, const Coeffs& u, double dt, int paths = 10000,
                                       std::uint64_t seed = 20);

/// max of (||G(v)||^2 + sum lambda |K(v)|^2) / (rho (1 + |v|^2)).
double noise_growth_ratio(const NoiseDescriptor& desc, int n, int samples = 1000, std::uint64_t seed = 21);
/// max of the Lipschitz quotient divided by the descriptor's constant.
double noise_lipschitz_ratio(const NoiseDescriptor& desc, int n, int samples = 1000, std::uint64_t seed = 22);

/// Empirical Var(dW_j) / (q_j dt) over the first mode with q_j > 0.
double wiener_variance_ratio(const NoiseDescriptor& desc, double dt, int increments = 10000, std::uint64_t seed = 23);

// ---------------------------------------------------------------------------
// The full suite for one operator

struct SuiteOptions {
    OperatorChoice op;
    int n = 16;
    int pairs = 10000;
    int samples = 1000;
    std::vector<double> R_grid{2.0, 4.0, 8.0, 16.0};
    NoiseDescriptor noise;
    std::uint64_t seed = 1;
};

/// Default noise used by the suite when none is configured.
NoiseDescriptor reference_noise(int n);

struct PropertySuite {
    std::string operator_name;
    std::vector<PropertyResult> rows;
    std::vector<std::pair<std::string, double>> constants;
    bool all_passed() const;
};

PropertySuite run_property_suite(const SuiteOptions& options);

}  // namespace levygal
