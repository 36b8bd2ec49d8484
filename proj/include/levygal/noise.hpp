#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "levygal/spaces.hpp"

namespace levygal {

class NoiseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class GKind { additive, diagonal_linear };

/// One atom of the mark measure: nu has mass `intensity` at `xi` and the
/// coefficient there is the affine map K(u, xi) = a + b u.
struct Mark {
    double xi = 1.0;
    double intensity = 1.0;
    Coeffs a;  // any length; truncated or zero-padded to the Galerkin size
    double b = 0.0;
};

struct NoiseDescriptor {
    /// Eigenvalues of Q per mode; missing entries count as zero.
    std::vector<double> q;
    GKind g_kind = GKind::additive;
    std::vector<double> sigma;
    /// nu restricted to E0 (compensated channel).
    std::vector<Mark> marks;
    /// Finite-activity jumps on E \ E0 (uncompensated channel).
    std::vector<Mark> large_jumps;

    static std::vector<double> power_law_q(double q0, double s, int n);

    void validate() const;
    double q_at(int j) const { return j < int(q.size()) ? q[j] : 0.0; }
    double sigma_at(int j) const { return j < int(sigma.size()) ? sigma[j] : 0.0; }
    double total_intensity() const;
    double large_intensity() const;
    bool silent() const;

    /// rho with ||G(v)||^2 + sum_m lambda_m |K(v, xi_m)|^2 <= rho (1 + |v|^2).
    double rho() const;
    /// L with ||G(u)-G(v)||^2 + sum_m lambda_m |K(u)-K(v)|^2 <= L |u-v|^2.
    double lipschitz() const;
};

struct JumpEvent {
    double t;
    int mark;
};

struct LevyNoisePath {
    std::uint64_t seed = 0;
    double T = 0.0;
    double dt = 0.0;
    int steps = 0;
    int modes = 0;
    int refinement_level = 0;
    /// steps x modes, entry (k, j) ~ Normal(0, q_j dt)
    Eigen::MatrixXd wiener;
    std::vector<JumpEvent> jumps;
    std::vector<JumpEvent> large_jumps;

    std::span<const JumpEvent> jumps_in_step(int k) const;
    std::span<const JumpEvent> large_jumps_in_step(int k) const;
    void index_events();

private:
    std::vector<std::size_t> jump_offsets_;
    std::vector<std::size_t> large_offsets_;
};

/// Number of steps of size dt in (0, T]; rejects non-divisible horizons.
int step_count(double T, double dt);

LevyNoisePath sample_path(const NoiseDescriptor& desc, double T, double dt, std::uint64_t seed, int modes);

/// Halves the step by Brownian-bridge subdivision; jump events are kept.
LevyNoisePath refine_path(const LevyNoisePath& path, const NoiseDescriptor& desc);

/// G(u) dW over one step for the given per-mode increments.
Coeffs wiener_term(const NoiseDescriptor& desc, const Coeffs& u, const Eigen::Ref<const Eigen::VectorXd>& increment);

Coeffs jump_map(const Mark& mark, const Coeffs& u);

/// sum over events of K(u, xi) minus dt * sum_m lambda_m K(u, xi_m).
Coeffs compensated_jump_term(const NoiseDescriptor& desc, const Coeffs& u, std::span<const JumpEvent> events, double dt);

/// Uncompensated sum of the large-jump maps over the events.
Coeffs large_jump_term(const NoiseDescriptor& desc, const Coeffs& u, std::span<const JumpEvent> events);

}  // namespace levygal
