#include "levygal/solver.hpp"

#include <cmath>
#include <limits>

#include "levygal/rng.hpp"

namespace levygal {

namespace {

constexpr double kBlowUp = 1e6;
constexpr double kImplicitTol = 1e-12;
constexpr int kImplicitMaxIter = 100;

}  // namespace

std::vector<std::string> SolverConfig::validate() const {
    std::vector<std::string> warnings;
    try {
        domain.validate();
        noise.validate();
        step_count(T, dt);
    } catch (const std::invalid_argument& e) {
        throw ConfigInvalid(e.what());
    }
    if (n < 1) throw ConfigInvalid("n must be positive");
    if (!(gamma >= 0.0)) throw ConfigInvalid("gamma must be nonnegative");
    if (gamma == 0.0 && convection_enabled) throw ConfigInvalid("gamma = 0 requires convection to be disabled");
    if (convection_enabled && domain.dim != 1) throw ConfigInvalid("convection is only available on 1-D domains");
    if (truncation && !(truncation->R > 1.0)) throw ConfigInvalid("truncation R must exceed 1");
    if (!(cutoff.R_tilde >= 1.0)) throw ConfigInvalid("cutoff R_tilde must be at least 1");
    if (op) {
        try {
            make_operator(*op, domain.dim);
        } catch (const std::invalid_argument& e) {
            throw ConfigInvalid(e.what());
        }
    }
    if (implicit_F && !op) warnings.push_back("implicit_F has no effect without an operator");
    const double lambda_n = SpectralBasis(domain, n, n_quad > 0 ? n_quad : SpectralBasis::min_quad(domain, n))
                                .eigenvalues()[n - 1];
    if (dt > 0.5 / (lambda_n * gamma + 1.0))
        warnings.push_back("dt exceeds the stability heuristic 0.5/(lambda_n gamma + 1)");
    return warnings;
}

Simulator::Simulator(SolverConfig config) : config_(std::move(config)) {
    config_.validate();
    basis_ = SpectralBasis::build(config_.domain, config_.n, config_.n_quad);
    if (config_.op) assembler_.emplace(basis_, make_operator(*config_.op, config_.domain.dim));
}

Coeffs Simulator::initial_state() const {
    const auto& ic = config_.initial;
    const int n = config_.n;
    switch (ic.kind) {
        case InitialCondition::Kind::zero: return Coeffs::Zero(n);
        case InitialCondition::Kind::deterministic: return resize_coeffs(ic.coeffs, n);
        case InitialCondition::Kind::random: {
            const std::uint64_t seed = ic.seed.value_or(config_.seed);
            Coeffs u(n);
            for (int j = 0; j < n; ++j) {
                const CounterStream rng(seed, StreamId::initial, std::uint32_t(j));
                u[j] = ic.amplitude * std::pow(double(j + 1), -ic.decay_r) * rng.normal_at(0);
            }
            return u;
        }
    }
    return Coeffs::Zero(n);
}

LevyNoisePath Simulator::sample_noise() const {
    return sample_path(config_.noise, config_.T, config_.dt, config_.seed, config_.n);
}

Coeffs Simulator::explicit_drift(const Coeffs& u) const {
    Coeffs drift = Coeffs::Zero(config_.n);
    if (config_.convection_enabled) drift += assemble_B_cutoff(*basis_, u, config_.cutoff);
    if (assembler_) drift += assembler_->assemble_FR(u, config_.truncation);
    return drift;
}

Coeffs Simulator::solve_implicit(const Coeffs& rhs, const Coeffs& guess, int step) const {
    const double dt = config_.dt;
    const Eigen::VectorXd m = Eigen::VectorXd::Ones(config_.n) + config_.gamma * dt * basis_->eigenvalues();
    auto residual = [&](const Coeffs& v) -> Coeffs {
        return m.cwiseProduct(v) + dt * assembler_->assemble_FR(v, config_.truncation) - rhs;
    };
    const double tol = kImplicitTol * (1.0 + rhs.norm());
    Coeffs v = guess;
    Coeffs r = residual(v);
    double rn = r.norm();
    std::vector<double> history{rn};
    for (int it = 0; it < kImplicitMaxIter && rn > tol; ++it) {
        Eigen::MatrixXd jac = dt * assembler_->jacobian(v, config_.truncation);
        jac.diagonal() += m;
        const Coeffs delta = -jac.partialPivLu().solve(r);
        // damped update: halve until the residual decreases
        double alpha = 1.0;
        Coeffs trial = v + delta;
        Coeffs rt = residual(trial);
        while (rt.norm() >= rn && alpha > 1e-10) {
            alpha *= 0.5;
            trial = v + alpha * delta;
            rt = residual(trial);
        }
        if (rt.norm() >= rn) {
            // stalled at the roundoff floor
            if (rn <= 1e3 * tol) return v;
            break;
        }
        v = std::move(trial);
        r = std::move(rt);
        rn = r.norm();
        history.push_back(rn);
    }
    if (rn > tol) {
        Trajectory partial = make_trajectory();
        throw SolverAbort("implicit F iteration did not converge at step " + std::to_string(step), step,
                          std::move(partial), std::move(history));
    }
    return v;
}

Coeffs Simulator::step(const Coeffs& u, int k, const LevyNoisePath& path, LedgerEntry* ledger,
                       std::vector<AppliedJump>* jumps) const {
    const double dt = config_.dt;
    const auto& desc = config_.noise;
    const auto& lambda = basis_->eigenvalues();

    const Coeffs g = wiener_term(desc, u, path.wiener.row(k).transpose());
    const auto events = path.jumps_in_step(k);
    const auto large = path.large_jumps_in_step(k);
    Coeffs jump = compensated_jump_term(desc, u, events, dt);
    if (!large.empty()) jump += large_jump_term(desc, u, large);
    const Coeffs noise = g + jump;

    Coeffs conv = Coeffs::Zero(config_.n);
    if (config_.convection_enabled) conv = assemble_B_cutoff(*basis_, u, config_.cutoff);

    Coeffs next;
    Coeffs f = Coeffs::Zero(config_.n);
    const Eigen::VectorXd m = Eigen::VectorXd::Ones(config_.n) + config_.gamma * dt * lambda;
    if (assembler_ && config_.implicit_F) {
        const Coeffs rhs = u - dt * conv + noise;
        next = solve_implicit(rhs, rhs.cwiseQuotient(m), k);
        f = assembler_->assemble_FR(next, config_.truncation);
    } else {
        if (assembler_) f = assembler_->assemble_FR(u, config_.truncation);
        next = (u - dt * conv - dt * f + noise).cwiseQuotient(m);
    }

    if (ledger) {
        LedgerEntry& e = *ledger;
        const double h0 = u.squaredNorm(), h1 = next.squaredNorm();
        e.dH = h1 - h0;
        e.viscous = 2.0 * config_.gamma * dt * next.cwiseAbs2().dot(lambda);
        e.convection = 2.0 * dt * conv.dot(next);
        e.f_pairing = 2.0 * dt * f.dot(next);
        e.wiener_work = 2.0 * g.dot(u);
        e.jump_work = 2.0 * jump.dot(u);
        e.quadratic_variation = noise.squaredNorm();
        e.numerical_dissipation = (next - u - noise).squaredNorm();
        e.residual = e.dH + e.viscous + e.convection + e.f_pairing - e.wiener_work - e.jump_work -
                     e.quadratic_variation + e.numerical_dissipation;
        e.scale = 1.0 + std::max(h0, h1);
    }
    if (jumps) {
        for (const auto& ev : events) jumps->push_back({k, ev.t, ev.mark, false});
        for (const auto& ev : large) jumps->push_back({k, ev.t, ev.mark, true});
    }
    return next;
}

Trajectory Simulator::make_trajectory() const {
    Trajectory t;
    t.basis = basis_;
    t.dt = config_.dt;
    if (assembler_) {
        t.x_p = assembler_->op().p;
        t.x_channels = assembler_->op().norm_channels;
    }
    return t;
}

Trajectory Simulator::run(const Coeffs& u0, const LevyNoisePath& path) const {
    if (path.steps != step_count(config_.T, config_.dt) || path.modes < config_.n)
        throw ConfigInvalid("noise path does not match the run configuration");
    if (u0.size() != config_.n) throw ConfigInvalid("initial state does not match the Galerkin size");
    Trajectory traj = make_trajectory();
    const int steps = path.steps;
    traj.times.resize(steps + 1);
    traj.states.resize(steps + 1, config_.n);
    traj.ledger.resize(steps);
    traj.times[0] = 0.0;
    traj.states.row(0) = u0.transpose();
    Coeffs u = u0;
    auto truncate_to = [&](int rows) {
        Trajectory partial = traj;
        partial.times.resize(rows);
        partial.states.conservativeResize(rows, Eigen::NoChange);
        partial.ledger.resize(std::max(0, rows - 1));
        return partial;
    };
    for (int k = 0; k < steps; ++k) {
        Coeffs next;
        try {
            next = step(u, k, path, &traj.ledger[k], &traj.jump_log);
        } catch (const SolverAbort& e) {
            throw SolverAbort(e.what(), k, truncate_to(k + 1), e.iterate_history());
        }
        if (!next.allFinite())
            throw SolverAbort("non-finite state at step " + std::to_string(k + 1), k + 1, truncate_to(k + 1));
        if (next.norm() > kBlowUp)
            throw SolverAbort("state norm exceeded 1e6 at step " + std::to_string(k + 1), k + 1, truncate_to(k + 1));
        traj.times[k + 1] = (k + 1) * config_.dt;
        traj.states.row(k + 1) = next.transpose();
        u = std::move(next);
    }
    return traj;
}

Trajectory simulate(const SolverConfig& config) { return Simulator(config).run(); }

double trajectory_x_norm_pow(const Trajectory& traj, const Coeffs& u) {
    double acc = 0.0;
    for (Channel c : traj.x_channels) acc += lp_integral(*traj.basis, channel_values(*traj.basis, u, c), traj.x_p);
    return acc;
}

EnergyReport energy_report(const Trajectory& traj) {
    EnergyReport r;
    for (int k = 0; k < traj.size(); ++k) {
        const Coeffs u = traj.state(k);
        r.sup_h2 = std::max(r.sup_h2, u.squaredNorm());
        if (k + 1 < traj.size()) {
            r.int_v2 += traj.dt * u.cwiseAbs2().dot(traj.basis->eigenvalues());
            r.int_xp += traj.dt * trajectory_x_norm_pow(traj, u);
        }
    }
    for (const auto& e : traj.ledger) r.max_ledger_residual = std::max(r.max_ledger_residual, e.relative_residual());
    return r;
}

}  // namespace levygal
