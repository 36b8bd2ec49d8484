#include "levygal/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace levygal {

int thread_count() {
    if (const char* env = std::getenv("LEVYGAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return int(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& body, int threads) {
    if (count <= 0) return;
    if (threads <= 0) threads = thread_count();
    threads = std::min(threads, count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double compensated_sum(std::span<const double> values) {
    double sum = 0.0, c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            c += (sum - t) + v;
        else
            c += (v - t) + sum;
        sum = t;
    }
    return sum + c;
}

MeanEstimate jackknife_mean(std::span<const double> values) {
    MeanEstimate r;
    const std::size_t n = values.size();
    if (n == 0) return r;
    const double total = compensated_sum(values);
    r.mean = total / double(n);
    if (n < 2) return r;
    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) loo[i] = (total - values[i]) / double(n - 1);
    const double loo_mean = compensated_sum(loo) / double(n);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (loo[i] - loo_mean) * (loo[i] - loo_mean);
    r.std_error = std::sqrt(double(n - 1) / double(n) * compensated_sum(dev));
    return r;
}

Coeffs RandomFieldSampler::draw(CounterStream& rng, int n) const {
    Coeffs c(n);
    for (int j = 0; j < n; ++j) c[j] = rng.next_normal() * std::pow(double(j + 1), -decay);
    const double la = std::log(amp_min), lb = std::log(amp_max);
    const double amplitude = std::exp(la + (lb - la) * rng.next_uniform());
    const double h = c.norm();
    if (h > 0.0) c *= amplitude / h;
    return c;
}

DualNormEstimator::DualNormEstimator(const SpectralBasis& basis, double p, std::vector<Channel> channels, int count,
                                     std::uint64_t seed)
    : p_(p), weights_(basis.weights()), eigenvalues_(basis.eigenvalues()) {
    const int n = basis.size();
    for (Channel c : channels)
        for (int comp = 0; comp < basis.channel_width(c); ++comp) tables_.push_back(basis.table(c, comp));
    tests_.resize(n, count);
    CounterStream rng(seed, StreamId::sampler, 0xd0a1);
    for (int c = 0; c < count; ++c) {
        Coeffs phi(n);
        for (int j = 0; j < n; ++j) phi[j] = rng.next_normal() / double(j + 1);
        tests_.col(c) = phi / std::pow(norm_pow(phi, nullptr), 1.0 / p);
    }
}

double DualNormEstimator::norm_pow(const Coeffs& phi, Coeffs* gradient) const {
    double acc = 0.0;
    if (gradient) gradient->setZero(phi.size());
    for (const auto& T : tables_) {
        const Eigen::VectorXd v = T * phi;
        const Eigen::ArrayXd a = v.array().abs();
        acc += weights_.dot(a.pow(p_).matrix());
        if (gradient) {
            const Eigen::VectorXd f = (weights_.array() * a.pow(p_ - 2.0) * v.array()).matrix();
            *gradient += p_ * (T.transpose() * f);
        }
    }
    return acc;
}

double DualNormEstimator::operator()(const Coeffs& g) const {
    if (g.size() == 0 || g.isZero(0.0)) return 0.0;
    // best random test, then the H and V Riesz directions
    Eigen::Index best = 0;
    double value = (tests_.transpose() * g).cwiseAbs().maxCoeff(&best);
    Coeffs phi = tests_.col(best) * (tests_.col(best).dot(g) < 0.0 ? -1.0 : 1.0);
    const Eigen::VectorXd precond = (1.0 + eigenvalues_.array()).inverse().matrix();
    for (const Coeffs& cand : {Coeffs(g), Coeffs(g.cwiseProduct(precond))}) {
        const double v = cand.dot(g) / std::pow(norm_pow(cand, nullptr), 1.0 / p_);
        if (v > value) {
            value = v;
            phi = cand / std::pow(norm_pow(cand, nullptr), 1.0 / p_);
        }
    }
    // preconditioned ascent on <g, phi> / ||phi||_X with backtracking
    double step = 1.0;
    Coeffs grad_n(phi.size());
    for (int it = 0; it < 60 && step > 1e-12; ++it) {
        const double b = std::pow(norm_pow(phi, &grad_n), 1.0 / p_);
        const double a = g.dot(phi);
        const Coeffs dir = ((g * b - a * grad_n * (b / (p_ * std::pow(b, p_)))) / (b * b)).cwiseProduct(precond);
        bool improved = false;
        while (step > 1e-12) {
            const Coeffs trial = phi + step * dir / std::max(dir.norm(), 1e-300) * phi.norm();
            const double tn = std::pow(norm_pow(trial, nullptr), 1.0 / p_);
            const double tv = g.dot(trial) / tn;
            if (tv > value * (1.0 + 1e-10)) {
                value = tv;
                phi = trial / tn;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return value;
}

double gagliardo_seminorm(const Trajectory& traj, double alpha, double m, SeminormSpace space) {
    const int cells = traj.size() - 1;
    if (cells < 1) return 0.0;
    const double dt = traj.dt;
    Eigen::MatrixXd v = traj.states.topRows(cells);
    if (space == SeminormSpace::dual)
        v = v * traj.basis->eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
    std::vector<double> rows(cells, 0.0);
    const double kexp = 1.0 + alpha * m;
    for (int i = 0; i < cells; ++i) {
        double acc = 0.0;
        for (int j = 0; j < cells; ++j) {
            if (j == i) continue;
            const double d = (v.row(i) - v.row(j)).norm();
            if (d == 0.0) continue;
            acc += std::pow(d, m) / std::pow(std::abs(i - j) * dt, kexp);
        }
        rows[i] = acc * dt * dt;
    }
    return std::pow(compensated_sum(rows), 1.0 / m);
}

IncrementReport increment_statistics(std::span<const Trajectory> ensemble, const std::vector<int>& lag_steps,
                                     int samples_per_path, std::uint64_t seed) {
    IncrementReport r;
    if (ensemble.empty()) return r;
    const Trajectory& first = ensemble.front();
    const DualNormEstimator dual_x(*first.basis, first.x_p, first.x_channels);
    for (int lag : lag_steps) {
        if (lag < 0) throw std::invalid_argument("increment lag must be nonnegative");
        r.lags.push_back(lag * first.dt);
        std::vector<double> samples;
        for (std::size_t e = 0; e < ensemble.size(); ++e) {
            const Trajectory& traj = ensemble[e];
            const int span = traj.size() - 1 - lag;
            if (span < 0) throw std::invalid_argument("increment lag exceeds the trajectory length");
            CounterStream rng(seed, StreamId::stopping, std::uint32_t(e));
            for (int s = 0; s < samples_per_path; ++s) {
                const int k = std::min(span, int(rng.next_uniform() * (span + 1)));
                const Coeffs d = traj.state(k + lag) - traj.state(k);
                samples.push_back(dual_v_norm(*traj.basis, d) + dual_x(d));
            }
        }
        r.increments.push_back(jackknife_mean(samples));
    }
    // least squares fit of log E|increment| = log C + eps log delta
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < r.lags.size(); ++i) {
        if (r.lags[i] <= 0.0 || r.increments[i].mean <= 0.0) continue;
        const double x = std::log(r.lags[i]), y = std::log(r.increments[i].mean);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) r.fitted_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return r;
}

StudyAxis parse_axis(const std::string& name) {
    if (name == "n") return StudyAxis::n;
    if (name == "R") return StudyAxis::R;
    if (name == "R_tilde") return StudyAxis::R_tilde;
    throw std::invalid_argument("unknown study axis '" + name + "' (expected n, R or R_tilde)");
}

std::string axis_name(StudyAxis axis) {
    switch (axis) {
        case StudyAxis::n: return "n";
        case StudyAxis::R: return "R";
        case StudyAxis::R_tilde: return "R_tilde";
    }
    return "?";
}

SolverConfig with_axis_value(const SolverConfig& base, StudyAxis axis, double value) {
    SolverConfig c = base;
    switch (axis) {
        case StudyAxis::n:
            if (value < 1 || value != std::floor(value)) throw ConfigInvalid("n axis values must be positive integers");
            c.n = int(value);
            break;
        case StudyAxis::R: {
            TruncationParams t = base.truncation.value_or(TruncationParams{});
            t.R = value;
            c.truncation = t;
            break;
        }
        case StudyAxis::R_tilde: c.cutoff.R_tilde = value; break;
    }
    return c;
}

double l2_time_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trajectories live on different time grids");
    const int n = int(std::max(a.states.cols(), b.states.cols()));
    std::vector<double> terms(std::max(0, a.size() - 1));
    for (int k = 0; k + 1 < a.size(); ++k)
        terms[k] = a.dt * (resize_coeffs(a.state(k), n) - resize_coeffs(b.state(k), n)).squaredNorm();
    return std::sqrt(compensated_sum(terms));
}

ConvergenceReport convergence_study(const SolverConfig& base, StudyAxis axis, const std::vector<double>& values) {
    ConvergenceReport r;
    r.axis = axis;
    r.values = values;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1]) throw ConfigInvalid("study axis values must be non-decreasing");
    std::vector<std::optional<Trajectory>> runs(values.size());
    std::vector<std::string> errors(values.size());
    parallel_for(int(values.size()), [&](int i) {
        try {
            runs[i] = simulate(with_axis_value(base, axis, values[i]));
        } catch (const SolverAbort& e) {
            errors[i] = axis_name(axis) + " = " + std::to_string(values[i]) + ": " + e.what();
        }
    });
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!runs[i]) {
            r.complete = false;
            if (r.failure.empty()) r.failure = errors[i];
        }
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!runs[i] || !runs[i - 1]) {
            r.l2_distances.push_back(std::nan(""));
            r.terminal_distances.push_back(std::nan(""));
            continue;
        }
        const Trajectory& a = *runs[i - 1];
        const Trajectory& b = *runs[i];
        r.l2_distances.push_back(l2_time_distance(a, b));
        const int n = int(std::max(a.states.cols(), b.states.cols()));
        r.terminal_distances.push_back(
            (resize_coeffs(a.state(a.size() - 1), n) - resize_coeffs(b.state(b.size() - 1), n)).norm());
    }
    r.monotone_cauchy = r.complete;
    for (std::size_t i = 1; i < r.l2_distances.size(); ++i)
        if (!(r.l2_distances[i] <= r.l2_distances[i - 1])) r.monotone_cauchy = false;
    return r;
}

MintyReport minty_residual(const OperatorAssembler& assembler, int pairs, std::uint64_t seed,
                           const std::optional<TruncationParams>& trunc, const RandomFieldSampler& sampler) {
    MintyReport r;
    r.pairs = pairs;
    const SpectralBasis& basis = assembler.basis();
    const double p = assembler.op().p;
    const int n = basis.size();
    std::vector<double> pairing_v(pairs), scaled(pairs), slope(pairs), pconst(pairs);
    std::vector<char> bad(pairs, 0);
    parallel_for(pairs, [&](int i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs u = sampler.draw(rng, n);
        const Coeffs v = sampler.draw(rng, n);
        const Coeffs diff = u - v;
        const double pr = (assembler.assemble_FR(u, trunc) - assembler.assemble_FR(v, trunc)).dot(diff);
        const double xu = assembler.x_norm(u), xv = assembler.x_norm(v), xd = assembler.x_norm(diff);
        const double scale = std::pow(xu + xv, p - 1.0) * xd;
        pairing_v[i] = pr;
        scaled[i] = scale > 0.0 ? pr / scale : 0.0;
        bad[i] = pr < -kMonotonicityTolerance * scale;
        const double vd = v_norm(basis, diff);
        slope[i] = vd > 0.0 ? pr / (vd * vd) : std::numeric_limits<double>::infinity();
        pconst[i] = xd > 0.0 ? pr / std::pow(xd, p) : std::numeric_limits<double>::infinity();
    });
    if (pairs > 0) {
        r.min_pairing = *std::min_element(pairing_v.begin(), pairing_v.end());
        r.min_scaled_pairing = *std::min_element(scaled.begin(), scaled.end());
        r.strong_slope = *std::min_element(slope.begin(), slope.end());
        r.strong_p_constant = *std::min_element(pconst.begin(), pconst.end());
    }
    r.violations = int(std::count(bad.begin(), bad.end(), 1));
    r.passed = r.violations == 0;
    return r;
}

namespace {

bool same_marks(const std::vector<Mark>& a, const std::vector<Mark>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].xi != b[i].xi || a[i].intensity != b[i].intensity || a[i].b != b[i].b) return false;
        if (a[i].a.size() != b[i].a.size() || a[i].a != b[i].a) return false;
    }
    return true;
}

/// Every setting except the initial condition.
std::string dynamics_mismatch(const SolverConfig& a, const SolverConfig& b) {
    if (a.domain.dim != b.domain.dim || a.domain.lengths != b.domain.lengths || a.domain.boundary != b.domain.boundary)
        return "domain";
    if (a.n != b.n) return "n";
    if (a.n_quad != b.n_quad) return "n_quad";
    if (a.T != b.T) return "T";
    if (a.dt != b.dt) return "dt";
    if (a.gamma != b.gamma) return "gamma";
    if (a.op.has_value() != b.op.has_value()) return "operator";
    if (a.op && (a.op->name != b.op->name || a.op->p != b.op->p || a.op->coefficients != b.op->coefficients ||
                 a.op->fold_laplacian != b.op->fold_laplacian))
        return "operator";
    if (a.truncation.has_value() != b.truncation.has_value()) return "truncation";
    if (a.truncation && (a.truncation->R != b.truncation->R || a.truncation->R0 != b.truncation->R0))
        return "truncation";
    if (a.cutoff.R_tilde != b.cutoff.R_tilde) return "cutoff";
    if (a.convection_enabled != b.convection_enabled) return "convection";
    if (a.noise.q != b.noise.q || a.noise.g_kind != b.noise.g_kind || a.noise.sigma != b.noise.sigma ||
        !same_marks(a.noise.marks, b.noise.marks) || !same_marks(a.noise.large_jumps, b.noise.large_jumps))
        return "noise";
    if (a.implicit_F != b.implicit_F) return "implicit_F";
    if (a.seed != b.seed) return "seed";
    return {};
}

}  // namespace

UniquenessReport compare_runs(const SolverConfig& a, const SolverConfig& b, double level_M, double gronwall_C) {
    if (const std::string what = dynamics_mismatch(a, b); !what.empty())
        throw ConfigInvalid("uniqueness runs differ in '" + what + "'");
    const Simulator sa(a), sb(b);
    const LevyNoisePath path = sa.sample_noise();
    const Trajectory ta = sa.run(sa.initial_state(), path);
    const Trajectory tb = sb.run(sb.initial_state(), path);

    UniquenessReport r;
    r.level_M = level_M;
    r.bit_identical = ta.states.rows() == tb.states.rows() && (ta.states.array() == tb.states.array()).all();
    r.distances.resize(ta.size());
    for (int k = 0; k < ta.size(); ++k) {
        r.distances[k] = (ta.state(k) - tb.state(k)).norm();
        r.sup_distance = std::max(r.sup_distance, r.distances[k]);
    }
    r.initial_distance = r.distances.front();
    double cumulative = 0.0;
    std::vector<double> x2(std::max(0, ta.size() - 1));
    for (int k = 0; k + 1 < ta.size(); ++k) {
        const double xp = trajectory_x_norm_pow(ta, ta.state(k));
        x2[k] = ta.dt * std::pow(xp, 2.0 / ta.x_p);
        cumulative += ta.dt * xp;
        if (!r.tau_M && cumulative > level_M) r.tau_M = ta.times[k + 1];
    }
    r.gronwall_integral = compensated_sum(x2);
    r.gronwall_weight = std::exp(gronwall_C * r.gronwall_integral);
    return r;
}

UniquenessReport uniqueness_experiment(const SolverConfig& config, double delta0, double level_M, double gronwall_C) {
    SolverConfig perturbed = config;
    if (delta0 != 0.0) {
        Coeffs u0 = Simulator(config).initial_state();
        u0[0] += delta0;
        perturbed.initial = InitialCondition{};
        perturbed.initial.kind = InitialCondition::Kind::deterministic;
        perturbed.initial.coeffs = u0;
    }
    return compare_runs(config, perturbed, level_M, gronwall_C);
}

SolverConfig ensemble_member(const SolverConfig& config, int index) {
    SolverConfig c = config;
    c.seed = derive_seed(config.seed, std::uint64_t(index));
    if (c.initial.seed) c.initial.seed = derive_seed(*config.initial.seed, std::uint64_t(index));
    return c;
}

MomentReport moment_study(const SolverConfig& config, int paths) {
    if (paths < 2) throw ConfigInvalid("moment study needs at least 2 paths");
    config.validate();
    std::vector<std::optional<EnergyReport>> reports(paths);
    parallel_for(paths, [&](int i) {
        try {
            reports[i] = energy_report(simulate(ensemble_member(config, i)));
        } catch (const SolverAbort&) {
        }
    });
    MomentReport r;
    r.paths = paths;
    std::vector<double> h, v, x;
    for (const auto& e : reports) {
        if (!e) {
            ++r.aborted;
            continue;
        }
        h.push_back(e->sup_h2);
        v.push_back(e->int_v2);
        x.push_back(e->int_xp);
    }
    r.sup_h2 = jackknife_mean(h);
    r.int_v2 = jackknife_mean(v);
    r.int_xp = jackknife_mean(x);
    return r;
}

OccupancyReport occupancy_study(const SolverConfig& config, const std::vector<double>& R_values) {
    if (!config.op) throw ConfigInvalid("occupancy study needs an operator");
    for (std::size_t i = 1; i < R_values.size(); ++i)
        if (!(R_values[i] > R_values[i - 1])) throw ConfigInvalid("occupancy R values must be increasing");
    OccupancyReport r;
    r.R = R_values;
    const std::size_t count = R_values.size();
    r.occupancy.assign(count, 0.0);
    r.scaled.assign(count, 0.0);
    r.max_gradient.assign(count, 0.0);
    parallel_for(int(count), [&](int i) {
        const SolverConfig c = with_axis_value(config, StudyAxis::R, R_values[i]);
        const Simulator sim(c);
        const Trajectory traj = sim.run();
        const OperatorAssembler& as = *sim.assembler();
        std::vector<double> occ(std::max(0, traj.size() - 1));
        double peak = 0.0;
        for (int k = 0; k < traj.size(); ++k) {
            const Coeffs u = traj.state(k);
            for (double m : as.max_pointwise(u)) peak = std::max(peak, m);
            if (k + 1 < traj.size()) {
                double total = 0.0;
                for (double o : as.occupancy(u, *c.truncation)) total += o;
                occ[k] = total;
            }
        }
        r.occupancy[i] = occ.empty() ? 0.0 : compensated_sum(occ) / double(occ.size());
        r.scaled[i] = r.occupancy[i] * std::pow(R_values[i], c.op->p);
        r.max_gradient[i] = peak;
    });
    r.monotone_decreasing = true;
    for (std::size_t i = 1; i < count; ++i)
        if (r.occupancy[i] > r.occupancy[i - 1]) r.monotone_decreasing = false;
    return r;
}

}  // namespace levygal
