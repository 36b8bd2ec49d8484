#include "levygal/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "levygal/rng.hpp"

namespace levygal {

std::vector<double> NoiseDescriptor::power_law_q(double q0, double s, int n) {
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) q[j] = q0 * std::pow(double(j + 1), -2.0 * s);
    return q;
}

void NoiseDescriptor::validate() const {
    double trace = 0.0;
    for (double v : q) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw NoiseError("Q eigenvalues must be finite and nonnegative");
        trace += v;
    }
    if (!std::isfinite(trace)) throw NoiseError("Q must be trace class");
    for (const auto* list : {&marks, &large_jumps})
        for (const auto& m : *list)
            if (!(m.intensity > 0.0) || !std::isfinite(m.intensity))
                throw NoiseError("mark intensities must be positive");
}

double NoiseDescriptor::total_intensity() const {
    double s = 0.0;
    for (const auto& m : marks) s += m.intensity;
    return s;
}

double NoiseDescriptor::large_intensity() const {
    double s = 0.0;
    for (const auto& m : large_jumps) s += m.intensity;
    return s;
}

bool NoiseDescriptor::silent() const {
    for (std::size_t j = 0; j < q.size(); ++j)
        if (q[j] * sigma_at(int(j)) != 0.0) return false;
    return marks.empty() && large_jumps.empty();
}

double NoiseDescriptor::rho() const {
    double g = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) g += q[j] * sigma_at(int(j)) * sigma_at(int(j));
    double k = 0.0;
    for (const auto& m : marks) k += m.intensity * (m.a.squaredNorm() + m.b * m.b);
    return 2.0 * std::max(g, k);
}

double NoiseDescriptor::lipschitz() const {
    double g = 0.0;
    if (g_kind == GKind::diagonal_linear)
        for (std::size_t j = 0; j < q.size(); ++j) g = std::max(g, q[j] * sigma_at(int(j)) * sigma_at(int(j)));
    double k = 0.0;
    for (const auto& m : marks) k += m.intensity * m.b * m.b;
    return g + k;
}

int step_count(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw NoiseError("T and dt must be positive");
    const double ratio = T / dt;
    const double steps = std::round(ratio);
    if (steps < 1.0 || std::abs(steps * dt - T) > 1e-12 * std::max(1.0, T))
        throw NoiseError("dt = " + std::to_string(dt) + " does not divide T = " + std::to_string(T));
    return int(steps);
}

namespace {

std::vector<JumpEvent> sample_events(const std::vector<Mark>& marks, double T, std::uint64_t seed, StreamId stream) {
    std::vector<JumpEvent> out;
    double rate = 0.0;
    for (const auto& m : marks) rate += m.intensity;
    if (rate <= 0.0) return out;
    const CounterStream rng(seed, stream);
    double t = 0.0;
    for (std::uint64_t i = 0;; ++i) {
        const double next = t - std::log(rng.open_uniform_at(2 * i)) / rate;
        t = next > t ? next : std::nextafter(t, 2.0 * T + 1.0);
        if (t > T) break;
        double pick = rng.uniform_at(2 * i + 1) * rate;
        int m = 0;
        while (m + 1 < int(marks.size()) && pick >= marks[m].intensity) {
            pick -= marks[m].intensity;
            ++m;
        }
        out.push_back({t, m});
    }
    return out;
}

std::vector<std::size_t> offsets_for(const std::vector<JumpEvent>& events, double dt, int steps) {
    std::vector<std::size_t> off(steps + 1, 0);
    std::size_t e = 0;
    for (int k = 0; k < steps; ++k) {
        off[k] = e;
        const double right = (k + 1) * dt;
        while (e < events.size() && (events[e].t <= right || k == steps - 1)) ++e;
    }
    off[steps] = events.size();
    return off;
}

}  // namespace

void LevyNoisePath::index_events() {
    jump_offsets_ = offsets_for(jumps, dt, steps);
    large_offsets_ = offsets_for(large_jumps, dt, steps);
}

std::span<const JumpEvent> LevyNoisePath::jumps_in_step(int k) const {
    return {jumps.data() + jump_offsets_.at(k), jumps.data() + jump_offsets_.at(k + 1)};
}

std::span<const JumpEvent> LevyNoisePath::large_jumps_in_step(int k) const {
    return {large_jumps.data() + large_offsets_.at(k), large_jumps.data() + large_offsets_.at(k + 1)};
}

LevyNoisePath sample_path(const NoiseDescriptor& desc, double T, double dt, std::uint64_t seed, int modes) {
    desc.validate();
    LevyNoisePath path;
    path.seed = seed;
    path.T = T;
    path.dt = dt;
    path.steps = step_count(T, dt);
    path.modes = modes;
    path.wiener = Eigen::MatrixXd::Zero(path.steps, modes);
    for (int j = 0; j < modes; ++j) {
        const double q = desc.q_at(j);
        if (q == 0.0) continue;
        const double sd = std::sqrt(q * dt);
        const CounterStream rng(seed, StreamId::wiener, std::uint32_t(j));
        for (int k = 0; k < path.steps; ++k) path.wiener(k, j) = sd * rng.normal_at(std::uint64_t(k));
    }
    path.jumps = sample_events(desc.marks, T, seed, StreamId::jumps);
    path.large_jumps = sample_events(desc.large_jumps, T, seed, StreamId::large_jumps);
    path.index_events();
    return path;
}

LevyNoisePath refine_path(const LevyNoisePath& path, const NoiseDescriptor& desc) {
    LevyNoisePath fine = path;
    fine.dt = path.dt / 2.0;
    fine.steps = 2 * path.steps;
    fine.refinement_level = path.refinement_level + 1;
    fine.wiener = Eigen::MatrixXd::Zero(fine.steps, path.modes);
    for (int j = 0; j < path.modes; ++j) {
        const double sd = 0.5 * std::sqrt(desc.q_at(j) * path.dt);
        const CounterStream rng(path.seed, StreamId::bridge, std::uint32_t(j));
        for (int k = 0; k < path.steps; ++k) {
            const double total = path.wiener(k, j);
            const std::uint64_t idx = (std::uint64_t(fine.refinement_level) << 40) | std::uint64_t(k);
            const double left = sd == 0.0 ? 0.5 * total : 0.5 * total + sd * rng.normal_at(idx);
            fine.wiener(2 * k, j) = left;
            fine.wiener(2 * k + 1, j) = total - left;
        }
    }
    fine.index_events();
    return fine;
}

Coeffs wiener_term(const NoiseDescriptor& desc, const Coeffs& u, const Eigen::Ref<const Eigen::VectorXd>& increment) {
    Coeffs out(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double inc = j < increment.size() ? increment[j] : 0.0;
        const double s = desc.sigma_at(int(j));
        out[j] = desc.g_kind == GKind::additive ? s * inc : s * u[j] * inc;
    }
    return out;
}

Coeffs jump_map(const Mark& mark, const Coeffs& u) {
    Coeffs out = resize_coeffs(mark.a, int(u.size()));
    if (mark.b != 0.0) out += mark.b * u;
    return out;
}

Coeffs compensated_jump_term(const NoiseDescriptor& desc, const Coeffs& u, std::span<const JumpEvent> events, double dt) {
    Coeffs out = Coeffs::Zero(u.size());
    for (const auto& e : events) out += jump_map(desc.marks.at(e.mark), u);
    for (const auto& m : desc.marks) out -= (dt * m.intensity) * jump_map(m, u);
    return out;
}

Coeffs large_jump_term(const NoiseDescriptor& desc, const Coeffs& u, std::span<const JumpEvent> events) {
    Coeffs out = Coeffs::Zero(u.size());
    for (const auto& e : events) out += jump_map(desc.large_jumps.at(e.mark), u);
    return out;
}

}  // namespace levygal
