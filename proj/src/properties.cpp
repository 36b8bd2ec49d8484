#include "levygal/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levygal/convection.hpp"
#include "levygal/rng.hpp"

namespace levygal {

namespace {

double lp(const Arg& x, double p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), p);
    return std::pow(acc, 1.0 / p);
}

int term_width(const MonotoneOperator& op, const IntegrandTerm& t) {
    return SpectralBasis::channel_width(t.channel, op.required_dim == 2 ? 2 : 1);
}

Arg random_point(CounterStream& rng, int m, double lo, double hi) {
    Arg x(m);
    for (int i = 0; i < m; ++i) x[i] = rng.next_normal();
    const double r = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.next_uniform());
    const double nx = x.norm();
    return nx > 0.0 ? Arg(x * (r / nx)) : x;
}

double max_ratio_spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo <= 0.0) return std::numeric_limits<double>::infinity();
    return *hi / *lo;
}

Domain domain_for(const MonotoneOperator& op) {
    return op.required_dim == 2 ? Domain::rectangle(1.0, 1.0, Boundary::dirichlet_x1_only) : Domain::interval();
}

}  // namespace

GradientCheck gradient_consistency(const MonotoneOperator& op, int points, std::uint64_t seed) {
    GradientCheck r;
    r.points = points;
    for (const auto& t : op.terms) {
        const int m = term_width(op, t);
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(100 + t.order));
        for (int s = 0; s < points; ++s) {
            const Arg x = random_point(rng, m, 1e-1, 3.0);
            const double h = 1e-5 * std::max(1.0, x.cwiseAbs().maxCoeff());
            const Arg f = t.integrand->gradient(x);
            const Hess H = t.integrand->hessian(x);
            Arg fd(m);
            Hess hd(m, m);
            for (int i = 0; i < m; ++i) {
                Arg xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                fd[i] = (t.integrand->value(xp) - t.integrand->value(xm)) / (2.0 * h);
                hd.col(i) = (t.integrand->gradient(xp) - t.integrand->gradient(xm)) / (2.0 * h);
            }
            const double fs = std::max(1.0, f.cwiseAbs().maxCoeff());
            const double hs = std::max(1.0, H.cwiseAbs().maxCoeff());
            r.max_gradient_error = std::max(r.max_gradient_error, (fd - f).cwiseAbs().maxCoeff() / fs);
            r.max_hessian_error = std::max(r.max_hessian_error, (hd - H).cwiseAbs().maxCoeff() / hs);
        }
    }
    return r;
}

double midpoint_convexity_defect(const MonotoneOperator& op, int pairs, std::uint64_t seed) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& t : op.terms) {
        if (!t.integrand->convex()) continue;
        const int m = term_width(op, t);
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(200 + t.order));
        for (int s = 0; s < pairs; ++s) {
            const Arg x = random_point(rng, m, 1e-2, 1e1);
            const Arg y = random_point(rng, m, 1e-2, 1e1);
            const double jx = t.integrand->value(x), jy = t.integrand->value(y);
            const double mid = t.integrand->value(Arg(0.5 * (x + y)));
            worst = std::max(worst, (mid - 0.5 * (jx + jy)) / std::max(1.0, std::abs(jx) + std::abs(jy)));
        }
    }
    return worst;
}

TruncationCheck truncation_consistency(const MonotoneOperator& op, const std::vector<double>& R_values, int directions,
                                       double eps, std::uint64_t seed) {
    TruncationCheck r;
    for (const auto& t : op.terms) {
        const int m = term_width(op, t);
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(300 + t.order));
        for (double R : R_values) {
            const TruncationParams trunc{R, 1.0};
            for (int s = 0; s < directions; ++s) {
                Arg dir = random_point(rng, m, 1.0, 1.0);
                const double tn = t.integrand->truncation_norm(dir, op.p);
                if (tn == 0.0) continue;
                dir /= tn;
                const Arg inside = (R * rng.next_open_uniform() * 0.999) * dir;
                r.inside_max_difference = std::max(r.inside_max_difference,
                                                   (eval_fR(op, t.order, inside, trunc) - eval_f(op, t.order, inside))
                                                       .cwiseAbs()
                                                       .maxCoeff());
                const Arg lo = eval_fR(op, t.order, Arg((R - eps) * dir), trunc);
                const Arg hi = eval_fR(op, t.order, Arg((R + eps) * dir), trunc);
                const double scale = std::max(1.0, eval_f(op, t.order, Arg(R * dir)).cwiseAbs().maxCoeff());
                r.continuity_max_relative = std::max(r.continuity_max_relative, (hi - lo).cwiseAbs().maxCoeff() / scale);
            }
        }
    }
    return r;
}

EquicoercivityFit equicoercivity_fit(const OperatorAssembler& assembler, double R, int samples, std::uint64_t seed) {
    EquicoercivityFit r;
    r.R = R;
    const SpectralBasis& basis = assembler.basis();
    const TruncationParams trunc{R, 1.0};
    const RandomFieldSampler sampler{1.0, 1e-2, 1e3};
    std::vector<double> P(samples), vn(samples), fr4(samples);
    parallel_for(samples, [&](int i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs v = sampler.draw(rng, basis.size());
        const Coeffs f = assembler.assemble_FR(v, trunc);
        P[i] = f.dot(v);
        vn[i] = v_norm(basis, v);
        fr4[i] = dual_v_norm(basis, f) / (std::pow(R, assembler.op().p - 2.0) * vn[i]);
    });
    double worst_negative = 0.0;
    for (double x : P) worst_negative = std::max(worst_negative, -x);
    r.c5 = basis.domain().measure() + worst_negative;
    r.c1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) r.c1 = std::min(r.c1, (P[i] + r.c5) / (vn[i] * vn[i]));
    r.fr4_ratio = samples > 0 ? *std::max_element(fr4.begin(), fr4.end()) : 0.0;
    return r;
}

CoercivityBounds coercivity_bounds(const OperatorAssembler& assembler, int samples, std::uint64_t seed) {
    CoercivityBounds r;
    const SpectralBasis& basis = assembler.basis();
    const double p = assembler.op().p;
    const DualNormEstimator dual(basis, p, assembler.op().norm_channels);
    const RandomFieldSampler sampler;
    std::vector<double> f3(samples), f4(samples);
    parallel_for(samples, [&](int i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs v = sampler.draw(rng, basis.size());
        const Coeffs f = assembler.assemble_F(v);
        const double xn = assembler.x_norm(v);
        f3[i] = f.dot(v) / std::pow(xn, p);
        f4[i] = dual(f) / (std::pow(xn, p - 1.0) + 1.0);
    });
    if (samples > 0) {
        r.f3_min = *std::min_element(f3.begin(), f3.end());
        r.f4_max = *std::max_element(f4.begin(), f4.end());
    }
    return r;
}

PointwiseConstants pointwise_constants(const MonotoneOperator& op, int points, std::uint64_t seed) {
    PointwiseConstants r;
    const double p = op.p, q = p / (p - 1.0);
    struct Sample {
        double n, xHx, J, f_dual, xH_dual, fx;
    };
    std::vector<Sample> all;
    for (const auto& t : op.terms) {
        if (!t.integrand->convex()) continue;
        const int m = term_width(op, t);
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(400 + t.order));
        for (int s = 0; s < points; ++s) {
            const Arg x = random_point(rng, m, 1e-2, 1e2);
            const Arg f = t.integrand->gradient(x);
            const Arg xH = t.integrand->hessian(x) * x;
            all.push_back({t.integrand->truncation_norm(x, p), x.dot(xH), t.integrand->value(x), lp(f, q), lp(xH, q),
                           f.dot(x)});
        }
    }
    if (all.empty()) return r;
    r.c1_lower = std::numeric_limits<double>::infinity();
    for (const auto& s : all) {
        if (s.n < 1.0) continue;
        const double np = std::pow(s.n, p);
        r.c1_lower = std::min(r.c1_lower, std::min(s.xHx, s.J) / np);
        r.c1_upper = std::max(r.c1_upper, std::max(s.f_dual, s.xH_dual) / std::pow(s.n, p - 1.0));
    }
    if (!std::isfinite(r.c1_lower)) r.c1_lower = 0.0;
    for (const auto& s : all) {
        const double np = std::pow(s.n, p), np1 = std::pow(s.n, p - 1.0);
        r.c2 = std::max(r.c2, r.c1_lower * np - s.xHx);
        r.c3 = std::max({r.c3, r.c1_lower * np - s.J, s.f_dual - r.c1_upper * np1, s.xH_dual - r.c1_upper * np1});
        r.c6 = std::max(r.c6, r.c1_lower * s.n - s.fx);
    }
    return r;
}

ConvectionBounds convection_bounds(int n, int pairs, std::uint64_t seed, double R_tilde) {
    ConvectionBounds r;
    r.n = n;
    const BasisPtr basis = SpectralBasis::build(Domain::interval(), n);
    const DualNormEstimator dual(*basis, 4.0, {Channel::value, Channel::gradient});
    const RandomFieldSampler sampler{1.5, 1e-2, 1e1};
    const CutoffParams cut{R_tilde};
    const Eigen::VectorXd& lam = basis->eigenvalues();
    std::vector<double> canc(pairs), da(pairs), vv(pairs), xx(pairs);
    parallel_for(pairs, [&](int i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs v = sampler.draw(rng, n);
        const Coeffs w = sampler.draw(rng, n);
        const double hv = v.norm(), Vv = v_norm(*basis, v), Vw = v_norm(*basis, w);
        const Coeffs bc = assemble_B_cutoff(*basis, v, cut);
        canc[i] = std::abs(bc.dot(v)) / (Vv * hv * hv);
        const Coeffs bvw = assemble_B(*basis, v, w);
        da[i] = bvw.cwiseQuotient(lam).norm() / (hv * Vw);
        const Coeffs bvv = assemble_B(*basis, v, v);
        vv[i] = dual_v_norm(*basis, bvv) / (std::sqrt(hv) * std::pow(Vv, 1.5));
        xx[i] = dual(bvv) / (hv * Vv);
    });
    if (pairs > 0) {
        r.cancellation = *std::max_element(canc.begin(), canc.end());
        r.ratio_DA = *std::max_element(da.begin(), da.end());
        r.ratio_V = *std::max_element(vv.begin(), vv.end());
        r.ratio_X = *std::max_element(xx.begin(), xx.end());
    }
    return r;
}

double theta_lipschitz_ratio(double R_tilde, int pairs, std::uint64_t seed) {
    const CutoffParams cut{R_tilde};
    CounterStream rng(seed, StreamId::sampler, 500);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double s = 4.0 * R_tilde * rng.next_uniform(), t = 4.0 * R_tilde * rng.next_uniform();
        if (s == t) continue;
        worst = std::max(worst, std::abs(theta(cut, s) - theta(cut, t)) / std::abs(s - t));
    }
    return worst;
}

CountCheck poisson_count_check(const NoiseDescriptor& desc, double T, int paths, std::uint64_t seed) {
    std::vector<double> counts(paths);
    parallel_for(paths, [&](int i) {
        counts[i] = double(sample_path(desc, T, T, derive_seed(seed, std::uint64_t(i)), 1).jumps.size());
    });
    CountCheck r;
    r.mean = compensated_sum(counts) / double(paths);
    r.expected = desc.total_intensity() * T;
    r.std_error = std::sqrt(r.expected / double(paths));
    return r;
}

MartingaleCheck compensated_jump_check(const NoiseDescriptor& desc, const Coeffs& u, double dt, int paths,
                                       std::uint64_t seed) {
    const int n = int(u.size());
    Eigen::MatrixXd terms(paths, n);
    parallel_for(paths, [&](int i) {
        const LevyNoisePath path = sample_path(desc, dt, dt, derive_seed(seed, std::uint64_t(i)), n);
        terms.row(i) = compensated_jump_term(desc, u, path.jumps_in_step(0), dt).transpose();
    });
    MartingaleCheck r;
    for (int j = 0; j < n; ++j) {
        std::vector<double> col(terms.col(j).data(), terms.col(j).data() + paths);
        const MeanEstimate e = jackknife_mean(col);
        if (e.std_error > 0.0) r.max_z = std::max(r.max_z, std::abs(e.mean) / e.std_error);
        else if (e.mean != 0.0) r.max_z = std::numeric_limits<double>::infinity();
    }
    std::vector<double> sq(paths);
    for (int i = 0; i < paths; ++i) sq[i] = terms.row(i).squaredNorm();
    const MeanEstimate m2 = jackknife_mean(sq);
    r.second_moment = m2.mean;
    r.second_moment_se = m2.std_error;
    for (const auto& m : desc.marks) r.isometry_target += dt * m.intensity * jump_map(m, u).squaredNorm();
    return r;
}

namespace {

double g_hs2(const NoiseDescriptor& desc, const Coeffs& v) {
    double acc = 0.0;
    for (int j = 0; j < int(v.size()); ++j) {
        const double s2 = desc.q_at(j) * desc.sigma_at(j) * desc.sigma_at(j);
        acc += desc.g_kind == GKind::additive ? s2 : s2 * v[j] * v[j];
    }
    return acc;
}

}  // namespace

double noise_growth_ratio(const NoiseDescriptor& desc, int n, int samples, std::uint64_t seed) {
    const double rho = desc.rho();
    const RandomFieldSampler sampler{1.0, 1e-2, 1e2};
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs v = sampler.draw(rng, n);
        double lhs = g_hs2(desc, v);
        for (const auto& m : desc.marks) lhs += m.intensity * jump_map(m, v).squaredNorm();
        if (lhs == 0.0) continue;
        worst = std::max(worst, lhs / (rho * (1.0 + v.squaredNorm())));
    }
    return worst;
}

double noise_lipschitz_ratio(const NoiseDescriptor& desc, int n, int samples, std::uint64_t seed) {
    const double L = desc.lipschitz();
    const RandomFieldSampler sampler{1.0, 1e-2, 1e2};
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        CounterStream rng(seed, StreamId::sampler, std::uint32_t(i));
        const Coeffs u = sampler.draw(rng, n);
        const Coeffs v = sampler.draw(rng, n);
        double lhs = desc.g_kind == GKind::diagonal_linear ? g_hs2(desc, u - v) : 0.0;
        for (const auto& m : desc.marks) lhs += m.intensity * (jump_map(m, u) - jump_map(m, v)).squaredNorm();
        if (lhs == 0.0) continue;
        worst = std::max(worst, lhs / (L * (u - v).squaredNorm()));
    }
    return worst;
}

double wiener_variance_ratio(const NoiseDescriptor& desc, double dt, int increments, std::uint64_t seed) {
    int j = 0;
    while (j < int(desc.q.size()) && desc.q[j] <= 0.0) ++j;
    if (j == int(desc.q.size())) return 1.0;
    const LevyNoisePath path = sample_path(desc, dt * increments, dt, seed, j + 1);
    std::vector<double> x(increments), x2(increments);
    for (int k = 0; k < increments; ++k) {
        x[k] = path.wiener(k, j);
        x2[k] = x[k] * x[k];
    }
    const double mean = compensated_sum(x) / increments;
    const double var = (compensated_sum(x2) - increments * mean * mean) / (increments - 1);
    return var / (desc.q[j] * dt);
}

NoiseDescriptor reference_noise(int n) {
    NoiseDescriptor d;
    d.q = NoiseDescriptor::power_law_q(1.0, 1.0, n);
    d.g_kind = GKind::additive;
    d.sigma.assign(n, 1.0);
    Mark a;
    a.xi = 1.0;
    a.intensity = 1.5;
    a.a = Coeffs::Zero(n);
    a.a[0] = 0.5;
    a.b = 0.2;
    Mark b;
    b.xi = 2.0;
    b.intensity = 2.5;
    b.a = Coeffs::Zero(n);
    if (n > 1) b.a[1] = -0.3;
    b.b = -0.1;
    d.marks = {a, b};
    return d;
}

bool PropertySuite::all_passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const PropertyResult& r) { return r.passed; });
}

PropertySuite run_property_suite(const SuiteOptions& o) {
    PropertySuite s;
    const MonotoneOperator op = make_operator(o.op, o.op.name == "anisotropic" ? 2 : 1);
    s.operator_name = op.name;
    const Domain dom = domain_for(op);
    const OperatorAssembler as(SpectralBasis::build(dom, o.n), op);
    auto row = [&](std::string name, bool ok, double value, double threshold, std::string detail = {}) {
        s.rows.push_back({std::move(name), ok, value, threshold, std::move(detail)});
    };
    auto constant = [&](std::string name, double v) { s.constants.emplace_back(std::move(name), v); };

    const GradientCheck g = gradient_consistency(op, 200, o.seed);
    row("gradient_consistency", g.max_gradient_error <= 1e-6, g.max_gradient_error, 1e-6);
    row("hessian_consistency", g.max_hessian_error <= 1e-6, g.max_hessian_error, 1e-6);
    if (std::any_of(op.terms.begin(), op.terms.end(), [](const auto& t) { return t.integrand->convex(); })) {
        const double defect = midpoint_convexity_defect(op, o.samples, o.seed);
        row("midpoint_convexity", defect <= 1e-12, defect, 1e-12);
    }
    const TruncationCheck tc = truncation_consistency(op, o.R_grid, 200, 1e-6, o.seed);
    row("truncation_inside_ball", tc.inside_max_difference == 0.0, tc.inside_max_difference, 0.0);
    row("truncation_continuity", tc.continuity_max_relative <= 1e-4, tc.continuity_max_relative, 1e-4);

    const MintyReport f1 = minty_residual(as, o.pairs, o.seed);
    row("F1_monotonicity", f1.passed, f1.min_scaled_pairing, -kMonotonicityTolerance,
        std::to_string(f1.violations) + " violations");
    for (double R : o.R_grid) {
        const MintyReport fr = minty_residual(as, o.pairs, o.seed + 1, TruncationParams{R, 1.0});
        row("FR1_monotonicity_R" + std::to_string(int(R)), fr.passed, fr.min_scaled_pairing, -kMonotonicityTolerance,
            std::to_string(fr.violations) + " violations");
    }
    if (op.name == "smagorinsky") {
        const double target = 0.95 * (op.p - 1.0);
        row("strong_monotonicity_slope", f1.strong_slope >= target, f1.strong_slope, target);
        row("strong_monotonicity_p", f1.strong_p_constant > 0.0, f1.strong_p_constant, 0.0);
        constant("c_p_star", f1.strong_slope);
        constant("c_p", f1.strong_p_constant);
    }

    std::vector<double> c1s, c5s, fr4s;
    for (double R : o.R_grid) {
        const EquicoercivityFit fit = equicoercivity_fit(as, R, o.samples, o.seed);
        c1s.push_back(fit.c1);
        c5s.push_back(fit.c5);
        fr4s.push_back(fit.fr4_ratio);
        constant("FR3_c1_R" + std::to_string(int(R)), fit.c1);
        constant("FR3_c5_R" + std::to_string(int(R)), fit.c5);
        constant("FR4_ratio_R" + std::to_string(int(R)), fit.fr4_ratio);
    }
    const double c1_spread = max_ratio_spread(c1s), c5_spread = max_ratio_spread(c5s),
                 fr4_spread = max_ratio_spread(fr4s);
    row("FR3_c1_stability", c1_spread <= 2.0, c1_spread, 2.0);
    row("FR3_c5_stability", c5_spread <= 2.0, c5_spread, 2.0);
    row("FR4_stability", fr4_spread <= 2.0, fr4_spread, 2.0);
    // smallest grid radius from which every later fit is within 2x of the last one
    double R0 = o.R_grid.empty() ? 0.0 : o.R_grid.back();
    for (int i = int(o.R_grid.size()) - 1; i >= 0; --i) {
        const auto within = [](double a, double b) { return std::max(a, b) <= 2.0 * std::min(a, b); };
        if (!within(c1s[i], c1s.back()) || !within(c5s[i], c5s.back())) break;
        R0 = o.R_grid[i];
    }
    constant("R0_stable", R0);

    const CoercivityBounds cb = coercivity_bounds(as, o.samples, o.seed);
    row("F3_coercivity", cb.f3_min > 0.0, cb.f3_min, 0.0);
    row("F4_boundedness", std::isfinite(cb.f4_max), cb.f4_max, std::numeric_limits<double>::infinity());

    const PointwiseConstants pc = pointwise_constants(op, 2000, o.seed);
    constant("c1", cb.f3_min);
    constant("c1_pointwise_lower", pc.c1_lower);
    constant("c1_pointwise_upper", pc.c1_upper);
    constant("c2", pc.c2);
    constant("c3", pc.c3);
    constant("c4", cb.f4_max);
    constant("c5", *std::max_element(c5s.begin(), c5s.end()));
    constant("c6", pc.c6);
    constant("c7", std::max(pc.c2, pc.c6));

    if (dom.dim == 1) {
        const ConvectionBounds b8 = convection_bounds(8, o.samples, o.seed, 4.0);
        const ConvectionBounds b64 = convection_bounds(64, o.samples, o.seed, 4.0);
        const ConvectionBounds b32 = convection_bounds(32, o.samples, o.seed, 4.0);
        row("convection_cancellation", b32.cancellation <= 1e-10, b32.cancellation, 1e-10);
        const double sDA = max_ratio_spread({b8.ratio_DA, b64.ratio_DA});
        const double sV = max_ratio_spread({b8.ratio_V, b64.ratio_V});
        const double sX = max_ratio_spread({b8.ratio_X, b64.ratio_X});
        row("convection_bound_DA_stability", sDA <= 2.0, sDA, 2.0);
        row("convection_bound_V_stability", sV <= 2.0, sV, 2.0);
        row("convection_bound_X_stability", sX <= 2.0, sX, 2.0);
        const double th = theta_lipschitz_ratio(1.0, 10000, o.seed);
        row("theta_lipschitz", th <= 1.0 + 1e-12, th, 1.0);
    }

    const NoiseDescriptor noise = o.noise.marks.empty() && o.noise.q.empty() ? reference_noise(o.n) : o.noise;
    const double growth = noise_growth_ratio(noise, o.n, o.samples, o.seed);
    row("noise_growth", growth <= 1.0, growth, 1.0);
    const double lip = noise_lipschitz_ratio(noise, o.n, o.samples, o.seed);
    row("noise_lipschitz", lip <= 1.0 + 1e-12, lip, 1.0);
    constant("rho", noise.rho());
    if (!noise.marks.empty()) {
        Coeffs u = Coeffs::Zero(o.n);
        u[0] = 1.0;
        if (o.n > 2) u[2] = -0.5;
        const MartingaleCheck mc = compensated_jump_check(noise, u, 0.05, 10000, o.seed);
        row("compensated_mean", mc.max_z <= 4.0, mc.max_z, 4.0);
        const double iso = std::abs(mc.second_moment - mc.isometry_target) / mc.second_moment_se;
        row("ito_isometry", iso <= 5.0, iso, 5.0);
        const CountCheck pcnt = poisson_count_check(noise, 10.0, 2000, o.seed);
        const double z = std::abs(pcnt.mean - pcnt.expected) / pcnt.std_error;
        row("poisson_count_mean", z <= 3.0, z, 3.0);
    }
    const double wv = wiener_variance_ratio(noise, 0.01, 10000, o.seed);
    row("wiener_variance", wv >= 0.9 && wv <= 1.1, wv, 1.0);
    return s;
}

}  // namespace levygal
