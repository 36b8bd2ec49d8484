#include "levygal/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

namespace levygal {

namespace {

constexpr double pi = std::numbers::pi;

struct Factor {
    // value, first and second derivative of a 1-D factor at x
    double v, d1, d2;
};

Factor sine_factor(int k, double length, double x) {
    const double a = k * pi / length;
    const double c = std::sqrt(2.0 / length);
    return {c * std::sin(a * x), c * a * std::cos(a * x), -c * a * a * std::sin(a * x)};
}

Factor cosine_factor(int k, double length, double x) {
    if (k == 0) return {1.0 / std::sqrt(length), 0.0, 0.0};
    const double a = k * pi / length;
    const double c = std::sqrt(2.0 / length);
    return {c * std::cos(a * x), -c * a * std::sin(a * x), -c * a * a * std::cos(a * x)};
}

}  // namespace

Domain Domain::interval(double length) {
    Domain d;
    d.dim = 1;
    d.lengths = {length, 1.0};
    d.validate();
    return d;
}

Domain Domain::rectangle(double lx, double ly, Boundary bc) {
    Domain d;
    d.dim = 2;
    d.lengths = {lx, ly};
    d.boundary = bc;
    d.validate();
    return d;
}

void Domain::validate() const {
    if (dim != 1 && dim != 2) throw SpaceError("domain dimension must be 1 or 2");
    for (int a = 0; a < dim; ++a)
        if (!(lengths[a] > 0.0)) throw SpaceError("domain lengths must be positive");
    if (boundary == Boundary::dirichlet_x1_only && dim != 2)
        throw SpaceError("dirichlet_x1_only requires a 2-D domain");
}

double Domain::measure() const { return dim == 1 ? lengths[0] : lengths[0] * lengths[1]; }

namespace {

std::vector<ModeIndex> enumerate_modes(const Domain& d, int n, Eigen::VectorXd& lambda) {
    struct Candidate {
        double lambda;
        ModeIndex idx;
    };
    std::vector<Candidate> cands;
    const double l1 = d.lengths[0], l2 = d.lengths[1];
    if (d.dim == 1) {
        for (int k = 1; k <= n; ++k) cands.push_back({std::pow(k * pi / l1, 2), {k, 0}});
    } else {
        const int k2_min = d.boundary == Boundary::dirichlet ? 1 : 0;
        for (int k1 = 1; k1 <= n + 1; ++k1)
            for (int k2 = k2_min; k2 <= n + 1; ++k2) {
                const double lam = pi * pi * (double(k1) * k1 / (l1 * l1) + double(k2) * k2 / (l2 * l2));
                cands.push_back({lam, {k1, k2}});
            }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.lambda, a.idx.k1, a.idx.k2) < std::tie(b.lambda, b.idx.k1, b.idx.k2);
    });
    std::vector<ModeIndex> out;
    lambda.resize(n);
    for (int j = 0; j < n; ++j) {
        out.push_back(cands[j].idx);
        lambda[j] = cands[j].lambda;
    }
    return out;
}

int max_index_of(const std::vector<ModeIndex>& modes) {
    int m = 0;
    for (const auto& md : modes) m = std::max({m, md.k1, md.k2});
    return m;
}

}  // namespace

int SpectralBasis::min_quad(const Domain& domain, int n) {
    domain.validate();
    if (n < 1) throw SpaceError("mode count must be positive");
    Eigen::VectorXd lam;
    return 4 * max_index_of(enumerate_modes(domain, n, lam));
}

int SpectralBasis::channel_width(Channel c, int dim) {
    switch (c) {
        case Channel::value:
        case Channel::laplacian:
        case Channel::partial_x1: return 1;
        case Channel::gradient: return dim;
        case Channel::hessian: return dim * dim;
    }
    return 1;
}

SpectralBasis::SpectralBasis(const Domain& domain, int n, int n_quad)
    : domain_(domain), n_(n), n_quad_(n_quad) {
    domain_.validate();
    if (n < 1) throw SpaceError("mode count must be positive");
    modes_ = enumerate_modes(domain_, n, lambda_);
    max_index_ = max_index_of(modes_);
    if (n_quad < 4 * max_index_)
        throw SpaceError("n_quad = " + std::to_string(n_quad) + " is below the anti-aliasing floor " +
                         std::to_string(4 * max_index_));

    const int d = domain_.dim;
    const int np = d == 1 ? n_quad : n_quad * n_quad;
    const double h1 = domain_.lengths[0] / n_quad;
    const double h2 = d == 2 ? domain_.lengths[1] / n_quad : 1.0;
    points_.resize(np, d);
    weights_ = Eigen::VectorXd::Constant(np, h1 * h2);
    for (int q = 0; q < np; ++q) {
        const int i = d == 1 ? q : q / n_quad;
        points_(q, 0) = (i + 0.5) * h1;
        if (d == 2) points_(q, 1) = (q % n_quad + 0.5) * h2;
    }

    value_.resize(np, n);
    laplacian_.resize(np, n);
    partial_x1_.resize(np, n);
    gradient_.assign(d, Eigen::MatrixXd(np, n));
    hessian_.assign(d * d, Eigen::MatrixXd(np, n));
    for (int j = 0; j < n; ++j) {
        const auto& m = modes_[j];
        for (int q = 0; q < np; ++q) {
            const Factor fx = sine_factor(m.k1, domain_.lengths[0], points_(q, 0));
            if (d == 1) {
                value_(q, j) = fx.v;
                gradient_[0](q, j) = fx.d1;
                hessian_[0](q, j) = fx.d2;
                partial_x1_(q, j) = fx.d1;
                laplacian_(q, j) = fx.d2;
                continue;
            }
            const double y = points_(q, 1);
            const Factor fy = domain_.boundary == Boundary::dirichlet ? sine_factor(m.k2, domain_.lengths[1], y)
                                                                       : cosine_factor(m.k2, domain_.lengths[1], y);
            value_(q, j) = fx.v * fy.v;
            gradient_[0](q, j) = fx.d1 * fy.v;
            gradient_[1](q, j) = fx.v * fy.d1;
            hessian_[0](q, j) = fx.d2 * fy.v;
            hessian_[1](q, j) = fx.d1 * fy.d1;
            hessian_[2](q, j) = fx.d1 * fy.d1;
            hessian_[3](q, j) = fx.v * fy.d2;
            partial_x1_(q, j) = fx.d1 * fy.v;
            laplacian_(q, j) = fx.d2 * fy.v + fx.v * fy.d2;
        }
    }
}

std::shared_ptr<const SpectralBasis> SpectralBasis::build(const Domain& domain, int n, int n_quad) {
    if (n_quad <= 0) n_quad = min_quad(domain, n);
    return std::make_shared<const SpectralBasis>(domain, n, n_quad);
}

const Eigen::MatrixXd& SpectralBasis::table(Channel c, int component) const {
    const int w = channel_width(c);
    if (component < 0 || component >= w) throw SpaceError("channel component out of range");
    switch (c) {
        case Channel::value: return value_;
        case Channel::laplacian: return laplacian_;
        case Channel::partial_x1: return partial_x1_;
        case Channel::gradient: return gradient_[component];
        case Channel::hessian: return hessian_[component];
    }
    return value_;
}

double SpectralBasis::eval_mode(int j, double x, double y) const {
    const auto& m = modes_.at(j);
    const double fx = sine_factor(m.k1, domain_.lengths[0], x).v;
    if (dim() == 1) return fx;
    const double fy = domain_.boundary == Boundary::dirichlet ? sine_factor(m.k2, domain_.lengths[1], y).v
                                                               : cosine_factor(m.k2, domain_.lengths[1], y).v;
    return fx * fy;
}

Eigen::VectorXd SpectralBasis::sample(const std::function<double(double, double)>& fn) const {
    Eigen::VectorXd out(num_points());
    for (int q = 0; q < num_points(); ++q) out[q] = fn(points_(q, 0), dim() == 2 ? points_(q, 1) : 0.0);
    return out;
}

Field Field::mode(BasisPtr b, int j, double amplitude) {
    Field f = zero(b);
    f.coeffs[j] = amplitude;
    return f;
}

Coeffs project(const SpectralBasis& basis, const Eigen::VectorXd& samples) {
    if (samples.size() != basis.num_points())
        throw SpaceError("sample count " + std::to_string(samples.size()) + " does not match the " +
                         std::to_string(basis.num_points()) + " quadrature points");
    return basis.table(Channel::value).transpose() * basis.weights().cwiseProduct(samples);
}

GridValues channel_values(const SpectralBasis& basis, const Coeffs& u, Channel c) {
    if (u.size() != basis.size()) throw SpaceError("coefficient vector does not match the basis size");
    const int w = basis.channel_width(c);
    GridValues out(basis.num_points(), w);
    for (int comp = 0; comp < w; ++comp) out.col(comp).noalias() = basis.table(c, comp) * u;
    return out;
}

GridValues evaluate_derivatives(const SpectralBasis& basis, const Coeffs& u, int order) {
    switch (order) {
        case 0: return channel_values(basis, u, Channel::value);
        case 1: return channel_values(basis, u, Channel::gradient);
        case 2: return channel_values(basis, u, Channel::hessian);
        default: throw SpaceError("derivative order " + std::to_string(order) + " exceeds the supported maximum 2");
    }
}

double h_norm(const Coeffs& u) { return u.norm(); }

double v_norm(const SpectralBasis& basis, const Coeffs& u) {
    return std::sqrt(u.cwiseAbs2().dot(basis.eigenvalues()));
}

double dual_v_norm(const SpectralBasis& basis, const Coeffs& u) {
    return std::sqrt(u.cwiseAbs2().cwiseQuotient(basis.eigenvalues()).sum());
}

double lp_integral(const SpectralBasis& basis, const GridValues& values, double p) {
    double acc = 0.0;
    const auto& w = basis.weights();
    for (Eigen::Index q = 0; q < values.rows(); ++q) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < values.cols(); ++c) s += std::pow(std::abs(values(q, c)), p);
        acc += w[q] * s;
    }
    return acc;
}

double x_norm(const SpectralBasis& basis, const Coeffs& u, XNormParams params) {
    if (!(params.p > 2.0)) throw SpaceError("X-norm requires p > 2");
    if (params.k < 0 || params.k > 2) throw SpaceError("X-norm requires 0 <= k <= 2");
    double acc = 0.0;
    for (int i = 0; i <= params.k; ++i) acc += lp_integral(basis, evaluate_derivatives(basis, u, i), params.p);
    return std::pow(acc, 1.0 / params.p);
}

double norm(const SpectralBasis& basis, const Coeffs& u, NormKind kind, XNormParams params) {
    switch (kind) {
        case NormKind::H: return h_norm(u);
        case NormKind::V: return v_norm(basis, u);
        case NormKind::dual_V: return dual_v_norm(basis, u);
        case NormKind::X: return x_norm(basis, u, params);
    }
    return 0.0;
}

Coeffs apply_A(const SpectralBasis& basis, const Coeffs& u) { return basis.eigenvalues().cwiseProduct(u); }

Coeffs resize_coeffs(const Coeffs& src, int n) {
    Coeffs out = Coeffs::Zero(n);
    const auto m = std::min<Eigen::Index>(n, src.size());
    out.head(m) = src.head(m);
    return out;
}

}  // namespace levygal
