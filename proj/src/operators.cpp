#include "levygal/operators.hpp"

#include <algorithm>
#include <cmath>

namespace levygal {

namespace {

double lp(const Arg& x, double p) {
    if (x.size() == 1) return std::abs(x[0]);
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
    return std::pow(s, 1.0 / p);
}

Hess identity(Eigen::Index m) { return Hess::Identity(m, m); }

}  // namespace

double Integrand::truncation_norm(const Arg& x, double p) const { return lp(x, p); }

double SmagorinskyIntegrand::value(const Arg& x) const {
    return std::pow(1.0 + x.squaredNorm(), p_ / 2.0) / p_;
}

Arg SmagorinskyIntegrand::gradient(const Arg& x) const {
    return std::pow(1.0 + x.squaredNorm(), (p_ - 2.0) / 2.0) * x;
}

Hess SmagorinskyIntegrand::hessian(const Arg& x) const {
    const double s = 1.0 + x.squaredNorm();
    Hess h = std::pow(s, (p_ - 2.0) / 2.0) * identity(x.size());
    h.noalias() += (p_ - 2.0) * std::pow(s, (p_ - 4.0) / 2.0) * x * x.transpose();
    return h;
}

double PowerIntegrand::value(const Arg& x) const { return std::pow(x.norm(), p_) / p_; }

Arg PowerIntegrand::gradient(const Arg& x) const {
    const double r = x.norm();
    if (r == 0.0) return Arg::Zero(x.size());
    return std::pow(r, p_ - 2.0) * x;
}

Hess PowerIntegrand::hessian(const Arg& x) const {
    const double r = x.norm();
    if (r == 0.0) return Hess::Zero(x.size(), x.size());
    Hess h = std::pow(r, p_ - 2.0) * identity(x.size());
    h.noalias() += (p_ - 2.0) * std::pow(r, p_ - 4.0) * x * x.transpose();
    return h;
}

double QuadraticIntegrand::value(const Arg& x) const { return 0.5 * x.squaredNorm(); }
Arg QuadraticIntegrand::gradient(const Arg& x) const { return x; }
Hess QuadraticIntegrand::hessian(const Arg& x) const { return identity(x.size()); }

PolynomialIntegrand::PolynomialIntegrand(std::vector<double> coefficients) : a_(std::move(coefficients)) {
    if (a_.empty() || a_.size() % 2 != 0 || !(a_.back() > 0.0))
        throw OperatorError("polynomial must have odd degree 2q+1 with a positive leading coefficient");
}

double PolynomialIntegrand::value(const Arg& x) const {
    double acc = 0.0;
    for (std::size_t i = a_.size(); i-- > 0;) acc = acc * x[0] + a_[i] / double(i + 1);
    return acc * x[0];
}

Arg PolynomialIntegrand::gradient(const Arg& x) const {
    double acc = 0.0;
    for (std::size_t i = a_.size(); i-- > 0;) acc = acc * x[0] + a_[i];
    Arg out(1);
    out[0] = acc;
    return out;
}

Hess PolynomialIntegrand::hessian(const Arg& x) const {
    double acc = 0.0;
    for (std::size_t i = a_.size(); i-- > 1;) acc = acc * x[0] + double(i) * a_[i];
    Hess out(1, 1);
    out(0, 0) = acc;
    return out;
}

double PolynomialIntegrand::truncation_norm(const Arg& x, double) const { return std::abs(x[0]); }

double AnisotropicIntegrand::value(const Arg& x) const { return std::pow(std::abs(x[0]), p_) / p_; }

Arg AnisotropicIntegrand::gradient(const Arg& x) const {
    Arg out = Arg::Zero(x.size());
    const double a = std::abs(x[0]);
    if (a > 0.0) out[0] = std::pow(a, p_ - 2.0) * x[0];
    return out;
}

Hess AnisotropicIntegrand::hessian(const Arg& x) const {
    Hess out = Hess::Zero(x.size(), x.size());
    out(0, 0) = (p_ - 1.0) * std::pow(std::abs(x[0]), p_ - 2.0);
    return out;
}

double AnisotropicIntegrand::truncation_norm(const Arg& x, double) const { return std::abs(x[0]); }

const IntegrandTerm* MonotoneOperator::term(int order) const {
    for (const auto& t : terms)
        if (t.order == order) return &t;
    return nullptr;
}

void TruncationParams::validate() const {
    if (!(R > 1.0)) throw OperatorError("truncation radius R must exceed 1");
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names{"smagorinsky", "p_laplacian", "biharmonic", "polynomial",
                                                "anisotropic"};
    return names;
}

MonotoneOperator make_operator(const OperatorChoice& choice, int dim) {
    if (!(choice.p > 2.0) && choice.name != "polynomial") throw OperatorError("p must exceed 2");
    MonotoneOperator op;
    op.name = choice.name;
    op.p = choice.p;
    if (choice.name == "smagorinsky") {
        op.k = 1;
        op.terms = {{1, Channel::gradient, std::make_shared<SmagorinskyIntegrand>(choice.p)}};
        op.norm_channels = {Channel::value, Channel::gradient};
    } else if (choice.name == "p_laplacian") {
        op.k = 1;
        op.terms = {{1, Channel::gradient, std::make_shared<PowerIntegrand>(choice.p)}};
        op.norm_channels = {Channel::value, Channel::gradient};
    } else if (choice.name == "biharmonic") {
        op.k = 2;
        op.terms = {{2, Channel::laplacian, std::make_shared<PowerIntegrand>(choice.p)}};
        op.norm_channels = {Channel::value, Channel::gradient, Channel::laplacian};
    } else if (choice.name == "polynomial") {
        auto poly = std::make_shared<PolynomialIntegrand>(choice.coefficients);
        op.p = double(choice.coefficients.size());  // 2q + 2
        op.k = choice.fold_laplacian ? 1 : 0;
        op.terms = {{0, Channel::value, poly}};
        if (choice.fold_laplacian) op.terms.push_back({1, Channel::gradient, std::make_shared<QuadraticIntegrand>()});
        op.norm_channels = {Channel::value};
        if (!(op.p > 2.0)) throw OperatorError("polynomial degree must be at least 3 so that p = 2q+2 exceeds 2");
    } else if (choice.name == "anisotropic") {
        if (dim != 2) throw OperatorError("the anisotropic operator requires a 2-D domain");
        op.k = 1;
        op.required_dim = 2;
        op.terms = {{1, Channel::gradient, std::make_shared<AnisotropicIntegrand>(choice.p)}};
        op.norm_channels = {Channel::value, Channel::partial_x1};
    } else {
        throw OperatorError("unknown operator '" + choice.name + "'");
    }
    return op;
}

std::vector<MonotoneOperator> catalog(double p, std::vector<double> poly) {
    std::vector<MonotoneOperator> out;
    for (const auto& name : catalog_names()) {
        OperatorChoice c;
        c.name = name;
        c.p = p;
        c.coefficients = poly;
        out.push_back(make_operator(c, name == "anisotropic" ? 2 : 1));
    }
    return out;
}

namespace {

const IntegrandTerm& require_term(const MonotoneOperator& op, int order) {
    if (order < 0 || order > op.k)
        throw OperatorError("order " + std::to_string(order) + " outside 0.." + std::to_string(op.k));
    static const IntegrandTerm none{};
    const auto* t = op.term(order);
    return t ? *t : none;
}

}  // namespace

double eval_J(const MonotoneOperator& op, int order, const Arg& x) {
    const auto& t = require_term(op, order);
    return t.integrand ? t.integrand->value(x) : 0.0;
}

Arg eval_f(const MonotoneOperator& op, int order, const Arg& x) {
    const auto& t = require_term(op, order);
    return t.integrand ? t.integrand->gradient(x) : Arg::Zero(x.size());
}

Arg eval_fR(const MonotoneOperator& op, int order, const Arg& x, const TruncationParams& trunc) {
    const auto& t = require_term(op, order);
    if (!t.integrand) return Arg::Zero(x.size());
    const double r = t.integrand->truncation_norm(x, op.p);
    // |x| = R takes the inner branch; both branches agree there.
    if (r <= trunc.R) return t.integrand->gradient(x);
    const Arg y = (trunc.R / r) * x;
    return t.integrand->gradient(y) + (1.0 - trunc.R / r) * (t.integrand->hessian(y) * x);
}

Hess eval_fR_jacobian(const MonotoneOperator& op, int order, const Arg& x, const TruncationParams& trunc) {
    const auto& t = require_term(op, order);
    const auto m = x.size();
    if (!t.integrand) return Hess::Zero(m, m);
    if (t.integrand->truncation_norm(x, op.p) <= trunc.R) return t.integrand->hessian(x);
    if (m == 1) {
        // f^R is affine along the ray outside the ball
        Arg y(1);
        y[0] = x[0] > 0 ? trunc.R : -trunc.R;
        return t.integrand->hessian(y);
    }
    Hess jac(m, m);
    const double h = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
    for (Eigen::Index c = 0; c < m; ++c) {
        Arg xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        jac.col(c) = (eval_fR(op, order, xp, trunc) - eval_fR(op, order, xm, trunc)) / (2.0 * h);
    }
    return jac;
}

OperatorAssembler::OperatorAssembler(BasisPtr basis, MonotoneOperator op) : basis_(std::move(basis)), op_(std::move(op)) {
    if (op_.required_dim != 0 && op_.required_dim != basis_->dim())
        throw OperatorError("operator '" + op_.name + "' requires a " + std::to_string(op_.required_dim) +
                            "-D basis");
}

GridValues OperatorAssembler::args(const IntegrandTerm& t, const Coeffs& u) const {
    return channel_values(*basis_, u, t.channel);
}

namespace {

template <class PointFn>
Coeffs assemble(const SpectralBasis& basis, const MonotoneOperator& op, const Coeffs& u, PointFn&& fn) {
    Coeffs out = Coeffs::Zero(basis.size());
    const auto& w = basis.weights();
    for (const auto& t : op.terms) {
        const GridValues x = channel_values(basis, u, t.channel);
        GridValues fx(x.rows(), x.cols());
        Arg a(x.cols());
        for (Eigen::Index q = 0; q < x.rows(); ++q) {
            a = x.row(q).transpose();
            fx.row(q) = w[q] * fn(t, a).transpose();
        }
        for (Eigen::Index c = 0; c < x.cols(); ++c) out.noalias() += basis.table(t.channel, int(c)).transpose() * fx.col(c);
    }
    return out;
}

}  // namespace

Coeffs OperatorAssembler::assemble_F(const Coeffs& u) const {
    return assemble(*basis_, op_, u, [&](const IntegrandTerm& t, const Arg& a) { return eval_f(op_, t.order, a); });
}

Coeffs OperatorAssembler::assemble_FR(const Coeffs& u, const std::optional<TruncationParams>& trunc) const {
    if (!trunc) return assemble_F(u);
    trunc->validate();
    return assemble(*basis_, op_, u,
                    [&](const IntegrandTerm& t, const Arg& a) { return eval_fR(op_, t.order, a, *trunc); });
}

Eigen::MatrixXd OperatorAssembler::jacobian(const Coeffs& u, const std::optional<TruncationParams>& trunc) const {
    const int n = basis_->size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    const auto& w = basis_->weights();
    for (const auto& t : op_.terms) {
        const GridValues x = args(t, u);
        const auto m = x.cols();
        const auto np = x.rows();
        // weighted Jacobian blocks, one column-scaled table per (c, c') pair
        std::vector<Eigen::VectorXd> blocks(m * m, Eigen::VectorXd(np));
        Arg a(m);
        for (Eigen::Index q = 0; q < np; ++q) {
            a = x.row(q).transpose();
            const Hess h = trunc ? eval_fR_jacobian(op_, t.order, a, *trunc) : t.integrand->hessian(a);
            for (Eigen::Index c = 0; c < m; ++c)
                for (Eigen::Index d = 0; d < m; ++d) blocks[c * m + d][q] = w[q] * h(c, d);
        }
        for (Eigen::Index c = 0; c < m; ++c)
            for (Eigen::Index d = 0; d < m; ++d) {
                const auto& tc = basis_->table(t.channel, int(c));
                const auto& td = basis_->table(t.channel, int(d));
                jac.noalias() += tc.transpose() * (blocks[c * m + d].asDiagonal() * td);
            }
    }
    return jac;
}

double OperatorAssembler::energy(const Coeffs& u) const {
    double acc = 0.0;
    const auto& w = basis_->weights();
    for (const auto& t : op_.terms) {
        const GridValues x = args(t, u);
        Arg a(x.cols());
        for (Eigen::Index q = 0; q < x.rows(); ++q) {
            a = x.row(q).transpose();
            acc += w[q] * t.integrand->value(a);
        }
    }
    return acc;
}

std::vector<double> OperatorAssembler::occupancy(const Coeffs& u, const TruncationParams& trunc) const {
    std::vector<double> out(op_.k + 1, 0.0);
    const auto& w = basis_->weights();
    for (const auto& t : op_.terms) {
        const GridValues x = args(t, u);
        Arg a(x.cols());
        double acc = 0.0;
        for (Eigen::Index q = 0; q < x.rows(); ++q) {
            a = x.row(q).transpose();
            if (t.integrand->truncation_norm(a, op_.p) > trunc.R) acc += w[q];
        }
        out[t.order] = acc / basis_->domain().measure();
    }
    return out;
}

std::vector<double> OperatorAssembler::max_pointwise(const Coeffs& u) const {
    std::vector<double> out(op_.k + 1, 0.0);
    for (const auto& t : op_.terms) {
        const GridValues x = args(t, u);
        Arg a(x.cols());
        for (Eigen::Index q = 0; q < x.rows(); ++q) {
            a = x.row(q).transpose();
            out[t.order] = std::max(out[t.order], t.integrand->truncation_norm(a, op_.p));
        }
    }
    return out;
}

double OperatorAssembler::x_norm_pow(const Coeffs& u) const {
    double acc = 0.0;
    for (Channel c : op_.norm_channels) acc += lp_integral(*basis_, channel_values(*basis_, u, c), op_.p);
    return acc;
}

double OperatorAssembler::x_norm(const Coeffs& u) const { return std::pow(x_norm_pow(u), 1.0 / op_.p); }

Coeffs assemble_F(const OperatorAssembler& a, const Coeffs& u) { return a.assemble_F(u); }

Coeffs assemble_FR(const OperatorAssembler& a, const Coeffs& u, const TruncationParams& trunc) {
    return a.assemble_FR(u, trunc);
}

std::vector<double> truncation_occupancy(const OperatorAssembler& a, const Coeffs& u, const TruncationParams& trunc) {
    return a.occupancy(u, trunc);
}

}  // namespace levygal
