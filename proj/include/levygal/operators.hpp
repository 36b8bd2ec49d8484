#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "levygal/spaces.hpp"

namespace levygal {

class OperatorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Pointwise argument of an integrand; at most 4 components (d^2 with d = 2).
using Arg = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
using Hess = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

/// Convex integrand J_i with closed-form gradient f_i and Hessian.
class Integrand {
public:
    virtual ~Integrand() = default;
    virtual double value(const Arg& x) const = 0;
    virtual Arg gradient(const Arg& x) const = 0;
    virtual Hess hessian(const Arg& x) const = 0;
    /// Radial size |x| used to decide inside/outside of the truncation ball.
    virtual double truncation_norm(const Arg& x, double p) const;
    virtual bool convex() const { return true; }
};

/// (1/p)(1 + |x|^2)^{p/2}
class SmagorinskyIntegrand final : public Integrand {
public:
    explicit SmagorinskyIntegrand(double p) : p_(p) {}
    double value(const Arg& x) const override;
    Arg gradient(const Arg& x) const override;
    Hess hessian(const Arg& x) const override;

private:
    double p_;
};

/// (1/p)|x|^p with the Euclidean norm
class PowerIntegrand final : public Integrand {
public:
    explicit PowerIntegrand(double p) : p_(p) {}
    double value(const Arg& x) const override;
    Arg gradient(const Arg& x) const override;
    Hess hessian(const Arg& x) const override;

private:
    double p_;
};

/// (1/2)|x|^2
class QuadraticIntegrand final : public Integrand {
public:
    double value(const Arg& x) const override;
    Arg gradient(const Arg& x) const override;
    Hess hessian(const Arg& x) const override;
};

/// Antiderivative of P(u) = sum_i a_i u^i (scalar argument).
class PolynomialIntegrand final : public Integrand {
public:
    explicit PolynomialIntegrand(std::vector<double> coefficients);
    double value(const Arg& x) const override;
    Arg gradient(const Arg& x) const override;
    Hess hessian(const Arg& x) const override;
    double truncation_norm(const Arg& x, double p) const override;
    bool convex() const override { return false; }
    const std::vector<double>& coefficients() const { return a_; }

private:
    std::vector<double> a_;
};

/// (1/p)|x . e_1|^p; the truncation ball is measured by |x_1| as well.
class AnisotropicIntegrand final : public Integrand {
public:
    explicit AnisotropicIntegrand(double p) : p_(p) {}
    double value(const Arg& x) const override;
    Arg gradient(const Arg& x) const override;
    Hess hessian(const Arg& x) const override;
    double truncation_norm(const Arg& x, double p) const override;

private:
    double p_;
};

struct IntegrandTerm {
    int order = 1;
    Channel channel = Channel::gradient;
    std::shared_ptr<const Integrand> integrand;
};

/// Structural constants; the catalog does not document numeric values, so
/// they stay empty and the property suite fits them.
struct OperatorConstants {
    std::optional<double> c1, c2, c3, c4;
};

struct MonotoneOperator {
    std::string name;
    double p = 4.0;
    int k = 1;
    /// Required spatial dimension, 0 when any dimension works.
    int required_dim = 0;
    std::vector<IntegrandTerm> terms;
    /// Channels whose L^p norms make up ||.||_X for this operator.
    std::vector<Channel> norm_channels;
    OperatorConstants constants;

    const IntegrandTerm* term(int order) const;
};

struct TruncationParams {
    double R = 2.0;
    double R0 = 1.0;
    void validate() const;
};

/// Catalog selection as it arrives from a run config.
struct OperatorChoice {
    std::string name = "smagorinsky";
    double p = 4.0;
    std::vector<double> coefficients{0.0, -1.0, 0.0, 1.0};
    bool fold_laplacian = true;
};

MonotoneOperator make_operator(const OperatorChoice& choice, int dim = 1);
/// The five catalog entries (anisotropic is always built for d = 2).
std::vector<MonotoneOperator> catalog(double p = 4.0, std::vector<double> poly = {0.0, -1.0, 0.0, 1.0});
const std::vector<std::string>& catalog_names();

double eval_J(const MonotoneOperator& op, int order, const Arg& x);
Arg eval_f(const MonotoneOperator& op, int order, const Arg& x);
Arg eval_fR(const MonotoneOperator& op, int order, const Arg& x, const TruncationParams& trunc);
/// Jacobian of f_i^R; analytic inside the ball, central differences outside.
Hess eval_fR_jacobian(const MonotoneOperator& op, int order, const Arg& x, const TruncationParams& trunc);

/// Galerkin assembly of F and F^R on one basis. Pure; safe to share.
class OperatorAssembler {
public:
    OperatorAssembler(BasisPtr basis, MonotoneOperator op);

    const MonotoneOperator& op() const { return op_; }
    const SpectralBasis& basis() const { return *basis_; }
    BasisPtr basis_ptr() const { return basis_; }

    /// <F(u), w_j>, j = 1..n
    Coeffs assemble_F(const Coeffs& u) const;
    /// <F^R(u), w_j>; an absent truncation means F itself.
    Coeffs assemble_FR(const Coeffs& u, const std::optional<TruncationParams>& trunc) const;
    /// d<F^R(u), w_i>/du_j
    Eigen::MatrixXd jacobian(const Coeffs& u, const std::optional<TruncationParams>& trunc) const;
    /// J(u) = sum_i int J_i(D^i u)
    double energy(const Coeffs& u) const;
    /// Fraction of the domain where |D^i u| > R, per order 0..k.
    std::vector<double> occupancy(const Coeffs& u, const TruncationParams& trunc) const;
    /// Largest pointwise truncation norm of D^i u over the grid, per order 0..k.
    std::vector<double> max_pointwise(const Coeffs& u) const;

    double x_norm_pow(const Coeffs& u) const;
    double x_norm(const Coeffs& u) const;

private:
    GridValues args(const IntegrandTerm& t, const Coeffs& u) const;

    BasisPtr basis_;
    MonotoneOperator op_;
};

Coeffs assemble_F(const OperatorAssembler& a, const Coeffs& u);
Coeffs assemble_FR(const OperatorAssembler& a, const Coeffs& u, const TruncationParams& trunc);
std::vector<double> truncation_occupancy(const OperatorAssembler& a, const Coeffs& u, const TruncationParams& trunc);

}  // namespace levygal
