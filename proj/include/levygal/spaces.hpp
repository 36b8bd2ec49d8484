#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace levygal {

using Coeffs = Eigen::VectorXd;

/// Thrown on any violated precondition of the discrete function spaces.
class SpaceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Boundary { dirichlet, dirichlet_x1_only };

struct Domain {
    int dim = 1;
    std::array<double, 2> lengths{1.0, 1.0};
    Boundary boundary = Boundary::dirichlet;

    static Domain interval(double length = 1.0);
    static Domain rectangle(double lx, double ly, Boundary bc = Boundary::dirichlet);

    void validate() const;
    double measure() const;
};

/// Multi-index of a tensor mode. k2 is unused (0) in 1-D; for the
/// dirichlet_x1_only rectangle k2 = 0 denotes the constant cosine.
struct ModeIndex {
    int k1 = 1;
    int k2 = 0;
    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Pointwise quantities a nonlinear integrand can act on.
///   value      u                      (1 component)
///   gradient   grad u                 (dim components)
///   laplacian  Delta u                (1 component)
///   partial_x1 du/dx1                 (1 component)
///   hessian    D^2 u, row-major       (dim*dim components)
enum class Channel { value, gradient, laplacian, partial_x1, hessian };

/// Grid values of a vector-valued pointwise quantity: rows are quadrature
/// points, columns are tuple components.
using GridValues = Eigen::MatrixXd;

/// Eigenpairs of the Dirichlet Laplacian on an interval or rectangle with a
/// composite midpoint grid. Immutable after construction.
class SpectralBasis {
public:
    SpectralBasis(const Domain& domain, int n, int n_quad);

    static std::shared_ptr<const SpectralBasis> build(const Domain& domain, int n, int n_quad = 0);

    /// Smallest admissible points-per-axis count for the anti-aliasing floor.
    static int min_quad(const Domain& domain, int n);

    const Domain& domain() const { return domain_; }
    int size() const { return n_; }
    int dim() const { return domain_.dim; }
    int quad_per_axis() const { return n_quad_; }
    int num_points() const { return static_cast<int>(weights_.size()); }
    int max_mode_index() const { return max_index_; }

    const Eigen::VectorXd& eigenvalues() const { return lambda_; }
    const std::vector<ModeIndex>& modes() const { return modes_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    /// Quadrature nodes, one row per point, dim columns.
    const Eigen::MatrixXd& points() const { return points_; }

    static int channel_width(Channel c, int dim);
    int channel_width(Channel c) const { return channel_width(c, dim()); }

    /// Basis tables: entry (q, j) is component `component` of the channel
    /// applied to w_j, evaluated at point q.
    const Eigen::MatrixXd& table(Channel c, int component = 0) const;

    /// Closed-form evaluation of w_j at an arbitrary point.
    double eval_mode(int j, double x, double y = 0.0) const;

    Eigen::VectorXd sample(const std::function<double(double, double)>& fn) const;

private:
    Domain domain_;
    int n_;
    int n_quad_;
    int max_index_ = 0;
    std::vector<ModeIndex> modes_;
    Eigen::VectorXd lambda_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd points_;
    Eigen::MatrixXd value_, laplacian_, partial_x1_;
    std::vector<Eigen::MatrixXd> gradient_;
    std::vector<Eigen::MatrixXd> hessian_;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

struct Field {
    BasisPtr basis;
    Coeffs coeffs;

    static Field zero(BasisPtr b) { return {b, Coeffs::Zero(b->size())}; }
    static Field mode(BasisPtr b, int j, double amplitude = 1.0);
};

/// Quadrature projection onto span{w_1..w_n}.
Coeffs project(const SpectralBasis& basis, const Eigen::VectorXd& samples);

/// Pointwise values of the channel at every quadrature point.
GridValues channel_values(const SpectralBasis& basis, const Coeffs& u, Channel c);

/// D^i u at the quadrature points, i in {0,1,2}; i = 2 yields the full
/// Hessian tuple.
GridValues evaluate_derivatives(const SpectralBasis& basis, const Coeffs& u, int order);

enum class NormKind { H, V, dual_V, X };

struct XNormParams {
    double p = 4.0;
    int k = 1;
};

double h_norm(const Coeffs& u);
double v_norm(const SpectralBasis& basis, const Coeffs& u);
double dual_v_norm(const SpectralBasis& basis, const Coeffs& u);
/// (sum_{i<=k} int |D^i u|_{l^p}^p)^{1/p}
double x_norm(const SpectralBasis& basis, const Coeffs& u, XNormParams params);
double norm(const SpectralBasis& basis, const Coeffs& u, NormKind kind, XNormParams params = {});

/// int |q|_{l^p}^p over the domain for a grid-valued tuple field.
double lp_integral(const SpectralBasis& basis, const GridValues& values, double p);

Coeffs apply_A(const SpectralBasis& basis, const Coeffs& u);

/// <v, w> in coefficients (Parseval).
inline double pairing(const Coeffs& a, const Coeffs& b) { return a.dot(b); }

/// Copies the first min(n, src.size()) coefficients into a length-n vector.
Coeffs resize_coeffs(const Coeffs& src, int n);

}  // namespace levygal
