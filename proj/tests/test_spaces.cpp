#include <doctest.h>

#include <cmath>

#include "levygal/rng.hpp"
#include "levygal/spaces.hpp"

using namespace levygal;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("interval eigenpairs are closed form") {
    auto b = SpectralBasis::build(Domain::interval(), 1);
    CHECK(b->eigenvalues()[0] == doctest::Approx(pi * pi).epsilon(1e-15));
    CHECK(b->eval_mode(0, 0.3) == doctest::Approx(std::sqrt(2.0) * std::sin(0.3 * pi)).epsilon(1e-15));

    auto b3 = SpectralBasis::build(Domain::interval(), 3);
    CHECK(b3->eigenvalues()[0] == doctest::Approx(pi * pi));
    CHECK(b3->eigenvalues()[1] == doctest::Approx(4 * pi * pi));
    CHECK(b3->eigenvalues()[2] == doctest::Approx(9 * pi * pi));
    CHECK(b3->eigenvalues()[0] < b3->eigenvalues()[1]);
}

TEST_CASE("quadrature Gram matrix is the identity") {
    const SpectralBasis b(Domain::interval(), 8, 256);
    const Eigen::MatrixXd& V = b.table(Channel::value);
    const Eigen::MatrixXd gram = V.transpose() * b.weights().asDiagonal() * V;
    CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(b.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("2-D rectangle ordering and boundary variants") {
    auto b = SpectralBasis::build(Domain::rectangle(1.0, 1.0), 6);
    // (1,1) then the tie (1,2), (2,1) broken lexicographically
    CHECK(b->modes()[0] == ModeIndex{1, 1});
    CHECK(b->modes()[1] == ModeIndex{1, 2});
    CHECK(b->modes()[2] == ModeIndex{2, 1});
    for (int j = 1; j < 6; ++j) CHECK(b->eigenvalues()[j] >= b->eigenvalues()[j - 1]);

    auto a = SpectralBasis::build(Domain::rectangle(1.0, 1.0, Boundary::dirichlet_x1_only), 5);
    CHECK(a->modes()[0] == ModeIndex{1, 0});
    CHECK(a->eigenvalues()[0] == doctest::Approx(pi * pi));
    // u nu_1 = 0: vanishes on x1 = 0 and x1 = 1 for every x2
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(a->eval_mode(j, 0.0, 0.37)) <= 1e-14);
        CHECK(std::abs(a->eval_mode(j, 1.0, 0.81)) <= 1e-14);
    }
    const Eigen::MatrixXd& V = a->table(Channel::value);
    const Eigen::MatrixXd gram = V.transpose() * a->weights().asDiagonal() * V;
    CHECK((gram - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("basis construction errors") {
    CHECK_THROWS_AS(SpectralBasis(Domain::interval(), 8, 16), SpaceError);
    CHECK_THROWS_AS(SpectralBasis::build(Domain::interval(), 0), SpaceError);
    Domain bad = Domain::interval();
    bad.boundary = Boundary::dirichlet_x1_only;
    CHECK_THROWS_AS(SpectralBasis::build(bad, 4), SpaceError);
    CHECK_THROWS_AS(SpectralBasis::build(Domain::interval(-1.0), 4), SpaceError);
}

TEST_CASE("projection") {
    auto b = SpectralBasis::build(Domain::interval(), 8);
    const Coeffs c1 = project(*b, b->table(Channel::value).col(0));
    CHECK(c1[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c1.tail(7).cwiseAbs().maxCoeff() <= 1e-13);

    const Eigen::VectorXd s = b->table(Channel::value).col(0) + 2.0 * b->table(Channel::value).col(2);
    const Coeffs c = project(*b, s);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[2] == doctest::Approx(2.0));
    CHECK(std::abs(c[1]) <= 1e-13);

    // one mode beyond the span
    const Eigen::VectorXd beyond = b->sample([&](double x, double) { return std::sqrt(2.0) * std::sin(9 * pi * x); });
    CHECK(project(*b, beyond).cwiseAbs().maxCoeff() <= 1e-8);

    CHECK_THROWS_AS(project(*b, Eigen::VectorXd::Zero(3)), SpaceError);

    // idempotence
    const Coeffs u = Coeffs::LinSpaced(8, -1.0, 2.0);
    const Coeffs again = project(*b, channel_values(*b, u, Channel::value).col(0));
    CHECK((again - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("closed-form derivatives") {
    auto b = SpectralBasis::build(Domain::interval(), 4);
    const Coeffs w1 = Field::mode(b, 0).coeffs;
    const GridValues d1 = evaluate_derivatives(*b, w1, 1);
    const GridValues d0 = evaluate_derivatives(*b, w1, 0);
    const GridValues d2 = evaluate_derivatives(*b, w1, 2);
    for (int q = 0; q < b->num_points(); ++q) {
        const double x = b->points()(q, 0);
        CHECK(d1(q, 0) == doctest::Approx(std::sqrt(2.0) * pi * std::cos(pi * x)).epsilon(1e-13));
        CHECK(d0(q, 0) == doctest::Approx(std::sqrt(2.0) * std::sin(pi * x)).epsilon(1e-13));
        CHECK(d2(q, 0) == doctest::Approx(-pi * pi * d0(q, 0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(evaluate_derivatives(*b, w1, 3), SpaceError);
}

TEST_CASE("norms") {
    auto b = SpectralBasis::build(Domain::interval(), 8);
    const Coeffs w1 = Field::mode(b, 0).coeffs;
    CHECK(h_norm(w1) == doctest::Approx(1.0));
    CHECK(v_norm(*b, w1) == doctest::Approx(pi));
    CHECK(dual_v_norm(*b, w1) == doctest::Approx(1.0 / pi));
    const double x4 = std::pow(x_norm(*b, w1, {4.0, 1}), 4.0);
    CHECK(x4 == doctest::Approx(1.5 * (1.0 + std::pow(pi, 4))).epsilon(1e-12));

    const Coeffs z = Coeffs::Zero(8);
    for (NormKind k : {NormKind::H, NormKind::V, NormKind::dual_V, NormKind::X}) CHECK(norm(*b, z, k) == 0.0);
    CHECK_THROWS_AS(x_norm(*b, w1, {2.0, 1}), SpaceError);
    CHECK_THROWS_AS(x_norm(*b, w1, {4.0, 3}), SpaceError);
}

TEST_CASE("operator A and Gelfand identities") {
    auto b = SpectralBasis::build(Domain::interval(), 8);
    const Coeffs w1 = Field::mode(b, 0).coeffs;
    CHECK((apply_A(*b, w1) - pi * pi * w1).norm() <= 1e-12);
    CHECK(apply_A(*b, Coeffs::Zero(8)).norm() == 0.0);
    Coeffs u = Coeffs::Zero(8);
    u[0] = u[1] = 1.0;
    CHECK(pairing(apply_A(*b, u), u) == doctest::Approx(5 * pi * pi));
    CHECK(pairing(apply_A(*b, u), u) == doctest::Approx(std::pow(v_norm(*b, u), 2)));
}

TEST_CASE("Parseval and Poincare over random fields") {
    auto b = SpectralBasis::build(Domain::interval(), 16);
    CounterStream rng(3, StreamId::sampler, 0);
    const double lam1 = b->eigenvalues()[0];
    for (int i = 0; i < 1000; ++i) {
        Coeffs u(16);
        for (int j = 0; j < 16; ++j) u[j] = rng.next_normal() / (j + 1);
        const GridValues v = channel_values(*b, u, Channel::value);
        const double quad = std::sqrt(b->weights().dot(v.col(0).cwiseAbs2()));
        CHECK(std::abs(quad - h_norm(u)) <= 1e-9 * h_norm(u));
        CHECK(h_norm(u) <= v_norm(*b, u) / std::sqrt(lam1) * (1 + 1e-14));
    }
}
