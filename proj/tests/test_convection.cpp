#include <doctest.h>

#include <cmath>

#include "levygal/convection.hpp"
#include "levygal/properties.hpp"
#include "levygal/rng.hpp"

using namespace levygal;

namespace {
const double pi = std::acos(-1.0);

Coeffs random_coeffs(CounterStream& rng, int n) {
    Coeffs c(n);
    for (int j = 0; j < n; ++j) c[j] = rng.next_normal() / (j + 1);
    return c;
}
}  // namespace

TEST_CASE("cutoff ramp") {
    const CutoffParams cut{1.0};
    CHECK(theta(cut, 0.0) == 1.0);
    CHECK(theta(cut, 1.0) == 1.0);
    CHECK(theta(cut, 1.5) == doctest::Approx(0.5));
    CHECK(theta(cut, 2.0) == 0.0);
    CHECK(theta(cut, 7.0) == 0.0);
    CHECK(theta({2.0}, 3.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(assemble_B_cutoff(*SpectralBasis::build(Domain::interval(), 4), Coeffs::Zero(4), {0.5}), SpaceError);
}

TEST_CASE("single-mode convection against the closed form") {
    auto b = SpectralBasis::build(Domain::interval(), 8);
    const Coeffs w1 = Field::mode(b, 0).coeffs;
    const Coeffs Bw = assemble_B(*b, w1, w1);
    // 1.5 w1 w1' = 1.5 pi sin(2 pi x)
    CHECK(Bw[1] == doctest::Approx(1.5 * pi * std::sqrt(2.0) / 2.0).epsilon(1e-12));
    CHECK(std::abs(Bw[0]) <= 1e-12);
    CHECK(Bw.tail(6).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("bilinearity and cancellation") {
    auto b = SpectralBasis::build(Domain::interval(), 16);
    CounterStream rng(21, StreamId::sampler);
    for (int i = 0; i < 50; ++i) {
        const Coeffs u = random_coeffs(rng, 16), v = random_coeffs(rng, 16), w = random_coeffs(rng, 16);
        const double a = rng.next_normal();
        const Coeffs lhs = assemble_B(*b, u + a * v, w);
        const Coeffs rhs = assemble_B(*b, u, w) + a * assemble_B(*b, v, w);
        CHECK((lhs - rhs).norm() <= 1e-11 * (1 + rhs.norm()));
        const Coeffs lhs2 = assemble_B(*b, w, u + a * v);
        const Coeffs rhs2 = assemble_B(*b, w, u) + a * assemble_B(*b, w, v);
        CHECK((lhs2 - rhs2).norm() <= 1e-11 * (1 + rhs2.norm()));
        const Coeffs bw = assemble_B(*b, v, w);
        CHECK(std::abs(bw.dot(w)) <= 1e-12 * std::max(1.0, bw.norm() * w.norm()));
    }
    const ConvectionBounds cb = convection_bounds(32, 500, 4);
    CHECK(cb.cancellation <= 1e-12);
}

TEST_CASE("cutoff convection") {
    auto b = SpectralBasis::build(Domain::interval(), 8);
    const Coeffs w1 = Field::mode(b, 0).coeffs;
    const CutoffParams cut{1.0};
    CHECK((assemble_B_cutoff(*b, 0.5 * w1, cut) - assemble_B(*b, 0.5 * w1, 0.5 * w1)).norm() == 0.0);
    CHECK((assemble_B_cutoff(*b, 1.5 * w1, cut) - 0.5 * assemble_B(*b, 1.5 * w1, 1.5 * w1)).norm() <= 1e-14);
    CHECK(assemble_B_cutoff(*b, 2.0 * w1, cut).norm() == 0.0);
    CHECK(assemble_B_cutoff(*b, 30.0 * w1, cut).norm() == 0.0);
    CHECK(theta_lipschitz_ratio(1.0, 2000, 3) <= 1.0 + 1e-12);
}

TEST_CASE("2-D bases are rejected") {
    auto b = SpectralBasis::build(Domain::rectangle(1, 1), 4);
    CHECK_THROWS_AS(assemble_B(*b, Coeffs::Zero(4), Coeffs::Zero(4)), SpaceError);
    CHECK_THROWS_AS(assemble_B_cutoff(*b, Coeffs::Zero(4), {1.0}), SpaceError);
}
