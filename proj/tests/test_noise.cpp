#include <doctest.h>

#include <cmath>

#include "levygal/noise.hpp"
#include "levygal/properties.hpp"
#include "levygal/rng.hpp"

using namespace levygal;

TEST_CASE("Philox4x32-10 known answers") {
    using B = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter streams") {
    const CounterStream a(5, StreamId::wiener, 0), b(5, StreamId::wiener, 1), c(5, StreamId::jumps, 0);
    CHECK(a.uniform_at(3) == CounterStream(5, StreamId::wiener, 0).uniform_at(3));
    CHECK(a.uniform_at(3) != b.uniform_at(3));
    CHECK(a.uniform_at(3) != c.uniform_at(3));
    double s = 0, s2 = 0;
    for (int i = 0; i < 20000; ++i) {
        const double z = a.normal_at(i);
        s += z;
        s2 += z * z;
        const double u = a.uniform_at(i), o = a.open_uniform_at(i);
        CHECK((u >= 0.0 && u < 1.0));
        CHECK((o > 0.0 && o <= 1.0));
    }
    CHECK(std::abs(s / 20000) <= 4.0 / std::sqrt(20000.0));
    CHECK(s2 / 20000 == doctest::Approx(1.0).epsilon(0.05));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("silent noise gives the zero path") {
    NoiseDescriptor d;
    CHECK(d.silent());
    const LevyNoisePath p = sample_path(d, 1.0, 0.01, 3, 8);
    CHECK(p.steps == 100);
    CHECK(p.wiener.cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.jumps.empty());
    CHECK(p.large_jumps.empty());
}

TEST_CASE("horizon must be a multiple of the step") {
    CHECK(step_count(1.0, 0.01) == 100);
    CHECK_THROWS_AS(step_count(1.0, 0.03), NoiseError);
    CHECK_THROWS_AS(step_count(1.0, 0.0), NoiseError);
    NoiseDescriptor d;
    d.q = {-1.0};
    CHECK_THROWS_AS(d.validate(), NoiseError);
    NoiseDescriptor e;
    e.marks.push_back(Mark{1.0, 0.0, Coeffs(), 1.0});
    CHECK_THROWS_AS(e.validate(), NoiseError);
}

TEST_CASE("deterministic paths") {
    const NoiseDescriptor d = reference_noise(8);
    const LevyNoisePath a = sample_path(d, 1.0, 0.01, 42, 8), b = sample_path(d, 1.0, 0.01, 42, 8);
    const LevyNoisePath c = sample_path(d, 1.0, 0.01, 43, 8);
    CHECK(a.wiener == b.wiener);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t i = 0; i < a.jumps.size(); ++i) CHECK(a.jumps[i].t == b.jumps[i].t);
    CHECK(a.wiener != c.wiener);
    // a larger Galerkin space keeps the existing modes
    const LevyNoisePath wide = sample_path(d, 1.0, 0.01, 42, 16);
    CHECK(wide.wiener.leftCols(8) == a.wiener);
    int counted = 0;
    for (int k = 0; k < a.steps; ++k) {
        for (const auto& e : a.jumps_in_step(k)) {
            CHECK(e.t > k * a.dt - 1e-12);
            CHECK(e.t <= (k + 1) * a.dt + 1e-12);
        }
        counted += int(a.jumps_in_step(k).size());
    }
    CHECK(counted == int(a.jumps.size()));
}

TEST_CASE("Poisson counts and Wiener variance") {
    const NoiseDescriptor d = reference_noise(8);
    CHECK(d.total_intensity() == doctest::Approx(4.0));
    const CountCheck cc = poisson_count_check(d, 1.0, 2000, 19);
    CHECK(cc.expected == doctest::Approx(4.0));
    CHECK(std::abs(cc.mean - cc.expected) <= 3.0 * cc.std_error);
    const double r = wiener_variance_ratio(d, 0.01, 10000, 23);
    CHECK(r >= 0.9);
    CHECK(r <= 1.1);
}

TEST_CASE("step terms") {
    NoiseDescriptor d;
    d.q = {1.0, 1.0};
    d.sigma = {2.0, 3.0};
    Coeffs u(2);
    u << 1.0, -1.0;
    Eigen::VectorXd inc(2);
    inc << 0.1, 0.2;
    CHECK(wiener_term(d, u, inc).isApprox(Coeffs{{0.2, 0.6}}));
    d.g_kind = GKind::diagonal_linear;
    CHECK(wiener_term(d, u, inc).isApprox(Coeffs{{0.2, -0.6}}));

    NoiseDescriptor j;
    j.marks.push_back(Mark{1.0, 2.0, Coeffs(), 1.0});
    Coeffs w1 = Coeffs::Zero(4);
    w1[0] = 1.0;
    const std::vector<JumpEvent> none, one{{0.005, 0}};
    CHECK(compensated_jump_term(j, w1, none, 0.01).isApprox(-0.02 * w1));
    CHECK(compensated_jump_term(j, w1, one, 0.01).isApprox(0.98 * w1));

    j.large_jumps.push_back(Mark{5.0, 0.5, Coeffs{{0.0, 3.0}}, 0.0});
    const std::vector<JumpEvent> big{{0.2, 0}, {0.7, 0}};
    const Coeffs lj = large_jump_term(j, w1, big);
    CHECK(lj[1] == doctest::Approx(6.0));
    CHECK(lj[0] == 0.0);
    CHECK(lj.size() == 4);
}

TEST_CASE("compensated jumps are centred with the Ito isometry") {
    const NoiseDescriptor d = reference_noise(8);
    Coeffs u = Coeffs::Zero(8);
    u[0] = 1.0;
    u[1] = -0.5;
    const MartingaleCheck m = compensated_jump_check(d, u, 0.01, 10000, 20);
    CHECK(m.max_z <= 4.0);
    CHECK(std::abs(m.second_moment - m.isometry_target) <= 5.0 * m.second_moment_se);
}

TEST_CASE("growth and Lipschitz bounds of the coefficients") {
    const NoiseDescriptor d = reference_noise(16);
    CHECK(noise_growth_ratio(d, 16, 1000, 21) <= 1.0);
    CHECK(noise_lipschitz_ratio(d, 16, 1000, 22) <= 1.0 + 1e-12);
    NoiseDescriptor lin = d;
    lin.g_kind = GKind::diagonal_linear;
    CHECK(noise_growth_ratio(lin, 16, 1000, 21) <= 1.0);
    CHECK(noise_lipschitz_ratio(lin, 16, 1000, 22) <= 1.0 + 1e-12);
}

TEST_CASE("refinement keeps the coarse increments") {
    NoiseDescriptor d;
    d.q = {1.0, 0.25};
    d.sigma = {1.0, 1.0};
    const LevyNoisePath p = sample_path(d, 1.0, 0.1, 9, 2);
    const LevyNoisePath r = refine_path(p, d);
    CHECK(r.steps == 20);
    CHECK(r.dt == doctest::Approx(0.05));
    for (int k = 0; k < p.steps; ++k)
        CHECK((r.wiener.row(2 * k) + r.wiener.row(2 * k + 1) - p.wiener.row(k)).norm() <= 1e-13);
}
