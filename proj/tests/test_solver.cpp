#include <doctest.h>

#include <cmath>

#include "levygal/properties.hpp"
#include "levygal/solver.hpp"

using namespace levygal;

namespace {
const double pi = std::acos(-1.0);

SolverConfig heat(int n = 8) {
    SolverConfig c;
    c.n = n;
    c.T = 1.0;
    c.dt = 0.01;
    c.gamma = 1.0;
    c.initial.kind = InitialCondition::Kind::deterministic;
    c.initial.coeffs = Coeffs::Zero(n);
    c.initial.coeffs[0] = 1.0;
    return c;
}

OperatorChoice plap() {
    OperatorChoice o;
    o.name = "p_laplacian";
    o.p = 4.0;
    return o;
}
}  // namespace

TEST_CASE("zero data stays at zero") {
    SolverConfig c = heat();
    c.initial.kind = InitialCondition::Kind::zero;
    c.op = plap();
    c.convection_enabled = true;
    const Trajectory t = simulate(c);
    CHECK(t.size() == 101);
    CHECK(t.states.cwiseAbs().maxCoeff() == 0.0);
    const EnergyReport e = energy_report(t);
    CHECK(e.sup_h2 == 0.0);
    CHECK(e.int_v2 == 0.0);
    CHECK(e.max_ledger_residual == 0.0);
}

TEST_CASE("pure heat equation decays by the implicit factor") {
    const Trajectory t = simulate(heat());
    const double expected = std::pow(1.0 + 0.01 * pi * pi, -100);
    CHECK(t.state(100)[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(t.state(100).tail(7).cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.times.back() == doctest::Approx(1.0));
}

TEST_CASE("additive noise without drift telescopes") {
    SolverConfig c = heat();
    c.gamma = 0.0;
    c.noise.q = NoiseDescriptor::power_law_q(1.0, 2.0, 8);
    c.noise.sigma.assign(8, 0.5);
    c.seed = 17;
    Simulator sim(c);
    const LevyNoisePath path = sim.sample_noise();
    const Trajectory t = sim.run(sim.initial_state(), path);
    const Coeffs expected = sim.initial_state() + 0.5 * path.wiener.colwise().sum().transpose();
    CHECK((t.state(100) - expected).norm() <= 1e-12);
}

TEST_CASE("energy ledger closes with the full model") {
    SolverConfig c = heat(16);
    c.op = plap();
    c.truncation = TruncationParams{4.0, 1.0};
    c.convection_enabled = true;
    c.noise = reference_noise(16);
    c.seed = 5;
    c.initial.kind = InitialCondition::Kind::random;
    for (bool implicit : {false, true}) {
        c.implicit_F = implicit;
        // explicit F^R needs dt (p-1) R^{p-2} lambda_n < 2
        c.T = implicit ? 1.0 : 0.005;
        c.dt = implicit ? 0.01 : 5e-6;
        const Trajectory t = simulate(c);
        CHECK(energy_report(t).max_ledger_residual <= 1e-9);
        CHECK(int(t.ledger.size()) == t.size() - 1);
    }
}

TEST_CASE("deterministic p-Laplacian flow dissipates") {
    SolverConfig c = heat();
    c.op = plap();
    c.implicit_F = true;
    c.initial.coeffs[1] = 0.5;
    const Trajectory t = simulate(c);
    for (int k = 1; k < t.size(); ++k) CHECK(t.state(k).norm() <= t.state(k - 1).norm());
    // same seed, same trajectory
    CHECK(simulate(c).states == t.states);
}

TEST_CASE("invalid configurations") {
    SolverConfig c = heat();
    c.dt = 0.03;
    CHECK_THROWS(simulate(c));
    SolverConfig d = heat();
    d.gamma = -1.0;
    CHECK_THROWS_AS(d.validate(), ConfigInvalid);
}
