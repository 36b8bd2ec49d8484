#include <doctest.h>

#include <string>

#include "levygal/config.hpp"
#include "levygal/io.hpp"

using namespace levygal;

namespace {
const std::string minimal = "operator = p_laplacian\nT = 1\ndt = 0.01\nn = 16\nseed = 3\n";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}
}  // namespace

TEST_CASE("minimal config and defaults") {
    const RunConfig c = parse_config(minimal);
    REQUIRE(c.solver.op.has_value());
    CHECK(c.solver.op->name == "p_laplacian");
    CHECK(c.solver.op->p == 4.0);
    CHECK(c.solver.n == 16);
    CHECK(c.solver.seed == 3);
    CHECK(c.solver.domain.dim == 1);
    CHECK_FALSE(c.solver.truncation.has_value());
    CHECK(c.study.m_or_default(4.0) == doctest::Approx(1.2));
    CHECK(effective_p(c.solver) == 4.0);

    const RunConfig none = parse_config("operator = none  # heat only\nT = 1\ndt = 0.5\nn = 4\nseed = 0\n");
    CHECK_FALSE(none.solver.op.has_value());
    const RunConfig an = parse_config("operator = anisotropic\nT = 1\ndt = 0.5\nn = 4\nseed = 0\n");
    CHECK(an.solver.domain.dim == 2);
    CHECK(an.solver.domain.boundary == Boundary::dirichlet_x1_only);
}

TEST_CASE("config errors carry line numbers") {
    CHECK(error_of(minimal + "operator.p = 1.5\n") == "line 6: p must exceed 2");
    const std::string dup = error_of("operator = smagorinsky\nT = 1\nn = 4\nT = 2\ndt = 0.5\nseed = 1\n");
    CHECK(dup.find("line 2") != std::string::npos);
    CHECK(dup.find("line 4") != std::string::npos);
    CHECK(error_of(minimal + "gama = 1\n").find("line 6") != std::string::npos);
    CHECK(error_of(minimal + "gama = 1\n").find("gama") != std::string::npos);
    CHECK(error_of(minimal + "gamma = abc\n").find("line 6") != std::string::npos);
    CHECK(error_of("T = 1\ndt = 0.01\nn = 16\nseed = 3\n").find("operator") != std::string::npos);
    CHECK_FALSE(error_of("operator = smagorinsky\nT = 1\ndt = 0.03\nn = 4\nseed = 1\n").empty());
    CHECK_FALSE(error_of(minimal + "this line has no equals sign\n").empty());
}

TEST_CASE("echo round-trips") {
    const std::string text = minimal +
                             "truncation.R = 4\nconvection = true\nnoise.q0 = 0.5\nnoise.s = 2\nnoise.sigma = 1, 0.5\n"
                             "noise.mark.0.xi = 1\nnoise.mark.0.intensity = 2\nnoise.mark.0.a = 0.1, 0.2\n"
                             "noise.mark.0.b = 0.3\ninitial.kind = random\nstudy.values = 8, 16\n";
    const RunConfig c = parse_config(text);
    CHECK(c.solver.truncation->R == 4.0);
    CHECK(c.solver.noise.marks.size() == 1);
    const std::string echo = echo_config(c);
    CHECK(echo_config(parse_config(echo)) == echo);
}

TEST_CASE("CSV and digests") {
    Table t;
    t.header = {"a", "b"};
    t.add({"1", format_double(0.1)});
    t.add({"x", "-2.5"});
    const std::string csv = render_csv(t);
    const Table back = parse_csv(csv);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK_THROWS(parse_csv("a,b\n1\n"));
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
