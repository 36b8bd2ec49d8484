// End-to-end acceptance checks; one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "levygal/analysis.hpp"
#include "levygal/config.hpp"
#include "levygal/io.hpp"
#include "levygal/properties.hpp"

using namespace levygal;
namespace fs = std::filesystem;

namespace {

const double pi = std::acos(-1.0);

struct Verdict {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.passed = false;
        v.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.passed) ++failures;
    std::printf("%s  %-4s %-44s %s(%.1fs)\n", v.passed ? "PASS" : "FAIL", id.c_str(), title.c_str(),
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

RunConfig config(const std::string& name) { return load_config(std::string(LEVYGAL_CONFIG_DIR) + "/" + name); }

Arg scalar(double v) {
    Arg a(1);
    a[0] = v;
    return a;
}

// property suites are shared by criteria 1, 3 and 4
std::vector<PropertySuite> suites;

const PropertyResult& row(const PropertySuite& s, const std::string& name) {
    for (const auto& r : s.rows)
        if (r.name == name) return r;
    throw std::runtime_error("missing property row " + name + " for " + s.operator_name);
}

double max_gradient(const Trajectory& t, const OperatorAssembler& a) {
    double m = 0.0;
    for (int k = 0; k < t.size(); ++k) m = std::max(m, a.max_pointwise(t.state(k))[1]);
    return m;
}

}  // namespace

int main() {
    std::printf("levygal acceptance (%d worker threads)\n", thread_count());

    for (const auto& name : catalog_names()) {
        SuiteOptions o;
        o.op.name = name;
        o.pairs = 10000;
        suites.push_back(run_property_suite(o));
    }

    criterion("1", "operator gradient consistency", [](Verdict& v) {
        double worst = 0.0;
        for (const auto& op : catalog()) {
            const GradientCheck gc = gradient_consistency(op, 200, 101);
            worst = std::max(worst, gc.max_gradient_error);
            v.require(gc.max_gradient_error <= 1e-6, op.name);
        }
        v.detail << "max rel error " << g(worst) << " over 5 operators x 200 points ";
    });

    criterion("2", "truncation correctness", [](Verdict& v) {
        OperatorChoice s;
        s.name = "smagorinsky";
        OperatorChoice p;
        p.name = "p_laplacian";
        const double a = eval_fR(make_operator(s), 1, scalar(2.0), {1.0, 1.0})[0];
        const double b = eval_fR(make_operator(p), 1, scalar(3.0), {2.0, 1.0})[0];
        v.require(std::abs(a - 6.0) <= 1e-12, "smagorinsky hand value 6");
        v.require(std::abs(b - 20.0) <= 1e-12, "p-Laplacian hand value 20");
        double inside = 0.0, cont = 0.0;
        for (const auto& op : catalog()) {
            const TruncationCheck tc = truncation_consistency(op, {2.0, 4.0, 8.0, 16.0}, 200, 1e-6, 102);
            inside = std::max(inside, tc.inside_max_difference);
            cont = std::max(cont, tc.continuity_max_relative);
        }
        v.require(inside == 0.0, "exact inside the ball");
        v.require(cont <= 1e-4, "continuity across the sphere");
        v.detail << "f^R(2)=" << g(a) << " f^R(3)=" << g(b) << " inside " << g(inside) << " jump " << g(cont) << ' ';
    });

    criterion("3a", "(F1) monotonicity, 10^4 pairs", [](Verdict& v) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& s : suites) {
            const auto& r = row(s, "F1_monotonicity");
            worst = std::min(worst, r.value);
            v.require(r.passed, s.operator_name);
        }
        v.detail << "min scaled pairing " << g(worst) << ' ';
    });

    criterion("3b", "(FR1) monotonicity at R = 2, 4, 8, 16", [](Verdict& v) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& s : suites)
            for (int R : {2, 4, 8, 16}) {
                const auto& r = row(s, "FR1_monotonicity_R" + std::to_string(R));
                worst = std::min(worst, r.value);
                v.require(r.passed, s.operator_name + " R=" + std::to_string(R));
            }
        v.detail << "min scaled pairing " << g(worst) << ' ';
    });

    criterion("3c", "Smagorinsky strong monotonicity slope", [](Verdict& v) {
        const auto& r = row(suites.front(), "strong_monotonicity_slope");
        v.require(r.passed, "slope >= 0.95 (p-1)");
        v.detail << "fitted slope " << g(r.value) << " vs threshold " << g(r.threshold) << ' ';
    });

    criterion("4", "(FR3)/(FR4) stability across R", [](Verdict& v) {
        for (const auto& s : suites) {
            const double c1 = row(s, "FR3_c1_stability").value, c5 = row(s, "FR3_c5_stability").value;
            const double fr4 = row(s, "FR4_stability").value;
            v.require(c1 <= 2.0 && c5 <= 2.0 && fr4 <= 2.0, s.operator_name);
            v.detail << s.operator_name << " " << g(c1) << "/" << g(c5) << "/" << g(fr4) << ' ';
        }
    });

    criterion("5", "convection cancellation (n = 32)", [](Verdict& v) {
        const ConvectionBounds b = convection_bounds(32, 1000, 105);
        v.require(b.cancellation <= 1e-10, "cancellation");
        v.detail << "max |<B(u),u>|/(||u|| |u|^2) = " << g(b.cancellation) << ' ';
    });

    criterion("6", "discrete energy ledger, 10^4 steps", [](Verdict& v) {
        const RunConfig rc = config("ledger.cfg");
        const Trajectory t = simulate(rc.solver);
        const EnergyReport e = energy_report(t);
        bool jumps = !t.jump_log.empty();
        v.require(int(t.ledger.size()) == 10000, "step count");
        v.require(jumps, "jump channel active");
        v.require(e.max_ledger_residual <= 1e-9, "residual");
        v.detail << "max relative residual " << g(e.max_ledger_residual) << ", " << t.jump_log.size() << " jumps ";
    });

    criterion("7", "pure-heat exactness", [](Verdict& v) {
        SolverConfig c;
        c.n = 8;
        c.T = 1.0;
        c.dt = 0.01;
        c.initial.kind = InitialCondition::Kind::deterministic;
        c.initial.coeffs = Coeffs::Zero(8);
        c.initial.coeffs[2] = 1.0;
        const Trajectory t = simulate(c);
        double worst = 0.0;
        for (int k = 0; k < t.size(); ++k) {
            const double exact = std::pow(1.0 + 0.01 * 9.0 * pi * pi, -k);
            worst = std::max(worst, std::abs(t.state(k)[2] - exact));
        }
        v.require(worst <= 1e-12, "geometric recursion");
        v.detail << "max deviation " << g(worst) << ' ';
    });

    criterion("8", "noise statistics", [](Verdict& v) {
        const NoiseDescriptor d = reference_noise(16);
        const CountCheck cc = poisson_count_check(d, 1.0, 2000, 108);
        const double zc = std::abs(cc.mean - cc.expected) / cc.std_error;
        Coeffs u = Coeffs::Zero(16);
        u[0] = 1.0;
        u[3] = -0.7;
        const MartingaleCheck m = compensated_jump_check(d, u, 0.01, 10000, 109);
        const double zi = std::abs(m.second_moment - m.isometry_target) / m.second_moment_se;
        v.require(zc <= 3.0, "Poisson count");
        v.require(zi <= 5.0, "Ito isometry");
        v.require(m.max_z <= 4.0, "compensated mean");
        v.detail << "count z=" << g(zc) << " isometry z=" << g(zi) << " mean z=" << g(m.max_z) << ' ';
    });

    criterion("9", "pathwise uniqueness", [](Verdict& v) {
        RunConfig noisy = config("ledger.cfg");
        noisy.solver.T = 0.1;
        const UniquenessReport same = compare_runs(noisy.solver, noisy.solver);
        v.require(same.bit_identical, "identical runs bit-identical");
        const RunConfig rc = config("uniqueness.cfg");
        const UniquenessReport u = uniqueness_experiment(rc.solver, rc.study.delta0);
        v.require(u.sup_distance <= rc.study.delta0, "no amplification");
        v.detail << "bit-identical " << (same.bit_identical ? "yes" : "no") << ", sup distance " << g(u.sup_distance)
                 << ", final " << g(u.distances.back()) << ' ';
    });

    criterion("10", "limit passages on frozen noise", [](Verdict& v) {
        const RunConfig cn = config("converge_n.cfg");
        const ConvergenceReport rn = convergence_study(cn.solver, StudyAxis::n, {8, 16, 32, 64});
        bool decreasing = rn.complete;
        for (std::size_t i = 1; i < rn.l2_distances.size(); ++i)
            decreasing = decreasing && rn.l2_distances[i] < rn.l2_distances[i - 1];
        v.require(decreasing, "n-axis decreasing");
        v.detail << "n: ";
        for (double d : rn.l2_distances) v.detail << g(d) << ' ';

        const RunConfig cr = config("converge_R.cfg");
        const Trajectory free = simulate(cr.solver);
        const double G = max_gradient(free, *Simulator(cr.solver).assembler());
        const std::vector<double> Rs{std::max(1.5, G / 4), std::max(1.75, G / 2), 1.5 * G, 3 * G};
        const ConvergenceReport rr = convergence_study(cr.solver, StudyAxis::R, Rs);
        v.require(rr.complete && rr.l2_distances.back() == 0.0, "R-axis vanishes above max gradient");
        v.require(rr.l2_distances.front() > 0.0, "R-axis active below max gradient");
        v.detail << "| R (max grad " << g(G) << "): ";
        for (double d : rr.l2_distances) v.detail << g(d) << ' ';

        RunConfig ct = config("converge_Rtilde.cfg");
        const Trajectory open = simulate(ct.solver);
        double sup = 0.0;
        for (int k = 0; k < open.size(); ++k) sup = std::max(sup, open.state(k).norm());
        const std::vector<double> Rt{1.0, std::max(1.0, sup / 3), 1.5 * sup, 3 * sup};
        const ConvergenceReport rt = convergence_study(ct.solver, StudyAxis::R_tilde, Rt);
        v.require(rt.complete && rt.l2_distances.back() == 0.0, "R~-axis vanishes above sup|u|");
        v.require(rt.l2_distances.front() > 0.0, "R~-axis active below sup|u|");
        v.detail << "| R~ (sup|u| " << g(sup) << "): ";
        for (double d : rt.l2_distances) v.detail << g(d) << ' ';
    });

    criterion("11", "occupancy(R) R^p within one order", [](Verdict& v) {
        const RunConfig rc = config("occupancy.cfg");
        const OccupancyReport r = occupancy_study(rc.solver, rc.study.R_values);
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < r.R.size(); ++i) {
            lo = std::min(lo, r.scaled[i]);
            hi = std::max(hi, r.scaled[i]);
            v.detail << "R=" << r.R[i] << ":" << g(r.scaled[i]) << ' ';
        }
        v.require(lo > 0.0, "truncation active at every R");
        v.require(r.monotone_decreasing, "occupancy non-increasing");
        v.require(hi <= 10.0 * lo, "spread");
        v.detail << "spread " << g(lo > 0.0 ? hi / lo : INFINITY) << ' ';
    });

    criterion("12", "Gagliardo benchmark 8/15", [](Verdict& v) {
        for (int cells : {64, 128, 256, 512}) {
            Trajectory t;
            t.basis = SpectralBasis::build(Domain::interval(), 1);
            t.dt = 1.0 / cells;
            t.states.resize(cells + 1, 1);
            for (int k = 0; k <= cells; ++k) {
                t.times.push_back(k * t.dt);
                t.states(k, 0) = k * t.dt;
            }
            const double s = gagliardo_seminorm(t, 0.25, 2.0);
            const double rel = std::abs(s * s - 8.0 / 15.0) / (8.0 / 15.0);
            v.detail << "1/" << cells << ":" << g(s * s) << ' ';
            if (cells == 512) v.require(rel <= 0.05, "within 5% at dt = 1/512");
        }
    });

    criterion("13", "moment R-independence (R, 2R)", [](Verdict& v) {
        const RunConfig rc = config("moments.cfg");
        const MomentReport a = moment_study(rc.solver, rc.study.paths);
        SolverConfig doubled = rc.solver;
        doubled.truncation->R *= 2.0;
        const MomentReport b = moment_study(doubled, rc.study.paths);
        const double se = std::hypot(a.sup_h2.std_error, b.sup_h2.std_error);
        const double z = std::abs(a.sup_h2.mean - b.sup_h2.mean) / se;
        v.require(a.aborted == 0 && b.aborted == 0, "no aborted paths");
        v.require(z <= 3.0, "within 3 combined standard errors");
        v.detail << "R=" << rc.solver.truncation->R << ": " << g(a.sup_h2.mean) << "+-" << g(a.sup_h2.std_error)
                 << ", 2R: " << g(b.sup_h2.mean) << "+-" << g(b.sup_h2.std_error) << ", z=" << g(z) << ' ';
    });

    criterion("14", "manifest reproducibility", [](Verdict& v) {
        const fs::path root = fs::temp_directory_path() / "levygal_acceptance";
        fs::remove_all(root);
        const std::string cli = LEVYGAL_CLI_PATH;
        const std::string cfg = std::string(LEVYGAL_CONFIG_DIR) + "/pipeline.cfg";
        int files = 0;
        for (const char* sub : {"simulate", "properties", "converge", "uniqueness", "moments", "seminorm"}) {
            const fs::path first = root / sub / "first", second = root / sub / "second";
            const std::string run = cli + " " + sub + " --quiet --config " + cfg + " --out " + first.string();
            const int status = std::system(run.c_str());
            v.require(status == 0 || std::string(sub) == "properties", std::string(sub) + " ran");
            const std::string replay = cli + " reproduce --quiet --manifest " + (first / "manifest.json").string() +
                                       " --out " + second.string();
            v.require(std::system(replay.c_str()) == 0, std::string(sub) + " digests");
            for (const auto& entry : fs::directory_iterator(first)) {
                if (entry.path().extension() != ".csv") continue;
                ++files;
                const fs::path twin = second / entry.path().filename();
                v.require(fs::exists(twin) && read_file(entry.path().string()) == read_file(twin.string()),
                          entry.path().filename().string());
            }
        }
        v.detail << files << " CSV files byte-identical across re-runs ";
    });

    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
