#include "levygal/runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>

#include <json.hpp>

#include "levygal/analysis.hpp"
#include "levygal/config.hpp"
#include "levygal/io.hpp"
#include "levygal/properties.hpp"
#include "levygal/solver.hpp"

namespace levygal {

namespace {

using Outputs = std::vector<std::pair<std::string, std::string>>;

struct Result {
    int status = exit_ok;
    Outputs files;
    std::string abort_message;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

Table summary_table() { return Table{{"key", "value"}, {}}; }

Table trajectory_table(const Trajectory& traj) {
    const int n = int(traj.states.cols());
    Table t;
    t.header.push_back("t");
    for (int j = 1; j <= n; ++j) t.header.push_back("coeff_" + std::to_string(j));
    for (const char* h : {"H_norm", "V_norm", "X_norm", "jump_flag"}) t.header.push_back(h);
    std::vector<char> jumped(traj.size(), 0);
    for (const auto& j : traj.jump_log)
        if (j.step + 1 < traj.size()) jumped[j.step + 1] = 1;
    for (int k = 0; k < traj.size(); ++k) {
        const Coeffs u = traj.state(k);
        std::vector<std::string> row{fmt(traj.times[k])};
        for (int j = 0; j < n; ++j) row.push_back(fmt(u[j]));
        row.push_back(fmt(h_norm(u)));
        row.push_back(fmt(v_norm(*traj.basis, u)));
        row.push_back(fmt(std::pow(trajectory_x_norm_pow(traj, u), 1.0 / traj.x_p)));
        row.push_back(jumped[k] ? "1" : "0");
        t.add(std::move(row));
    }
    return t;
}

Table ledger_table(const Trajectory& traj) {
    Table t{{"step", "t", "dH", "viscous", "convection", "f_pairing", "wiener_work", "jump_work",
             "quadratic_variation", "numerical_dissipation", "residual", "relative_residual"},
            {}};
    for (std::size_t k = 0; k < traj.ledger.size(); ++k) {
        const LedgerEntry& e = traj.ledger[k];
        t.add({fmt(int(k)), fmt(traj.times[k + 1]), fmt(e.dH), fmt(e.viscous), fmt(e.convection), fmt(e.f_pairing),
               fmt(e.wiener_work), fmt(e.jump_work), fmt(e.quadratic_variation), fmt(e.numerical_dissipation),
               fmt(e.residual), fmt(e.relative_residual())});
    }
    return t;
}

Result cmd_simulate(const RunConfig& rc, std::ostream& log, bool quiet) {
    Result res;
    Trajectory traj;
    try {
        traj = simulate(rc.solver);
    } catch (const SolverAbort& e) {
        traj = e.partial();
        res.status = exit_numerical;
        res.abort_message = e.what();
    }
    res.files.emplace_back("trajectory.csv", render_csv(trajectory_table(traj)));
    res.files.emplace_back("ledger.csv", render_csv(ledger_table(traj)));
    const EnergyReport er = energy_report(traj);
    Table s = summary_table();
    s.add({"sup_H2", fmt(er.sup_h2)});
    s.add({"int_V2", fmt(er.int_v2)});
    s.add({"int_Xp", fmt(er.int_xp)});
    s.add({"max_ledger_residual", fmt(er.max_ledger_residual)});
    s.add({"steps_completed", fmt(int(traj.ledger.size()))});
    s.add({"jumps_applied", fmt(int(traj.jump_log.size()))});
    res.files.emplace_back("energy.csv", render_csv(s));
    if (!quiet)
        log << "sup|u|^2 = " << fmt(er.sup_h2) << ", int ||u||^2 dt = " << fmt(er.int_v2)
            << ", max ledger residual = " << fmt(er.max_ledger_residual) << '\n';
    return res;
}

Result cmd_properties(const RunConfig& rc, std::ostream& log, bool quiet) {
    if (!rc.solver.op) throw ConfigInvalid("properties needs an operator");
    SuiteOptions o;
    o.op = *rc.solver.op;
    o.n = rc.solver.n;
    o.pairs = rc.study.pairs;
    o.samples = rc.study.samples;
    o.R_grid = rc.study.R_values;
    if (!rc.solver.noise.silent()) o.noise = rc.solver.noise;
    o.seed = rc.solver.seed;
    const PropertySuite suite = run_property_suite(o);
    Table t{{"property", "passed", "value", "threshold", "detail"}, {}};
    for (const auto& r : suite.rows) {
        t.add({r.name, fmt(r.passed), fmt(r.value), fmt(r.threshold), r.detail});
        if (!quiet) log << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << fmt(r.value) << '\n';
    }
    Table c{{"constant", "value"}, {}};
    for (const auto& [k, v] : suite.constants) c.add({k, fmt(v)});
    Result res;
    res.files.emplace_back("properties.csv", render_csv(t));
    res.files.emplace_back("constants.csv", render_csv(c));
    res.status = suite.all_passed() ? exit_ok : exit_property;
    return res;
}

Result cmd_converge(const RunConfig& rc, std::ostream& log, bool quiet) {
    const StudyAxis axis = parse_axis(rc.study.axis);
    const ConvergenceReport r = convergence_study(rc.solver, axis, rc.study.values);
    Table t{{"index", "value_from", "value_to", "l2_distance", "terminal_distance"}, {}};
    for (std::size_t i = 0; i < r.l2_distances.size(); ++i) {
        t.add({fmt(int(i)), fmt(r.values[i]), fmt(r.values[i + 1]), fmt(r.l2_distances[i]),
               fmt(r.terminal_distances[i])});
        if (!quiet)
            log << axis_name(axis) << " " << fmt(r.values[i]) << " -> " << fmt(r.values[i + 1])
                << ": L2 distance " << fmt(r.l2_distances[i]) << '\n';
    }
    Table s = summary_table();
    s.add({"axis", axis_name(axis)});
    s.add({"monotone_cauchy", fmt(r.monotone_cauchy)});
    s.add({"complete", fmt(r.complete)});
    Result res;
    res.files.emplace_back("convergence.csv", render_csv(t));
    res.files.emplace_back("convergence_summary.csv", render_csv(s));
    if (!r.complete) {
        res.status = exit_numerical;
        res.abort_message = r.failure;
    }
    return res;
}

Result cmd_uniqueness(const RunConfig& rc, std::ostream& log, bool quiet) {
    const UniquenessReport r =
        uniqueness_experiment(rc.solver, rc.study.delta0, rc.study.level_M, rc.study.gronwall_C);
    Table t{{"t", "distance"}, {}};
    const double dt = rc.solver.dt;
    for (std::size_t k = 0; k < r.distances.size(); ++k) t.add({fmt(double(k) * dt), fmt(r.distances[k])});
    Table s = summary_table();
    s.add({"delta0", fmt(rc.study.delta0)});
    s.add({"initial_distance", fmt(r.initial_distance)});
    s.add({"sup_distance", fmt(r.sup_distance)});
    s.add({"bit_identical", fmt(r.bit_identical)});
    s.add({"gronwall_integral", fmt(r.gronwall_integral)});
    s.add({"gronwall_weight", fmt(r.gronwall_weight)});
    s.add({"level_M", fmt(r.level_M)});
    s.add({"tau_M", r.tau_M ? fmt(*r.tau_M) : "none"});
    if (!quiet) log << "sup distance " << fmt(r.sup_distance) << ", bit identical " << fmt(r.bit_identical) << '\n';
    Result res;
    res.files.emplace_back("uniqueness.csv", render_csv(t));
    res.files.emplace_back("uniqueness_summary.csv", render_csv(s));
    if (rc.study.delta0 == 0.0 && !r.bit_identical) res.status = exit_property;
    return res;
}

Result cmd_moments(const RunConfig& rc, std::ostream& log, bool quiet) {
    const MomentReport r = moment_study(rc.solver, rc.study.paths);
    Table t{{"quantity", "mean", "std_error"}, {}};
    t.add({"sup_H2", fmt(r.sup_h2.mean), fmt(r.sup_h2.std_error)});
    t.add({"int_V2", fmt(r.int_v2.mean), fmt(r.int_v2.std_error)});
    t.add({"int_Xp", fmt(r.int_xp.mean), fmt(r.int_xp.std_error)});
    Table s = summary_table();
    s.add({"paths", fmt(r.paths)});
    s.add({"aborted", fmt(r.aborted)});
    if (!quiet)
        log << "E sup|u|^2 = " << fmt(r.sup_h2.mean) << " +- " << fmt(r.sup_h2.std_error) << " (" << r.aborted
            << " aborted)\n";
    Result res;
    res.files.emplace_back("moments.csv", render_csv(t));
    res.files.emplace_back("moments_summary.csv", render_csv(s));
    if (r.aborted == r.paths) res.status = exit_numerical, res.abort_message = "every path aborted";
    return res;
}

Result cmd_occupancy(const RunConfig& rc, std::ostream& log, bool quiet) {
    const OccupancyReport r = occupancy_study(rc.solver, rc.study.R_values);
    Table t{{"R", "occupancy", "occupancy_times_R_p", "max_pointwise"}, {}};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < r.R.size(); ++i) {
        t.add({fmt(r.R[i]), fmt(r.occupancy[i]), fmt(r.scaled[i]), fmt(r.max_gradient[i])});
        lo = std::min(lo, r.scaled[i]);
        hi = std::max(hi, r.scaled[i]);
        if (!quiet) log << "R = " << fmt(r.R[i]) << ": occupancy " << fmt(r.occupancy[i]) << '\n';
    }
    Table s = summary_table();
    s.add({"monotone_decreasing", fmt(r.monotone_decreasing)});
    s.add({"scaled_spread", fmt(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity())});
    Result res;
    res.files.emplace_back("occupancy.csv", render_csv(t));
    res.files.emplace_back("occupancy_summary.csv", render_csv(s));
    return res;
}

Result cmd_seminorm(const RunConfig& rc, std::ostream& log, bool quiet) {
    const double m = rc.study.m_or_default(effective_p(rc.solver));
    const double alpha = rc.study.alpha;
    const Trajectory traj = simulate(rc.solver);
    Table t{{"space", "alpha", "m", "seminorm"}, {}};
    for (auto [name, space] : {std::pair{"H", SeminormSpace::H}, std::pair{"dual", SeminormSpace::dual}}) {
        const double v = gagliardo_seminorm(traj, alpha, m, space);
        t.add({name, fmt(alpha), fmt(m), fmt(v)});
        if (!quiet) log << "seminorm (" << name << ") = " << fmt(v) << '\n';
    }
    const int members = rc.study.increment_paths;
    std::vector<Trajectory> ensemble(members);
    parallel_for(members, [&](int i) { ensemble[i] = simulate(ensemble_member(rc.solver, i)); });
    const IncrementReport inc = increment_statistics(ensemble, rc.study.lags, rc.study.lag_samples, rc.solver.seed);
    Table it{{"lag", "mean_increment", "std_error"}, {}};
    for (std::size_t i = 0; i < inc.lags.size(); ++i)
        it.add({fmt(inc.lags[i]), fmt(inc.increments[i].mean), fmt(inc.increments[i].std_error)});
    Table s = summary_table();
    s.add({"fitted_exponent", fmt(inc.fitted_exponent)});
    s.add({"ensemble", fmt(members)});
    if (!quiet) log << "fitted increment exponent = " << fmt(inc.fitted_exponent) << '\n';
    Result res;
    res.files.emplace_back("seminorm.csv", render_csv(t));
    res.files.emplace_back("increments.csv", render_csv(it));
    res.files.emplace_back("increments_summary.csv", render_csv(s));
    return res;
}

const std::map<std::string, std::function<Result(const RunConfig&, std::ostream&, bool)>>& dispatch() {
    static const std::map<std::string, std::function<Result(const RunConfig&, std::ostream&, bool)>> table{
        {"simulate", cmd_simulate}, {"properties", cmd_properties}, {"converge", cmd_converge},
        {"uniqueness", cmd_uniqueness}, {"moments", cmd_moments}, {"occupancy", cmd_occupancy},
        {"seminorm", cmd_seminorm}};
    return table;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

}  // namespace

std::string version_string() { return "levygal 1.0.0"; }

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"simulate", "properties", "converge", "uniqueness",
                                                "moments", "occupancy", "seminorm", "reproduce"};
    return names;
}

int run_from_text(const RunOptions& options, const std::string& config_text, std::ostream& log) {
    const auto it = dispatch().find(options.subcommand);
    if (it == dispatch().end()) {
        log << "error: unknown subcommand '" << options.subcommand << "'\n";
        return exit_usage;
    }
    RunConfig rc;
    try {
        rc = parse_config(config_text);
        if (options.seed) rc.solver.seed = *options.seed;
        if (options.paths) {
            if (*options.paths < 1) throw ConfigError(0, "--paths must be positive");
            rc.study.paths = *options.paths;
        }
        rc.warnings = rc.solver.validate();
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    }
    if (!options.quiet)
        for (const auto& w : rc.warnings) log << "warning: " << w << '\n';

    const auto start = std::chrono::steady_clock::now();
    Result res;
    try {
        res = it->second(rc, log, options.quiet);
    } catch (const SolverAbort& e) {
        res.status = exit_numerical;
        res.abort_message = e.what();
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!res.abort_message.empty()) log << "numerical abort: " << res.abort_message << '\n';

    std::filesystem::create_directories(options.out_dir);
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [name, content] : res.files) {
        write_file((std::filesystem::path(options.out_dir) / name).string(), content);
        outputs.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    nlohmann::json manifest{{"version", version_string()},
                            {"subcommand", options.subcommand},
                            {"seed", rc.solver.seed},
                            {"config", echo_config(rc)},
                            {"started_utc", utc_now()},
                            {"wall_clock_seconds", wall},
                            {"outputs", outputs},
                            {"exit_status", res.status},
                            {"warnings", rc.warnings}};
    if (!res.abort_message.empty()) manifest["abort"] = res.abort_message;
    write_file((std::filesystem::path(options.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return res.status;
}

int run(const RunOptions& options, std::ostream& log) {
    if (options.subcommand == "reproduce") {
        if (options.manifest_path.empty()) {
            log << "error: reproduce needs --manifest\n";
            return exit_usage;
        }
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(read_file(options.manifest_path));
        } catch (const std::exception& e) {
            log << "config error: cannot read manifest: " << e.what() << '\n';
            return exit_config;
        }
        RunOptions replay = options;
        replay.subcommand = manifest.at("subcommand").get<std::string>();
        replay.seed.reset();
        replay.paths.reset();
        run_from_text(replay, manifest.at("config").get<std::string>(), log);
        bool all = true;
        for (const auto& out : manifest.at("outputs")) {
            const std::string name = out.at("file").get<std::string>();
            std::string digest;
            try {
                digest = sha256_hex(read_file((std::filesystem::path(options.out_dir) / name).string()));
            } catch (const std::exception&) {
                digest = "missing";
            }
            const bool same = digest == out.at("sha256").get<std::string>();
            all = all && same;
            if (!options.quiet) log << (same ? "identical " : "DIFFERENT ") << name << '\n';
        }
        return all ? exit_ok : exit_property;
    }
    std::string text;
    try {
        text = read_file(options.config_path);
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    }
    return run_from_text(options, text, log);
}

}  // namespace levygal
