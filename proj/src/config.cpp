#include "levygal/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "levygal/io.hpp"

namespace levygal {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
            const std::string key = trim(s.substr(0, eq));
            if (key.empty()) throw ConfigError(line, "empty key");
            if (auto it = entries_.find(key); it != entries_.end())
                throw ConfigError(line, "duplicate key '" + key + "' (first defined on line " +
                                            std::to_string(it->second.line) + ", again on line " +
                                            std::to_string(line) + ")");
            entries_[key] = {trim(s.substr(eq + 1)), line};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    const Entry* find(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    const Entry& require(const std::string& key) {
        const Entry* e = find(key);
        if (!e) throw ConfigError(0, "missing required key '" + key + "'");
        return *e;
    }

    std::string str(const std::string& key, const std::string& def) {
        const Entry* e = find(key);
        return e ? e->value : def;
    }

    double num(const std::string& key, double def) {
        const Entry* e = find(key);
        return e ? to_double(*e, key) : def;
    }

    long long integer(const std::string& key, long long def) {
        const Entry* e = find(key);
        return e ? to_int(*e, key) : def;
    }

    std::uint64_t u64(const Entry& e, const std::string& key) {
        if (e.value.empty() || e.value[0] == '-') throw ConfigError(e.line, "expected an unsigned integer for '" + key + "'");
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(e.value.c_str(), &end, 0);
        if (errno || *end) throw ConfigError(e.line, "expected an unsigned integer for '" + key + "'");
        return v;
    }

    bool boolean(const std::string& key, bool def) {
        const Entry* e = find(key);
        if (!e) return def;
        if (e->value == "true" || e->value == "1" || e->value == "yes" || e->value == "on") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no" || e->value == "off") return false;
        throw ConfigError(e->line, "expected a boolean for '" + key + "'");
    }

    std::vector<double> list(const std::string& key, std::vector<double> def) {
        const Entry* e = find(key);
        if (!e) return def;
        std::vector<double> out;
        for (const auto& tok : split(e->value)) out.push_back(parse_double(tok, e->line, key));
        return out;
    }

    std::vector<int> int_list(const std::string& key, std::vector<int> def) {
        const Entry* e = find(key);
        if (!e) return def;
        std::vector<int> out;
        for (const auto& tok : split(e->value)) out.push_back(int(parse_int(tok, e->line, key)));
        return out;
    }

    static double to_double(const Entry& e, const std::string& key) { return parse_double(e.value, e.line, key); }
    static long long to_int(const Entry& e, const std::string& key) { return parse_int(e.value, e.line, key); }

    /// Keys matching a pattern, for the indexed mark groups.
    std::vector<std::string> keys_matching(const std::regex& re) const {
        std::vector<std::string> out;
        for (const auto& [k, _] : entries_)
            if (std::regex_match(k, re)) out.push_back(k);
        return out;
    }

    void reject_unused() const {
        const Entry* first = nullptr;
        std::string name;
        for (const auto& [k, e] : entries_)
            if (!e.used && (!first || e.line < first->line)) first = &e, name = k;
        if (first) throw ConfigError(first->line, "unknown key '" + name + "'");
    }

private:
    static std::vector<std::string> split(const std::string& v) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : v) {
            if (c == ',' || c == ' ' || c == '\t') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    }

    static double parse_double(const std::string& s, int line, const std::string& key) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || errno || *end) throw ConfigError(line, "expected a number for '" + key + "', got '" + s + "'");
        return v;
    }

    static long long parse_int(const std::string& s, int line, const std::string& key) {
        errno = 0;
        char* end = nullptr;
        const long long v = std::strtoll(s.c_str(), &end, 10);
        if (s.empty() || errno || *end) throw ConfigError(line, "expected an integer for '" + key + "', got '" + s + "'");
        return v;
    }

    std::map<std::string, Entry> entries_;
};

std::vector<Mark> read_marks(Reader& r, const std::string& group) {
    const std::regex re("noise\\." + group + "\\.([0-9]+)\\.(xi|intensity|a|b)");
    std::set<int> ids;
    for (const auto& k : r.keys_matching(re)) {
        std::smatch m;
        std::regex_match(k, m, re);
        ids.insert(std::stoi(m[1]));
    }
    std::vector<Mark> out;
    for (int id : ids) {
        const std::string pre = "noise." + group + "." + std::to_string(id) + ".";
        if (!r.has(pre + "intensity")) {
            const int line = std::max({r.line(pre + "xi"), r.line(pre + "a"), r.line(pre + "b")});
            throw ConfigError(line, "mark group '" + pre + "' needs an intensity");
        }
        Mark m;
        m.xi = r.num(pre + "xi", 1.0);
        m.intensity = r.num(pre + "intensity", 0.0);
        if (!(m.intensity > 0.0)) throw ConfigError(r.line(pre + "intensity"), "mark intensities must be positive");
        const auto a = r.list(pre + "a", {});
        m.a = Eigen::Map<const Eigen::VectorXd>(a.data(), Eigen::Index(a.size()));
        m.b = r.num(pre + "b", 0.0);
        out.push_back(m);
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
}

std::string join(const Coeffs& c) { return join(std::vector<double>(c.data(), c.data() + c.size())); }

}  // namespace

double effective_p(const SolverConfig& c) {
    if (!c.op) return 4.0;
    if (c.op->name == "polynomial") return double(c.op->coefficients.size());
    return c.op->p;
}

void resolve_noise_spectrum(RunConfig& rc) {
    int len = rc.solver.n;
    if (rc.study.axis == "n")
        for (double v : rc.study.values) len = std::max(len, int(v));
    auto& noise = rc.solver.noise;
    noise.q = rc.q_explicit.empty() ? NoiseDescriptor::power_law_q(rc.q0, rc.q_decay, len) : rc.q_explicit;
    noise.sigma = rc.sigma.size() == 1 ? std::vector<double>(std::max<std::size_t>(len, noise.q.size()), rc.sigma[0])
                                       : rc.sigma;
}

RunConfig parse_config(const std::string& text) {
    Reader r(text);
    RunConfig rc;
    SolverConfig& c = rc.solver;

    const std::string op_name = r.require("operator").value;
    c.T = Reader::to_double(r.require("T"), "T");
    c.dt = Reader::to_double(r.require("dt"), "dt");
    const long long n = Reader::to_int(r.require("n"), "n");
    if (n < 1) throw ConfigError(r.line("n"), "n must be positive");
    c.n = int(n);
    c.seed = r.u64(r.require("seed"), "seed");
    if (!(c.T > 0.0)) throw ConfigError(r.line("T"), "T must be positive");
    if (!(c.dt > 0.0)) throw ConfigError(r.line("dt"), "dt must be positive");

    if (op_name != "none") {
        OperatorChoice choice;
        choice.name = op_name;
        const auto& names = catalog_names();
        if (std::find(names.begin(), names.end(), op_name) == names.end())
            throw ConfigError(r.line("operator"), "unknown operator '" + op_name + "'");
        choice.p = r.num("operator.p", 4.0);
        if (!(choice.p > 2.0)) throw ConfigError(r.line("operator.p"), "p must exceed 2");
        choice.coefficients = r.list("operator.coefficients", choice.coefficients);
        choice.fold_laplacian = r.boolean("operator.fold_laplacian", true);
        c.op = choice;
    } else {
        for (const char* k : {"operator.p", "operator.coefficients", "operator.fold_laplacian"})
            if (r.has(k)) throw ConfigError(r.line(k), std::string("'") + k + "' given without an operator");
    }

    const bool aniso = op_name == "anisotropic";
    c.domain.dim = int(r.integer("domain.dim", aniso ? 2 : 1));
    if (c.domain.dim != 1 && c.domain.dim != 2) throw ConfigError(r.line("domain.dim"), "domain.dim must be 1 or 2");
    const auto lengths = r.list("domain.lengths", std::vector<double>(c.domain.dim, 1.0));
    if (int(lengths.size()) != c.domain.dim)
        throw ConfigError(r.line("domain.lengths"), "domain.lengths needs one entry per axis");
    for (int i = 0; i < c.domain.dim; ++i) c.domain.lengths[i] = lengths[i];
    const std::string bc = r.str("domain.bc", aniso ? "dirichlet_x1_only" : "dirichlet");
    if (bc == "dirichlet")
        c.domain.boundary = Boundary::dirichlet;
    else if (bc == "dirichlet_x1_only")
        c.domain.boundary = Boundary::dirichlet_x1_only;
    else
        throw ConfigError(r.line("domain.bc"), "domain.bc must be dirichlet or dirichlet_x1_only");

    c.n_quad = int(r.integer("n_quad", 0));
    c.gamma = r.num("gamma", 1.0);
    if (const std::string tr = r.str("truncation.R", "none"); tr != "none") {
        TruncationParams t;
        t.R = r.num("truncation.R", 0.0);
        t.R0 = r.num("truncation.R0", 1.0);
        c.truncation = t;
    } else if (r.has("truncation.R0")) {
        r.find("truncation.R0");
    }
    c.cutoff.R_tilde = r.num("cutoff.R_tilde", 1.0);
    c.convection_enabled = r.boolean("convection", false);
    c.implicit_F = r.boolean("implicit_F", false);

    rc.q0 = r.num("noise.q0", 0.0);
    rc.q_decay = r.num("noise.s", 1.0);
    rc.q_explicit = r.list("noise.q", {});
    if (!rc.q_explicit.empty() && (r.has("noise.q0") || r.has("noise.s")))
        throw ConfigError(r.line("noise.q"), "noise.q conflicts with noise.q0 / noise.s");
    const std::string g = r.str("noise.G", "additive");
    if (g == "additive")
        c.noise.g_kind = GKind::additive;
    else if (g == "diagonal_linear")
        c.noise.g_kind = GKind::diagonal_linear;
    else
        throw ConfigError(r.line("noise.G"), "noise.G must be additive or diagonal_linear");
    rc.sigma = r.list("noise.sigma", {1.0});
    if (rc.sigma.empty()) throw ConfigError(r.line("noise.sigma"), "noise.sigma needs at least one value");
    c.noise.marks = read_marks(r, "mark");
    c.noise.large_jumps = read_marks(r, "large");

    const std::string kind = r.str("initial.kind", "zero");
    if (kind == "zero") {
        c.initial.kind = InitialCondition::Kind::zero;
    } else if (kind == "deterministic") {
        c.initial.kind = InitialCondition::Kind::deterministic;
    } else if (kind == "random") {
        c.initial.kind = InitialCondition::Kind::random;
    } else {
        throw ConfigError(r.line("initial.kind"), "initial.kind must be zero, deterministic or random");
    }
    const auto coeffs = r.list("initial.coeffs", {});
    c.initial.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), Eigen::Index(coeffs.size()));
    c.initial.decay_r = r.num("initial.r", 1.0);
    c.initial.amplitude = r.num("initial.amplitude", 1.0);
    if (const Entry* e = r.find("initial.seed"); e && e->value != "none") c.initial.seed = r.u64(*e, "initial.seed");

    StudyParams& s = rc.study;
    s.axis = r.str("study.axis", s.axis);
    if (s.axis != "n" && s.axis != "R" && s.axis != "R_tilde")
        throw ConfigError(r.line("study.axis"), "study.axis must be n, R or R_tilde");
    s.values = r.list("study.values", s.values);
    for (std::size_t i = 1; i < s.values.size(); ++i)
        if (s.values[i] < s.values[i - 1]) throw ConfigError(r.line("study.values"), "study.values must be non-decreasing");
    s.delta0 = r.num("study.delta0", s.delta0);
    s.level_M = r.num("study.level_M", s.level_M);
    s.gronwall_C = r.num("study.gronwall_C", s.gronwall_C);
    s.paths = int(r.integer("study.paths", s.paths));
    s.increment_paths = int(r.integer("study.increment_paths", s.increment_paths));
    s.pairs = int(r.integer("study.pairs", s.pairs));
    s.samples = int(r.integer("study.samples", s.samples));
    s.R_values = r.list("study.R_values", s.R_values);
    s.alpha = r.num("study.alpha", s.alpha);
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError(r.line("study.alpha"), "study.alpha must lie in (0, 1)");
    if (const Entry* e = r.find("study.m")) {
        s.m = Reader::to_double(*e, "study.m");
        if (!(*s.m > 1.0)) throw ConfigError(e->line, "study.m must exceed 1");
    }
    s.space = r.str("study.space", s.space);
    if (s.space != "H" && s.space != "dual") throw ConfigError(r.line("study.space"), "study.space must be H or dual");
    s.lags = r.int_list("study.lags", s.lags);
    s.lag_samples = int(r.integer("study.lag_samples", s.lag_samples));

    r.reject_unused();
    resolve_noise_spectrum(rc);
    try {
        rc.warnings = c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    return parse_config(text);
}

std::string echo_config(const RunConfig& rc) {
    const SolverConfig& c = rc.solver;
    std::ostringstream o;
    auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
    auto b = [](bool x) { return std::string(x ? "true" : "false"); };
    if (c.op) {
        kv("operator", c.op->name);
        kv("operator.p", format_double(c.op->p));
        kv("operator.coefficients", join(c.op->coefficients));
        kv("operator.fold_laplacian", b(c.op->fold_laplacian));
    } else {
        kv("operator", "none");
    }
    kv("T", format_double(c.T));
    kv("dt", format_double(c.dt));
    kv("n", std::to_string(c.n));
    kv("seed", std::to_string(c.seed));
    kv("n_quad", std::to_string(c.n_quad));
    kv("gamma", format_double(c.gamma));
    kv("domain.dim", std::to_string(c.domain.dim));
    kv("domain.lengths", join(std::vector<double>(c.domain.lengths.begin(), c.domain.lengths.begin() + c.domain.dim)));
    kv("domain.bc", c.domain.boundary == Boundary::dirichlet ? "dirichlet" : "dirichlet_x1_only");
    if (c.truncation) {
        kv("truncation.R", format_double(c.truncation->R));
        kv("truncation.R0", format_double(c.truncation->R0));
    } else {
        kv("truncation.R", "none");
    }
    kv("cutoff.R_tilde", format_double(c.cutoff.R_tilde));
    kv("convection", b(c.convection_enabled));
    kv("implicit_F", b(c.implicit_F));
    if (rc.q_explicit.empty()) {
        kv("noise.q0", format_double(rc.q0));
        kv("noise.s", format_double(rc.q_decay));
    } else {
        kv("noise.q", join(rc.q_explicit));
    }
    kv("noise.G", c.noise.g_kind == GKind::additive ? "additive" : "diagonal_linear");
    kv("noise.sigma", join(rc.sigma));
    auto marks = [&](const std::vector<Mark>& list, const std::string& group) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string pre = "noise." + group + "." + std::to_string(i) + ".";
            kv(pre + "xi", format_double(list[i].xi));
            kv(pre + "intensity", format_double(list[i].intensity));
            kv(pre + "a", join(list[i].a));
            kv(pre + "b", format_double(list[i].b));
        }
    };
    marks(c.noise.marks, "mark");
    marks(c.noise.large_jumps, "large");
    const char* kinds[] = {"zero", "deterministic", "random"};
    kv("initial.kind", kinds[int(c.initial.kind)]);
    kv("initial.coeffs", join(c.initial.coeffs));
    kv("initial.r", format_double(c.initial.decay_r));
    kv("initial.amplitude", format_double(c.initial.amplitude));
    kv("initial.seed", c.initial.seed ? std::to_string(*c.initial.seed) : "none");
    const StudyParams& s = rc.study;
    kv("study.axis", s.axis);
    kv("study.values", join(s.values));
    kv("study.delta0", format_double(s.delta0));
    kv("study.level_M", format_double(s.level_M));
    kv("study.gronwall_C", format_double(s.gronwall_C));
    kv("study.paths", std::to_string(s.paths));
    kv("study.increment_paths", std::to_string(s.increment_paths));
    kv("study.pairs", std::to_string(s.pairs));
    kv("study.samples", std::to_string(s.samples));
    kv("study.R_values", join(s.R_values));
    kv("study.alpha", format_double(s.alpha));
    kv("study.m", format_double(s.m_or_default(effective_p(c))));
    kv("study.space", s.space);
    kv("study.lags", join(s.lags));
    kv("study.lag_samples", std::to_string(s.lag_samples));
    return o.str();
}

}  // namespace levygal
