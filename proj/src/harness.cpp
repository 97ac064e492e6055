#include "lognls/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lognls/functionals.hpp"
#include "lognls/oracle.hpp"
#include "lognls/toymodel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace lognls {

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
    if (!std::isfinite(x)) throw ConfigError("key '" + key + "': non-finite value");
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long x = 0;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

BoundaryCondition parse_bc(const std::string& v) {
    if (v == "neumann") return BoundaryCondition::Neumann;
    if (v == "dirichlet") return BoundaryCondition::Dirichlet;
    if (v == "periodic") return BoundaryCondition::Periodic;
    throw ConfigError("key 'bc': expected neumann|dirichlet|periodic, got '" + v + "'");
}

void apply_key(Scenario& s, const std::string& key, const std::string& value) {
    if (key == "a") {
        s.a = parse_double(key, value);
        if (!(s.a > 0.0)) throw ConfigError("key 'a': must be positive");
    } else if (key == "K") {
        const long k = parse_long(key, value);
        if (k < 3 || k > 20) throw ConfigError("key 'K': must be in [3, 20]");
        s.K = static_cast<int>(k);
    } else if (key == "K_list") {
        std::vector<int> out;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const long k = parse_long(key, trim(item));
            if (k < 3 || k > 20) throw ConfigError("key 'K_list': entries must be in [3, 20]");
            out.push_back(static_cast<int>(k));
        }
        if (out.empty()) throw ConfigError("key 'K_list': empty list");
        s.K_list = std::move(out);
    } else if (key == "bc") {
        s.bc = parse_bc(value);
    } else if (key == "lambda") {
        s.lambda = parse_double(key, value);
        if (s.lambda == 0.0) throw ConfigError("key 'lambda': must be nonzero");
    } else if (key == "T") {
        s.T = parse_double(key, value);
        if (!(s.T > 0.0)) throw ConfigError("key 'T': must be positive");
    } else if (key == "J") {
        s.J = parse_long(key, value);
        if (s.J < 1) throw ConfigError("key 'J': must be >= 1");
    } else if (key == "initial") {
        if (value != "tanh" && value != "one_minus_cos" && value != "gausson" &&
            value.rfind("file:", 0) != 0)
            throw ConfigError("key 'initial': expected tanh|one_minus_cos|gausson|file:<path>");
        s.initial = value;
    } else if (key == "omega") {
        s.omega = parse_double(key, value);
    } else if (key == "record_every") {
        s.record_every = parse_long(key, value);
        if (s.record_every < 0) throw ConfigError("key 'record_every': must be >= 0");
    } else if (key == "out_dir") {
        s.out_dir = value;
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
    s.overrides[key] = value;
}

std::string k_list_string(const std::vector<int>& ks) {
    std::string out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(ks[i]);
    }
    return out;
}

std::map<std::string, std::string> canonical_params(const Scenario& s) {
    std::map<std::string, std::string> p;
    p["scenario"] = s.name;
    p["a"] = g17(s.a);
    p["K"] = std::to_string(s.K);
    if (!s.K_list.empty()) p["K_list"] = k_list_string(s.K_list);
    p["bc"] = to_string(s.bc);
    p["lambda"] = g17(s.lambda);
    p["T"] = g17(s.T);
    p["J"] = std::to_string(s.J);
    p["initial"] = s.initial;
    p["omega"] = g17(s.omega);
    p["record_every"] = std::to_string(s.record_every);
    p["out_dir"] = s.out_dir;
    for (const auto& [k, v] : s.overrides) p["override:" + k] = v;
    return p;
}

} // namespace

Scenario scenario_defaults(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "sweep_sobolev") {
        s.initial = "tanh";
        s.lambda = 1.0;
        s.T = 0.01;
        s.J = 1000;
        s.K_list = {7, 8, 9, 10, 11};
        s.K = 11;
    } else if (name == "tanh_evolution") {
        s.initial = "tanh";
        s.lambda = 1.0;
        s.K = 8;
        s.T = 1.0;
        s.J = 1000;
    } else if (name == "cos_probe") {
        s.initial = "one_minus_cos";
        s.lambda = 1.0;
        s.K = 11;
        s.T = 0.1;
        s.J = 1000;
    } else if (name == "gausson_validate") {
        s.initial = "gausson";
        s.lambda = -1.0;
        s.omega = -1.0;
        s.K = 10;
        s.T = 1.0;
        s.J = 1000;
    } else if (name == "strang_order") {
        s.initial = "gausson";
        s.lambda = -1.0;
        s.omega = -1.0;
        s.K = 10;
        s.T = 1.0;
        s.J = 1000;
    } else if (name == "toymodel_checks") {
        s.initial = "tanh";  // the evolved field is its derivative
        s.bc = BoundaryCondition::Dirichlet;
        s.lambda = 1.0;
        s.K = 8;
        s.T = 1.0;
        s.J = 50;
    } else if (name == "picard_crosscheck") {
        s.initial = "tanh";
        s.lambda = 1.0;
        s.K = 9;
        s.T = 0.01;
        s.J = 100;
    } else if (name == "logslope_probe") {
        s.initial = "tanh";
        s.lambda = 1.0;
        s.K = 11;
        s.T = 0.1;
        s.J = 1000;
        s.record_every = 5;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return s;
}

Scenario parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        for (const auto& [k, v] : pairs)
            if (k == key) throw ConfigError("duplicate key '" + key + "'");
        pairs.emplace_back(key, value);
    }

    std::string name;
    for (const auto& [k, v] : pairs)
        if (k == "scenario") name = v;
    if (name.empty()) throw ConfigError("missing required key 'scenario'");

    Scenario s = scenario_defaults(name);
    for (const auto& [k, v] : pairs) {
        if (k == "scenario") continue;
        apply_key(s, k, v);
    }
    return s;
}

Scenario parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

bool RunManifest::all_pass() const {
    if (!error.empty()) return false;
    for (const Assertion& a : assertions)
        if (!a.pass) return false;
    return true;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << kCsvSchemaComment << "\n";
    out << "t,mass,energy,h0,h1,h2,h3,h4,h5,hdot1,hdot2,hdot3,hdot4,hdot5,"
           "min_abs_u,min_abs_V,odd_defect\n";
    for (const DiagnosticsRecord& r : records) {
        out << g17(r.t) << ',' << g17(r.mass) << ',' << g17(r.energy);
        for (int n = 0; n <= 5; ++n) out << ',' << g17(r.hfull[static_cast<std::size_t>(n)]);
        for (int n = 1; n <= 5; ++n) out << ',' << g17(r.hdot[static_cast<std::size_t>(n)]);
        out << ',' << g17(r.min_abs_u) << ',' << g17(r.min_abs_V) << ',' << g17(r.odd_defect)
            << "\n";
    }
}

namespace {

void write_states_csv(const std::string& path, const std::vector<double>& times,
                      const std::vector<const Field*>& states) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << kCsvSchemaComment << "\n";
    out << "t,x,re,im\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Field& u = *states[i];
        for (std::size_t j = 0; j < u.size(); ++j)
            out << g17(times[i]) << ',' << g17(u.grid->nodes[j]) << ',' << g17(u[j].real()) << ','
                << g17(u[j].imag()) << "\n";
    }
}

Field load_initial_file(const std::string& path, const GridPtr& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("initial file '" + path + "' cannot be opened");
    std::vector<double> xs;
    std::vector<Complex> vs;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::stringstream ss(line);
        double x, re, im = 0.0;
        if (!(ss >> x >> re)) throw ConfigError("initial file '" + path + "': bad line '" + line + "'");
        ss >> im;
        if (!xs.empty() && x <= xs.back())
            throw ConfigError("initial file '" + path + "': x values must be strictly increasing");
        xs.push_back(x);
        vs.push_back(Complex(re, im));
    }
    if (xs.size() < 2) throw ConfigError("initial file '" + path + "': need at least two samples");

    return sample([&](double x) {
        if (x <= xs.front()) return vs.front();
        if (x >= xs.back()) return vs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return (1.0 - t) * vs[i - 1] + t * vs[i];
    }, grid);
}

} // namespace

Field initial_field(const Scenario& s, const GridPtr& grid) {
    if (s.initial == "tanh")
        return sample([](double x) { return Complex(std::tanh(x), 0.0); }, grid);
    if (s.initial == "one_minus_cos") {
        const double pi = std::acos(-1.0);
        const double a = grid->a;
        return sample([pi, a](double x) { return Complex(1.0 - std::cos(pi * x / a), 0.0); }, grid);
    }
    if (s.initial == "gausson") return standing_gausson(grid, s.lambda, s.omega, 0.0);
    if (s.initial.rfind("file:", 0) == 0) return load_initial_file(s.initial.substr(5), grid);
    throw ConfigError("unknown initial '" + s.initial + "'");
}

namespace {

using Snapshot = std::pair<std::vector<double>, std::vector<const Field*>>;

// Frames of the trajectory nearest to the requested times.
Snapshot pick_snapshots(const Trajectory& traj, const std::vector<double>& wanted) {
    Snapshot snap;
    for (double t : wanted) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < traj.times.size(); ++i)
            if (std::abs(traj.times[i] - t) < std::abs(traj.times[best] - t)) best = i;
        snap.first.push_back(traj.times[best]);
        snap.second.push_back(&traj.states[best]);
    }
    return snap;
}

double max_abs_over_frames(const Trajectory& traj) {
    double m = 0.0;
    for (const Field& u : traj.states) m = std::max(m, max_abs(u));
    return m;
}

void scenario_sweep_sobolev(const Scenario& s, RunManifest& man) {
    std::vector<int> ks = s.K_list.empty() ? std::vector<int>{s.K} : s.K_list;
    std::sort(ks.begin(), ks.end());

    // final-time H^N_h norms indexed [K][N]
    std::vector<std::array<double, 6>> finals;
    for (int K : ks) {
        const GridPtr grid = make_grid(s.a, K, s.bc);
        const Field u0 = initial_field(s, grid);
        SplitConfig cfg;
        cfg.lambda = s.lambda;
        cfg.T = s.T;
        cfg.J = static_cast<std::size_t>(s.J);
        cfg.record_every = static_cast<std::size_t>(s.record_every);
        cfg.keep_states = false;
        const Trajectory traj = run(u0, cfg);
        if (traj.aborted) throw NumericalAbortError("sweep_sobolev: non-finite state at K=" + std::to_string(K));
        const std::string csv = s.out_dir + "/sweep_sobolev_K" + std::to_string(K) + ".csv";
        write_diagnostics_csv(csv, traj.records);
        man.outputs.push_back(csv);
        finals.push_back(traj.records.back().hfull);
    }

    if (ks.size() >= 3) {
        // Convergence gaps of the final-time norms under refinement.
        for (int N = 0; N <= 3; ++N) {
            std::vector<double> gaps;
            for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
                const double a0 = finals[i][static_cast<std::size_t>(N)];
                const double a1 = finals[i + 1][static_cast<std::size_t>(N)];
                gaps.push_back(std::abs(a1 - a0) / a1);
            }
            const double last = gaps.back();
            const double prev = gaps[gaps.size() - 2];
            Assertion as;
            as.name = "H" + std::to_string(N) + " Cauchy-like over K";
            as.pass = last <= 0.05 && last <= prev;
            as.detail = "last gap " + g6(last) + ", previous " + g6(prev);
            man.assertions.push_back(as);
        }
        for (int N = 4; N <= 5; ++N) {
            bool increasing = true;
            for (std::size_t i = 0; i + 1 < finals.size(); ++i)
                increasing = increasing && finals[i + 1][static_cast<std::size_t>(N)] >
                                               finals[i][static_cast<std::size_t>(N)];
            Assertion as;
            as.name = "H" + std::to_string(N) + " strictly increasing over K";
            as.pass = increasing;
            as.detail = "final-time values:";
            for (std::size_t i = 0; i < finals.size(); ++i)
                as.detail += " K" + std::to_string(ks[i]) + "=" + g6(finals[i][static_cast<std::size_t>(N)]);
            man.assertions.push_back(as);
        }
        if (ks.front() == 7 && ks.back() == 11) {
            const double ratio = finals.back()[5] / finals.front()[5];
            Assertion as;
            as.name = "H5 growth ratio K=11 vs K=7 >= 10";
            as.pass = ratio >= 10.0;
            as.detail = "ratio " + g6(ratio);
            man.assertions.push_back(as);
        }
    }
}

void scenario_tanh_evolution(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, s.bc);
    const Field u0 = initial_field(s, grid);
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(s.J);
    cfg.record_every = static_cast<std::size_t>(s.record_every);
    const Trajectory traj = run(u0, cfg);
    if (traj.aborted) throw NumericalAbortError("tanh_evolution: non-finite state");

    const std::string csv = s.out_dir + "/tanh_evolution.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);
    const Snapshot snap = pick_snapshots(traj, {0.0, 0.5 * s.T, s.T});
    const std::string scsv = s.out_dir + "/tanh_evolution_states.csv";
    write_states_csv(scsv, snap.first, snap.second);
    man.outputs.push_back(scsv);

    // The mirror-closure propagator is exactly unitary in the trapezoid
    // weighting; the plain-sum mass differs by the O(h) endpoint terms,
    // which breathe at ~1e-6 once radiation from the kink reaches the
    // boundary. The conservation assertion therefore measures the
    // trapezoid mass; the CSV keeps the plain-sum value.
    const double m0 = std::pow(l2h_norm(traj.states.front(), Weighting::Trapezoid), 2);
    double drift = 0.0;
    for (const Field& state : traj.states) {
        const double m = std::pow(l2h_norm(state, Weighting::Trapezoid), 2);
        drift = std::max(drift, std::abs(m - m0) / m0);
    }
    Assertion a1;
    a1.name = "mass relative drift <= 1e-10";
    a1.pass = drift <= 1e-10;
    a1.detail = "trapezoid-mass drift " + g6(drift);
    man.assertions.push_back(a1);

    double worst_odd = 0.0;
    for (const DiagnosticsRecord& r : traj.records) worst_odd = std::max(worst_odd, r.odd_defect);
    const double bound = 1e-9 * max_abs_over_frames(traj);
    Assertion a2;
    a2.name = "odd defect <= 1e-9 * max|u|";
    a2.pass = worst_odd <= bound;
    a2.detail = "defect " + g6(worst_odd) + " bound " + g6(bound);
    man.assertions.push_back(a2);
}

void scenario_cos_probe(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, s.bc);
    const Field u0 = initial_field(s, grid);
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(s.J);
    cfg.record_every = static_cast<std::size_t>(s.record_every);
    const Trajectory traj = run(u0, cfg);
    if (traj.aborted) throw NumericalAbortError("cos_probe: non-finite state");

    const std::string csv = s.out_dir + "/cos_probe.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);
    const Snapshot snap = pick_snapshots(traj, {0.0, 0.5 * s.T, s.T});
    const std::string scsv = s.out_dir + "/cos_probe_states.csv";
    write_states_csv(scsv, snap.first, snap.second);
    man.outputs.push_back(scsv);

    Assertion a1;
    a1.name = "min|u(0)| <= 1e-14";
    a1.pass = traj.records.front().min_abs_u <= 1e-14;
    a1.detail = "min|u(0)| = " + g6(traj.records.front().min_abs_u);
    man.assertions.push_back(a1);

    double worst = std::numeric_limits<double>::infinity();
    for (const DiagnosticsRecord& r : traj.records)
        if (r.t >= 0.01 && r.t <= 0.1) worst = std::min(worst, r.min_abs_u);
    Assertion a2;
    a2.name = "min|u(t)| >= 1e-4 on recorded t in [0.01, 0.1]";
    a2.pass = worst >= 1e-4;
    a2.detail = "min " + g6(worst);
    man.assertions.push_back(a2);
}

void scenario_gausson_validate(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, s.bc);
    const Field u0 = standing_gausson(grid, s.lambda, s.omega, 0.0);
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(s.J);
    cfg.record_every = static_cast<std::size_t>(s.record_every);
    const Trajectory traj = run(u0, cfg);
    if (traj.aborted) throw NumericalAbortError("gausson_validate: non-finite state");

    const std::string csv = s.out_dir + "/gausson_validate.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);

    double worst = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Field ref = standing_gausson(grid, s.lambda, s.omega, traj.times[i]);
        Field diff = traj.states[i];
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= ref[j];
        worst = std::max(worst, l2h_norm(diff));
    }
    Assertion a;
    a.name = "max-over-time L2_h error vs standing Gausson <= 5e-3";
    a.pass = worst <= 5e-3;
    a.detail = "max error " + g6(worst);
    man.assertions.push_back(a);
}

void scenario_strang_order(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, s.bc);
    const Field u0 = standing_gausson(grid, s.lambda, s.omega, 0.0);
    const std::array<double, 3> taus{4e-3, 2e-3, 1e-3};
    const OrderEstimate est = observed_order(u0, s.lambda, s.T, taus);

    // Diagnostics CSV from the finest-step run.
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(std::llround(s.T / taus[2]));
    cfg.keep_states = false;
    const Trajectory traj = run(u0, cfg);
    const std::string csv = s.out_dir + "/strang_order.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);

    Assertion a;
    a.name = "Richardson order p in [1.7, 2.3]";
    a.pass = !est.degenerate && est.p >= 1.7 && est.p <= 2.3;
    a.detail = "p " + g6(est.p) + " (ratios " + g6(est.ratios[0]) + ", " + g6(est.ratios[1]) +
               "; errors " + g6(est.errors[0]) + ", " + g6(est.errors[1]) + ", " + g6(est.errors[2]) +
               (est.degenerate ? "; degenerate)" : ")");
    man.assertions.push_back(a);
}

void scenario_toymodel_checks(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, BoundaryCondition::Dirichlet);
    const double kappa = s.lambda > 0.0 ? choose_kappa(grid, s.lambda) : 0.0;
    const ToyOperator op = build_toy_operator(grid, s.lambda, kappa);

    const double sym = (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff();
    const double scale = op.matrix.cwiseAbs().maxCoeff();
    man.assertions.push_back({"symmetry defect <= 1e-11 * max|M|", sym <= 1e-11 * scale,
                              "defect " + g6(sym) + " scale " + g6(scale)});

    const double mu_min = op.eigenvalues[0];
    man.assertions.push_back({"min eigenvalue >= -1e-10 with chosen kappa", mu_min >= -1e-10,
                              "kappa " + g6(kappa) + " min eigenvalue " + g6(mu_min)});

    // Smooth Dirichlet probe field: derivative of the tanh data.
    Field v0 = centered_derivative(sample([](double x) { return Complex(std::tanh(x), 0.0); }, grid));
    v0[0] = v0[v0.size() - 1] = Complex(0.0, 0.0);
    const double n0 = l2h_norm(v0);

    const Field once = toy_propagator(op, v0, 1.0);
    const double unit_drift = std::abs(l2h_norm(once) - n0) / n0;
    man.assertions.push_back({"propagator unitarity drift <= 1e-10", unit_drift <= 1e-10,
                              "relative drift " + g6(unit_drift) + " at t=1"});

    const Field ab = toy_propagator(op, toy_propagator(op, v0, 0.7), 0.3);
    const Field whole = toy_propagator(op, v0, 1.0);
    Field gdiff = ab;
    for (std::size_t j = 0; j < gdiff.size(); ++j) gdiff[j] -= whole[j];
    const double group_err = l2h_norm(gdiff) / n0;
    man.assertions.push_back({"group law e^{-isA}e^{-itA} = e^{-i(s+t)A} to 1e-10",
                              group_err <= 1e-10, "relative error " + g6(group_err)});

    const Field via_kappa = toy_propagator_kappa(op, v0, 0.8);
    Field via_shift = toy_propagator(op, v0, 0.8);
    const Complex phase = std::polar(1.0, -0.8 * op.kappa);
    for (std::size_t j = 0; j < via_shift.size(); ++j) via_shift[j] *= phase;
    Field kdiff = via_kappa;
    for (std::size_t j = 0; j < kdiff.size(); ++j) kdiff[j] -= via_shift[j];
    const double kappa_err = l2h_norm(kdiff) / n0;
    man.assertions.push_back({"e^{-itA_k} = e^{-it kappa} e^{-itA} to 1e-10", kappa_err <= 1e-10,
                              "relative error " + g6(kappa_err)});

    const EquivalenceReport rep = equivalence_probe(op, 24);
    man.assertions.push_back({"0 < c1_hat <= C1_hat", rep.c1_hat > 0.0 && rep.c1_hat <= rep.C1_hat,
                              "c1 " + g6(rep.c1_hat) + " C1 " + g6(rep.C1_hat) + " c2 " +
                                  g6(rep.c2_hat) + " C2 " + g6(rep.C2_hat)});

    const Trajectory traj = toy_evolve(op, v0, s.T, static_cast<std::size_t>(s.J));
    const std::string csv = s.out_dir + "/toymodel_checks.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);

    const double h1_0 = h1_norm(v0);
    double h1_worst = 0.0;
    for (const Field& v : traj.states) h1_worst = std::max(h1_worst, h1_norm(v));
    const double h1_bound = std::sqrt(rep.C1_hat / rep.c1_hat) * (1.0 + 1e-6) * h1_0;
    man.assertions.push_back({"H1 norm bounded by sqrt(C1/c1) ||v0||_H1 along trajectory",
                              h1_worst <= h1_bound,
                              "sup " + g6(h1_worst) + " bound " + g6(h1_bound)});
}

void scenario_picard_crosscheck(const Scenario& s, RunManifest& man) {
    const GridPtr dgrid = make_grid(s.a, s.K, BoundaryCondition::Dirichlet);
    const double kappa = s.lambda > 0.0 ? choose_kappa(dgrid, s.lambda) : 0.0;
    const ToyOperator op = build_toy_operator(dgrid, s.lambda, kappa);

    Field v0 = centered_derivative(initial_field(s, dgrid));
    v0[0] = v0[v0.size() - 1] = Complex(0.0, 0.0);

    PicardConfig pcfg;
    pcfg.T = s.T;
    pcfg.n_time = 64;
    const PicardResult res = picard_duhamel_solve(op, v0, pcfg);

    const std::string csv = s.out_dir + "/picard_crosscheck.csv";
    write_diagnostics_csv(csv, res.trajectory.records);
    man.outputs.push_back(csv);

    bool contracting = res.ratios.size() >= 1;
    for (double r : res.ratios) contracting = contracting && r < 1.0;
    std::string rdetail = "ratios";
    for (double r : res.ratios) rdetail += " " + g6(r);
    man.assertions.push_back({"successive-difference ratios < 1 from iteration 2", contracting, rdetail});
    man.assertions.push_back({"fixed point converged", res.status == PicardStatus::Converged,
                              "iterations " + std::to_string(res.iterations) + ", epsilon_ball " +
                                  g6(res.epsilon_ball) + ", alpha " + g6(res.alpha)});

    // Strang run on the matching Neumann grid; same a and K, same nodes.
    const GridPtr ngrid = make_grid(s.a, s.K, BoundaryCondition::Neumann);
    const Field u0 = initial_field(s, ngrid);
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(s.J);
    cfg.keep_states = false;
    const Trajectory traj = run(u0, cfg);
    if (traj.aborted) throw NumericalAbortError("picard_crosscheck: non-finite state");
    const Field du = centered_derivative(traj.final_state());

    const Field& v_end = res.trajectory.states.back();
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < v_end.size(); ++j) {
        num += std::norm(v_end[j] - du[j]);
        den += std::norm(du[j]);
    }
    const double rel = std::sqrt(num / den);
    man.assertions.push_back({"relative L2_h difference vs D_h(Strang u) <= 5e-2", rel <= 5e-2,
                              "relative difference " + g6(rel)});
}

void scenario_logslope_probe(const Scenario& s, RunManifest& man) {
    const GridPtr grid = make_grid(s.a, s.K, s.bc);
    const Field u0 = initial_field(s, grid);
    SplitConfig cfg;
    cfg.lambda = s.lambda;
    cfg.T = s.T;
    cfg.J = static_cast<std::size_t>(s.J);
    cfg.record_every = static_cast<std::size_t>(s.record_every);
    const Trajectory traj = run(u0, cfg);
    if (traj.aborted) throw NumericalAbortError("logslope_probe: non-finite state");

    const std::string csv = s.out_dir + "/logslope_probe.csv";
    write_diagnostics_csv(csv, traj.records);
    man.outputs.push_back(csv);

    // Narrow fit window hugging the cancellation point: the wider the
    // window, the more curvature of the smooth t=0 derivative leaks into
    // the log|x| coefficient and inflates the baseline (measured: with
    // (4h, a/64) the baseline is ~0.042 and the growth factor stalls
    // near 2.1; with (h/2, 6h) the baseline drops to ~0.0034).
    const std::pair<double, double> window{0.5 * grid->h, 6.0 * grid->h};
    const LogSlopeReport r0 = log_slope_probe(traj.times, traj.states, 0.0, window);
    const LogSlopeReport rh = log_slope_probe(traj.times, traj.states, 0.5 * s.T, window);
    const LogSlopeReport rT = log_slope_probe(traj.times, traj.states, s.T, window);

    const double s0 = std::abs(r0.slope), sh = std::abs(rh.slope), sT = std::abs(rT.slope);
    man.assertions.push_back({"|slope(T)| > |slope(T/2)|", sT > sh,
                              "slope(0) " + g6(s0) + ", slope(T/2) " + g6(sh) + ", slope(T) " + g6(sT)});
    man.assertions.push_back({"both probes exceed the t=0 baseline by >= 3x",
                              sh >= 3.0 * s0 && sT >= 3.0 * s0,
                              "baseline " + g6(s0)});

    const Field du0 = centered_derivative(traj.states.front());
    const Complex zeta0 = du0[grid->center_index()];
    const LogSlopeReport rz = log_slope_probe(traj.times, traj.states, 0.02, window);
    const Complex expected = rz.t * zeta0;
    const double reldev = std::abs(rz.zeta_integral - expected) / std::abs(expected);
    man.assertions.push_back({"zeta integral at t=0.02 within 20% of t*zeta(0)", reldev <= 0.2,
                              "deviation " + g6(reldev) + " (integral " + g6(std::abs(rz.zeta_integral)) +
                                  ", expected " + g6(std::abs(expected)) + ")"});
}

} // namespace

RunManifest run_scenario(const Scenario& s) {
    RunManifest man;
    man.scenario = s.name;
    man.params = canonical_params(s);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fs::create_directories(s.out_dir);
        if (s.name == "sweep_sobolev") scenario_sweep_sobolev(s, man);
        else if (s.name == "tanh_evolution") scenario_tanh_evolution(s, man);
        else if (s.name == "cos_probe") scenario_cos_probe(s, man);
        else if (s.name == "gausson_validate") scenario_gausson_validate(s, man);
        else if (s.name == "strang_order") scenario_strang_order(s, man);
        else if (s.name == "toymodel_checks") scenario_toymodel_checks(s, man);
        else if (s.name == "picard_crosscheck") scenario_picard_crosscheck(s, man);
        else if (s.name == "logslope_probe") scenario_logslope_probe(s, man);
        else throw ConfigError("unknown scenario '" + s.name + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const NumericalAbortError& e) {
        man.error = e.what();
        man.numerical_abort = true;
    } catch (const std::exception& e) {
        man.error = e.what();
    }
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(man, s.out_dir + "/" + s.name + "_manifest.json");
    return man;
}

std::vector<RunManifest> sweep(const Scenario& parent, const std::string& axis,
                               const std::vector<std::string>& values) {
    static const char* axes[] = {"a", "K", "K_list", "bc", "lambda", "T", "J",
                                 "initial", "omega", "record_every"};
    bool known = false;
    for (const char* ax : axes) known = known || axis == ax;
    if (!known) throw ConfigError("sweep: '" + axis + "' is not a declared parameter");

    std::vector<std::future<RunManifest>> futures;
    futures.reserve(values.size());
    for (const std::string& value : values) {
        futures.push_back(std::async(std::launch::async, [parent, axis, value]() {
            RunManifest man;
            try {
                Scenario child = parent;
                apply_key(child, axis, value);
                child.out_dir = parent.out_dir + "/" + axis + "_" + value;
                return run_scenario(child);
            } catch (const std::exception& e) {
                man.scenario = parent.name;
                man.error = e.what();
                return man;
            }
        }));
    }
    std::vector<RunManifest> out;
    out.reserve(values.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    json j;
    j["scenario"] = m.scenario;
    j["version"] = m.version;
    j["params"] = m.params;
    j["wall_seconds"] = m.wall_seconds;
    j["outputs"] = m.outputs;
    j["assertions"] = json::array();
    for (const Assertion& a : m.assertions)
        j["assertions"].push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    j["error"] = m.error;
    j["numerical_abort"] = m.numerical_abort;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
    json j;
    in >> j;
    RunManifest m;
    m.scenario = j.at("scenario").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    for (const json& a : j.at("assertions"))
        m.assertions.push_back({a.at("name").get<std::string>(), a.at("pass").get<bool>(),
                                a.at("detail").get<std::string>()});
    m.error = j.at("error").get<std::string>();
    m.numerical_abort = j.at("numerical_abort").get<bool>();
    return m;
}

} // namespace lognls
