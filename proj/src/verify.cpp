#include "lognls/verify.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "lognls/functionals.hpp"
#include "lognls/harness.hpp"
#include "lognls/oracle.hpp"
#include "lognls/solver.hpp"

namespace fs = std::filesystem;

namespace lognls::verify {

namespace {

std::string g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// Least-squares slope of log2(err) against K; the expected value for an
// O(h^2) quantity is -2 (h halves when K increments).
double refinement_slope(const std::vector<int>& ks, const std::vector<double>& errs) {
    const std::size_t n = ks.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(ks[i]);
        const double y = std::log2(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

bool scenario_assertions_pass(const RunManifest& m, std::string& detail) {
    if (!m.error.empty()) {
        detail = "run failed: " + m.error;
        return false;
    }
    bool ok = true;
    std::string bad;
    for (const Assertion& a : m.assertions) {
        if (!a.pass) {
            ok = false;
            bad += (bad.empty() ? "" : "; ") + a.name + " (" + a.detail + ")";
        }
    }
    detail = ok ? "all " + std::to_string(m.assertions.size()) + " assertions pass" : bad;
    return ok;
}

double gausson_max_error(double a, int K, double T, std::size_t J) {
    const GridPtr grid = make_grid(a, K, BoundaryCondition::Neumann);
    const Field u0 = standing_gausson(grid, -1.0, -1.0, 0.0);
    SplitConfig cfg;
    cfg.lambda = -1.0;
    cfg.T = T;
    cfg.J = J;
    const Trajectory traj = run(u0, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const Field ref = standing_gausson(grid, -1.0, -1.0, traj.times[i]);
        Field diff = traj.states[i];
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= ref[j];
        worst = std::max(worst, l2h_norm(diff));
    }
    return worst;
}

// Fixed smooth (generic, non-symmetric) test set for the V identities.
std::vector<std::function<double(double)>> smooth_test_set() {
    const double pi = std::acos(-1.0);
    return {
        [](double x) { return std::exp(-x * x / 8.0); },
        [pi](double x) { return std::cos(pi * x / 16.0) + 0.3 * std::sin(pi * x / 8.0); },
        [](double x) { return x * std::exp(-x * x / 16.0) + 0.5; },
        [pi](double x) { return 1.0 / (1.0 + x * x / 9.0) + 0.1 * std::cos(pi * x / 4.0); },
    };
}

bool csv_bytes_equal(const std::string& pa, const std::string& pb) {
    std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
    if (!fa || !fb) return false;
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

} // namespace

std::vector<CriterionResult> run_all(const std::string& out_dir) {
    std::vector<CriterionResult> results;
    const std::vector<std::string> names = {
        "sweep_sobolev", "tanh_evolution", "cos_probe",     "gausson_validate",
        "strang_order",  "toymodel_checks", "picard_crosscheck", "logslope_probe"};

    // First pass over the full catalog; criteria below read these manifests.
    std::map<std::string, RunManifest> pass1;
    std::map<std::string, double> pass1_time;
    for (const std::string& name : names) {
        Scenario s = scenario_defaults(name);
        s.out_dir = out_dir + "/pass1";
        const double t0 = now_seconds();
        pass1[name] = run_scenario(s);
        pass1_time[name] = now_seconds() - t0;
    }

    auto scenario_criterion = [&](int id, const std::string& title, const std::string& scenario) {
        CriterionResult r;
        r.id = id;
        r.name = title;
        r.seconds = pass1_time[scenario];
        r.pass = scenario_assertions_pass(pass1[scenario], r.detail);
        results.push_back(r);
    };

    // 1. Mass conservation along the tanh run.
    {
        CriterionResult r;
        r.id = 1;
        r.name = "mass conservation (tanh, K=8, T=1, J=1000, drift <= 1e-10)";
        r.seconds = pass1_time["tanh_evolution"];
        const RunManifest& m = pass1["tanh_evolution"];
        r.pass = false;
        for (const Assertion& a : m.assertions)
            if (a.name.rfind("mass", 0) == 0) {
                r.pass = a.pass;
                r.detail = a.detail;
            }
        if (!m.error.empty()) r.detail = "run failed: " + m.error;
        results.push_back(r);
    }

    // 2. Standing Gausson accuracy and improvement under joint refinement.
    {
        CriterionResult r;
        r.id = 2;
        r.name = "standing Gausson accuracy (<= 5e-3; >= 3x gain halving tau and h)";
        const double t0 = now_seconds();
        try {
            const double e1 = gausson_max_error(16.0, 10, 1.0, 1000);
            const double e2 = gausson_max_error(16.0, 11, 1.0, 2000);
            r.pass = e1 <= 5e-3 && e1 / e2 >= 3.0;
            r.detail = "error " + g6(e1) + " at K=10 tau=1e-3; " + g6(e2) +
                       " at K=11 tau=5e-4 (gain " + g6(e1 / e2) + ")";
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = now_seconds() - t0;
        results.push_back(r);
    }

    scenario_criterion(3, "Strang order p in [1.7, 2.3] (Gausson, K=10)", "strang_order");
    scenario_criterion(4, "Sobolev dichotomy (tanh, T=0.01, K=7..11)", "sweep_sobolev");
    scenario_criterion(5, "second-order cancellation departs instantly (cos probe)", "cos_probe");

    // 6. Averaging-operator identity suite.
    {
        CriterionResult r;
        r.id = 6;
        r.name = "V identity suite (constants, x dV = f - V[f], sup bound, contraction)";
        const double t0 = now_seconds();
        try {
            std::string detail;
            bool ok = true;

            const GridPtr g8 = make_grid(16.0, 8, BoundaryCondition::Neumann);
            for (const Complex c : {Complex(1.0, 0.0), Complex(-2.5, 0.0), Complex(0.375, 0.0),
                                    Complex(1.0 / 3.0, 0.0), Complex(0.7, -0.2)}) {
                const Field va = v_average(constant_field(g8, c));
                double worst = 0.0;
                for (const Complex& z : va.values) worst = std::max(worst, std::abs(z - c));
                if (worst != 0.0) {
                    ok = false;
                    detail += "V[const] not exact for c=" + g6(c.real()) + "; ";
                }
            }

            const auto tests = smooth_test_set();
            const std::vector<int> ks = {6, 7, 8, 9, 10};
            for (std::size_t fi = 0; fi < tests.size(); ++fi) {
                std::vector<double> errs;
                for (int K : ks) {
                    const GridPtr g = make_grid(16.0, K, BoundaryCondition::Neumann);
                    const Field f = sample_real(tests[fi], g);
                    const Field va = v_average(f);
                    const Field dva = centered_derivative(va);
                    double worst = 0.0;
                    for (std::size_t j = 0; j < g->n; ++j) {
                        const double x = g->nodes[j];
                        if (std::abs(x) < g->h) continue;
                        worst = std::max(worst, std::abs(x * dva[j] - (f[j] - va[j])));
                    }
                    errs.push_back(worst);
                }
                const double slope = -refinement_slope(ks, errs);
                if (!(slope >= 1.7 && slope <= 2.3)) {
                    ok = false;
                    detail += "identity slope " + g6(slope) + " for f" + std::to_string(fi) + "; ";
                } else {
                    detail += "f" + std::to_string(fi) + " slope " + g6(slope) + "; ";
                }
            }

            const GridPtr g9 = make_grid(16.0, 9, BoundaryCondition::Neumann);
            std::mt19937_64 rng(0x5eed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int rep = 0; rep < 8; ++rep) {
                std::vector<Complex> vals(g9->n);
                // random smooth field: a few low Fourier modes
                std::vector<Complex> amp(6);
                for (auto& z : amp) z = Complex(gauss(rng), gauss(rng));
                for (std::size_t j = 0; j < g9->n; ++j) {
                    const double x = g9->nodes[j];
                    Complex acc(0.0, 0.0);
                    for (std::size_t k = 0; k < amp.size(); ++k)
                        acc += amp[k] / (1.0 + static_cast<double>(k * k)) *
                               std::cos((static_cast<double>(k) * std::acos(-1.0) * (x + 16.0)) / 32.0);
                    vals[j] = acc;
                }
                const Field f(g9, std::move(vals));
                const Field va = v_average(f);
                if (max_abs(va) > max_abs(f)) {
                    ok = false;
                    detail += "sup bound violated on random field; ";
                }
            }

            const double bound_factor = std::sqrt(2.0) / 2.0 * 1.05;
            for (int K : {8, 9, 10}) {
                const GridPtr g = make_grid(16.0, K, BoundaryCondition::Neumann);
                for (const auto& fn : tests) {
                    const Field f = sample_real(fn, g);
                    const Field df = centered_derivative(f);
                    const Field dva = centered_derivative(v_average(f));
                    const double lhs = l2h_norm(dva);
                    const double rhs = bound_factor * l2h_norm(df);
                    if (lhs > rhs) {
                        ok = false;
                        detail += "derivative contraction violated at K=" + std::to_string(K) + "; ";
                    }
                }
            }

            r.pass = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = now_seconds() - t0;
        results.push_back(r);
    }

    scenario_criterion(7, "toy-model structural suite (K=8)", "toymodel_checks");

    // 8. Nonlinearity decomposition residual refinement. Fitted on the fixed
    // window |x| >= 2, which every K in 6..10 resolves identically (on the
    // h-proportional default window the max sits at the window edge where
    // the third derivative of u log|u|^2 scales like 1/h^2, cancelling the
    // h^2 gain).
    {
        CriterionResult r;
        r.id = 8;
        r.name = "nonlinearity decomposition residual O(h^2), slope 2 +/- 0.3";
        const double t0 = now_seconds();
        try {
            const std::vector<int> ks = {6, 7, 8, 9, 10};
            std::string detail;
            bool ok = true;
            const std::vector<std::pair<std::string, std::function<double(double)>>> cases = {
                {"x*exp(-x^2/4)", [](double x) { return x * std::exp(-x * x / 4.0); }},
                {"tanh", [](double x) { return std::tanh(x); }},
            };
            for (const auto& [label, fn] : cases) {
                std::vector<double> errs;
                for (int K : ks) {
                    const GridPtr g = make_grid(16.0, K, BoundaryCondition::Neumann);
                    errs.push_back(decomposition_residual(sample_real(fn, g), 1.0, 2.0));
                }
                const double slope = -refinement_slope(ks, errs);
                const bool good = slope >= 1.7 && slope <= 2.3;
                ok = ok && good;
                detail += label + " slope " + g6(slope) + " (residuals " + g6(errs.front()) +
                          " -> " + g6(errs.back()) + "); ";
            }
            r.pass = ok;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = now_seconds() - t0;
        results.push_back(r);
    }

    scenario_criterion(9, "Picard-Duhamel cross-validation (K=9, n_time=64)", "picard_crosscheck");
    scenario_criterion(10, "log-slope probe growth and zeta integral (K=11)", "logslope_probe");

    // 11. Determinism: rerun the full catalog and compare CSV bytes.
    {
        CriterionResult r;
        r.id = 11;
        r.name = "determinism: rerun yields byte-identical CSV outputs";
        const double t0 = now_seconds();
        try {
            bool ok = true;
            std::string detail;
            for (const std::string& name : names) {
                Scenario s = scenario_defaults(name);
                s.out_dir = out_dir + "/pass2";
                const RunManifest m2 = run_scenario(s);
                const RunManifest& m1 = pass1[name];
                if (m1.outputs.size() != m2.outputs.size()) {
                    ok = false;
                    detail += name + ": output count differs; ";
                    continue;
                }
                for (std::size_t i = 0; i < m1.outputs.size(); ++i) {
                    if (!csv_bytes_equal(m1.outputs[i], m2.outputs[i])) {
                        ok = false;
                        detail += name + ": " + fs::path(m2.outputs[i]).filename().string() +
                                  " differs; ";
                    }
                }
            }
            r.pass = ok;
            r.detail = ok ? "all scenario CSVs byte-identical across reruns" : detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = now_seconds() - t0;
        results.push_back(r);
    }

    return results;
}

int report(const std::vector<CriterionResult>& results) {
    bool all = true;
    for (const CriterionResult& r : results) {
        all = all && r.pass;
        std::printf("[%s] %2d. %-70s (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.seconds);
        if (!r.detail.empty()) std::printf("         %s\n", r.detail.c_str());
    }
    std::printf("%s: %zu criteria\n", all ? "ALL PASS" : "FAILURES PRESENT", results.size());
    return all ? 0 : 1;
}

} // namespace lognls::verify
