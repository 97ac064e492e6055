#include <doctest.h>

#include <cmath>

#include "lognls/functionals.hpp"
#include "lognls/oracle.hpp"
#include "lognls/solver.hpp"

using namespace lognls;

namespace {

constexpr double kPi = 3.14159265358979323846;

double ls_slope(const std::vector<int>& ks, const std::vector<double>& errs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double x = ks[i], y = std::log2(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("standing gausson: closed form at t=0 and phase rotation") {
    const GridPtr g = make_grid(16.0, 8, BoundaryCondition::Neumann);
    const Field u0 = standing_gausson(g, -1.0, -1.0, 0.0);
    for (std::size_t j = 0; j < g->n; ++j) {
        const double x = g->nodes[j];
        CHECK(std::abs(u0[j] - Complex(std::exp(-0.5 * x * x), 0.0)) <= 1e-15);
    }
    const Field upi = standing_gausson(g, -1.0, -1.0, kPi);
    for (std::size_t j = 0; j < g->n; ++j)
        CHECK(std::abs(upi[j] + u0[j]) <= 1e-13);  // e^{-i pi} = -1

    CHECK_THROWS_AS(standing_gausson(g, 1.0, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(standing_gausson(g, 0.0, -1.0, 0.0), std::invalid_argument);
    // weak focusing: the Gaussian tail at +-16 is fat, Neumann truncation
    // would dominate
    CHECK_THROWS_AS(standing_gausson(g, -0.01, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("standing gausson satisfies the stationary equation") {
    // -omega phi + phi'' = lambda phi log phi^2 with phi = b e^{-alpha x^2/2}
    const double lambda = -1.0, omega = -1.0;
    const double alpha = -lambda;
    const double b = std::exp(-(alpha + omega) / (2.0 * lambda));
    for (double x : {0.0, 0.3, 1.0, 2.5, 5.0}) {
        const double phi = b * std::exp(-0.5 * alpha * x * x);
        const double phixx = (alpha * alpha * x * x - alpha) * phi;
        const double residual = -omega * phi + phixx - lambda * phi * std::log(phi * phi);
        CHECK(std::abs(residual) <= 1e-12);
    }
}

TEST_CASE("discrete PDE residual of the gausson is O(h^2)") {
    const std::vector<int> ks = {6, 7, 8, 9, 10};
    std::vector<double> errs;
    for (int K : ks) {
        const GridPtr g = make_grid(16.0, K, BoundaryCondition::Neumann);
        const Field u = standing_gausson(g, -1.0, -1.0, 0.0);
        // i d_t u = -omega u for the standing profile
        const Field lap = apply_laplacian(u);
        double worst = 0.0;
        for (std::size_t j = 0; j < g->n; ++j) {
            const Complex res = -(-1.0) * u[j] + lap[j] - (-1.0) * u[j] * phi_log(u[j]);
            worst = std::max(worst, std::abs(res));
        }
        errs.push_back(worst);
    }
    const double slope = -ls_slope(ks, errs);
    CHECK(slope >= 1.7);
    CHECK(slope <= 2.3);
}

TEST_CASE("gaussian ode: the standing branch is a fixed point of the width") {
    GaussianOracleState s0;
    s0.a = Complex(1.0, 0.0);
    s0.b = Complex(1.0, 0.0);
    s0.lambda = -1.0;
    const auto path = gaussian_ode_integrate(s0, 1.0, 1e-3);
    CHECK(path.size() == 1001);
    for (const auto& s : path) {
        CHECK(std::abs(s.a - Complex(1.0, 0.0)) <= 1e-8);
        CHECK(std::abs(std::abs(s.b) - 1.0) <= 1e-8);  // b rotates e^{-it}
    }
    // the phase of b follows omega = -1
    const auto& last = path.back();
    CHECK(std::abs(last.b - std::polar(1.0, -1.0)) <= 1e-6);
}

TEST_CASE("gaussian ode: ansatz mass is invariant (validated form)") {
    GaussianOracleState s0;
    s0.a = Complex(1.0, 0.0);
    s0.b = Complex(1.0, 0.0);
    s0.lambda = 1.0;
    const auto path = gaussian_ode_integrate(s0, 1.0, 1e-3);
    const double m0 = std::norm(path.front().b) * std::sqrt(kPi / path.front().a.real());
    for (const auto& s : path) {
        const double m = std::norm(s.b) * std::sqrt(kPi / s.a.real());
        CHECK(std::abs(m - m0) <= 1e-6 * m0);
    }
}

TEST_CASE("gaussian ode: classical fourth order in dt") {
    // strong coupling so the dt^4 term clears the roundoff floor (the
    // mandated dt <= 1e-3 already puts mild problems at ~1e-14 error)
    GaussianOracleState s0;
    s0.a = Complex(1.0, 0.5);
    s0.b = Complex(1.2, -0.3);
    s0.lambda = 8.0;
    const double T = 0.5;
    const Complex ref = gaussian_ode_integrate(s0, T, 1e-6).back().a;
    std::vector<double> errs;
    for (double dt : {8e-4, 4e-4}) {
        const Complex a = gaussian_ode_integrate(s0, T, dt).back().a;
        errs.push_back(std::abs(a - ref));
    }
    REQUIRE(errs[0] >= 1e-12);  // above the floor; the order is meaningful
    const double p = std::log2(errs[0] / errs[1]);
    CHECK(p >= 3.5);
    CHECK(p <= 4.5);
}

TEST_CASE("gaussian ode guards") {
    GaussianOracleState s0;
    s0.a = Complex(-1.0, 0.0);
    s0.b = Complex(1.0, 0.0);
    s0.lambda = 1.0;
    CHECK_THROWS_AS(gaussian_ode_integrate(s0, 1.0, 1e-4), std::invalid_argument);
    s0.a = Complex(1.0, 0.0);
    CHECK_THROWS_AS(gaussian_ode_integrate(s0, 1.0, 1e-2), std::invalid_argument);
}

TEST_CASE("ode form validation: the substituted form tracks the splitting solver") {
    // lambda = 1, a0 = b0 = 1: integrate both right-hand sides and compare
    // the reconstructed ansatz against the Strang run at T = 0.1.
    const GridPtr g = make_grid(16.0, 10, BoundaryCondition::Neumann);
    GaussianOracleState s0;
    s0.a = Complex(1.0, 0.0);
    s0.b = Complex(1.0, 0.0);
    s0.lambda = 1.0;
    const double T = 0.1;

    SplitConfig cfg;
    cfg.lambda = 1.0;
    cfg.T = T;
    cfg.J = 400;
    cfg.keep_states = false;
    const Trajectory traj = run(gaussian_ansatz_field(g, s0), cfg);
    REQUIRE(!traj.aborted);
    const Field& u_end = traj.final_state();

    auto ansatz_error = [&](GaussianOdeForm form) {
        const auto path = gaussian_ode_integrate(s0, T, 1e-4, form);
        const Field pred = gaussian_ansatz_field(g, path.back());
        Field d = pred;
        for (std::size_t j = 0; j < d.size(); ++j) d[j] -= u_end[j];
        return l2h_norm(d) / l2h_norm(u_end);
    };

    const double err_validated = ansatz_error(GaussianOdeForm::Validated);
    const double err_published = ansatz_error(GaussianOdeForm::Published);
    CHECK(err_validated <= 1e-3);
    CHECK(err_published >= 10.0 * err_validated);

    // mass conservation separates the forms as well
    const auto path_pub = gaussian_ode_integrate(s0, T, 1e-4, GaussianOdeForm::Published);
    const double m0 = std::norm(path_pub.front().b) * std::sqrt(kPi / path_pub.front().a.real());
    const double mT = std::norm(path_pub.back().b) * std::sqrt(kPi / path_pub.back().a.real());
    CHECK(std::abs(mT - m0) > 1e-4 * m0);
}

TEST_CASE("picard: guards") {
    const GridPtr g = make_grid(16.0, 6, BoundaryCondition::Dirichlet);
    const ToyOperator op = build_toy_operator(g, 1.0, choose_kappa(g, 1.0));
    PicardConfig cfg;
    cfg.T = 0.01;
    cfg.n_time = 8;  // below the minimum
    Field v0 = centered_derivative(sample_real([](double x) { return std::tanh(x); }, g));
    v0[0] = v0[v0.size() - 1] = Complex(0.0, 0.0);
    CHECK_THROWS_AS(picard_duhamel_solve(op, v0, cfg), std::invalid_argument);

    cfg.n_time = 32;
    Field bad = v0;
    bad[0] = Complex(0.5, 0.0);  // violates the Dirichlet-compatibility gate
    CHECK_THROWS_AS(picard_duhamel_solve(op, bad, cfg), std::invalid_argument);

    // odd v0: V[v0](0) = 0, the alpha condition fails
    Field odd = sample_real([](double x) { return std::sin(kPi * x / 16.0); }, g);
    CHECK_THROWS_AS(picard_duhamel_solve(op, odd, cfg), VanishingAverageError);
}

TEST_CASE("picard: T -> 0 keeps w at zero") {
    const GridPtr g = make_grid(16.0, 6, BoundaryCondition::Dirichlet);
    const ToyOperator op = build_toy_operator(g, 1.0, choose_kappa(g, 1.0));
    Field v0 = centered_derivative(sample_real([](double x) { return std::tanh(x); }, g));
    v0[0] = v0[v0.size() - 1] = Complex(0.0, 0.0);
    PicardConfig cfg;
    cfg.T = 1e-8;
    cfg.n_time = 16;
    const PicardResult res = picard_duhamel_solve(op, v0, cfg);
    CHECK(res.status == PicardStatus::Converged);
    // v stays within a whisker of v0 across the horizon
    for (const Field& v : res.trajectory.states) {
        Field d = v;
        for (std::size_t j = 0; j < d.size(); ++j) d[j] -= v0[j];
        CHECK(l2h_norm(d) <= 1e-6 * l2h_norm(v0));
    }
}

TEST_CASE("picard: contraction, Duhamel residual, ball guard") {
    const GridPtr g = make_grid(16.0, 7, BoundaryCondition::Dirichlet);
    const ToyOperator op = build_toy_operator(g, 1.0, choose_kappa(g, 1.0));
    Field v0 = centered_derivative(sample_real([](double x) { return std::tanh(x); }, g));
    v0[0] = v0[v0.size() - 1] = Complex(0.0, 0.0);

    PicardConfig cfg;
    cfg.T = 0.01;
    cfg.n_time = 64;
    const PicardResult res = picard_duhamel_solve(op, v0, cfg);
    CHECK(res.status == PicardStatus::Converged);
    CHECK(res.ratios.size() >= 1);
    for (double r : res.ratios) CHECK(r < 1.0);
    CHECK(res.alpha > 0.0);

    const double residual = picard_duhamel_residual(op, v0, res, 2);
    CHECK(residual <= 2.0 * cfg.contraction_tol);

    // a ball too small to hold the first iterate aborts
    PicardConfig tiny = cfg;
    tiny.epsilon_ball = 1e-12;
    const PicardResult aborted = picard_duhamel_solve(op, v0, tiny);
    CHECK(aborted.status == PicardStatus::LeftBall);
}
