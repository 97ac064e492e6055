#include "lognls/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lognls/functionals.hpp"

namespace lognls {

namespace {

constexpr Complex kI(0.0, 1.0);

Complex ode_rhs_a(const Complex& a, double lambda, GaussianOdeForm form) {
    switch (form) {
        case GaussianOdeForm::Validated:
            return -kI * (2.0 * a * a + 2.0 * lambda * a.real());
        case GaussianOdeForm::Published:
            return -kI * (a * a + lambda * a.real());
    }
    return Complex(0.0, 0.0);
}

Complex ode_rhs_b(const Complex& a, const Complex& b, double lambda) {
    return -kI * (a * b + lambda * b * phi_log(b));
}

} // namespace

Field standing_gausson(const GridPtr& grid, double lambda, double omega, double t) {
    if (!(lambda < 0.0)) throw std::invalid_argument("standing_gausson: lambda must be negative");
    const double alpha = -lambda;
    const double b = std::exp(-(alpha + omega) / (2.0 * lambda));
    const double tail = b * std::exp(-0.5 * alpha * grid->a * grid->a);
    if (tail > 1e-14 * b)
        throw std::invalid_argument(
            "standing_gausson: Gaussian tail exceeds 1e-14 of the amplitude at the boundary; "
            "Neumann truncation error would dominate (widen the grid)");
    const Complex phase = std::polar(1.0, omega * t);
    return sample([&](double x) { return phase * b * std::exp(-0.5 * alpha * x * x); }, grid);
}

Field gaussian_ansatz_field(const GridPtr& grid, const GaussianOracleState& s) {
    return sample([&](double x) { return s.b * std::exp(-0.5 * s.a * x * x); }, grid);
}

std::vector<GaussianOracleState> gaussian_ode_integrate(const GaussianOracleState& s0, double T,
                                                        double dt, GaussianOdeForm form) {
    if (!(s0.a.real() > 0.0))
        throw std::invalid_argument("gaussian_ode_integrate: Re a must be positive");
    if (!(dt > 0.0) || dt > 1e-3 / std::max(1.0, std::abs(s0.a)))
        throw std::invalid_argument("gaussian_ode_integrate: dt must satisfy dt <= 1e-3 / max(1, |a0|)");

    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
    const double h = T / static_cast<double>(steps);
    const double lambda = s0.lambda;

    std::vector<GaussianOracleState> path;
    path.reserve(steps + 1);
    path.push_back(s0);

    Complex a = s0.a, b = s0.b;
    for (std::size_t n = 0; n < steps; ++n) {
        const Complex ka1 = ode_rhs_a(a, lambda, form);
        const Complex kb1 = ode_rhs_b(a, b, lambda);
        const Complex ka2 = ode_rhs_a(a + 0.5 * h * ka1, lambda, form);
        const Complex kb2 = ode_rhs_b(a + 0.5 * h * ka1, b + 0.5 * h * kb1, lambda);
        const Complex ka3 = ode_rhs_a(a + 0.5 * h * ka2, lambda, form);
        const Complex kb3 = ode_rhs_b(a + 0.5 * h * ka2, b + 0.5 * h * kb2, lambda);
        const Complex ka4 = ode_rhs_a(a + h * ka3, lambda, form);
        const Complex kb4 = ode_rhs_b(a + h * ka3, b + h * kb3, lambda);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        if (!(a.real() > 0.0))
            throw std::runtime_error("gaussian_ode_integrate: Re a reached 0 at t = " +
                                     std::to_string(static_cast<double>(n + 1) * h));
        GaussianOracleState s = s0;
        s.a = a;
        s.b = b;
        s.t = static_cast<double>(n + 1) * h;
        path.push_back(s);
    }
    return path;
}

namespace {

// Empirical sup-norm / H^1 ratio over a small deterministic probe family of
// Dirichlet fields (low sine modes plus localized bumps).
double embedding_ratio(const GridPtr& grid) {
    const double pi = std::acos(-1.0);
    double worst = 0.0;
    auto probe = [&](const Field& f) {
        worst = std::max(worst, max_abs(f) / h1_norm(f));
    };
    for (int k = 1; k <= 8; ++k) {
        probe(sample([&](double x) {
            return Complex(std::sin(pi * k * (x + grid->a) / (2.0 * grid->a)), 0.0);
        }, grid));
    }
    for (double x0 : {0.0, 0.35 * grid->a, -0.6 * grid->a}) {
        Field f = sample([&](double x) {
            return Complex(std::exp(-2.0 * (x - x0) * (x - x0)), 0.0);
        }, grid);
        f[0] = f[f.size() - 1] = Complex(0.0, 0.0);
        probe(f);
    }
    return worst;
}

} // namespace

PicardResult picard_duhamel_solve(const ToyOperator& op, const Field& v0_in,
                                  const PicardConfig& cfg) {
    if (cfg.n_time < 16) throw std::invalid_argument("picard: n_time must be >= 16");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("picard: T must be positive");
    if (v0_in.grid.get() != op.grid.get())
        throw std::invalid_argument("picard: v0 grid does not match operator grid");
    const std::size_t n = v0_in.size();
    if (std::abs(v0_in[0]) > 1e-8 || std::abs(v0_in[n - 1]) > 1e-8)
        throw std::invalid_argument("picard: v0 must vanish at the endpoints (within 1e-8)");

    Field v0 = v0_in;
    v0[0] = v0[n - 1] = Complex(0.0, 0.0);

    PicardResult res;
    {
        const Field va = v_average(v0);
        double mv = std::numeric_limits<double>::infinity();
        for (const Complex& z : va.values) mv = std::min(mv, std::abs(z));
        const double floor = 1e-12 * max_abs(v0);
        if (mv <= floor) throw VanishingAverageError(mv, floor);
        res.alpha = mv;
    }
    const int nt = cfg.n_time;
    const double ds = cfg.T / nt;
    const std::size_t m = op.interior_size();
    const CutoffOnGrid cut(op.grid);
    const ModeBasis basis(op.grid);

    // Phase tables e^{-i d ds (mu_k - kappa)} for node distances d.
    std::vector<Eigen::VectorXcd> phase(static_cast<std::size_t>(nt) + 1);
    for (int d = 0; d <= nt; ++d) {
        Eigen::VectorXcd p(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k)
            p[static_cast<Eigen::Index>(k)] =
                std::polar(1.0, -static_cast<double>(d) * ds *
                                    (op.eigenvalues[static_cast<Eigen::Index>(k)] - op.kappa));
        phase[static_cast<std::size_t>(d)] = std::move(p);
    }

    const Eigen::VectorXcd v0_hat = toy_project(op, v0);
    // Free term e^{-i t_i A} v0 - v0.
    std::vector<Field> free_term;
    free_term.reserve(static_cast<std::size_t>(nt) + 1);
    double free_h1_max = 0.0;
    for (int i = 0; i <= nt; ++i) {
        Eigen::VectorXcd c = phase[static_cast<std::size_t>(i)].cwiseProduct(v0_hat);
        Field f = toy_reconstruct(op, c);
        for (std::size_t j = 0; j < n; ++j) f[j] -= v0[j];
        free_h1_max = std::max(free_h1_max, h1_norm(f));
        free_term.push_back(std::move(f));
    }

    // Default ball: the alpha/2-motivated radius plus room for the free
    // term, which the first iterate already contains. The alpha/2 floor
    // itself is enforced directly on every iterate below.
    res.epsilon_ball = cfg.epsilon_ball > 0.0
                           ? cfg.epsilon_ball
                           : 0.5 * res.alpha / embedding_ratio(op.grid) + 2.0 * free_h1_max;

    std::vector<Field> w(static_cast<std::size_t>(nt) + 1, constant_field(op.grid, Complex(0.0, 0.0)));
    double prev_diff = -1.0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        // Mode coefficients of sum_j V_j[v0 + w(s_i)] at every node.
        std::vector<Eigen::VectorXcd> g_hat(static_cast<std::size_t>(nt) + 1);
        for (int i = 0; i <= nt; ++i) {
            Field v = v0;
            const Field& wi = w[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < n; ++j) v[j] += wi[j];
            const VjTerms vj = vj_terms(v, op.lambda, cut);
            Field sum = vj.v1;
            for (std::size_t j = 0; j < n; ++j)
                sum[j] += vj.v2[j] + vj.v3[j] + vj.v4[j];
            g_hat[static_cast<std::size_t>(i)] = toy_project(op, sum);
        }

        double diff = 0.0;
        double ball_worst = 0.0;
        double va_floor = std::numeric_limits<double>::infinity();
        std::vector<Field> w_next;
        w_next.reserve(static_cast<std::size_t>(nt) + 1);
        for (int i = 0; i <= nt; ++i) {
            Eigen::VectorXcd integral = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
            if (i > 0) {
                for (int j = 0; j <= i; ++j) {
                    const double theta = (j == 0 || j == i) ? 0.5 : 1.0;
                    integral += (theta * ds) *
                                phase[static_cast<std::size_t>(i - j)].cwiseProduct(
                                    g_hat[static_cast<std::size_t>(j)]);
                }
            }
            Field wi = free_term[static_cast<std::size_t>(i)];
            const Field corr = toy_reconstruct(op, integral);
            for (std::size_t jj = 0; jj < n; ++jj) wi[jj] -= kI * corr[jj];

            Field delta = wi;
            const Field& old = w[static_cast<std::size_t>(i)];
            for (std::size_t jj = 0; jj < n; ++jj) delta[jj] -= old[jj];
            diff = std::max(diff, l2h_norm(delta));
            ball_worst = std::max(ball_worst, h1_norm(wi));

            Field vi = v0;
            for (std::size_t jj = 0; jj < n; ++jj) vi[jj] += wi[jj];
            const Field va = v_average(vi);
            for (const Complex& z : va.values) va_floor = std::min(va_floor, std::abs(z));
            w_next.push_back(std::move(wi));
        }

        res.iterations = it + 1;
        res.step_norms.push_back(diff);
        if (prev_diff > 0.0) res.ratios.push_back(diff / prev_diff);
        prev_diff = diff;

        if (ball_worst > res.epsilon_ball || va_floor < 0.5 * res.alpha) {
            res.status = PicardStatus::LeftBall;
            break;
        }
        w = std::move(w_next);
        if (diff < cfg.contraction_tol) {
            res.status = PicardStatus::Converged;
            break;
        }
        if (it + 1 == cfg.max_iter) res.status = PicardStatus::MaxIterations;
    }

    for (int i = 0; i <= nt; ++i) {
        const double t = static_cast<double>(i) * ds;
        Field v = v0;
        const Field& wi = w[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < n; ++j) v[j] += wi[j];
        res.trajectory.times.push_back(t);
        res.trajectory.records.push_back(diagnostics(basis, v, t, op.lambda));
        res.trajectory.states.push_back(std::move(v));
    }
    return res;
}

double picard_duhamel_residual(const ToyOperator& op, const Field& v0_in,
                               const PicardResult& result, int refine) {
    if (refine < 1) throw std::invalid_argument("picard_duhamel_residual: refine must be >= 1");
    const std::vector<double>& times = result.trajectory.times;
    const std::vector<Field>& states = result.trajectory.states;
    const int nt = static_cast<int>(times.size()) - 1;
    const double ds = times[1] - times[0];
    const double dsf = ds / refine;
    const std::size_t m = op.interior_size();
    const std::size_t n = op.grid->n;
    const CutoffOnGrid cut(op.grid);

    Field v0 = v0_in;
    v0[0] = v0[n - 1] = Complex(0.0, 0.0);
    const Eigen::VectorXcd v0_hat = toy_project(op, v0);

    const int nf = nt * refine;
    std::vector<Eigen::VectorXcd> phase(static_cast<std::size_t>(nf) + 1);
    for (int d = 0; d <= nf; ++d) {
        Eigen::VectorXcd p(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k)
            p[static_cast<Eigen::Index>(k)] =
                std::polar(1.0, -static_cast<double>(d) * dsf *
                                    (op.eigenvalues[static_cast<Eigen::Index>(k)] - op.kappa));
        phase[static_cast<std::size_t>(d)] = std::move(p);
    }

    // Nonlinearity coefficients on the refined time grid, states linearly
    // interpolated between the recorded frames.
    std::vector<Eigen::VectorXcd> g_hat(static_cast<std::size_t>(nf) + 1);
    for (int q = 0; q <= nf; ++q) {
        const int i0 = std::min(q / refine, nt - 1);
        const double theta = (static_cast<double>(q) / refine) - i0;
        Field v = states[static_cast<std::size_t>(i0)];
        const Field& nxt = states[static_cast<std::size_t>(i0) + 1];
        for (std::size_t j = 0; j < n; ++j)
            v[j] = (1.0 - theta) * v[j] + theta * nxt[j];
        const VjTerms vj = vj_terms(v, op.lambda, cut);
        Field sum = vj.v1;
        for (std::size_t j = 0; j < n; ++j) sum[j] += vj.v2[j] + vj.v3[j] + vj.v4[j];
        g_hat[static_cast<std::size_t>(q)] = toy_project(op, sum);
    }

    double worst = 0.0;
    for (int i = 0; i <= nt; ++i) {
        const int qi = i * refine;
        Eigen::VectorXcd integral = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m));
        for (int q = 0; q <= qi && qi > 0; ++q) {
            const double theta = (q == 0 || q == qi) ? 0.5 : 1.0;
            integral += (theta * dsf) *
                        phase[static_cast<std::size_t>(qi - q)].cwiseProduct(
                            g_hat[static_cast<std::size_t>(q)]);
        }
        Eigen::VectorXcd lin = phase[static_cast<std::size_t>(qi)].cwiseProduct(v0_hat);
        Field rhs = toy_reconstruct(op, lin);
        const Field corr = toy_reconstruct(op, integral);
        for (std::size_t j = 0; j < n; ++j) rhs[j] -= kI * corr[j];

        Field delta = states[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < n; ++j) delta[j] -= rhs[j];
        worst = std::max(worst, l2h_norm(delta));
    }
    return worst;
}

} // namespace lognls
