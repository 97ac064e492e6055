#include "lognls/toymodel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "lognls/functionals.hpp"

namespace lognls {

namespace {

Eigen::VectorXd interior_part(const Field& v, bool imag) {
    const std::size_t m = v.grid->n - 2;
    Eigen::VectorXd out(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j)
        out[static_cast<Eigen::Index>(j)] = imag ? v[j + 1].imag() : v[j + 1].real();
    return out;
}

Field from_interior(const GridPtr& grid, const Eigen::VectorXd& re, const Eigen::VectorXd& im) {
    std::vector<Complex> vals(grid->n, Complex(0.0, 0.0));
    const std::size_t m = grid->n - 2;
    for (std::size_t j = 0; j < m; ++j)
        vals[j + 1] = Complex(re[static_cast<Eigen::Index>(j)], im[static_cast<Eigen::Index>(j)]);
    return Field(grid, std::move(vals));
}

double center_potential_value(const Grid& g, CenterPotential center) {
    const double x = center == CenterPotential::Midpoint ? 0.5 * g.h : g.h;
    const double c = chi_eval(x);
    return std::log(c * c);
}

} // namespace

ToyOperator build_toy_operator(const GridPtr& grid, double lambda, double kappa,
                               CenterPotential center) {
    if (!grid) throw std::invalid_argument("build_toy_operator: null grid");
    if (grid->bc != BoundaryCondition::Dirichlet)
        throw std::invalid_argument("build_toy_operator: grid must be Dirichlet");
    if (grid->n > 4097) throw std::invalid_argument("build_toy_operator: grid.n > 4097");

    ToyOperator op;
    op.grid = grid;
    op.lambda = lambda;
    op.kappa = kappa;
    op.center = center;

    const std::size_t m = grid->n - 2;
    const double ih2 = 1.0 / (grid->h * grid->h);
    op.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    const std::size_t c = grid->center_index();
    for (std::size_t j = 0; j < m; ++j) {
        const double x = grid->nodes[j + 1];
        const double cx = chi_eval(x);
        const double pot = (j + 1 == c) ? center_potential_value(*grid, center)
                                        : std::log(cx * cx);
        op.matrix(j, j) = 2.0 * ih2 + lambda * pot + kappa;
        if (j > 0) op.matrix(j, j - 1) = -ih2;
        if (j + 1 < m) op.matrix(j, j + 1) = -ih2;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("build_toy_operator: eigendecomposition failed");
    op.eigenvalues = es.eigenvalues();
    op.eigenvectors = es.eigenvectors();
    return op;
}

double choose_kappa(const GridPtr& grid, double lambda, CenterPotential center) {
    if (!(lambda > 0.0)) throw std::invalid_argument("choose_kappa: lambda must be positive");
    const double resolution = 1e-3;
    const double tol = 1e-10;

    const ToyOperator base = build_toy_operator(grid, lambda, 0.0, center);
    const double mu_min = base.eigenvalues[0];
    if (mu_min >= -tol) return 0.0;

    // A_kappa = A + kappa I shifts the spectrum exactly; bisect on the
    // lattice anyway so the returned value certifies the stated check.
    auto acceptable = [&](long idx) {
        return mu_min + static_cast<double>(idx) * resolution >= -tol;
    };
    long lo = 0;
    long hi = static_cast<long>(std::ceil(-mu_min / resolution)) + 1;
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (acceptable(mid)) hi = mid;
        else lo = mid;
    }
    return static_cast<double>(hi) * resolution;
}

namespace {

Field propagate_impl(const ToyOperator& op, const Field& v, double t, double shift) {
    if (v.grid.get() != op.grid.get())
        throw std::invalid_argument("toy_propagator: field grid does not match operator grid");
    const Eigen::VectorXd re = interior_part(v, false);
    const Eigen::VectorXd im = interior_part(v, true);
    Eigen::VectorXd cr = op.eigenvectors.transpose() * re;
    Eigen::VectorXd ci = op.eigenvectors.transpose() * im;
    const Eigen::Index m = cr.size();
    Eigen::VectorXd or_(m), oi(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double mu = op.eigenvalues[k] - shift;
        const Complex z = std::polar(1.0, -t * mu) * Complex(cr[k], ci[k]);
        or_[k] = z.real();
        oi[k] = z.imag();
    }
    return from_interior(op.grid, Eigen::VectorXd(op.eigenvectors * or_),
                         Eigen::VectorXd(op.eigenvectors * oi));
}

} // namespace

Field toy_propagator(const ToyOperator& op, const Field& v, double t) {
    return propagate_impl(op, v, t, op.kappa);
}

Field toy_propagator_kappa(const ToyOperator& op, const Field& v, double t) {
    return propagate_impl(op, v, t, 0.0);
}

Eigen::VectorXcd toy_project(const ToyOperator& op, const Field& v) {
    if (v.grid.get() != op.grid.get())
        throw std::invalid_argument("toy_project: field grid does not match operator grid");
    const double sh = std::sqrt(op.grid->h);
    Eigen::VectorXd cr = op.eigenvectors.transpose() * interior_part(v, false);
    Eigen::VectorXd ci = op.eigenvectors.transpose() * interior_part(v, true);
    Eigen::VectorXcd out(cr.size());
    for (Eigen::Index k = 0; k < cr.size(); ++k) out[k] = sh * Complex(cr[k], ci[k]);
    return out;
}

Field toy_reconstruct(const ToyOperator& op, const Eigen::VectorXcd& coeffs) {
    if (coeffs.size() != static_cast<Eigen::Index>(op.interior_size()))
        throw std::invalid_argument("toy_reconstruct: coefficient count mismatch");
    const double ish = 1.0 / std::sqrt(op.grid->h);
    Eigen::VectorXd cr(coeffs.size()), ci(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        cr[k] = ish * coeffs[k].real();
        ci[k] = ish * coeffs[k].imag();
    }
    return from_interior(op.grid, Eigen::VectorXd(op.eigenvectors * cr),
                         Eigen::VectorXd(op.eigenvectors * ci));
}

double h1_norm(const Field& v) {
    const Field lap = apply_laplacian(v);
    const double l2 = l2h_norm(v, Weighting::PlainSum);
    const double dot1 = -inner_product(lap, v, Weighting::PlainSum).real();
    return std::sqrt(l2 * l2 + std::max(0.0, dot1));
}

EquivalenceReport equivalence_probe(const ToyOperator& op, int n_samples, std::uint64_t seed) {
    EquivalenceReport rep;
    rep.n_samples = n_samples;
    const std::size_t m = op.interior_size();
    const double ih2 = 1.0 / (op.grid->h * op.grid->h);

    // B = I + (-Lap) on the interior, the Gram operator of ||.||^2_{H1_h}.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        B(j, j) = 1.0 + 2.0 * ih2;
        if (j > 0) B(j, j - 1) = -ih2;
        if (j + 1 < m) B(j, j + 1) = -ih2;
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(op.matrix, B);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("equivalence_probe: generalized eigensolve failed");
    rep.c1_hat = ges.eigenvalues().minCoeff();
    rep.C1_hat = ges.eigenvalues().maxCoeff();

    // Random smooth Dirichlet samples for the H^2 comparison constants.
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n_modes = std::min<std::size_t>(24, m);
    double c2 = -std::numeric_limits<double>::infinity();
    double C2 = 0.0;
    const double pi = std::acos(-1.0);
    for (int s = 0; s < n_samples; ++s) {
        std::vector<Complex> vals(op.grid->n, Complex(0.0, 0.0));
        for (std::size_t k = 1; k <= n_modes; ++k) {
            const double decay = 1.0 / ((1.0 + static_cast<double>(k)) * (1.0 + static_cast<double>(k)) * (1.0 + static_cast<double>(k)));
            const Complex amp(gauss(rng) * decay, gauss(rng) * decay);
            for (std::size_t j = 0; j < op.grid->n; ++j) {
                const double phase = pi * static_cast<double>(k) *
                                     (op.grid->nodes[j] + op.grid->a) / (2.0 * op.grid->a);
                vals[j] += amp * std::sin(phase);
            }
        }
        vals[0] = vals[op.grid->n - 1] = Complex(0.0, 0.0);
        Field v(op.grid, std::move(vals));

        const Field lap = apply_laplacian(v);
        const double nlap = l2h_norm(lap);
        const double nh1 = h1_norm(v);
        const double nh2 = std::sqrt(nh1 * nh1 + nlap * nlap);

        // ||A_kappa v||_{L2_h} through the dense interior matrix.
        const Eigen::VectorXd ar = op.matrix * interior_part(v, false);
        const Eigen::VectorXd ai = op.matrix * interior_part(v, true);
        const double nav = std::sqrt(op.grid->h * (ar.squaredNorm() + ai.squaredNorm()));

        c2 = std::max(c2, (nlap - nav) / nh1);
        C2 = std::max(C2, nav / nh2);
    }
    rep.c2_hat = c2;
    rep.C2_hat = C2;
    return rep;
}

Trajectory toy_evolve(const ToyOperator& op, const Field& v0, double T, std::size_t J) {
    if (J < 1) throw std::invalid_argument("toy_evolve: J must be >= 1");
    const ModeBasis basis(op.grid);
    Trajectory traj;
    for (std::size_t j = 0; j <= J; ++j) {
        const double t = T * static_cast<double>(j) / static_cast<double>(J);
        Field v = toy_propagator(op, v0, t);
        traj.times.push_back(t);
        traj.records.push_back(diagnostics(basis, v, t, op.lambda));
        traj.states.push_back(std::move(v));
    }
    return traj;
}

} // namespace lognls
