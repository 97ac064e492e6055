#include <doctest.h>

#include <cmath>
#include <random>

#include "lognls/grid.hpp"
#include "lognls/spectral.hpp"

using namespace lognls;

namespace {

Field random_field(const GridPtr& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> v(g->n);
    for (auto& z : v) z = Complex(gauss(rng), gauss(rng));
    if (g->bc == BoundaryCondition::Dirichlet) v[0] = v[g->n - 1] = Complex(0.0, 0.0);
    if (g->bc == BoundaryCondition::Periodic) v[g->n - 1] = v[0];
    return Field(g, std::move(v));
}

double field_dist(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// The weighting in which each closure's propagator is exactly unitary.
Weighting natural_weighting(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? Weighting::PlainSum : Weighting::Trapezoid;
}

} // namespace

TEST_CASE("laplacian annihilates constants under Neumann") {
    const GridPtr g = make_grid(16.0, 5, BoundaryCondition::Neumann);
    const Field lap = apply_laplacian(constant_field(g, Complex(3.25, -1.0)));
    CHECK(max_abs(lap) == 0.0);
}

TEST_CASE("laplacian is exact on quadratics at interior nodes") {
    const GridPtr g = make_grid(16.0, 6, BoundaryCondition::Neumann);
    const Field u = sample_real([](double x) { return x * x; }, g);
    const Field lap = apply_laplacian(u);
    for (std::size_t j = 1; j + 1 < g->n; ++j)
        CHECK(lap[j].real() == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("cosine modes are eigenvectors, verified against the dense oracle") {
    const GridPtr g = make_grid(16.0, 5, BoundaryCondition::Neumann);
    const double pi = std::acos(-1.0);
    const double M = static_cast<double>(g->n - 1);
    const Eigen::MatrixXd dense = dense_laplacian_matrix(*g);

    for (int k : {0, 1, 3, 7, 31}) {
        const Field u = sample_real(
            [&](double x) { return std::cos(k * pi * (x + g->a) / (2.0 * g->a)); }, g);
        const double lam = -4.0 / (g->h * g->h) *
                           std::pow(std::sin(pi * k / (2.0 * M)), 2);
        const Field fast = apply_laplacian(u);
        const Field oracle = dense_laplacian_apply(dense, u);
        for (std::size_t j = 0; j < g->n; ++j) {
            CHECK(fast[j].real() == doctest::Approx(lam * u[j].real()).epsilon(1e-9));
            CHECK(oracle[j].real() == doctest::Approx(fast[j].real()).epsilon(1e-11));
        }
    }
}

TEST_CASE("mode round trip and Parseval for all boundary conditions") {
    for (BoundaryCondition bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet,
                                 BoundaryCondition::Periodic}) {
        const GridPtr g = make_grid(16.0, 6, bc);
        const ModeBasis basis(g);
        const Field u = random_field(g, 7u);

        const Field back = basis.reconstruct(basis.decompose(u));
        CHECK(field_dist(u, back) <= 1e-12 * max_abs(u));

        const auto c = basis.decompose(u);
        double parseval = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k)
            parseval += basis.parseval_weights()[k] * std::norm(c[k]);
        const double direct = l2h_norm(u, Weighting::Trapezoid);
        CHECK(std::sqrt(parseval) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("decompose of the constant field is the k=0 mode only") {
    const GridPtr g = make_grid(16.0, 5, BoundaryCondition::Neumann);
    const ModeBasis basis(g);
    const auto c = basis.decompose(constant_field(g, Complex(2.0, 0.5)));
    CHECK(std::abs(c[0] - Complex(2.0, 0.5)) <= 1e-13);
    for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) <= 1e-13);
}

TEST_CASE("decompose of an eigenmode hits a single coefficient (dense oracle check)") {
    const GridPtr g = make_grid(16.0, 4, BoundaryCondition::Dirichlet);
    const ModeBasis basis(g);
    const Eigen::MatrixXd dense = dense_laplacian_matrix(*g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    // dense eigenvalues ascend; basis eigenvalues descend in k. Match the
    // least-negative dense eigenvalue to mode k=0.
    const Eigen::Index m = dense.rows();
    for (int k : {0, 2, 5}) {
        Eigen::VectorXd q = es.eigenvectors().col(m - 1 - k);
        std::vector<Complex> vals(g->n, Complex(0.0, 0.0));
        for (Eigen::Index j = 0; j < m; ++j) vals[static_cast<std::size_t>(j) + 1] = q[j];
        const auto c = basis.decompose(Field(g, std::move(vals)));
        double off = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (i != static_cast<std::size_t>(k)) off = std::max(off, std::abs(c[i]));
        CHECK(std::abs(c[static_cast<std::size_t>(k)]) > 0.1);
        CHECK(off <= 1e-10 * std::abs(c[static_cast<std::size_t>(k)]));
        CHECK(es.eigenvalues()[m - 1 - k] ==
              doctest::Approx(basis.eigenvalues()[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
}

TEST_CASE("basis/grid mismatch is rejected") {
    const GridPtr g1 = make_grid(16.0, 5, BoundaryCondition::Neumann);
    const GridPtr g2 = make_grid(16.0, 5, BoundaryCondition::Neumann);
    const ModeBasis basis(g1);
    CHECK_THROWS_AS(basis.decompose(constant_field(g2, 1.0)), std::invalid_argument);
}

TEST_CASE("linear propagator: identity at t=0, constants fixed, unitary, group law") {
    for (BoundaryCondition bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet,
                                 BoundaryCondition::Periodic}) {
        const GridPtr g = make_grid(16.0, 6, bc);
        const ModeBasis basis(g);
        const Field u = random_field(g, 11u);
        const Weighting w = natural_weighting(bc);

        CHECK(field_dist(basis.propagate(u, 0.0), u) <= 1e-13 * max_abs(u));

        if (bc != BoundaryCondition::Dirichlet) {
            const Field cu = constant_field(g, Complex(0.7, 0.3));
            CHECK(field_dist(basis.propagate(cu, 1.7), cu) <= 1e-13);
        }

        const double n0 = l2h_norm(u, w);
        CHECK(l2h_norm(basis.propagate(u, 1.0), w) == doctest::Approx(n0).epsilon(1e-11));

        const Field ab = basis.propagate(basis.propagate(u, 0.4), 0.6);
        const Field once = basis.propagate(u, 1.0);
        double diff = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) diff = std::max(diff, std::abs(ab[j] - once[j]));
        CHECK(diff <= 1e-11 * std::max(1.0, max_abs(u)));
    }
}

TEST_CASE("fast propagator agrees with the dense eigendecomposition path") {
    for (BoundaryCondition bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet,
                                 BoundaryCondition::Periodic}) {
        const GridPtr g = make_grid(16.0, 6, bc);
        const ModeBasis basis(g);
        const Field u = random_field(g, 13u);
        const double t = 0.37;
        const Field fast = basis.propagate(u, t);

        // dense path: diagonalize, phase per eigenvalue, transform back
        const Eigen::MatrixXd dense = dense_laplacian_matrix(*g);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
        const Eigen::MatrixXd& Q = es.eigenvectors();
        const Eigen::Index m = dense.rows();

        // pack u into the dense basis (Neumann needs the sqrt-weight scaling)
        Eigen::VectorXcd x(m);
        const double s2 = std::sqrt(2.0);
        if (bc == BoundaryCondition::Neumann) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const double wgt = (j == 0 || j + 1 == m) ? 1.0 / s2 : 1.0;
                x[j] = wgt * u[static_cast<std::size_t>(j)];
            }
        } else if (bc == BoundaryCondition::Dirichlet) {
            for (Eigen::Index j = 0; j < m; ++j) x[j] = u[static_cast<std::size_t>(j) + 1];
        } else {
            for (Eigen::Index j = 0; j < m; ++j) x[j] = u[static_cast<std::size_t>(j)];
        }
        Eigen::VectorXcd coef = Q.transpose().cast<Complex>() * x;
        for (Eigen::Index k = 0; k < m; ++k) coef[k] *= std::polar(1.0, t * es.eigenvalues()[k]);
        Eigen::VectorXcd y = Q.cast<Complex>() * coef;

        double worst = 0.0;
        if (bc == BoundaryCondition::Neumann) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const double wgt = (j == 0 || j + 1 == m) ? s2 : 1.0;
                worst = std::max(worst, std::abs(wgt * y[j] - fast[static_cast<std::size_t>(j)]));
            }
        } else if (bc == BoundaryCondition::Dirichlet) {
            for (Eigen::Index j = 0; j < m; ++j)
                worst = std::max(worst, std::abs(y[j] - fast[static_cast<std::size_t>(j) + 1]));
        } else {
            for (Eigen::Index j = 0; j < m; ++j)
                worst = std::max(worst, std::abs(y[j] - fast[static_cast<std::size_t>(j)]));
        }
        CHECK(worst <= 1e-10 * std::max(1.0, max_abs(u)));
    }
}

TEST_CASE("self-adjointness and negative semi-definiteness") {
    for (BoundaryCondition bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet,
                                 BoundaryCondition::Periodic}) {
        const GridPtr g = make_grid(16.0, 6, bc);
        const Weighting w = natural_weighting(bc);
        const Field u = random_field(g, 17u);
        const Field v = random_field(g, 19u);
        const Complex luv = inner_product(apply_laplacian(u), v, w);
        const Complex ulv = inner_product(u, apply_laplacian(v), w);
        CHECK(std::abs(luv - ulv) <= 1e-12 * std::max(std::abs(luv), 1.0));

        const double quad = -inner_product(apply_laplacian(u), u, w).real();
        const double n0 = l2h_norm(u, w);
        CHECK(quad >= -1e-12 * n0 * n0);
    }
}

TEST_CASE("dense matrices: symmetry, kernels, closed-form Dirichlet spectrum") {
    const GridPtr gn = make_grid(16.0, 3, BoundaryCondition::Neumann);
    const Eigen::MatrixXd sn = dense_laplacian_matrix(*gn);
    CHECK((sn - sn.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * sn.cwiseAbs().maxCoeff());
    // constants are in the kernel of the closure (the dense path applies the
    // weight scaling internally)
    const Field lap1 = dense_laplacian_apply(sn, constant_field(gn, 1.0));
    CHECK(max_abs(lap1) <= 1e-13 / (gn->h * gn->h));

    const GridPtr gd = make_grid(16.0, 3, BoundaryCondition::Dirichlet);
    const Eigen::MatrixXd sd = dense_laplacian_matrix(*gd);
    CHECK((sd - sd.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sd);
    const double pi = std::acos(-1.0);
    const double M = static_cast<double>(gd->n - 1);
    std::vector<double> expected;
    for (std::size_t k = 1; k + 1 < gd->n; ++k)
        expected.push_back(-4.0 / (gd->h * gd->h) * std::pow(std::sin(pi * k / (2.0 * M)), 2));
    std::sort(expected.begin(), expected.end());
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        CHECK(es.eigenvalues()[i] ==
              doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));

    const GridPtr gp = make_grid(16.0, 3, BoundaryCondition::Periodic);
    const Eigen::MatrixXd sp = dense_laplacian_matrix(*gp);
    CHECK((sp - sp.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < sp.rows(); ++i) CHECK(sp.row(i).sum() == doctest::Approx(0.0));
}

TEST_CASE("dense matrix application equals the stencil") {
    for (BoundaryCondition bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet,
                                 BoundaryCondition::Periodic}) {
        const GridPtr g = make_grid(16.0, 5, bc);
        const Eigen::MatrixXd m = dense_laplacian_matrix(*g);
        const Field u = random_field(g, 23u);
        const Field a = apply_laplacian(u);
        const Field b = dense_laplacian_apply(m, u);
        double worst = 0.0;
        for (std::size_t j = 0; j < g->n; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
        CHECK(worst <= 1e-13 * max_abs(a));
    }
}

TEST_CASE("dense matrix size guard") {
    const GridPtr g = make_grid(16.0, 13, BoundaryCondition::Neumann);
    CHECK_THROWS_AS(dense_laplacian_matrix(*g), std::invalid_argument);
}
