#include "lognls/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lognls {

const char* to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::Neumann: return "neumann";
        case BoundaryCondition::Dirichlet: return "dirichlet";
        case BoundaryCondition::Periodic: return "periodic";
    }
    return "?";
}

Field::Field(GridPtr g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("Field: null grid");
    if (values.size() != grid->n) throw std::invalid_argument("Field: value count != grid.n");
}

GridPtr make_grid(double a, int K, BoundaryCondition bc) {
    if (!(a > 0.0)) throw std::invalid_argument("make_grid: a must be positive");
    if (K < 3 || K > 20) throw std::invalid_argument("make_grid: K must be in [3, 20]");

    auto g = std::make_shared<Grid>();
    g->a = a;
    g->K = K;
    g->n = (std::size_t{1} << K) + 1;
    g->h = 2.0 * a / static_cast<double>(std::size_t{1} << K);
    g->bc = bc;
    g->nodes.resize(g->n);
    const std::size_t c = (g->n - 1) / 2;
    // Fill symmetrically from the center so x_j == -x_{n-1-j} exactly and
    // the center node is exactly 0 for any a.
    g->nodes[c] = 0.0;
    for (std::size_t m = 1; m <= c; ++m) {
        const double x = static_cast<double>(m) * g->h;
        g->nodes[c + m] = x;
        g->nodes[c - m] = -x;
    }
    return g;
}

Field sample(const std::function<Complex(double)>& f, const GridPtr& grid) {
    if (!grid) throw std::invalid_argument("sample: null grid");
    std::vector<Complex> v(grid->n);
    for (std::size_t j = 0; j < grid->n; ++j) {
        const Complex w = f(grid->nodes[j]);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw std::domain_error("sample: non-finite value at x = " + std::to_string(grid->nodes[j]));
        v[j] = w;
    }
    return Field(grid, std::move(v));
}

Field sample_real(const std::function<double(double)>& f, const GridPtr& grid) {
    return sample([&f](double x) { return Complex(f(x), 0.0); }, grid);
}

Field constant_field(const GridPtr& grid, Complex value) {
    if (!grid) throw std::invalid_argument("constant_field: null grid");
    return Field(grid, std::vector<Complex>(grid->n, value));
}

double odd_defect(const Field& u) {
    const std::size_t n = u.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        worst = std::max(worst, std::abs(u[j] + u[n - 1 - j]));
    return worst;
}

bool all_finite(const Field& u) {
    for (const Complex& w : u.values)
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    return true;
}

double max_abs(const Field& u) {
    double m = 0.0;
    for (const Complex& w : u.values) m = std::max(m, std::abs(w));
    return m;
}

} // namespace lognls
