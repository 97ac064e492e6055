// Symmetric 1D grid on (-a, a) with 2^K+1 equispaced nodes and a
// boundary-condition tag shared by every other module.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace lognls {

using Complex = std::complex<double>;

enum class BoundaryCondition { Neumann, Dirichlet, Periodic };

const char* to_string(BoundaryCondition bc);

/// Immutable spatial grid. Nodes x_j = -a + j*h, j = 0..2^K, so the center
/// node sits exactly at 0 and x_j + x_{n-1-j} == 0 in floating point.
/// Under Periodic the two endpoint nodes alias the same unknown; the node
/// array still carries both so all modules index uniformly.
struct Grid {
    double a = 0.0;             // half-width of the domain
    int K = 0;                  // refinement exponent, n = 2^K + 1
    std::size_t n = 0;          // node count
    double h = 0.0;             // spacing 2a / 2^K
    std::vector<double> nodes;  // x_0 .. x_{n-1}
    BoundaryCondition bc = BoundaryCondition::Neumann;

    std::size_t center_index() const { return (n - 1) / 2; }
};

using GridPtr = std::shared_ptr<const Grid>;

/// Complex state sampled on a grid; one value per node. Immutable by
/// convention: operations produce new Fields.
struct Field {
    GridPtr grid;
    std::vector<Complex> values;

    Field() = default;
    Field(GridPtr g, std::vector<Complex> v);

    std::size_t size() const { return values.size(); }
    Complex& operator[](std::size_t j) { return values[j]; }
    const Complex& operator[](std::size_t j) const { return values[j]; }
};

/// Builds the grid. K is capped to [3, 20] as a memory guard; a must be
/// positive (the reference experiments use a = 16, a power of two, which
/// makes h and all nodes exact dyadics).
GridPtr make_grid(double a, int K, BoundaryCondition bc);

/// Pointwise sampling u_j = f(x_j). Throws if f produces a non-finite value.
Field sample(const std::function<Complex(double)>& f, const GridPtr& grid);
Field sample_real(const std::function<double(double)>& f, const GridPtr& grid);

/// Constant field.
Field constant_field(const GridPtr& grid, Complex value);

/// max_j |u(x_j) + u(-x_j)|; zero iff the sampled values are exactly odd.
double odd_defect(const Field& u);

/// True if every value is finite (no NaN/Inf in either component).
bool all_finite(const Field& u);

double max_abs(const Field& u);

} // namespace lognls
