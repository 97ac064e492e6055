// Discrete Laplacian for each boundary condition, its exact mode
// diagonalization, and the linear propagator e^{it Laplacian}.
//
// Closures:
//   Neumann   mirror ghost nodes u(-a-h) := u(-a+h); diagonal in the
//             cosine-I basis on all 2^K+1 nodes.
//   Dirichlet endpoints pinned to zero; diagonal in the sine-I basis on
//             the 2^K-1 interior nodes.
//   Periodic  endpoint nodes aliased; diagonal in the discrete Fourier
//             basis on the 2^K distinct nodes.
//
// The mirror Neumann closure is symmetric with respect to the
// trapezoid-weighted inner product (half weights at the endpoints), not the
// plain sum; both weightings are exposed and each call site picks the one
// its contract needs. Plain sum is the default convention for observables.
#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "lognls/grid.hpp"

namespace lognls {

enum class Weighting { PlainSum, Trapezoid };

enum class TransformKind { CosineI, SineI, DiscreteFourier };

/// <u, v>_h = h * sum_j u_j conj(v_j); Trapezoid halves the endpoint terms
/// (for Periodic grids that turns the aliased endpoint pair into one node).
Complex inner_product(const Field& u, const Field& v, Weighting w = Weighting::PlainSum);
double l2h_norm(const Field& u, Weighting w = Weighting::PlainSum);

/// Three-point stencil with the boundary closure of u.grid->bc.
Field apply_laplacian(const Field& u);

/// Second-order centered first derivative; one-sided second-order formulas
/// at the domain ends (Periodic wraps).
Field centered_derivative(const Field& u);

/// Exact diagonalization of the discrete Laplacian for one grid. Owns the
/// FFTW plans; decompose/reconstruct/propagate are safe to call from
/// multiple threads on distinct fields (per-call scratch buffers).
class ModeBasis {
public:
    explicit ModeBasis(GridPtr grid);
    ~ModeBasis();

    ModeBasis(const ModeBasis&) = delete;
    ModeBasis& operator=(const ModeBasis&) = delete;

    const GridPtr& grid() const { return grid_; }
    BoundaryCondition bc() const { return grid_->bc; }
    TransformKind kind() const { return kind_; }

    std::size_t mode_count() const { return eigenvalues_.size(); }
    /// Laplacian eigenvalue of mode k; all <= 0, and lambda_0 == 0 for
    /// Neumann and Periodic (constant mode).
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    /// Parseval weight of mode k: ||u||^2_{L2h,trap} = sum_k w_k |c_k|^2.
    const std::vector<double>& parseval_weights() const { return weights_; }

    /// Mode coefficients of u (basis functions have unit nodal amplitude).
    std::vector<Complex> decompose(const Field& u) const;
    Field reconstruct(const std::vector<Complex>& coeffs) const;

    /// e^{it Laplacian} u: multiplies mode k by e^{i t lambda_k}.
    Field propagate(const Field& u, double t) const;

    /// <(-Laplacian)^n u, u> in mode space: sum_k (-lambda_k)^n w_k |c_k|^2.
    /// Nonnegative by construction.
    double hdot_sq(const Field& u, int n) const;

    /// All of n = 0..5 from one decomposition.
    std::array<double, 6> hdot_sq_all(const Field& u) const;

private:
    void check_field(const Field& u) const;

    GridPtr grid_;
    TransformKind kind_;
    std::vector<double> eigenvalues_;
    std::vector<double> weights_;
    void* plan_r2r_ = nullptr;  // fftw_plan for CosineI / SineI
    void* plan_fwd_ = nullptr;  // fftw_plan for DiscreteFourier forward
    void* plan_bwd_ = nullptr;  // fftw_plan for DiscreteFourier backward
};

/// Convenience wrapper: builds a ModeBasis for u's grid and propagates.
Field linear_propagator(const Field& u, double t);

/// Dense symmetric matrix of the discrete Laplacian, the eigendecomposition
/// oracle for the fast-transform path. Sizes: Neumann n x n (expressed in
/// the sqrt-trapezoid-weight scaled basis, which makes the mirror closure
/// a genuinely symmetric matrix), Dirichlet (n-2) x (n-2) interior block,
/// Periodic (n-1) x (n-1) circulant. Guarded to grid.n <= 4097.
Eigen::MatrixXd dense_laplacian_matrix(const Grid& grid);

/// Applies the dense matrix to a Field (undoing the Neumann weight scaling),
/// so the result is comparable with apply_laplacian.
Field dense_laplacian_apply(const Eigen::MatrixXd& m, const Field& u);

} // namespace lognls
