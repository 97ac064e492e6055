// Linear toy-model operator A_kappa = -Lap + lambda log|chi|^2 + kappa with
// Dirichlet boundary conditions: dense assembly on the interior nodes, full
// eigendecomposition, the evolution group e^{-itA}, and empirical probes of
// the H^1/H^2 norm-equivalence structure.
#pragma once

#include <Eigen/Dense>

#include "lognls/grid.hpp"
#include "lognls/solver.hpp"

namespace lognls {

/// Nodal value taken by the potential log|chi|^2 at the single node x = 0
/// where chi vanishes: the midpoint value log|chi(h/2)|^2 (default), or the
/// neighbor value log|chi(h)|^2 for sensitivity checks.
enum class CenterPotential { Midpoint, Neighbor };

struct ToyOperator {
    GridPtr grid;  // Dirichlet
    double lambda = 0.0;
    double kappa = 0.0;
    CenterPotential center = CenterPotential::Midpoint;
    Eigen::MatrixXd matrix;        // A_kappa on the n-2 interior nodes
    Eigen::VectorXd eigenvalues;   // of A_kappa, ascending
    Eigen::MatrixXd eigenvectors;  // columns, orthonormal in plain l2

    std::size_t interior_size() const { return grid->n - 2; }
};

struct EquivalenceReport {
    double c1_hat = 0.0;  // extremal Rayleigh ratios <A_k v,v> / ||v||^2_H1
    double C1_hat = 0.0;
    double c2_hat = 0.0;  // fitted constants of the H^2 comparison
    double C2_hat = 0.0;
    int n_samples = 0;
};

/// Assembles and diagonalizes A_kappa. Requires a Dirichlet grid with
/// n <= 4097 nodes.
ToyOperator build_toy_operator(const GridPtr& grid, double lambda, double kappa,
                               CenterPotential center = CenterPotential::Midpoint);

/// Smallest kappa on a 1e-3 lattice making the discrete A_kappa positive
/// semidefinite (min eigenvalue >= -1e-10), found by bisection. lambda > 0.
double choose_kappa(const GridPtr& grid, double lambda,
                    CenterPotential center = CenterPotential::Midpoint);

/// e^{-itA} v via the eigen-expansion, with the kappa shift removed (the
/// A-group, not the A_kappa-group; the two differ by the phase e^{-it kappa}).
Field toy_propagator(const ToyOperator& op, const Field& v, double t);
Field toy_propagator_kappa(const ToyOperator& op, const Field& v, double t);

/// Interior eigenbasis coordinates (and back). c_k = sqrt(h) q_k^T v.
Eigen::VectorXcd toy_project(const ToyOperator& op, const Field& v);
Field toy_reconstruct(const ToyOperator& op, const Eigen::VectorXcd& coeffs);

/// Extremal Rayleigh ratios of <A_kappa v, v> against the discrete H^1 Gram
/// operator B = I + (-Lap) (generalized eigenproblem), cross-checked on
/// n_samples random smooth Dirichlet fields, plus fitted constants for the
/// H^2 comparison ||Lap v|| - c2 ||v||_H1 <= ||A_kappa v|| <= C2 ||v||_H2.
EquivalenceReport equivalence_probe(const ToyOperator& op, int n_samples,
                                    std::uint64_t seed = 0x10915);

/// Exact-in-time evolution by toy_propagator at J+1 equispaced times with
/// diagnostics per frame.
Trajectory toy_evolve(const ToyOperator& op, const Field& v0, double T, std::size_t J);

/// H^1_h norm on the Dirichlet grid: sqrt(||v||^2 + <-Lap v, v>), plain sum.
double h1_norm(const Field& v);

} // namespace lognls
