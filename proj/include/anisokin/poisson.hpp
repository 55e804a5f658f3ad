#pragma once

#include <Eigen/Sparse>

#include "anisokin/anisotropy.hpp"
#include "anisokin/grid.hpp"

namespace anisokin {

/// Robin data E(d) grad(psi) . n + tau psi = xi on the boundary.
struct RobinBC {
    double tau = 1.0;
    BoundaryTrace xi;

    RobinBC() = default;
    RobinBC(double tau_, BoundaryTrace xi_) : tau(tau_), xi(std::move(xi_)) {}
};

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Volume-integrated discrete operator psi -> -int_cell div(E(d) grad psi)
/// with homogeneous Robin closure. Symmetric positive definite for tau > 0.
///
/// Fluxes use the full tensor: normal entries face-averaged on the 5-point
/// part, the a12 cross term assembled from corner-averaged tangential
/// differences at interior nodes, which keeps the matrix symmetric. The
/// boundary flux eliminates the face value from the Robin relation with a
/// one-sided half-cell gradient, so for d tangential on the ring the normal
/// flux reduces to grad(psi).n.
class RobinOperator {
  public:
    RobinOperator(const Grid& grid, const TensorField& tensor, double tau);

    const Grid& grid() const { return grid_; }
    double tau() const { return tau_; }
    const SparseMat& matrix() const { return matrix_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

    /// Right-hand side for -div(E grad psi) = gamma * f with Robin data xi.
    Eigen::VectorXd rhs(const ScalarField& f, double gamma, const BoundaryTrace& xi) const;

    /// Quadrature of int |grad psi|^2_E consistent with the assembly
    /// (face terms plus corner cross terms, no boundary contribution).
    double dirichlet_energy(const ScalarField& psi) const;

    /// Boundary half-cell strips of the same quadrature: the normal gradient
    /// is one-sided against the eliminated Robin face value, weighted with a
    /// half cell, which completes the volume coverage of dirichlet_energy.
    double boundary_strip_energy(const ScalarField& psi, const BoundaryTrace& xi) const;

    /// Boundary face values of psi recovered from the Robin elimination.
    BoundaryTrace boundary_trace(const ScalarField& psi, const BoundaryTrace& xi) const;

    ScalarField wrap(const Eigen::VectorXd& x) const;
    Eigen::VectorXd flatten(const ScalarField& s) const;

  private:
    Grid grid_;
    double tau_;
    TensorField tensor_;
    SparseMat matrix_;
    BoundaryTrace robin_weight_;  // w = 2 a_nn / (h tau + 2 a_nn) per boundary face
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Unpreconditioned (optionally Jacobi-preconditioned) conjugate gradients.
/// Stops at ||Ax-b|| <= tol ||b||; throws ConvergenceError past maxit.
Eigen::VectorXd solve_spd(const SparseMat& A, const Eigen::VectorXd& b, double tol, int maxit,
                          bool jacobi = false, const Eigen::VectorXd* x0 = nullptr,
                          CgResult* stats = nullptr);

/// Solve -div(E grad psi) = gamma (c+ - c-) with Robin data.
ScalarField solve_potential(const RobinOperator& op, const ScalarField& charge_diff, double gamma,
                            const BoundaryTrace& xi, double tol, int maxit, bool jacobi = false,
                            const ScalarField* warm_start = nullptr, CgResult* stats = nullptr);

/// phi = S_kappa(f) = (I - kappa Lap_E)^{-1} f with homogeneous Robin data.
/// kappa = 0 returns f unchanged.
ScalarField robin_resolvent_skappa(const RobinOperator& op, const ScalarField& f, double kappa,
                                   double tol, int maxit, CgResult* stats = nullptr);

/// Same resolvent applied to the charge difference c+ - c-.
ScalarField robin_resolvent_skappa(const RobinOperator& op, const ScalarField& c_plus,
                                   const ScalarField& c_minus, double kappa, double tol,
                                   int maxit, CgResult* stats = nullptr);

/// Manufactured problem used by the convergence study: a smooth interior
/// director with nonzero a12, exact solution cos(pi x) cos(pi y) on the unit
/// square, closed-form forcing and matching Robin data.
namespace mms {
double solution(double x, double y);
double forcing(double x, double y, double eps);
DirectorField director(const Grid& g, double lambda, double eps);
BoundaryTrace xi(const Grid& g, double tau);
/// L2 error of the discrete solve against the exact solution on one grid.
double l2_error(int n, double lambda, double eps, double tau, double tol);
}  // namespace mms

}  // namespace anisokin
