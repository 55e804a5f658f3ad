#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>

#include "anisokin/grid.hpp"

namespace anisokin {

/// Velocity/pressure pair with the momentum constants.
struct FlowState {
    VectorFieldMAC v;
    ScalarField p;
    double Re = 1.0;
    double alpha = 1.0;

    FlowState() = default;
    FlowState(const Grid& g, double Re_ = 1.0, double alpha_ = 1.0)
        : v(g), p(g), Re(Re_), alpha(alpha_) {}
};

/// Face-centered Coulomb body force -alpha (c+ - c-) grad(psi). Boundary
/// faces are left at zero (they are no-slip anyway).
VectorFieldMAC coulomb_force(const ScalarField& c_plus, const ScalarField& c_minus,
                             const ScalarField& psi, double alpha);

/// Prefactored solvers for the implicit viscous step and the pressure
/// projection; valid for one (grid, Re, dt) combination.
class NsCache {
  public:
    NsCache(const Grid& g, double Re, double dt);

    const Grid& grid() const { return grid_; }
    double Re() const { return Re_; }
    double dt() const { return dt_; }

    Eigen::VectorXd solve_helmholtz_u(const Eigen::VectorXd& rhs) const;
    Eigen::VectorXd solve_helmholtz_v(const Eigen::VectorXd& rhs) const;
    /// Pinned Neumann Poisson solve; result has cell 0 fixed to zero.
    Eigen::VectorXd solve_pressure(const Eigen::VectorXd& rhs_without_pin) const;

  private:
    Grid grid_;
    double Re_, dt_;
    Eigen::SparseMatrix<double> pressure_mat_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> helm_u_, helm_v_, pressure_;
};

/// Largest dt admitted by the explicit upwind advection.
double ns_max_dt(const VectorFieldMAC& v, double cfl);

/// Implicit-viscosity predictor: (I - dt/Re lap) v* = v + dt(-(v.grad)v + force/Re),
/// Dirichlet walls. The grouping matches
///   Re(dv/dt + (v.grad)v) - lap(v) - force = 0 with force = -alpha(c+-c-)grad(psi).
VectorFieldMAC ns_predict(const FlowState& state, const VectorFieldMAC& force, double dt,
                          const NsCache& cache, double cfl = 0.9);

/// Non-incremental Chorin projection: lap(p) = (Re/dt) div(v*) with homogeneous
/// Neumann data and zero-mean gauge; returns (v* - (dt/Re) grad p, p).
std::pair<VectorFieldMAC, ScalarField> pressure_project(const VectorFieldMAC& v_star, double dt,
                                                        double Re, const NsCache& cache);

/// Full step: Coulomb force, predictor, projection.
FlowState ns_step(const FlowState& state, const ScalarField& c_plus, const ScalarField& c_minus,
                  const ScalarField& psi, double dt, const NsCache& cache, double cfl = 0.9);

/// Positive-definite -lap on stacked interior MAC faces (u block then v
/// block), Dirichlet boundary faces and no-slip mirror ghosts at the walls.
Eigen::SparseMatrix<double> vector_laplacian_matrix(const Grid& g);

/// MAC divergence, cells x interior faces, same stacking as above.
Eigen::SparseMatrix<double> mac_divergence_matrix(const Grid& g);

/// Discrete kinetic energy (Re/2) int |v|^2 with per-face control volumes.
double kinetic_energy(const VectorFieldMAC& v, double Re = 1.0);

/// int |grad v|^2 with no-slip mirror ghosts at the walls.
double velocity_gradient_norm2(const VectorFieldMAC& v);

}  // namespace anisokin
