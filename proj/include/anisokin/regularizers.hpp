#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "anisokin/anisotropy.hpp"
#include "anisokin/grid.hpp"

namespace anisokin {

enum class OperatorKind { stokes, robin_laplacian };

/// Dense desk-scale operator with cached spectrum. For the Stokes kind the
/// matrix is P(-lap)P with P the discrete Leray projector; trial vectors are
/// drawn from the divergence-free subspace via `projector`.
struct DenseOperator {
    int n = 0;
    OperatorKind kind = OperatorKind::robin_laplacian;
    Eigen::MatrixXd matrix;
    Eigen::MatrixXd projector;  // orthogonal projector onto the admissible subspace
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// Discrete Stokes operator P(-lap)P on interior MAC faces. Caps the size at
/// 1024 velocity unknowns (dense eigendecomposition only).
DenseOperator build_dense_stokes(const Grid& g);

/// Dense anisotropic Robin Laplacian -lap_E (mass-scaled to the L2 sense).
DenseOperator build_dense_robin(const Grid& g, const TensorField& tensor, double tau);

/// A^{1/2} through the cached eigendecomposition. Eigenvalues below -1e-10
/// raise SpectralError; small negative noise is clamped to zero.
DenseOperator operator_sqrt(const DenseOperator& A);

/// y = (I + kappa A)^{-1} x (kappa = 0 is the identity).
Eigen::VectorXd resolvent_apply(const DenseOperator& A, const Eigen::VectorXd& x, double kappa);

/// Measurements backing the regularization-operator property suite.
struct ResolventReport {
    std::vector<double> kappas;                // descending
    std::vector<double> max_residual;          // max_x ||R_k x - x||
    std::vector<double> max_dual_pairing;      // max_phi |<phi, R_k x - x>| / ||phi||
    std::vector<double> max_norm_ratio;        // max_x ||R_k x|| / ||x||
    double graph_bound_constant = 0.0;         // fitted C in ||A R_k x|| <= C(1+1/k)||x||
    double smooth_log_slope = 0.0;             // d log(residual) / d log(kappa), smooth vector
    void write_csv(std::ostream& os) const;
};

/// Runs the property checks on `trials` random admissible vectors. Throws
/// InvariantError naming the violated item on any monotonicity or bound
/// failure; otherwise returns the measurements.
ResolventReport lemma31_suite(const DenseOperator& A, int trials,
                              const std::vector<double>& kappas = {1e-1, 1e-2, 1e-3, 1e-4});

}  // namespace anisokin
