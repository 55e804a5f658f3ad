#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <utility>

#include "anisokin/anisotropy.hpp"
#include "anisokin/grid.hpp"
#include "anisokin/poisson.hpp"

namespace anisokin {

/// The two ion species. Nonnegative, individually mass-conserving.
struct ChargePair {
    ScalarField c_plus, c_minus;

    ChargePair() = default;
    explicit ChargePair(const Grid& g) : c_plus(g), c_minus(g) {}
    ChargePair(ScalarField p, ScalarField m) : c_plus(std::move(p)), c_minus(std::move(m)) {}
};

/// B(z) = z / (e^z - 1), extended by B(0) = 1.
double bernoulli(double z);

/// Total face flux F = Pe c_up v - Lambda(d)(grad c + sign beta c grad psi):
/// first-order upwind advection, Scharfetter-Gummel exponential fitting for
/// the normal drift-diffusion part, central cross terms from the a12 entry.
/// Boundary faces carry exactly zero flux. sign is +1 for c+, -1 for c-.
VectorFieldMAC np_face_flux(const ScalarField& c, int sign, const VectorFieldMAC& vel,
                            const ScalarField& psi, const TensorField& lambda_tensor, double Pe,
                            double beta);

/// System matrix of the implicit drift-diffusion solve,
/// vol I + (dt/Pe) * (volume-integrated divergence of the diffusive flux).
/// For d = 0 this is an M-matrix, which is what guarantees positivity.
SparseMat np_system_matrix(const Grid& g, int sign, const ScalarField& psi,
                           const TensorField& lambda_tensor, double dt, double Pe, double beta);

/// Reusable factorization workspace. The sparsity pattern is grid-fixed; the
/// stored LU stays in use across nearby systems through iterative refinement
/// and is refreshed only when refinement stalls.
struct NpWorkspace {
    struct Species {
        std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
        bool factorized = false;
    };
    Species plus, minus;
};

/// Largest admissible dt for the explicit advective part.
double np_max_dt(const VectorFieldMAC& vel, double cfl);

/// One step: implicit drift-diffusion, explicit upwind advection, finished by
/// a flux-form update so per-species mass telescopes to round-off.
ChargePair np_step(const ChargePair& pair, const VectorFieldMAC& vel, const ScalarField& psi,
                   const TensorField& lambda_tensor, double dt, double Pe, double beta,
                   double cfl = 0.9, NpWorkspace* ws = nullptr);

std::pair<double, double> total_mass(const ChargePair& pair);
std::pair<double, double> min_value_audit(const ChargePair& pair);

}  // namespace anisokin
