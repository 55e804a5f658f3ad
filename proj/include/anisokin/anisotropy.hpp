#pragma once

#include <string_view>

#include "anisokin/grid.hpp"

namespace anisokin {

/// Prescribed, time-independent director d(x) at cell centers, tangential on
/// the boundary (all presets zero d in the one-cell boundary ring), together
/// with the anisotropy strengths used to build Lambda(d) and E(d).
struct DirectorField {
    Grid grid;
    Eigen::ArrayXXd dx, dy;     // nx x ny
    double lambda = 0.5;        // mobility anisotropy, > 0
    double epsilon = 0.5;       // permittivity anisotropy, > 0

    DirectorField() = default;
    explicit DirectorField(const Grid& g)
        : grid(g),
          dx(Eigen::ArrayXXd::Zero(g.nx, g.ny)),
          dy(Eigen::ArrayXXd::Zero(g.nx, g.ny)) {}

    double max_norm() const { return (dx.square() + dy.square()).sqrt().maxCoeff(); }
};

/// Symmetric 2x2 tensor field at cell centers; only a12 is stored off-diagonal,
/// so symmetry holds by construction.
struct TensorField {
    Grid grid;
    Eigen::ArrayXXd a11, a12, a22;

    TensorField() = default;
    explicit TensorField(const Grid& g)
        : grid(g),
          a11(Eigen::ArrayXXd::Ones(g.nx, g.ny)),
          a12(Eigen::ArrayXXd::Zero(g.nx, g.ny)),
          a22(Eigen::ArrayXXd::Ones(g.nx, g.ny)) {}

    /// Smallest eigenvalue over all cells; >= 1 for I + s d(x)d(x)^T with s > 0.
    double min_eigenvalue() const;
    double max_eigenvalue() const;
};

/// A(x) = I + strength * d(x) (x) d(x).
TensorField tensor_from_director(const DirectorField& df, double strength);

/// max over boundary-ring cells of |d . n|, n being the outward axis normal of
/// the nearest edge (both edges at corners). Zero for all shipped presets.
double tangentiality_residual(const DirectorField& df);

/// Deterministic director presets: zero, uniform_x_interior_masked, vortex,
/// quadrant. All satisfy tangentiality_residual == 0.
DirectorField preset_director(std::string_view name, const Grid& g, double lambda = 0.5,
                              double epsilon = 0.5);

}  // namespace anisokin
