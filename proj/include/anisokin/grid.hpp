#pragma once

#include <Eigen/Dense>
#include <functional>

#include "anisokin/errors.hpp"

namespace anisokin {

/// Uniform rectangular grid with MAC (staggered) storage convention.
///
/// Scalars live at cell centers ((i+1/2)hx, (j+1/2)hy), the x-component of a
/// vector field at x-face midpoints (i*hx, (j+1/2)hy) and the y-component at
/// y-face midpoints ((i+1/2)hx, j*hy):
///
///          v(i,j+1)
///             |
///   u(i,j) - s(i,j) - u(i+1,j)
///             |
///           v(i,j)
struct Grid {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double hx = 0.0, hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_, double ly_);

    int cells() const { return nx * ny; }
    int cell_index(int i, int j) const { return i + nx * j; }

    double xc(int i) const { return (i + 0.5) * hx; }
    double yc(int j) const { return (j + 0.5) * hy; }
    double xf(int i) const { return i * hx; }
    double yf(int j) const { return j * hy; }

    bool same(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
};

/// Cell-centered scalar field. values(i, j) with i the x-index.
struct ScalarField {
    Grid grid;
    Eigen::ArrayXXd values;  // nx x ny

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), values(Eigen::ArrayXXd::Zero(g.nx, g.ny)) {}

    static ScalarField constant(const Grid& g, double c);
    static ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);

    double min() const { return values.minCoeff(); }
    double max_abs() const { return values.abs().maxCoeff(); }
    bool finite() const { return values.isFinite().all(); }
};

/// Staggered vector field: u on x-faces ((nx+1) x ny), v on y-faces (nx x (ny+1)).
struct VectorFieldMAC {
    Grid grid;
    Eigen::ArrayXXd u;  // (nx+1) x ny
    Eigen::ArrayXXd v;  // nx x (ny+1)

    VectorFieldMAC() = default;
    explicit VectorFieldMAC(const Grid& g)
        : grid(g),
          u(Eigen::ArrayXXd::Zero(g.nx + 1, g.ny)),
          v(Eigen::ArrayXXd::Zero(g.nx, g.ny + 1)) {}

    static VectorFieldMAC sample(const Grid& g,
                                 const std::function<double(double, double)>& fu,
                                 const std::function<double(double, double)>& fv);

    /// Zero all boundary-normal components (no-penetration walls).
    void zero_boundary_normals();
    /// Largest boundary-normal magnitude (0 when no-slip holds exactly).
    double boundary_normal_max() const;

    double max_abs() const { return std::max(u.abs().maxCoeff(), v.abs().maxCoeff()); }
    bool finite() const { return u.isFinite().all() && v.isFinite().all(); }
};

enum class Side { bottom = 0, right = 1, top = 2, left = 3 };

/// One value per boundary face, stored per side. bottom/top are indexed by i,
/// left/right by j. Total length 2(nx+ny).
struct BoundaryTrace {
    Eigen::ArrayXd bottom, top;  // nx
    Eigen::ArrayXd left, right;  // ny

    BoundaryTrace() = default;
    explicit BoundaryTrace(const Grid& g)
        : bottom(Eigen::ArrayXd::Zero(g.nx)),
          top(Eigen::ArrayXd::Zero(g.nx)),
          left(Eigen::ArrayXd::Zero(g.ny)),
          right(Eigen::ArrayXd::Zero(g.ny)) {}

    void require_sized(const Grid& g) const;
    double max_abs() const;
};

/// Ghost-value rule used to close gradient stencils at the boundary.
/// mirror: ghost equals the adjacent cell (zero normal gradient, the no-flux
/// closure); zero: ghost value 0 (one-sided gradient against a zero datum).
enum class GhostRule { mirror, zero };

/// Callers with their own boundary condition supply ghost cell values per
/// boundary face: (side, k) with k the face index along that side.
using GhostFill = std::function<double(Side, int)>;

ScalarField divergence_mac(const VectorFieldMAC& w);
VectorFieldMAC gradient_to_faces(const ScalarField& s, GhostRule rule = GhostRule::mirror);
VectorFieldMAC gradient_to_faces(const ScalarField& s, const GhostFill& ghost);
VectorFieldMAC interp_center_to_face(const ScalarField& s);

/// Midpoint-rule integrals. Compensated summation so the quadrature error
/// stays at a few ulps independently of cell count.
double domain_integral(const ScalarField& s);
double boundary_integral(const Grid& g, const BoundaryTrace& trace);

/// Net outward flux of w through the boundary, Sum w.n * face length.
double boundary_flux(const VectorFieldMAC& w);

}  // namespace anisokin
