#include "anisokin/anisotropy.hpp"

#include <cmath>
#include <string>

namespace anisokin {

double TensorField::min_eigenvalue() const {
    // Eigenvalues of [[a11,a12],[a12,a22]]: (tr +- sqrt(tr^2 - 4 det)) / 2.
    const Eigen::ArrayXXd tr = a11 + a22;
    const Eigen::ArrayXXd disc = ((a11 - a22).square() + 4.0 * a12.square()).sqrt();
    return (0.5 * (tr - disc)).minCoeff();
}

double TensorField::max_eigenvalue() const {
    const Eigen::ArrayXXd tr = a11 + a22;
    const Eigen::ArrayXXd disc = ((a11 - a22).square() + 4.0 * a12.square()).sqrt();
    return (0.5 * (tr + disc)).maxCoeff();
}

TensorField tensor_from_director(const DirectorField& df, double strength) {
    if (!(strength > 0.0))
        throw ParameterError("tensor_from_director: anisotropy strength must be positive");
    TensorField t(df.grid);
    t.a11 = 1.0 + strength * df.dx.square();
    t.a12 = strength * df.dx * df.dy;
    t.a22 = 1.0 + strength * df.dy.square();
    return t;
}

double tangentiality_residual(const DirectorField& df) {
    const Grid& g = df.grid;
    double r = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        r = std::max(r, std::abs(df.dx(0, j)));
        r = std::max(r, std::abs(df.dx(g.nx - 1, j)));
    }
    for (int i = 0; i < g.nx; ++i) {
        r = std::max(r, std::abs(df.dy(i, 0)));
        r = std::max(r, std::abs(df.dy(i, g.ny - 1)));
    }
    return r;
}

namespace {

bool in_boundary_ring(const Grid& g, int i, int j) {
    return i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1;
}

}  // namespace

DirectorField preset_director(std::string_view name, const Grid& g, double lambda,
                              double epsilon) {
    if (!(lambda > 0.0) || !(epsilon > 0.0))
        throw ParameterError("director: lambda and epsilon must be positive");
    DirectorField df(g);
    df.lambda = lambda;
    df.epsilon = epsilon;

    const double cx = 0.5 * g.lx, cy = 0.5 * g.ly;
    if (name == "zero") {
        // d = 0 everywhere; isotropic degeneration.
    } else if (name == "uniform_x_interior_masked") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (!in_boundary_ring(g, i, j)) df.dx(i, j) = 1.0;
    } else if (name == "vortex") {
        // Unit rotational field about the domain center, zeroed in the ring
        // and at the (singular) center cell.
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (in_boundary_ring(g, i, j)) continue;
                const double x = g.xc(i) - cx, y = g.yc(j) - cy;
                const double r = std::hypot(x, y);
                if (r < 1e-12) continue;
                df.dx(i, j) = -y / r;
                df.dy(i, j) = x / r;
            }
    } else if (name == "quadrant") {
        // Piecewise-constant +-45 degree directions, sign flipping across the
        // center lines; boundary ring zeroed.
        const double s = 1.0 / std::sqrt(2.0);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (in_boundary_ring(g, i, j)) continue;
                const double sgn = ((g.xc(i) - cx) * (g.yc(j) - cy) >= 0.0) ? 1.0 : -1.0;
                df.dx(i, j) = s;
                df.dy(i, j) = sgn * s;
            }
    } else {
        throw ParameterError("director: unknown preset '" + std::string(name) + "'");
    }
    return df;
}

}  // namespace anisokin
