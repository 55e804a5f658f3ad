#pragma once

#include <Eigen/Dense>
#include <functional>

#include "anisokin/errors.hpp"

namespace anisokin {

/// Parametric derivative rule on the uniform periodic parameter grid.
/// spectral: trigonometric differentiation (exact for band-limited data),
/// central4: 4th-order centered differences (for order-of-accuracy studies).
enum class DiffMode { spectral, central4 };

/// Closed curve sampled at theta_k = 2 pi k / m with its frame and first
/// fundamental form g = |tau|^2. tau is the parametric tangent d(theta),
/// n the outward unit normal (counterclockwise parametrization assumed).
struct ParametricCurve {
    int m = 0;
    DiffMode mode = DiffMode::spectral;
    Eigen::ArrayXd theta;            // m
    Eigen::Array<double, Eigen::Dynamic, 2> pos, tangent, normal;
    Eigen::ArrayXd metric;           // g > 0

    /// Parametric derivative of a per-sample array.
    Eigen::ArrayXd deriv(const Eigen::ArrayXd& f) const;
};

using SurfaceScalar = Eigen::ArrayXd;
using SurfaceVector = Eigen::Array<double, Eigen::Dynamic, 2>;

/// Per-sample ambient 2x2 matrices (not assumed symmetric).
struct SurfaceMatrix {
    Eigen::ArrayXd a11, a12, a21, a22;
};

ParametricCurve curve_from_function(
    int m, const std::function<Eigen::Vector2d(double)>& position,
    DiffMode mode = DiffMode::spectral);

ParametricCurve circle_curve(int m, double radius = 1.0, DiffMode mode = DiffMode::spectral);
ParametricCurve ellipse_curve(int m, double a, double b, DiffMode mode = DiffMode::spectral);

/// grad_G f = g^{-1} (d f / d theta) tau; tangential by construction.
SurfaceVector surface_gradient(const ParametricCurve& c, const SurfaceScalar& f);

/// grad_G v = (d v / d theta) (x) tau / g.
SurfaceMatrix surface_gradient_vector(const ParametricCurve& c, const SurfaceVector& v);

/// div_G v = (d v / d theta) . tau / g.
SurfaceScalar surface_divergence(const ParametricCurve& c, const SurfaceVector& v);

/// div_G A = (d A / d theta) tau / g, one row contraction per sample.
SurfaceVector surface_divergence_matrix(const ParametricCurve& c, const SurfaceMatrix& A);

/// Curvature div_G n; equals 1/R on a radius-R circle with outward normal.
SurfaceScalar curvature(const ParametricCurve& c);

/// int_G f dsigma with the (spectrally accurate) periodic trapezoid rule.
double line_integral(const ParametricCurve& c, const SurfaceScalar& f);

/// Quadrature of int_G f div_G v - f (v.n) div_G n + v . grad_G f dsigma.
/// Dropping the curvature term (include_curvature = false) breaks the
/// identity for non-tangential v; exposed to demonstrate its necessity.
double ibp_residual(const ParametricCurve& c, const SurfaceScalar& f, const SurfaceVector& v,
                    bool include_curvature = true);

}  // namespace anisokin
