#include "anisokin/surface.hpp"

#include <cmath>

namespace anisokin {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

Eigen::ArrayXd deriv_central4(const Eigen::ArrayXd& f, double dtheta) {
    const int m = static_cast<int>(f.size());
    Eigen::ArrayXd out(m);
    auto at = [&](int k) { return f((k % m + m) % m); };
    for (int k = 0; k < m; ++k)
        out(k) = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * dtheta);
    return out;
}

// Dense trigonometric differentiation: D_{kj} = (-1)^{k-j} cot((k-j) h / 2) / 2
// for even m, zero diagonal. Exact for trigonometric polynomials < m/2.
Eigen::ArrayXd deriv_spectral(const Eigen::ArrayXd& f, double dtheta) {
    const int m = static_cast<int>(f.size());
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(m);
    for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == k) continue;
            const int p = k - j;
            const double w = 0.5 * ((p & 1) ? -1.0 : 1.0) / std::tan(0.5 * p * dtheta);
            acc += w * f(j);
        }
        out(k) = acc;
    }
    return out;
}

}  // namespace

Eigen::ArrayXd ParametricCurve::deriv(const Eigen::ArrayXd& f) const {
    if (f.size() != m) throw StructuralError("surface: sample count mismatch");
    const double dtheta = kTwoPi / m;
    return mode == DiffMode::spectral ? deriv_spectral(f, dtheta) : deriv_central4(f, dtheta);
}

ParametricCurve curve_from_function(int m,
                                    const std::function<Eigen::Vector2d(double)>& position,
                                    DiffMode mode) {
    if (m < 8) throw ParameterError("surface: need at least 8 samples");
    if (m % 2 != 0) throw ParameterError("surface: sample count must be even");
    ParametricCurve c;
    c.m = m;
    c.mode = mode;
    c.theta.resize(m);
    c.pos.resize(m, 2);
    for (int k = 0; k < m; ++k) {
        c.theta(k) = kTwoPi * k / m;
        const Eigen::Vector2d p = position(c.theta(k));
        c.pos(k, 0) = p.x();
        c.pos(k, 1) = p.y();
    }
    c.tangent.resize(m, 2);
    c.tangent.col(0) = c.deriv(c.pos.col(0));
    c.tangent.col(1) = c.deriv(c.pos.col(1));
    c.metric = c.tangent.col(0).square() + c.tangent.col(1).square();
    if (c.metric.minCoeff() <= 0.0)
        throw ParameterError("surface: degenerate parametrization (g <= 0)");
    const Eigen::ArrayXd norm = c.metric.sqrt();
    c.normal.resize(m, 2);
    // Outward normal of a counterclockwise curve: rotate tau by -90 degrees.
    c.normal.col(0) = c.tangent.col(1) / norm;
    c.normal.col(1) = -c.tangent.col(0) / norm;
    return c;
}

ParametricCurve circle_curve(int m, double radius, DiffMode mode) {
    return curve_from_function(
        m,
        [radius](double t) {
            return Eigen::Vector2d(radius * std::cos(t), radius * std::sin(t));
        },
        mode);
}

ParametricCurve ellipse_curve(int m, double a, double b, DiffMode mode) {
    return curve_from_function(
        m, [a, b](double t) { return Eigen::Vector2d(a * std::cos(t), b * std::sin(t)); },
        mode);
}

SurfaceVector surface_gradient(const ParametricCurve& c, const SurfaceScalar& f) {
    const Eigen::ArrayXd df = c.deriv(f);
    SurfaceVector out(c.m, 2);
    out.col(0) = df * c.tangent.col(0) / c.metric;
    out.col(1) = df * c.tangent.col(1) / c.metric;
    return out;
}

SurfaceMatrix surface_gradient_vector(const ParametricCurve& c, const SurfaceVector& v) {
    const Eigen::ArrayXd d0 = c.deriv(v.col(0));
    const Eigen::ArrayXd d1 = c.deriv(v.col(1));
    SurfaceMatrix out;
    out.a11 = d0 * c.tangent.col(0) / c.metric;
    out.a12 = d0 * c.tangent.col(1) / c.metric;
    out.a21 = d1 * c.tangent.col(0) / c.metric;
    out.a22 = d1 * c.tangent.col(1) / c.metric;
    return out;
}

SurfaceScalar surface_divergence(const ParametricCurve& c, const SurfaceVector& v) {
    const Eigen::ArrayXd d0 = c.deriv(v.col(0));
    const Eigen::ArrayXd d1 = c.deriv(v.col(1));
    return (d0 * c.tangent.col(0) + d1 * c.tangent.col(1)) / c.metric;
}

SurfaceVector surface_divergence_matrix(const ParametricCurve& c, const SurfaceMatrix& A) {
    SurfaceVector out(c.m, 2);
    const Eigen::ArrayXd d11 = c.deriv(A.a11), d12 = c.deriv(A.a12);
    const Eigen::ArrayXd d21 = c.deriv(A.a21), d22 = c.deriv(A.a22);
    out.col(0) = (d11 * c.tangent.col(0) + d12 * c.tangent.col(1)) / c.metric;
    out.col(1) = (d21 * c.tangent.col(0) + d22 * c.tangent.col(1)) / c.metric;
    return out;
}

SurfaceScalar curvature(const ParametricCurve& c) { return surface_divergence(c, c.normal); }

double line_integral(const ParametricCurve& c, const SurfaceScalar& f) {
    if (f.size() != c.m) throw StructuralError("surface: sample count mismatch");
    return (f * c.metric.sqrt()).sum() * (kTwoPi / c.m);
}

double ibp_residual(const ParametricCurve& c, const SurfaceScalar& f, const SurfaceVector& v,
                    bool include_curvature) {
    const SurfaceScalar div_v = surface_divergence(c, v);
    const SurfaceVector grad_f = surface_gradient(c, f);
    SurfaceScalar integrand =
        f * div_v + v.col(0) * grad_f.col(0) + v.col(1) * grad_f.col(1);
    if (include_curvature) {
        const SurfaceScalar kappa = curvature(c);
        const SurfaceScalar vn = v.col(0) * c.normal.col(0) + v.col(1) * c.normal.col(1);
        integrand -= f * vn * kappa;
    }
    return line_integral(c, integrand);
}

}  // namespace anisokin
