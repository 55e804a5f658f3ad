#include "anisokin/grid.hpp"

#include <cmath>

namespace anisokin {

namespace {

// Kahan-compensated accumulation.
struct Accumulator {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 4 || ny < 4) throw ParameterError("grid: nx and ny must be >= 4");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ParameterError("grid: lx and ly must be positive");
    hx = lx / nx;
    hy = ly / ny;
}

ScalarField ScalarField::constant(const Grid& g, double c) {
    ScalarField s(g);
    s.values.setConstant(c);
    return s;
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarField s(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) s.values(i, j) = f(g.xc(i), g.yc(j));
    return s;
}

VectorFieldMAC VectorFieldMAC::sample(const Grid& g,
                                      const std::function<double(double, double)>& fu,
                                      const std::function<double(double, double)>& fv) {
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) w.u(i, j) = fu(g.xf(i), g.yc(j));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = fv(g.xc(i), g.yf(j));
    return w;
}

void VectorFieldMAC::zero_boundary_normals() {
    u.row(0).setZero();
    u.row(grid.nx).setZero();
    v.col(0).setZero();
    v.col(grid.ny).setZero();
}

double VectorFieldMAC::boundary_normal_max() const {
    double m = 0.0;
    m = std::max(m, u.row(0).abs().maxCoeff());
    m = std::max(m, u.row(grid.nx).abs().maxCoeff());
    m = std::max(m, v.col(0).abs().maxCoeff());
    m = std::max(m, v.col(grid.ny).abs().maxCoeff());
    return m;
}

void BoundaryTrace::require_sized(const Grid& g) const {
    if (bottom.size() != g.nx || top.size() != g.nx || left.size() != g.ny ||
        right.size() != g.ny) {
        throw StructuralError("boundary trace: side lengths do not match the grid");
    }
}

double BoundaryTrace::max_abs() const {
    double m = 0.0;
    if (bottom.size()) m = std::max(m, bottom.abs().maxCoeff());
    if (top.size()) m = std::max(m, top.abs().maxCoeff());
    if (left.size()) m = std::max(m, left.abs().maxCoeff());
    if (right.size()) m = std::max(m, right.abs().maxCoeff());
    return m;
}

ScalarField divergence_mac(const VectorFieldMAC& w) {
    const Grid& g = w.grid;
    if (w.u.rows() != g.nx + 1 || w.u.cols() != g.ny || w.v.rows() != g.nx ||
        w.v.cols() != g.ny + 1) {
        throw StructuralError("divergence_mac: component shapes do not match the grid");
    }
    ScalarField d(g);
    d.values = (w.u.bottomRows(g.nx) - w.u.topRows(g.nx)) / g.hx +
               (w.v.rightCols(g.ny) - w.v.leftCols(g.ny)) / g.hy;
    return d;
}

namespace {

VectorFieldMAC interior_gradient(const ScalarField& s) {
    const Grid& g = s.grid;
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) w.u(i, j) = (s.values(i, j) - s.values(i - 1, j)) / g.hx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) w.v(i, j) = (s.values(i, j) - s.values(i, j - 1)) / g.hy;
    return w;
}

}  // namespace

VectorFieldMAC gradient_to_faces(const ScalarField& s, GhostRule rule) {
    if (rule == GhostRule::zero)
        return gradient_to_faces(s, GhostFill([](Side, int) { return 0.0; }));
    // mirror: ghost = inside cell, so the boundary-face gradients stay zero
    return interior_gradient(s);
}

VectorFieldMAC gradient_to_faces(const ScalarField& s, const GhostFill& ghost) {
    const Grid& g = s.grid;
    VectorFieldMAC w = interior_gradient(s);
    for (int j = 0; j < g.ny; ++j) {
        w.u(0, j) = (s.values(0, j) - ghost(Side::left, j)) / g.hx;
        w.u(g.nx, j) = (ghost(Side::right, j) - s.values(g.nx - 1, j)) / g.hx;
    }
    for (int i = 0; i < g.nx; ++i) {
        w.v(i, 0) = (s.values(i, 0) - ghost(Side::bottom, i)) / g.hy;
        w.v(i, g.ny) = (ghost(Side::top, i) - s.values(i, g.ny - 1)) / g.hy;
    }
    return w;
}

VectorFieldMAC interp_center_to_face(const ScalarField& s) {
    const Grid& g = s.grid;
    VectorFieldMAC w(g);
    for (int j = 0; j < g.ny; ++j) {
        w.u(0, j) = s.values(0, j);
        w.u(g.nx, j) = s.values(g.nx - 1, j);
        for (int i = 1; i < g.nx; ++i) w.u(i, j) = 0.5 * (s.values(i - 1, j) + s.values(i, j));
    }
    for (int i = 0; i < g.nx; ++i) {
        w.v(i, 0) = s.values(i, 0);
        w.v(i, g.ny) = s.values(i, g.ny - 1);
        for (int j = 1; j < g.ny; ++j) w.v(i, j) = 0.5 * (s.values(i, j - 1) + s.values(i, j));
    }
    return w;
}

double domain_integral(const ScalarField& s) {
    Accumulator acc;
    for (int j = 0; j < s.grid.ny; ++j)
        for (int i = 0; i < s.grid.nx; ++i) acc.add(s.values(i, j));
    return acc.sum * s.grid.hx * s.grid.hy;
}

double boundary_integral(const Grid& g, const BoundaryTrace& trace) {
    trace.require_sized(g);
    Accumulator x, y;
    for (int i = 0; i < g.nx; ++i) {
        x.add(trace.bottom(i));
        x.add(trace.top(i));
    }
    for (int j = 0; j < g.ny; ++j) {
        y.add(trace.left(j));
        y.add(trace.right(j));
    }
    return x.sum * g.hx + y.sum * g.hy;
}

double boundary_flux(const VectorFieldMAC& w) {
    const Grid& g = w.grid;
    Accumulator x, y;
    for (int j = 0; j < g.ny; ++j) {
        x.add(w.u(g.nx, j));
        x.add(-w.u(0, j));
    }
    for (int i = 0; i < g.nx; ++i) {
        y.add(w.v(i, g.ny));
        y.add(-w.v(i, 0));
    }
    return x.sum * g.hy + y.sum * g.hx;
}

}  // namespace anisokin
