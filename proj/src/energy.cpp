#include "anisokin/energy.hpp"

#include <cmath>

namespace anisokin {

std::string EnergyLedger::csv_header() {
    return "t,kinetic,entropy,field,boundary,kappa_term,dissipation,boundary_work,"
           "mass_plus,mass_minus,min_plus,min_minus,residual,"
           "hess_psi,grad_lap_psi,third_psi,grad_sqrt_c";
}

void EnergyLedger::append(const EnergyRow& row) {
    const double vals[] = {row.t,         row.kinetic,   row.entropy,    row.field,
                           row.boundary,  row.kappa_term, row.dissipation, row.boundary_work,
                           row.mass_plus, row.mass_minus, row.min_plus,    row.min_minus,
                           row.residual,  row.hess_psi,   row.grad_lap_psi, row.third_psi,
                           row.grad_sqrt_c};
    for (double v : vals)
        if (!std::isfinite(v)) throw InvariantError("ledger: non-finite row entry");
    if (!rows.empty() && row.t <= rows.back().t)
        throw InvariantError("ledger: time stamps must be strictly increasing");
    rows.push_back(row);
}

double entropy_integral(const ChargePair& charges) {
    const Grid& g = charges.c_plus.grid;
    ScalarField s(g);
    for (const ScalarField* c : {&charges.c_plus, &charges.c_minus}) {
        const double cmin = c->min();
        if (cmin < -1e-12)
            throw InvariantError("entropy: concentration below -1e-12, positivity lost upstream");
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = c->values(i, j);
                if (x > 1e-300) s.values(i, j) += x * (std::log(x) + 1.0);
            }
    }
    return domain_integral(s);
}

EnergyComponents energy(const SimulationState& state, const RobinOperator& op,
                        const BoundaryTrace& xi) {
    EnergyComponents e;
    e.kinetic = kinetic_energy(state.flow.v, 1.0);
    e.entropy = entropy_integral(state.charges);
    e.field = 0.5 * (op.dirichlet_energy(state.psi) + op.boundary_strip_energy(state.psi, xi));
    const BoundaryTrace tr = op.boundary_trace(state.psi, xi);
    BoundaryTrace tr2(state.psi.grid);
    tr2.bottom = tr.bottom.square();
    tr2.top = tr.top.square();
    tr2.left = tr.left.square();
    tr2.right = tr.right.square();
    e.boundary = 0.5 * state.consts.tau * boundary_integral(state.psi.grid, tr2);
    if (state.consts.kappa > 0.0) {
        ScalarField phi2(state.phi.grid);
        phi2.values = state.phi.values.square();
        e.kappa_term = 0.5 * state.consts.kappa * domain_integral(phi2);
    }
    return e;
}

namespace {

inline int clampi(int k, int lo, int hi) { return k < lo ? lo : (k > hi ? hi : k); }

// sum_pm int |2 grad sqrt(c) pm beta sqrt(c) grad psi|^2_Lambda over interior
// faces; the tangential components use corner-averaged mirror-ghost stencils.
double charge_dissipation(const ScalarField& c, int sign, const ScalarField& psi,
                          const TensorField& lt, double beta) {
    const Grid& g = c.grid;
    const double vol = g.hx * g.hy;
    Eigen::ArrayXXd rc = c.values.max(0.0).sqrt();
    const auto& s = psi.values;
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const int jm = clampi(j - 1, 0, g.ny - 1), jp = clampi(j + 1, 0, g.ny - 1);
            const double rcf = 0.5 * (rc(i - 1, j) + rc(i, j));
            const double ax = 2.0 * (rc(i, j) - rc(i - 1, j)) / g.hx +
                              sign * beta * rcf * (s(i, j) - s(i - 1, j)) / g.hx;
            const double drc_t =
                (rc(i - 1, jp) + rc(i, jp) - rc(i - 1, jm) - rc(i, jm)) / (4.0 * g.hy);
            const double dpsi_t =
                (s(i - 1, jp) + s(i, jp) - s(i - 1, jm) - s(i, jm)) / (4.0 * g.hy);
            const double ay = 2.0 * drc_t + sign * beta * rcf * dpsi_t;
            const double l11 = 0.5 * (lt.a11(i - 1, j) + lt.a11(i, j));
            const double l12 = 0.5 * (lt.a12(i - 1, j) + lt.a12(i, j));
            const double l22 = 0.5 * (lt.a22(i - 1, j) + lt.a22(i, j));
            acc += 0.5 * vol * (l11 * ax * ax + 2.0 * l12 * ax * ay + l22 * ay * ay);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int im = clampi(i - 1, 0, g.nx - 1), ip = clampi(i + 1, 0, g.nx - 1);
            const double rcf = 0.5 * (rc(i, j - 1) + rc(i, j));
            const double ay = 2.0 * (rc(i, j) - rc(i, j - 1)) / g.hy +
                              sign * beta * rcf * (s(i, j) - s(i, j - 1)) / g.hy;
            const double drc_t =
                (rc(ip, j - 1) + rc(ip, j) - rc(im, j - 1) - rc(im, j)) / (4.0 * g.hx);
            const double dpsi_t =
                (s(ip, j - 1) + s(ip, j) - s(im, j - 1) - s(im, j)) / (4.0 * g.hx);
            const double ax = 2.0 * drc_t + sign * beta * rcf * dpsi_t;
            const double l11 = 0.5 * (lt.a11(i, j - 1) + lt.a11(i, j));
            const double l12 = 0.5 * (lt.a12(i, j - 1) + lt.a12(i, j));
            const double l22 = 0.5 * (lt.a22(i, j - 1) + lt.a22(i, j));
            acc += 0.5 * vol * (l11 * ax * ax + 2.0 * l12 * ax * ay + l22 * ay * ay);
        }
    return acc;
}

}  // namespace

double dissipation(const SimulationState& state) {
    if (state.charges.c_plus.min() < -1e-12 || state.charges.c_minus.min() < -1e-12)
        throw InvariantError("dissipation: concentration below -1e-12");
    double w = velocity_gradient_norm2(state.flow.v);
    w += charge_dissipation(state.charges.c_plus, +1, state.psi, state.lambda_tensor,
                            state.consts.beta);
    w += charge_dissipation(state.charges.c_minus, -1, state.psi, state.lambda_tensor,
                            state.consts.beta);
    return w;
}

double audit_energy_inequality(const EnergyLedger& ledger, int t_index) {
    if (t_index < 0 || t_index >= static_cast<int>(ledger.rows.size()))
        throw StructuralError("audit: row index out of range");
    const EnergyRow& r0 = ledger.rows[0];
    const EnergyRow& rn = ledger.rows[t_index];
    const double e0 = r0.kinetic + r0.entropy + r0.field + r0.boundary;
    const double en = rn.kinetic + rn.entropy + rn.field + rn.boundary;
    double diss = 0.0, work = 0.0;
    for (int k = 1; k <= t_index; ++k) {
        const double dt = ledger.rows[k].t - ledger.rows[k - 1].t;
        diss += dt * ledger.rows[k].dissipation;
        work += dt * ledger.rows[k].boundary_work;
    }
    return en - e0 + diss - work;
}

GronwallFit audit_regularized_energy(const EnergyLedger& ledger, double xi_norms) {
    GronwallFit fit;
    if (ledger.rows.empty()) return fit;
    const EnergyRow& r0 = ledger.rows[0];
    const double ereg0 = r0.kinetic + r0.entropy + r0.field + r0.boundary + r0.kappa_term;
    double diss = 0.0;
    for (size_t k = 1; k < ledger.rows.size(); ++k) {
        const EnergyRow& r = ledger.rows[k];
        const double dt = r.t - ledger.rows[k - 1].t;
        diss += dt * r.dissipation;
        const double t = r.t - r0.t;
        const double ereg = r.kinetic + r.entropy + r.field + r.boundary + r.kappa_term;
        const double lhs = ereg + diss;
        const double need = lhs / std::exp(t) - ereg0;
        if (need <= 0.0) continue;
        const double denom = xi_norms + t;
        if (denom <= 0.0) {
            fit.degenerate = true;
            continue;
        }
        fit.fitted_constant = std::max(fit.fitted_constant, need / denom);
    }
    return fit;
}

double hessian_norm2(const ScalarField& psi) {
    const Grid& g = psi.grid;
    const auto& s = psi.values;
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const double xx = (s(i + 1, j) - 2.0 * s(i, j) + s(i - 1, j)) / (g.hx * g.hx);
            const double yy = (s(i, j + 1) - 2.0 * s(i, j) + s(i, j - 1)) / (g.hy * g.hy);
            const double xy = (s(i + 1, j + 1) - s(i + 1, j - 1) - s(i - 1, j + 1) +
                               s(i - 1, j - 1)) /
                              (4.0 * g.hx * g.hy);
            acc += vol * (xx * xx + 2.0 * xy * xy + yy * yy);
        }
    return acc;
}

namespace {

Eigen::ArrayXXd interior_laplacian(const ScalarField& psi) {
    const Grid& g = psi.grid;
    const auto& s = psi.values;
    Eigen::ArrayXXd lap = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i)
            lap(i, j) = (s(i + 1, j) - 2.0 * s(i, j) + s(i - 1, j)) / (g.hx * g.hx) +
                        (s(i, j + 1) - 2.0 * s(i, j) + s(i, j - 1)) / (g.hy * g.hy);
    return lap;
}

}  // namespace

double grad_laplacian_norm2(const ScalarField& psi) {
    const Grid& g = psi.grid;
    const Eigen::ArrayXXd lap = interior_laplacian(psi);
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 2; i < g.nx - 1; ++i) {
            const double d = (lap(i, j) - lap(i - 1, j)) / g.hx;
            acc += vol * d * d;
        }
    for (int j = 2; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const double d = (lap(i, j) - lap(i, j - 1)) / g.hy;
            acc += vol * d * d;
        }
    return acc;
}

double third_derivative_norm2(const ScalarField& psi) {
    const Grid& g = psi.grid;
    const auto& s = psi.values;
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    // |grad^3|^2 = xxx^2 + 3 xxy^2 + 3 xyy^2 + yyy^2 by symmetry of indices.
    for (int j = 2; j < g.ny - 2; ++j)
        for (int i = 2; i < g.nx - 2; ++i) {
            const double xxx = (s(i + 2, j) - 2.0 * s(i + 1, j) + 2.0 * s(i - 1, j) -
                                s(i - 2, j)) /
                               (2.0 * g.hx * g.hx * g.hx);
            const double yyy = (s(i, j + 2) - 2.0 * s(i, j + 1) + 2.0 * s(i, j - 1) -
                                s(i, j - 2)) /
                               (2.0 * g.hy * g.hy * g.hy);
            const double xxy = ((s(i + 1, j + 1) - 2.0 * s(i, j + 1) + s(i - 1, j + 1)) -
                                (s(i + 1, j - 1) - 2.0 * s(i, j - 1) + s(i - 1, j - 1))) /
                               (2.0 * g.hy * g.hx * g.hx);
            const double xyy = ((s(i + 1, j + 1) - 2.0 * s(i + 1, j) + s(i + 1, j - 1)) -
                                (s(i - 1, j + 1) - 2.0 * s(i - 1, j) + s(i - 1, j - 1))) /
                               (2.0 * g.hx * g.hy * g.hy);
            acc += vol * (xxx * xxx + 3.0 * xxy * xxy + 3.0 * xyy * xyy + yyy * yyy);
        }
    return acc;
}

double grad_sqrt_norm2(const ChargePair& charges) {
    const Grid& g = charges.c_plus.grid;
    const double vol = g.hx * g.hy;
    double acc = 0.0;
    for (const ScalarField* c : {&charges.c_plus, &charges.c_minus}) {
        const Eigen::ArrayXXd rc = c->values.max(0.0).sqrt();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) {
                const double d = (rc(i, j) - rc(i - 1, j)) / g.hx;
                acc += vol * d * d;
            }
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double d = (rc(i, j) - rc(i, j - 1)) / g.hy;
                acc += vol * d * d;
            }
    }
    return acc;
}

}  // namespace anisokin
