#pragma once

#include <string>
#include <vector>

#include "anisokin/poisson.hpp"
#include "anisokin/state.hpp"

namespace anisokin {

/// Components of the (regularized) energy:
///   E     = kinetic + entropy + field + boundary
///   E_reg = E + kappa_term
struct EnergyComponents {
    double kinetic = 0.0;     // 1/2 int |v|^2
    double entropy = 0.0;     // sum_pm int c (ln c + 1), 0 ln 0 := 0
    double field = 0.0;       // 1/2 int |grad psi|^2_E
    double boundary = 0.0;    // tau/2 int_Gamma psi^2
    double kappa_term = 0.0;  // kappa/2 int phi^2

    double base() const { return kinetic + entropy + field + boundary; }
    double regularized() const { return base() + kappa_term; }
};

/// One ledger row. The first thirteen fields are the CSV contract, in order;
/// the remaining four are diagnostic columns appended at the end.
struct EnergyRow {
    double t = 0.0;
    double kinetic = 0.0, entropy = 0.0, field = 0.0, boundary = 0.0, kappa_term = 0.0;
    double dissipation = 0.0;
    double boundary_work = 0.0;  // rate int_Gamma psi dt(xi) over the step ending at t
    double mass_plus = 0.0, mass_minus = 0.0;
    double min_plus = 0.0, min_minus = 0.0;
    double residual = 0.0;  // energy-inequality defect rho(t)
    // diagnostics, no acceptance thresholds
    double hess_psi = 0.0;      // int |grad^2 psi|^2
    double grad_lap_psi = 0.0;  // int |grad lap psi|^2
    double third_psi = 0.0;     // int |grad^3 psi|^2
    double grad_sqrt_c = 0.0;   // sum_pm int |grad sqrt(c)|^2
};

struct EnergyLedger {
    std::vector<EnergyRow> rows;

    static std::string csv_header();
    /// Rejects non-finite rows and non-increasing time stamps.
    void append(const EnergyRow& row);
};

/// Energy components of a state; the field part reuses the operator's
/// assembly quadrature and the boundary trace its Robin elimination.
EnergyComponents energy(const SimulationState& state, const RobinOperator& op,
                        const BoundaryTrace& xi);

/// W = int |grad v|^2 + sum_pm int |2 grad sqrt(c) pm beta sqrt(c) grad psi|^2_Lambda.
double dissipation(const SimulationState& state);

/// sum_pm int c (ln c + 1); raises InvariantError below -1e-12.
double entropy_integral(const ChargePair& charges);

/// rho(t_n) = [E(t_n) - E(0) + sum dt W] - sum dt (boundary work), from rows 0..n.
double audit_energy_inequality(const EnergyLedger& ledger, int t_index);

/// Gronwall-form envelope of the regularized energy:
///   E_reg(t) + int_0^t W <= e^t (E_reg(0) + C (xi_norms + t)).
/// C is fitted as the smallest constant making the envelope hold over the run.
struct GronwallFit {
    double fitted_constant = 0.0;
    bool degenerate = false;  // xi_norms + t was zero where the fit was needed
};
GronwallFit audit_regularized_energy(const EnergyLedger& ledger, double xi_norms);

/// Diagnostic seminorm quadratures (interior stencils).
double hessian_norm2(const ScalarField& psi);
double grad_laplacian_norm2(const ScalarField& psi);
double third_derivative_norm2(const ScalarField& psi);
double grad_sqrt_norm2(const ChargePair& charges);

}  // namespace anisokin
