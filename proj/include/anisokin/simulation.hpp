#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "anisokin/config.hpp"
#include "anisokin/energy.hpp"
#include "anisokin/poisson.hpp"
#include "anisokin/state.hpp"

namespace anisokin {

/// Solver state reused across steps: assembled Robin operator with a
/// prefactored direct solve (the matrix never changes within a run),
/// prefactored Navier-Stokes solvers for the nominal dt, the S_kappa
/// factorization when kappa > 0, and the Nernst-Planck workspace.
struct SimCaches {
    SimCaches(const Grid& g, const TensorField& eps_tensor, const SimConfig& cfg);

    RobinOperator op;
    NsCache ns;
    NpWorkspace np_ws;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> psi_solver;
    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> skappa_solver;
    double kappa = 0.0;

    ScalarField solve_psi(const ScalarField& charge_or_phi, double gamma,
                          const BoundaryTrace& xi) const;
    ScalarField apply_skappa(const ScalarField& f) const;
};

/// Fields at t = 0: configured charges, v = 0, psi and phi solved consistently.
SimulationState initial_state(const SimConfig& cfg, SimCaches& caches);

struct StepReport {
    int picard_iterations = 0;
    double last_contraction = 0.0;  // ratio of the last two Picard increments
    double dt_used = 0.0;           // after any halving fallback
};

/// One coupled step: Picard iteration phi -> psi -> charges mirroring the
/// fixed-point coupling, then the velocity step with the converged fields.
/// Retries with halved dt (up to 4 times) when Picard or a CFL bound rejects
/// the step; rethrows the step error when even the smallest dt fails.
SimulationState coupled_step(const SimulationState& state, const SimConfig& cfg,
                             SimCaches& caches, double dt, StepReport* report = nullptr);

struct RunSummary {
    long steps = 0;
    double max_rho = 0.0;      // max |energy-inequality residual|
    double mass_drift = 0.0;   // max relative per-species drift
    double min_c = 0.0;        // global minimum over both species and all steps
    double wall_time = 0.0;    // seconds
};

struct RunResult {
    SimulationState state;
    EnergyLedger ledger;
    RunSummary summary;
};

using RunObserver = std::function<void(const SimulationState&, int step_index)>;

/// Steps to T, writes the ledger CSV, VTK snapshots at the configured cadence
/// and the JSON summary. On a step failure the last good state is dumped next
/// to the configured outputs before the error propagates.
RunResult run(const SimConfig& cfg, const RunObserver& observer = {});

struct SweepRow {
    double kappa = 0.0;
    double dist_v = 0.0, dist_c_plus = 0.0, dist_c_minus = 0.0, dist_psi = 0.0;
    double total() const { return dist_v + dist_c_plus + dist_c_minus + dist_psi; }
};

struct SweepReport {
    std::vector<SweepRow> rows;  // ordered as requested
    void write_csv(std::ostream& os) const;
};

/// Runs the system at each kappa plus the kappa = 0 reference and reports
/// L2(Omega x (0,T)) distances to the reference. Every kappa must pass the
/// smallness gate; a violation refuses the sweep naming the offending value.
SweepReport kappa_sweep(const SimConfig& cfg, const std::vector<double>& kappas);

}  // namespace anisokin
