#pragma once

#include <iosfwd>
#include <string>

#include "anisokin/energy.hpp"
#include "anisokin/state.hpp"

namespace anisokin {

struct RunSummary;

/// Legacy ASCII structured-points VTK: scalars c_plus, c_minus, psi, pressure
/// and a cell-centered velocity vector, points at the cell centers.
void write_vtk(const std::string& path, const SimulationState& state);
std::string vtk_snapshot_path(const std::string& prefix, int step);

void write_ledger_csv(const std::string& path, const EnergyLedger& ledger);
void write_ledger_csv(std::ostream& os, const EnergyLedger& ledger);

/// {steps, max_rho, mass_drift, min_c, wall_time} as JSON.
void write_summary_json(const std::string& path, const RunSummary& summary);

/// Parses a ledger written by write_ledger_csv (header line required).
EnergyLedger read_ledger_csv(const std::string& path);

}  // namespace anisokin
