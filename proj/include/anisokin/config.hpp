#pragma once

#include <string>

#include "anisokin/state.hpp"

namespace anisokin {

/// Full run configuration. Parsed from a line-based `section.key = value`
/// file; unknown keys are rejected, all defaults are documented in README.
struct SimConfig {
    // grid.*
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    // time.*
    double T = 1.0, dt = 1e-3;
    // ns.*
    double Re = 1.0, alpha = 1.0, ns_cfl = 0.9;
    // np.*
    double Pe = 1.0, beta = 1.0, np_dt_safety = 0.9;
    // poisson.*
    double gamma = 1.0;
    double poisson_tol = 1e-10;
    int poisson_maxit = 0;  // 0: use 10 nx ny
    bool poisson_jacobi = false;
    // bc.*
    double tau = 1.0;
    std::string xi_waveform = "constant";  // constant | sinusoid
    double xi_amplitude = 0.0;
    double xi_frequency = 1.0;
    std::string xi_profile = "uniform";  // uniform | left_right_antisymmetric
    // director.*
    std::string director_preset = "zero";
    double lambda = 0.5, epsilon = 0.5;
    // ic.*
    std::string ic_charges = "uniform";  // uniform | gaussian_blob_pair | separated_slabs
    double ic_background = 1.0;
    double ic_amplitude = 1.0;
    double ic_width = 0.1;
    // reg.*
    double kappa = 0.0;
    double c_gate = 1.0;
    // picard.*
    double picard_tol = 1e-8;
    int picard_maxit = 50;
    // out.*
    std::string out_ledger = "ledger.csv";
    std::string out_summary = "summary.json";
    std::string out_vtk_prefix;
    int snapshot_every = 0;  // 0: no snapshots

    int effective_poisson_maxit() const { return poisson_maxit > 0 ? poisson_maxit : 10 * nx * ny; }
    Constants constants() const {
        return {Re, Pe, alpha, beta, gamma, tau, lambda, epsilon, kappa};
    }
};

SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text);
std::string serialize(const SimConfig& cfg);

/// Boundary datum at time t from the configured waveform and profile,
/// evaluated at face midpoints.
BoundaryTrace xi_trace(const Grid& g, const SimConfig& cfg, double t);

/// Discrete proxy for the regularization smallness gate:
///   kappa * c_gate * (1 + (||d||_inf + ||lap_h d||_inf)^2) <= 1/32,
/// the Laplacian measured on interior cells. Returns the left-hand side.
double gate_value(double kappa, double c_gate, const DirectorField& d);
bool gate_admits(double kappa, double c_gate, const DirectorField& d);

}  // namespace anisokin
