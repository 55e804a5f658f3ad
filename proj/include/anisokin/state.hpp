#pragma once

#include "anisokin/anisotropy.hpp"
#include "anisokin/navier_stokes.hpp"
#include "anisokin/nernst_planck.hpp"

namespace anisokin {

/// Physical constants of the nondimensional system; all default to one, the
/// anisotropy strengths to the demo value 0.5, kappa to no regularization.
struct Constants {
    double Re = 1.0, Pe = 1.0, alpha = 1.0, beta = 1.0, gamma = 1.0;
    double tau = 1.0, lambda = 0.5, epsilon = 0.5;
    double kappa = 0.0;
};

/// All unknowns at one time level. phi = S_kappa(c+ - c-) is kept consistent
/// with the charges after every completed step.
struct SimulationState {
    double t = 0.0;
    FlowState flow;
    ChargePair charges;
    ScalarField psi, phi;
    DirectorField director;
    TensorField lambda_tensor, eps_tensor;
    Constants consts;
};

}  // namespace anisokin
