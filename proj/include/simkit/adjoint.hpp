#pragma once

#include <functional>
#include <vector>

#include "simkit/model.hpp"
#include "simkit/ode.hpp"
#include "simkit/oracle.hpp"
#include "simkit/poi.hpp"
#include "simkit/types.hpp"

namespace simkit {

/// Running cost Phi(z) with an optional analytic gradient. Without one, the
/// gradient is computed by central differences with one Richardson step
/// (base step 1e-6, order-2 extrapolation).
struct Phi {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
};

/// ||d^m z/dt^m||^2 through the model's jet arithmetic (gradient by FD).
Phi make_derivative_norm_phi(const KineticModel& model, int m);

/// ||A^m z||^2 for the linear model, with the exact gradient 2 A^{2m} z.
/// A^m is formed spectrally: diagonal d_m, off-diagonal (-1)^m - d_m.
Phi make_linear_derivative_phi(double gamma, int m);

Vec phi_gradient(const Phi& phi, const Vec& z);

/// H = Phi(z) + lambda . S(z), kept decomposed for diagnostics.
struct HamiltonianEval {
    double value = 0.0;
    double phi_term = 0.0;
    double lambda_term = 0.0;
};
HamiltonianEval hamiltonian(const KineticModel& model, const Phi& phi, const Vec& z,
                            const Vec& lambda);

/// Costate dynamics dlambda/dt = -dH/dz = -(grad Phi + J_S^T lambda).
Vec adjoint_rhs(const KineticModel& model, const Phi& phi, const Vec& z, const Vec& lambda);

/// Converged primal/dual pair. Both trajectories share the time grid of one
/// coupled integration from t_f down to t0; the costate plays the role of the
/// adjoint state lambda.
struct AdjointBvpResult {
    Trajectory primal;
    Trajectory costate;
    Poi poi;  // primal state at t_f
};

/// Primal-dual boundary value problem: unknowns are the free primal
/// components and the RPV costate components at t_f (the free costate
/// components vanish there); the n shooting conditions are lambda(t0) = 0.
/// Shooting integrates backward from t_f, where the costate's growing modes
/// decay.
AdjointBvpResult solve_adjoint_bvp(const KineticModel& model, const RpvSpec& rpv, double t0,
                                   double t_f, const Phi& phi, const IvpOptions& ivp = {});

/// H evaluated at every stored node of a converged solve.
std::vector<double> hamiltonian_along(const KineticModel& model, const Phi& phi,
                                      const AdjointBvpResult& solution);

// The closed-form linear-model constants live with the other oracles and are
// shared here for convenience.
using oracle::LinearAdjointConstants;
using oracle::linear_adjoint_constants;

}  // namespace simkit
