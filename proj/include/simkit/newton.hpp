#pragma once

#include <functional>

#include "simkit/types.hpp"

namespace simkit {

struct NewtonOptions {
    double tol = 1e-10;       // residual inf-norm target
    double step_tol = 1e-13;  // scaled step ||dx|| <= step_tol * (1 + ||x||)
    int max_iterations = 60;
    bool damping = true;     // halve the step while the residual grows
    double fd_step = 1e-7;   // h_j = fd_step * (1 + |x_j|)
};

struct NewtonResult {
    enum class Stop { residual, step, max_iterations, singular, stalled };

    Vec x;
    Vec residual;
    double residual_norm = 0.0;
    double step_norm = 0.0;  // size of the last Newton step, scaled by (1+||x||)
    int iterations = 0;
    bool converged = false;
    Stop stop = Stop::max_iterations;
};

/// Damped Newton on a square system with forward-difference Jacobian.
/// Converges on small residual or on a vanishing scaled step (the latter is
/// what long-horizon shooting reaches when the raw residual scale is
/// amplified past the double noise floor). Never throws on divergence: the
/// best iterate comes back flagged.
NewtonResult newton_solve(const std::function<Vec(const Vec&)>& residual, Vec x0,
                          const NewtonOptions& opts = {});

}  // namespace simkit
