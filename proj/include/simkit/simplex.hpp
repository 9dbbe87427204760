#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "simkit/types.hpp"

namespace simkit {

struct MinimizeOptions {
    double tol = 1e-10;  // simplex-size stopping criterion, scaled by (1+||x||)
    int max_evaluations = 60000;
    double initial_step = 0.25;  // per-coordinate, scaled by (1+|x0_i|)
    std::optional<std::pair<Vec, Vec>> bounds;
    bool gradient_polish = false;  // finite-difference descent after the simplex stops
    int polish_iterations = 40;
};

struct MinimizeResult {
    Vec x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead with deterministic simplex construction and
/// optional box bounds (trial points are clamped into the box). The optional
/// polish runs a few central-difference gradient descent steps from the
/// simplex result.
MinimizeResult minimize(const std::function<double(const Vec&)>& objective, Vec x0,
                        const MinimizeOptions& opts = {});

}  // namespace simkit
