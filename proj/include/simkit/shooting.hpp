#pragma once

#include <functional>

#include "simkit/newton.hpp"
#include "simkit/types.hpp"

namespace simkit {

/// Two-point boundary value problem reduced to a square root-finding problem:
/// unknown boundary values in, integrate-then-evaluate residuals out.
struct ShootingProblem {
    std::function<Vec(const Vec&)> residual;
    int dimension = 0;
};

/// Single shooting: Newton on the boundary residual. Default residual target
/// 1e-9; step-based convergence applies as in newton_solve.
NewtonResult shoot(const ShootingProblem& problem, const Vec& u0, NewtonOptions opts = {});

}  // namespace simkit
