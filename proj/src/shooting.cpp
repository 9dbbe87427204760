#include "simkit/shooting.hpp"

namespace simkit {

NewtonResult shoot(const ShootingProblem& problem, const Vec& u0, NewtonOptions opts) {
    if (problem.dimension != u0.size())
        throw std::invalid_argument("shoot: guess size does not match problem dimension");
    if (opts.tol == NewtonOptions{}.tol) opts.tol = 1e-9;  // boundary-residual default
    return newton_solve(problem.residual, u0, opts);
}

}  // namespace simkit
