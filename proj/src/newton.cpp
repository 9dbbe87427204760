#include "simkit/newton.hpp"

#include <cmath>

namespace simkit {

namespace {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& x, const Vec& Fx,
                double fd_step) {
    const Eigen::Index n = x.size();
    Mat J(Fx.size(), n);
    Vec xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = fd_step * (1.0 + std::abs(x(j)));
        xp(j) = x(j) + h;
        J.col(j) = (F(xp) - Fx) / h;
        xp(j) = x(j);
    }
    return J;
}

}  // namespace

NewtonResult newton_solve(const std::function<Vec(const Vec&)>& residual, Vec x0,
                          const NewtonOptions& opts) {
    NewtonResult out;
    out.x = std::move(x0);
    if (!out.x.allFinite()) throw std::invalid_argument("newton_solve: non-finite start");

    out.residual = residual(out.x);
    if (out.residual.size() != out.x.size())
        throw std::invalid_argument("newton_solve: system is not square");
    out.residual_norm = inf_norm(out.residual);

    Vec best_x = out.x;
    Vec best_r = out.residual;
    double best_norm = out.residual_norm;

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (out.residual_norm <= opts.tol) {
            out.converged = true;
            out.stop = NewtonResult::Stop::residual;
            return out;
        }

        const Mat J = fd_jacobian(residual, out.x, out.residual, opts.fd_step);
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) {
            out.x = best_x;
            out.residual = best_r;
            out.residual_norm = best_norm;
            out.stop = NewtonResult::Stop::singular;
            return out;
        }
        const Vec dx = lu.solve(-out.residual);
        out.iterations = it + 1;
        out.step_norm = inf_norm(dx) / (1.0 + inf_norm(out.x));

        if (out.step_norm <= opts.step_tol) {
            // The iterate stopped moving: the residual floor is set by the
            // problem's conditioning, not by the iterate's accuracy.
            out.x += dx;
            out.residual = residual(out.x);
            out.residual_norm = inf_norm(out.residual);
            if (out.residual_norm < best_norm) {
                best_x = out.x;
                best_r = out.residual;
                best_norm = out.residual_norm;
            }
            out.converged = true;
            out.stop = NewtonResult::Stop::step;
            return out;
        }

        double alpha = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= (opts.damping ? 30 : 0); ++halvings) {
            const Vec x_try = out.x + alpha * dx;
            const Vec r_try = residual(x_try);
            const double n_try = inf_norm(r_try);
            if (std::isfinite(n_try) && (n_try < out.residual_norm || !opts.damping)) {
                out.x = x_try;
                out.residual = r_try;
                out.residual_norm = n_try;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            out.x = best_x;
            out.residual = best_r;
            out.residual_norm = best_norm;
            out.stop = NewtonResult::Stop::stalled;
            return out;  // best iterate, flagged: never silent
        }
        if (out.residual_norm < best_norm) {
            best_x = out.x;
            best_r = out.residual;
            best_norm = out.residual_norm;
        }
    }

    if (out.residual_norm <= opts.tol) {
        out.converged = true;
        out.stop = NewtonResult::Stop::residual;
        return out;
    }
    out.x = best_x;
    out.residual = best_r;
    out.residual_norm = best_norm;
    out.stop = NewtonResult::Stop::max_iterations;
    return out;
}

}  // namespace simkit
