#include "simkit/adjoint.hpp"

#include <cmath>

#include "simkit/shooting.hpp"
#include "simkit/taylor.hpp"

namespace simkit {

Phi make_derivative_norm_phi(const KineticModel& model, int m) {
    if (m < 1) throw std::invalid_argument("make_derivative_norm_phi: m >= 1 required");
    Phi phi;
    phi.value = [&model, m](const Vec& z) {
        if (m == 1) return model.rhs(z).squaredNorm();
        if (m == 2) return second_derivative(model, z).squaredNorm();
        return time_derivatives(model, z, m).deriv(m).squaredNorm();
    };
    return phi;
}

Phi make_linear_derivative_phi(double gamma, int m) {
    if (!(gamma > 0.0) || m < 1)
        throw std::invalid_argument("make_linear_derivative_phi: gamma > 0, m >= 1 required");
    // A^k assembled spectrally: diagonal d_k, off-diagonal (-1)^k - d_k.
    auto power = [gamma](int k) {
        const double d = oracle::dm_diagonal(gamma, k);
        Mat P(2, 2);
        P << d, parity_sign(k) - d, parity_sign(k) - d, d;
        return P;
    };
    const Mat Am = power(m);
    const Mat A2m = power(2 * m);
    Phi phi;
    phi.value = [Am](const Vec& z) { return (Am * z).squaredNorm(); };
    phi.gradient = [A2m](const Vec& z) -> Vec { return 2.0 * (A2m * z); };
    return phi;
}

Vec phi_gradient(const Phi& phi, const Vec& z) {
    if (phi.gradient) return phi.gradient(z);
    // Central differences with one Richardson step (order-2 extrapolation).
    const Eigen::Index n = z.size();
    Vec g(n);
    Vec zp = z;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(z(i)));
        auto central = [&](double step) {
            zp(i) = z(i) + step;
            const double fp = phi.value(zp);
            zp(i) = z(i) - step;
            const double fm = phi.value(zp);
            zp(i) = z(i);
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw SolveError("phi_gradient: non-finite probe");
            return (fp - fm) / (2.0 * step);
        };
        const double d_full = central(h);
        const double d_half = central(0.5 * h);
        g(i) = (4.0 * d_half - d_full) / 3.0;
    }
    return g;
}

HamiltonianEval hamiltonian(const KineticModel& model, const Phi& phi, const Vec& z,
                            const Vec& lambda) {
    HamiltonianEval h;
    h.phi_term = phi.value(z);
    h.lambda_term = lambda.dot(model.rhs(z));
    h.value = h.phi_term + h.lambda_term;
    return h;
}

Vec adjoint_rhs(const KineticModel& model, const Phi& phi, const Vec& z, const Vec& lambda) {
    return -(phi_gradient(phi, z) + model.jacobian(z).transpose() * lambda);
}

AdjointBvpResult solve_adjoint_bvp(const KineticModel& model, const RpvSpec& rpv, double t0,
                                   double t_f, const Phi& phi, const IvpOptions& ivp) {
    rpv.validate(model.dim());
    if (!(t0 < t_f)) throw std::invalid_argument("solve_adjoint_bvp: t0 < t_f required");
    if (rpv.t_star != t_f)
        throw std::invalid_argument("solve_adjoint_bvp: rpv anchor must sit at t_f");
    const int n = model.dim();
    const auto free = rpv.free_indices(n);
    const int n_free = static_cast<int>(free.size());
    const int n_fixed = n - n_free;

    OdeRhs coupled = [&](double, const Vec& y, Vec& dy) {
        const Vec z = y.head(n);
        const Vec lam = y.tail(n);
        dy.resize(2 * n);
        dy.head(n) = model.rhs(z);
        dy.tail(n) = adjoint_rhs(model, phi, z, lam);
    };

    // Unknowns: free primal components at t_f, then the RPV costate
    // components at t_f. The free costate components vanish at t_f.
    auto terminal_state = [&](const Vec& u) {
        Vec y(2 * n);
        y.head(n) = rpv.assemble(u.head(n_free), n);
        Vec lam = Vec::Zero(n);
        for (int k = 0; k < n_fixed; ++k) lam(rpv.fixed_indices[static_cast<size_t>(k)] - 1) = u(n_free + k);
        y.tail(n) = lam;
        return y;
    };

    ShootingProblem problem;
    problem.dimension = n;
    problem.residual = [&](const Vec& u) -> Vec {
        const Trajectory traj = integrate_ode(coupled, terminal_state(u), t_f, t0, ivp);
        return traj.end_state().tail(n);  // lambda(t0) = 0, all components
    };

    // Free primal components start from the analytic SIM when available,
    // otherwise from the fixed-value mean; costate unknowns start at zero.
    Vec u0 = Vec::Zero(n);
    u0.head(n_free).setConstant(rpv.fixed_values.mean());
    if (model.analytic()) {
        try {
            u0.head(n_free) = rpv.gather_free(analytic_sim_point(model, rpv).state);
        } catch (const std::invalid_argument&) {
        }
    }

    const NewtonResult nr = shoot(problem, u0);
    if (!nr.converged)
        throw SolveError("solve_adjoint_bvp: shooting failed (residual " +
                         std::to_string(nr.residual_norm) + ", costates may blow up for long horizons)");

    const Trajectory coupled_traj = integrate_ode(coupled, terminal_state(nr.x), t_f, t0, ivp);

    AdjointBvpResult out;
    out.primal.times = coupled_traj.times;
    out.costate.times = coupled_traj.times;
    for (size_t k = 0; k < coupled_traj.size(); ++k) {
        out.primal.states.push_back(coupled_traj.states[k].head(n));
        out.primal.derivs.push_back(coupled_traj.derivs[k].head(n));
        out.costate.states.push_back(coupled_traj.states[k].tail(n));
        out.costate.derivs.push_back(coupled_traj.derivs[k].tail(n));
    }

    out.poi.method = "adjoint_bvp";
    out.poi.state = coupled_traj.start_state().head(n);
    out.poi.diag.residual = nr.residual_norm;
    out.poi.diag.scaled_residual = nr.step_norm;
    out.poi.diag.iterations = nr.iterations;
    out.poi.diag.converged = nr.converged;
    out.poi.diag.horizon_t0 = t0;
    return out;
}

std::vector<double> hamiltonian_along(const KineticModel& model, const Phi& phi,
                                      const AdjointBvpResult& solution) {
    std::vector<double> h;
    h.reserve(solution.primal.size());
    for (size_t k = 0; k < solution.primal.size(); ++k)
        h.push_back(hamiltonian(model, phi, solution.primal.states[k], solution.costate.states[k])
                        .value);
    return h;
}

}  // namespace simkit
