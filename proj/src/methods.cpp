#include "simkit/methods.hpp"

#include <cmath>

#include "simkit/newton.hpp"
#include "simkit/shooting.hpp"
#include "simkit/simplex.hpp"
#include "simkit/taylor.hpp"

namespace simkit {

namespace {

// Initial-guess policy: free components start from the QSSA point. QSSA
// itself starts from the mean of the fixed values, which is inside the
// attracting region for every built-in model.
Vec naive_guess(const RpvSpec& rpv, int n) {
    const double mean = rpv.fixed_values.mean();
    return Vec::Constant(static_cast<Eigen::Index>(rpv.free_indices(n).size()), mean);
}

Vec qssa_guess(const KineticModel& model, const RpvSpec& rpv);

Poi zdp_at_point(const KineticModel& model, const RpvSpec& rpv, int m, const char* method_name) {
    rpv.validate(model.dim());
    if (m < 1) throw std::invalid_argument("zdp_local: m >= 1 required");
    const int n = model.dim();

    auto residual = [&](const Vec& u) {
        const Vec z = rpv.assemble(u, n);
        if (m == 1) return rpv.gather_free(model.rhs(z));
        return rpv.gather_free(time_derivatives(model, z, m).deriv(m));
    };

    const Vec u0 = (m == 1) ? naive_guess(rpv, n) : qssa_guess(model, rpv);
    NewtonOptions nopts;
    nopts.tol = 1e-12;
    const NewtonResult nr = newton_solve(residual, u0, nopts);

    Poi poi;
    poi.method = method_name;
    poi.state = rpv.assemble(nr.x, n);
    poi.diag.residual = nr.residual_norm;
    poi.diag.scaled_residual = nr.step_norm;
    poi.diag.iterations = nr.iterations;
    poi.diag.converged = nr.converged;
    if (!nr.converged) poi.diag.note = "newton did not converge; best iterate returned";
    return poi;
}

Vec qssa_guess(const KineticModel& model, const RpvSpec& rpv) {
    const Poi q = zdp_at_point(model, rpv, 1, "qssa");
    return rpv.gather_free(q.state);
}

double squared_norm_of_derivative(const KineticModel& model, const Vec& z, int m) {
    if (m == 1) return model.rhs(z).squaredNorm();
    if (m == 2) return second_derivative(model, z).squaredNorm();
    return time_derivatives(model, z, m).deriv(m).squaredNorm();
}

}  // namespace

Poi zdp_local(const KineticModel& model, const RpvSpec& rpv, int m) {
    return zdp_at_point(model, rpv, m, "zdp_local");
}

Poi qssa(const KineticModel& model, const RpvSpec& rpv) {
    return zdp_at_point(model, rpv, 1, "qssa");
}

Poi zdp_nonlocal(const KineticModel& model, const RpvSpec& rpv, int m, const IvpOptions& ivp) {
    rpv.validate(model.dim());
    if (m < 1) throw std::invalid_argument("zdp_nonlocal: m >= 1 required");
    if (!rpv.horizon_t0) throw std::invalid_argument("zdp_nonlocal: horizon t0 required");
    const int n = model.dim();
    const double t_f = rpv.t_star;
    const double t0 = *rpv.horizon_t0;

    ShootingProblem problem;
    problem.dimension = n - static_cast<int>(rpv.fixed_indices.size());
    problem.residual = [&](const Vec& u) {
        const Vec z_tf = rpv.assemble(u, n);
        const Trajectory traj = integrate(model, z_tf, t_f, t0, ivp);
        return rpv.gather_free(time_derivatives(model, traj.end_state(), m).deriv(m));
    };

    const NewtonResult nr = shoot(problem, qssa_guess(model, rpv));

    Poi poi;
    poi.method = "zdp_nonlocal";
    poi.state = rpv.assemble(nr.x, n);
    poi.diag.residual = nr.residual_norm;
    poi.diag.scaled_residual = nr.step_norm;
    poi.diag.iterations = nr.iterations;
    poi.diag.converged = nr.converged;
    poi.diag.horizon_t0 = t0;
    if (!nr.converged) throw SolveError("zdp_nonlocal: shooting failed (residual " +
                                        std::to_string(nr.residual_norm) + ")");
    return poi;
}

Poi fcm(const KineticModel& model, const RpvSpec& rpv) {
    rpv.validate(model.dim());
    const int n = model.dim();
    if (n < 2) throw std::invalid_argument("fcm: dimension >= 2 required");
    if (n - static_cast<int>(rpv.fixed_indices.size()) != 1)
        throw std::invalid_argument("fcm: exactly one free component required");

    auto residual = [&](const Vec& u) {
        Vec r(1);
        r(0) = flow_curvature_det(model, rpv.assemble(u, n));
        return r;
    };

    NewtonOptions nopts;
    nopts.tol = 1e-12;
    const NewtonResult nr = newton_solve(residual, qssa_guess(model, rpv), nopts);

    Poi poi;
    poi.method = "fcm";
    poi.state = rpv.assemble(nr.x, n);
    poi.diag.residual = nr.residual_norm;
    poi.diag.scaled_residual = nr.step_norm;
    poi.diag.iterations = nr.iterations;
    poi.diag.converged = nr.converged;
    if (!nr.converged)
        throw SolveError("fcm: newton did not converge (residual " +
                         std::to_string(nr.residual_norm) + ")");

    // The determinant also vanishes on the non-slow eigendirections; reject
    // those roots by the stretching ratio. At an equilibrium the rates are
    // undefined and the root is legitimate.
    const double speed = inf_norm(model.rhs(poi.state));
    if (speed > 1e-9 * (1.0 + inf_norm(poi.state))) {
        const StretchingRates rates = stretching_rates(model, poi.state);
        if (rates.ratio < 1.0)
            throw SolveError("fcm: converged to a non-slow direction (stretching ratio " +
                             std::to_string(rates.ratio) + ")");
    }
    return poi;
}

FetPoint fet(const KineticModel& model, double z1_value) {
    if (model.dim() != 2) throw std::invalid_argument("fet: planar models only");

    // Unknowns (z2, p) with p = dz2/dz1 on the manifold. Residuals keep the
    // division-free form, so S1 = 0 stays solvable.
    auto residual = [&](const Vec& u) {
        Vec z(2);
        z << z1_value, u(0);
        const double p = u(1);
        const Vec S = model.rhs(z);
        const Mat J = model.jacobian(z);
        Vec r(2);
        r(0) = S(1) - p * S(0);
        r(1) = p * (J(0, 0) + p * J(0, 1)) - (J(1, 0) + p * J(1, 1));
        return r;
    };

    // Start from the QSSA point and the finite-difference slope of the QSSA
    // curve through neighboring z1 values.
    RpvSpec rpv;
    rpv.fixed_indices = {1};
    rpv.fixed_values = Vec::Constant(1, z1_value);
    const double z2_0 = qssa(model, rpv).state(1);
    const double h = 1e-4 * (1.0 + std::abs(z1_value));
    RpvSpec rp = rpv, rm = rpv;
    rp.fixed_values(0) += h;
    rm.fixed_values(0) -= h;
    const double p0 = (qssa(model, rp).state(1) - qssa(model, rm).state(1)) / (2.0 * h);

    Vec u0(2);
    u0 << z2_0, p0;
    NewtonOptions nopts;
    nopts.tol = 1e-13;
    const NewtonResult nr = newton_solve(residual, u0, nopts);
    if (!nr.converged)
        throw SolveError("fet: newton did not converge (residual " +
                         std::to_string(nr.residual_norm) + ")");

    FetPoint out;
    out.z2 = nr.x(0);
    out.slope = nr.x(1);
    const Vec r = residual(nr.x);
    out.residual_functional = std::abs(r(0));
    out.residual_truncated = std::abs(r(1));
    out.iterations = nr.iterations;
    Vec z(2);
    z << z1_value, out.z2;
    out.s1_near_zero = std::abs(model.rhs(z)(0)) <= 1e-12 * (1.0 + std::abs(z1_value));
    return out;
}

StretchingRates stretching_rates(const KineticModel& model, const Vec& z) {
    const int n = model.dim();
    const Vec S = model.rhs(z);
    const double speed = S.norm();
    if (!(speed > 0.0) || speed <= 1e-14 * (1.0 + z.norm()))
        throw std::invalid_argument("stretching_rates: S(z) = 0 (equilibrium)");
    const Mat J = model.jacobian(z);
    const Vec s_hat = S / speed;

    StretchingRates out;
    out.omega_tau = s_hat.dot(J * s_hat);
    if (n == 2) {
        Vec normal(2);
        normal << S(1), -S(0);
        const Vec n_hat = normal / normal.norm();
        out.omega_nu = n_hat.dot(J * n_hat);
    } else {
        // Largest eigenvalue of the symmetric part of J restricted to the
        // orthogonal complement of S.
        Eigen::HouseholderQR<Mat> qr(s_hat);
        const Mat Q = qr.householderQ();
        const Mat basis = Q.rightCols(n - 1);
        const Mat sym = 0.5 * (J + J.transpose());
        const Mat restricted = basis.transpose() * sym * basis;
        Eigen::SelfAdjointEigenSolver<Mat> eig(restricted);
        out.omega_nu = eig.eigenvalues().maxCoeff();
    }
    out.ratio = out.omega_nu / out.omega_tau;
    return out;
}

Poi bvp_reconstruct(const KineticModel& model, const RpvSpec& rpv, const Vec& K,
                    const IvpOptions& ivp) {
    rpv.validate(model.dim());
    if (!rpv.horizon_t0) throw std::invalid_argument("bvp_reconstruct: horizon t0 required");
    const int n = model.dim();
    const double t_f = rpv.t_star;
    const double t0 = *rpv.horizon_t0;
    const int n_free = n - static_cast<int>(rpv.fixed_indices.size());
    if (K.size() != n_free) throw std::invalid_argument("bvp_reconstruct: K size mismatch");

    ShootingProblem problem;
    problem.dimension = n_free;
    problem.residual = [&](const Vec& u) -> Vec {
        const Trajectory traj = integrate(model, rpv.assemble(u, n), t_f, t0, ivp);
        return rpv.gather_free(traj.end_state()) - K;
    };

    const NewtonResult nr = shoot(problem, qssa_guess(model, rpv));
    if (!nr.converged)
        throw SolveError("bvp_reconstruct: shooting failed (residual " +
                         std::to_string(nr.residual_norm) + ")");

    Poi poi;
    poi.method = "bvp_reconstruct";
    poi.state = rpv.assemble(nr.x, n);
    poi.diag.residual = nr.residual_norm;
    poi.diag.scaled_residual = nr.step_norm;
    poi.diag.iterations = nr.iterations;
    poi.diag.converged = nr.converged;
    poi.diag.horizon_t0 = t0;

    if (model.feasible_set()) {
        const Trajectory traj = integrate(model, poi.state, t_f, t0, ivp);
        for (const Vec& state : traj.states) {
            if (!model.feasible_set()->contains(state)) {
                poi.diag.left_feasible_set = true;
                poi.diag.note = "trajectory leaves the feasible set";
                break;
            }
        }
    }
    return poi;
}

Poi optimize_trajectory(const KineticModel& model, const RpvSpec& rpv, const MethodConfig& cfg) {
    rpv.validate(model.dim());
    if (cfg.mode != MethodConfig::Mode::reverse)
        throw std::invalid_argument(
            "optimize_trajectory: reverse mode only (use local_min_derivative at t* = t0)");
    if (!rpv.horizon_t0) throw std::invalid_argument("optimize_trajectory: horizon t0 required");
    const int n = model.dim();
    const double t_f = rpv.t_star;
    const double t0 = *rpv.horizon_t0;
    const int m = cfg.derivative_order;
    if (m < 1) throw std::invalid_argument("optimize_trajectory: m >= 1 required");

    auto k2_of = [&cfg](const Vec& z) { return cfg.k2 ? cfg.k2(z) : cfg.k2_constant; };

    // Running cost carried as one extra quadrature state of the augmented
    // ODE, same tolerance as the dynamics.
    auto running_cost = [&](const Vec& z) -> double {
        switch (cfg.objective) {
            case MethodConfig::Objective::derivative_norm:
                return squared_norm_of_derivative(model, z, m);
            case MethodConfig::Objective::lagrangian:
                return cfg.k1 * model.rhs(z).squaredNorm() - k2_of(z) * z.squaredNorm();
            case MethodConfig::Objective::endpoint_derivative_norm:
                return 0.0;
        }
        return 0.0;
    };

    OdeRhs augmented = [&](double, const Vec& y, Vec& dy) {
        const Vec z = y.head(n);
        dy.resize(n + 1);
        dy.head(n) = model.rhs(z);
        dy(n) = running_cost(z);
    };

    bool infeasible_seen = false;
    auto objective = [&](const Vec& u) -> double {
        Vec y0(n + 1);
        y0.head(n) = rpv.assemble(u, n);
        y0(n) = 0.0;
        const Trajectory traj = integrate_ode(augmented, y0, t_f, t0, cfg.ivp);
        if (model.feasible_set()) {
            for (const Vec& state : traj.states)
                if (!model.feasible_set()->contains(state.head(n))) infeasible_seen = true;
        }
        if (cfg.objective == MethodConfig::Objective::endpoint_derivative_norm)
            return squared_norm_of_derivative(model, traj.end_state().head(n), m);
        return -traj.end_state()(n);  // integral over [t0, t_f] from backward quadrature
    };

    const Vec u0 = cfg.initial_guess ? *cfg.initial_guess : qssa_guess(model, rpv);
    MinimizeOptions mopts;
    mopts.tol = cfg.minimize_tol;
    const MinimizeResult res = minimize(objective, u0, mopts);
    if (!res.converged)
        throw SolveError("optimize_trajectory: minimizer stopped at " +
                         std::to_string(res.evaluations) + " evaluations without converging");

    Poi poi;
    poi.method = "optimize_trajectory";
    poi.state = rpv.assemble(res.x, n);
    poi.diag.objective = res.value;
    poi.diag.iterations = res.evaluations;
    poi.diag.converged = res.converged;
    poi.diag.horizon_t0 = t0;
    poi.diag.left_feasible_set = infeasible_seen;
    return poi;
}

Poi local_min_derivative(const KineticModel& model, const RpvSpec& rpv, int m) {
    rpv.validate(model.dim());
    if (m < 1) throw std::invalid_argument("local_min_derivative: m >= 1 required");
    const int n = model.dim();

    auto objective = [&](const Vec& u) {
        return squared_norm_of_derivative(model, rpv.assemble(u, n), m);
    };

    MinimizeOptions mopts;
    mopts.tol = 1e-11;
    const MinimizeResult res = minimize(objective, qssa_guess(model, rpv), mopts);
    if (!res.converged) throw SolveError("local_min_derivative: minimizer did not converge");

    Poi poi;
    poi.method = "local_min_derivative";
    poi.state = rpv.assemble(res.x, n);
    poi.diag.objective = res.value;
    poi.diag.iterations = res.evaluations;
    poi.diag.converged = true;
    return poi;
}

Polyhedron mint0_polyhedron(double n1, double b1, double n2, double b2) {
    Polyhedron p = Polyhedron::positivity(2);
    Vec row(2);
    row << 1.0, -n1;
    p.add_row(row, b1);
    row << 1.0, -n2;
    p.add_row(row, b2);
    return p;
}

Mint0Result min_feasible_t0(const KineticModel& model, int m, double z2_0,
                            const Polyhedron& bounds, double t_f, Mint0ConstraintWindow window) {
    if (model.name() != "linear2d")
        throw std::invalid_argument("min_feasible_t0: closed-form constants exist for linear2d only");
    if (m < 1) throw std::invalid_argument("min_feasible_t0: m >= 1 required");
    if (t_f != 0.0) throw std::invalid_argument("min_feasible_t0: t_f = 0 assumed (autonomous model)");
    const double gamma = model.param("gamma");
    const double xi = std::pow(1.0 + gamma, 2 * m);  // (-1-gamma)^{2m}

    // Optimal-trajectory constants as functions of t0: fast amplitude
    // c_fast = -z2^0 / (1 + xi e^{-2 gamma t0}), slow amplitude z2^0 + c_fast.
    auto fast_amp = [&](double t0) { return -z2_0 / (1.0 + xi * std::exp(-2.0 * gamma * t0)); };
    auto state_at = [&](double t0, double t) {
        const double cf = fast_amp(t0);
        const double cs = z2_0 + cf;
        const double slow = cs * std::exp(-t);
        const double fast = cf * std::exp((-1.0 - gamma) * t);
        Vec z(2);
        z << slow + fast, slow - fast;
        return z;
    };
    auto feasible = [&](double t0) {
        if (window == Mint0ConstraintWindow::at_t0) return bounds.contains(state_at(t0, t0));
        const int samples = 257;
        for (int i = 0; i < samples; ++i) {
            const double t = t0 + (t_f - t0) * i / (samples - 1);
            if (!bounds.contains(state_at(t0, t))) return false;
        }
        return true;
    };

    if (!feasible(t_f))
        throw SolveError("min_feasible_t0: no feasible t0 at or below t_f");

    double lo = t_f;       // feasible
    double hi = t_f - 1.0; // candidate infeasible end
    int expansions = 0;
    while (feasible(hi)) {
        lo = hi;
        hi = t_f + 2.0 * (hi - t_f);
        if (++expansions > 60)
            throw SolveError("min_feasible_t0: feasible for arbitrarily negative t0");
    }
    for (int it = 0; it < 200 && (lo - hi) > 1e-12 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }

    Mint0Result out;
    out.t0_min = lo;
    out.poi.method = "min_feasible_t0";
    out.poi.state = state_at(lo, t_f);
    out.poi.state(1) = z2_0;  // exact by construction
    out.poi.diag.converged = true;
    out.poi.diag.horizon_t0 = lo;
    out.poi.diag.residual = bounds.max_violation(state_at(lo, lo));
    out.ratio = out.poi.state(0) / z2_0;
    return out;
}

}  // namespace simkit
