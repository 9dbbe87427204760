#include "simkit/ode.hpp"

#include <algorithm>
#include <cmath>

namespace simkit {

namespace {

double error_norm(const Vec& err, const Vec& y_old, const Vec& y_new, double rel, double abs) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = abs + rel * std::max(std::abs(y_old(i)), std::abs(y_new(i)));
        const double q = err(i) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

// Dormand-Prince 5(4), FSAL.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    // clang-format off
    static constexpr double a21 = 1.0/5;
    static constexpr double a31 = 3.0/40,       a32 = 9.0/40;
    static constexpr double a41 = 44.0/45,      a42 = -56.0/15,      a43 = 32.0/9;
    static constexpr double a51 = 19372.0/6561, a52 = -25360.0/2187, a53 = 64448.0/6561, a54 = -212.0/729;
    static constexpr double a61 = 9017.0/3168,  a62 = -355.0/33,     a63 = 46732.0/5247, a64 = 49.0/176,    a65 = -5103.0/18656;
    static constexpr double b1 = 35.0/384,      b3 = 500.0/1113,     b4 = 125.0/192,     b5 = -2187.0/6784, b6 = 11.0/84;
    static constexpr double e1 = 35.0/384 - 5179.0/57600;
    static constexpr double e3 = 500.0/1113 - 7571.0/16695;
    static constexpr double e4 = 125.0/192 - 393.0/640;
    static constexpr double e5 = -2187.0/6784 + 92097.0/339200;
    static constexpr double e6 = 11.0/84 - 187.0/2100;
    static constexpr double e7 = -1.0/40;
    // clang-format on
};

class Rk45Stepper {
public:
    Rk45Stepper(const OdeRhs& f, Eigen::Index n) : f_(f) {
        for (auto& k : k_) k.resize(n);
        tmp_.resize(n);
    }

    // One attempt; returns the embedded error estimate through `err`.
    // k_[0] must hold f(t, y) on entry (FSAL); on exit k_[6] = f(t+h, y_new).
    Vec step(double t, const Vec& y, double h, Vec& err) {
        using D = Dopri5;
        tmp_ = y + h * D::a21 * k_[0];
        f_(t + D::c2 * h, tmp_, k_[1]);
        tmp_ = y + h * (D::a31 * k_[0] + D::a32 * k_[1]);
        f_(t + D::c3 * h, tmp_, k_[2]);
        tmp_ = y + h * (D::a41 * k_[0] + D::a42 * k_[1] + D::a43 * k_[2]);
        f_(t + D::c4 * h, tmp_, k_[3]);
        tmp_ = y + h * (D::a51 * k_[0] + D::a52 * k_[1] + D::a53 * k_[2] + D::a54 * k_[3]);
        f_(t + D::c5 * h, tmp_, k_[4]);
        tmp_ = y + h * (D::a61 * k_[0] + D::a62 * k_[1] + D::a63 * k_[2] + D::a64 * k_[3] +
                        D::a65 * k_[4]);
        f_(t + h, tmp_, k_[5]);
        Vec y_new = y + h * (D::b1 * k_[0] + D::b3 * k_[2] + D::b4 * k_[3] + D::b5 * k_[4] +
                             D::b6 * k_[5]);
        f_(t + h, y_new, k_[6]);
        err = h * (D::e1 * k_[0] + D::e3 * k_[2] + D::e4 * k_[3] + D::e5 * k_[4] + D::e6 * k_[5] +
                   D::e7 * k_[6]);
        return y_new;
    }

    Vec k_[7];

private:
    const OdeRhs& f_;
    Vec tmp_;
};

Mat fd_ode_jacobian(const OdeRhs& f, double t, const Vec& y) {
    const Eigen::Index n = y.size();
    Vec f0(n), fp(n), yp = y;
    f(t, y, f0);
    Mat J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-7 * (1.0 + std::abs(y(j)));
        yp(j) = y(j) + h;
        f(t, yp, fp);
        J.col(j) = (fp - f0) / h;
        yp(j) = y(j);
    }
    return J;
}

class Sdirk2Stepper {
public:
    Sdirk2Stepper(const OdeRhs& f, const OdeJac& jac, double rel, double abs)
        : f_(f), jac_(jac), rel_(rel), abs_(abs) {}

    // One L-stable two-stage step (Alexander's SDIRK2).
    Vec step(double t, const Vec& y, double h) const {
        static const double g = 1.0 - std::sqrt(2.0) / 2.0;
        const Vec k1 = solve_stage(t + g * h, y, h, y);
        const Vec base2 = y + h * (1.0 - g) * k1;
        const Vec k2 = solve_stage(t + h, base2, h, y);
        return y + h * ((1.0 - g) * k1 + g * k2);
    }

private:
    // Solves k = f(ts, base + h*g*k) by Newton; returns k.
    Vec solve_stage(double ts, const Vec& base, double h, const Vec& scale_ref) const {
        static const double g = 1.0 - std::sqrt(2.0) / 2.0;
        const Eigen::Index n = base.size();
        Vec k(n);
        f_(ts, base, k);  // predictor: explicit evaluation at the base point
        const double tol = 0.01 * (abs_ + rel_ * (1.0 + scale_ref.norm()));
        Vec g_val(n), y_stage(n);
        for (int it = 0; it < 30; ++it) {
            y_stage = base + (h * g) * k;
            f_(ts, y_stage, g_val);
            g_val = k - g_val;
            Mat J = jac_ ? jac_(ts, y_stage) : fd_ode_jacobian(f_, ts, y_stage);
            Mat M = Mat::Identity(n, n) - (h * g) * J;
            Eigen::PartialPivLU<Mat> lu(M);
            const Vec dk = lu.solve(-g_val);
            k += dk;
            if (dk.cwiseAbs().maxCoeff() <= tol) return k;
        }
        throw IntegrationError("implicit stage Newton failed to converge at t = " +
                                   std::to_string(ts),
                               ts);
    }

    const OdeRhs& f_;
    const OdeJac& jac_;
    double rel_, abs_;
};

}  // namespace

Vec Trajectory::eval(double t) const {
    if (times.empty()) throw std::invalid_argument("Trajectory::eval on empty trajectory");
    if (times.size() == 1) return states.front();
    const bool increasing = times.back() > times.front();
    const double lo = increasing ? times.front() : times.back();
    const double hi = increasing ? times.back() : times.front();
    const double slack = 1e-9 * (1.0 + hi - lo);
    if (t < lo - slack || t > hi + slack)
        throw std::invalid_argument("Trajectory::eval: time outside the integration range");
    t = std::clamp(t, lo, hi);

    // Locate the bracketing step.
    size_t i = 0;
    if (increasing) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        i = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - times.begin())) - 1;
    } else {
        auto it = std::upper_bound(times.begin(), times.end(), t, std::greater<double>());
        i = static_cast<size_t>(std::max<std::ptrdiff_t>(1, it - times.begin())) - 1;
    }
    i = std::min(i, times.size() - 2);

    const double h = times[i + 1] - times[i];
    if (h == 0.0) return states[i];
    const double th = (t - times[i]) / h;
    const double th2 = th * th, th3 = th2 * th;
    const double h00 = 2 * th3 - 3 * th2 + 1, h10 = th3 - 2 * th2 + th;
    const double h01 = -2 * th3 + 3 * th2, h11 = th3 - th2;
    return h00 * states[i] + (h10 * h) * derivs[i] + h01 * states[i + 1] +
           (h11 * h) * derivs[i + 1];
}

Trajectory integrate_ode(const OdeRhs& f, const Vec& y0, double t0, double t1,
                         const IvpOptions& opts, const OdeJac& jac) {
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");

    Trajectory traj;
    auto push = [&](double t, const Vec& y) {
        Vec d(y.size());
        f(t, y, d);
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.derivs.push_back(d);
    };

    if (t0 == t1) {  // trivial horizon: the initial state is the answer
        push(t0, y0);
        return traj;
    }

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    if (opts.method == IvpMethod::rk45) {
        Rk45Stepper stepper(f, y0.size());
        double t = t0;
        Vec y = y0;
        f(t, y, stepper.k_[0]);
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.derivs.push_back(stepper.k_[0]);

        double h = dir * (opts.fixed_step ? *opts.fixed_step : std::min(1e-2 * span, span));
        Vec err(y.size());
        for (long steps = 0;; ++steps) {
            if (steps >= opts.max_steps)
                throw IntegrationError("step budget exhausted at t = " + std::to_string(t), t);
            if ((t + h - t1) * dir > 0.0) h = t1 - t;
            const Vec y_new = stepper.step(t, y, h, err);
            bool accept = true;
            double en = 0.0;
            if (!opts.fixed_step) {
                en = error_norm(err, y, y_new, opts.rel_tol, opts.abs_tol);
                accept = en <= 1.0;
            }
            if (accept) {
                t += h;
                y = y_new;
                stepper.k_[0] = stepper.k_[6];  // FSAL
                traj.times.push_back(t);
                traj.states.push_back(y);
                traj.derivs.push_back(stepper.k_[0]);
                if (t == t1 || std::abs(t - t1) <= 1e-14 * std::max(1.0, std::abs(t1))) break;
            }
            if (!opts.fixed_step) {
                const double factor =
                    (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                h *= factor;
                if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                    throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
            }
        }
        if (traj.times.back() != t1) {
            traj.times.back() = t1;  // snap the final node
        }
        return traj;
    }

    // SDIRK2 with step-doubling error control.
    Sdirk2Stepper stepper(f, jac, opts.rel_tol, opts.abs_tol);
    double t = t0;
    Vec y = y0;
    push(t, y);
    double h = dir * (opts.fixed_step ? *opts.fixed_step : std::min(1e-2 * span, span));
    for (long steps = 0;; ++steps) {
        if (steps >= opts.max_steps)
            throw IntegrationError("step budget exhausted at t = " + std::to_string(t), t);
        if ((t + h - t1) * dir > 0.0) h = t1 - t;
        const Vec y_full = stepper.step(t, y, h);
        const Vec y_mid = stepper.step(t, y, 0.5 * h);
        const Vec y_half = stepper.step(t + 0.5 * h, y_mid, 0.5 * h);
        bool accept = true;
        double en = 0.0;
        if (!opts.fixed_step) {
            const Vec err = (y_half - y_full) / 3.0;  // order 2: 2^2 - 1
            en = error_norm(err, y, y_half, opts.rel_tol, opts.abs_tol);
            accept = en <= 1.0;
        }
        if (accept) {
            t += h;
            y = y_half;
            push(t, y);
            if (t == t1 || std::abs(t - t1) <= 1e-14 * std::max(1.0, std::abs(t1))) break;
        }
        if (!opts.fixed_step) {
            const double factor = (en == 0.0) ? 4.0 : std::clamp(0.9 * std::pow(en, -1.0 / 3), 0.2, 4.0);
            h *= factor;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
        }
    }
    if (traj.times.back() != t1) traj.times.back() = t1;
    return traj;
}

Trajectory integrate(const KineticModel& model, const Vec& z0, double t0, double t1,
                     const IvpOptions& opts) {
    OdeRhs f = [&model](double, const Vec& y, Vec& dy) { dy = model.rhs(y); };
    OdeJac jac = [&model](double, const Vec& y) { return model.jacobian(y); };
    return integrate_ode(f, z0, t0, t1, opts, jac);
}

}  // namespace simkit
