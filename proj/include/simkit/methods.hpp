#pragma once

#include <functional>
#include <optional>

#include "simkit/model.hpp"
#include "simkit/ode.hpp"
#include "simkit/poi.hpp"
#include "simkit/types.hpp"

namespace simkit {

/// Options shared by the reconstruction methods. The defaults suit the
/// optimization-based methods (tight quadrature, Nelder-Mead over the free
/// boundary values).
struct MethodConfig {
    enum class Mode { local, reverse };
    enum class Objective {
        derivative_norm,           // integral of ||d^m z/dt^m||^2 over [t0, t_f]
        endpoint_derivative_norm,  // ||d^m z/dt^m||^2 evaluated at t0
        lagrangian,                // integral of k1 ||dz/dt||^2 - k2(z) ||z||^2
    };

    int derivative_order = 2;  // m
    Mode mode = Mode::reverse;
    Objective objective = Objective::derivative_norm;
    double k1 = 1.0;
    double k2_constant = 1.0;
    std::function<double(const Vec&)> k2;  // state coefficient; overrides k2_constant if set
    std::optional<Vec> initial_guess;      // default: the QSSA point
    IvpOptions ivp{.rel_tol = 1e-12, .abs_tol = 1e-14};
    double minimize_tol = 1e-11;
};

/// Zero-derivative principle at the anchor point: the m-th time derivative of
/// every free component vanishes at t*.
Poi zdp_local(const KineticModel& model, const RpvSpec& rpv, int m);

/// Quasi-steady-state assumption == zero-derivative principle with m = 1.
Poi qssa(const KineticModel& model, const RpvSpec& rpv);

/// Nonlocal zero-derivative principle: RPVs fixed at t_f = t*, the m-th
/// derivative of the free components vanishes at t0 after integrating the
/// trajectory backward. Requires rpv.horizon_t0.
Poi zdp_nonlocal(const KineticModel& model, const RpvSpec& rpv, int m,
                 const IvpOptions& ivp = {});

/// Flow curvature method: free component solves det(d z, d^2 z, ..., d^n z)=0
/// on the fixed-RPV slice. Exactly one free component is required.
Poi fcm(const KineticModel& model, const RpvSpec& rpv);

/// Functional-equation truncation point for a planar model: (z2, z2') solving
/// the functional equation and its curvature-truncated derivative.
struct FetPoint {
    double z2 = 0.0;
    double slope = 0.0;  // z2' = dz2/dz1 on the manifold
    double residual_functional = 0.0;
    double residual_truncated = 0.0;
    int iterations = 0;
    bool s1_near_zero = false;
};
FetPoint fet(const KineticModel& model, double z1_value);

/// Tangential and normal stretching rates and their ratio r = omega_nu /
/// omega_tau. For n > 2 the normal rate is the largest eigenvalue of the
/// symmetric part of J_S restricted to the orthogonal complement of S.
struct StretchingRates {
    double omega_tau = 0.0;
    double omega_nu = 0.0;
    double ratio = 0.0;
};
StretchingRates stretching_rates(const KineticModel& model, const Vec& z);

/// Boundary-value reconstruction: RPVs fixed at t_f = t*, free components
/// pinned to K at t0; single shooting over the free components at t_f.
Poi bvp_reconstruct(const KineticModel& model, const RpvSpec& rpv, const Vec& K,
                    const IvpOptions& ivp = {});

/// Reverse-mode trajectory optimization: decision variables are the free
/// components at t_f; the criterion acts over [t0, t_f] (or at t0 for the
/// endpoint objective). The integral objective is carried as an extra
/// quadrature state of the augmented ODE.
Poi optimize_trajectory(const KineticModel& model, const RpvSpec& rpv, const MethodConfig& cfg);

/// Local optimization variant: minimizes ||d^m z/dt^m||^2 at t* over the free
/// components, no trajectory involved.
Poi local_min_derivative(const KineticModel& model, const RpvSpec& rpv, int m);

/// Where the feasibility constraints of min_feasible_t0 are imposed: at the
/// trajectory start z(t0) (reproduces the published worked example), or along
/// the whole arc [t0, t_f].
enum class Mint0ConstraintWindow { at_t0, along_trajectory };

struct Mint0Result {
    double t0_min = 0.0;
    Poi poi;          // reconstructed state at t_f
    double ratio = 0.0;  // free POI component / RPV value
};

/// Minimal feasible horizon for the linear model: the optimal-trajectory
/// constants as closed-form functions of t0, bisection on the feasibility
/// boundary of the polyhedron. t_f = 0 is required (no loss of generality for
/// an autonomous model).
Mint0Result min_feasible_t0(const KineticModel& linear2d_model, int m, double z2_0,
                            const Polyhedron& bounds, double t_f = 0.0,
                            Mint0ConstraintWindow window = Mint0ConstraintWindow::at_t0);

/// The polyhedron used by the minimal-t0 study: positivity of both species
/// plus two half-planes z1 <= n_i z2 + b_i.
Polyhedron mint0_polyhedron(double n1, double b1, double n2, double b2);

}  // namespace simkit
