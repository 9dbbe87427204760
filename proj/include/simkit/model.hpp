#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "simkit/jet.hpp"
#include "simkit/poi.hpp"
#include "simkit/types.hpp"

namespace simkit {

/// Linear inequality region {z : a_i . z <= b_i for all rows i}.
/// Membership allows a slack tolerance on each row.
struct Polyhedron {
    Mat normals;  // one row per constraint
    Vec offsets;
    double slack = 1e-10;

    Polyhedron() : normals(0, 0), offsets(0) {}

    Polyhedron& add_row(const Vec& a, double b);
    /// max_i (a_i . z - b_i); negative inside.
    double max_violation(const Vec& z) const;
    bool contains(const Vec& z) const { return max_violation(z) <= slack; }

    /// z_i >= 0 for all i, stored as -z_i <= 0.
    static Polyhedron positivity(int n);
};

/// Which components are pinned during species reconstruction, to what values,
/// and at which anchor time. Component indices are 1-based (z_1 .. z_n),
/// matching the usual naming of the test models.
struct RpvSpec {
    std::vector<int> fixed_indices;
    Vec fixed_values;
    double t_star = 0.0;
    std::optional<double> horizon_t0;  // reverse/nonlocal modes: t0 < t_star

    void validate(int n) const;
    std::vector<int> free_indices(int n) const;

    /// Full state from free-component values (order of free_indices).
    Vec assemble(const Vec& free_values, int n) const;
    Vec gather_free(const Vec& z) const;
    Vec gather_fixed(const Vec& z) const;
};

/// Closed-form knowledge attached to a model: the general solution z(c, t),
/// the inverse map fitting the integration constants from a state, and the
/// species-reconstruction function h for the model's canonical RPV choice.
struct AnalyticBundle {
    std::function<Vec(const Vec& constants, double t)> solution;
    std::function<Vec(const Vec& z, double t)> fit_constants;
    std::vector<int> sim_rpv_indices;  // canonical SIM parameterization (1-based)
    std::function<Vec(const Vec& rpv_values)> sim_map;  // RPV values -> free components
    Vec equilibrium;
};

/// Autonomous kinetic ODE dz/dt = S(z) with Jacobian, optional closed-form
/// solution bundle, and an optional Jet-composable right-hand side enabling
/// exact higher-order time derivatives. Immutable after construction;
/// evaluation is pure.
class KineticModel {
public:
    using RhsFn = std::function<void(std::span<const double>, std::span<double>)>;
    using JacFn = std::function<Mat(const Vec&)>;
    using JetRhsFn = std::function<void(std::span<const Jet>, std::span<Jet>)>;

    KineticModel(std::string name, int n, RhsFn rhs, JacFn jacobian, JetRhsFn jet_rhs = nullptr,
                 std::optional<AnalyticBundle> analytic = std::nullopt);

    const std::string& name() const { return name_; }
    int dim() const { return n_; }

    Vec rhs(const Vec& z) const;
    Mat jacobian(const Vec& z) const;

    bool has_jet_rhs() const { return static_cast<bool>(jet_rhs_); }
    void rhs_jet(std::span<const Jet> z, std::span<Jet> out) const;

    const std::optional<AnalyticBundle>& analytic() const { return analytic_; }
    const std::optional<Polyhedron>& feasible_set() const { return feasible_; }
    void attach_feasible_set(Polyhedron p) { feasible_ = std::move(p); }

    const std::map<std::string, double>& params() const { return params_; }
    double param(const std::string& key) const;
    void set_param(const std::string& key, double v) { params_[key] = v; }

private:
    std::string name_;
    int n_;
    RhsFn rhs_;
    JacFn jac_;
    JetRhsFn jet_rhs_;
    std::optional<AnalyticBundle> analytic_;
    std::optional<Polyhedron> feasible_;
    std::map<std::string, double> params_;
};

/// Builds a model whose double and Jet right-hand sides come from one generic
/// functor f(const T* z, T* dz). Programmatic models that cannot express S
/// through rational scalar operations should pass rhs/jacobian directly to
/// the KineticModel constructor and will be rejected by jet-based operations.
template <class F>
KineticModel make_model(std::string name, int n, F f, KineticModel::JacFn jacobian,
                        std::optional<AnalyticBundle> analytic = std::nullopt) {
    KineticModel::RhsFn rhs = [f](std::span<const double> z, std::span<double> dz) {
        f(z.data(), dz.data());
    };
    KineticModel::JetRhsFn jet = [f](std::span<const Jet> z, std::span<Jet> dz) {
        f(z.data(), dz.data());
    };
    return KineticModel(std::move(name), n, std::move(rhs), std::move(jacobian), std::move(jet),
                        std::move(analytic));
}

/// Two-species linear test model; gamma > 0 sets the spectral gap.
/// SIM: z1 = z2 (the slow eigenspace).
KineticModel make_linear2d(double gamma);

/// Davis–Skodje model; gamma > 1. SIM: z2 = z1/(1+z1).
KineticModel make_davis_skodje(double gamma);

/// Three-species linear model with rates -1, -1-gamma1, -1-gamma2.
/// Two-dimensional SIM: z2 = (z1+z3)/sqrt(2).
KineticModel make_linear3d(double gamma1, double gamma2);

KineticModel make_model_by_name(const std::string& name,
                                const std::map<std::string, double>& params);

/// Exact SIM point from the model's analytic bundle; requires the RpvSpec to
/// use the bundle's canonical RPV indices.
Poi analytic_sim_point(const KineticModel& model, const RpvSpec& rpv);

}  // namespace simkit
