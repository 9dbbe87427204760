#pragma once

#include <string>
#include <utility>
#include <vector>

#include "simkit/types.hpp"

namespace simkit::oracle {

/// Closed-form reference value, tagged with the generating formula and the
/// inputs it was evaluated at.
struct OracleValue {
    std::vector<double> values;
    std::string formula_id;
    std::vector<std::pair<std::string, double>> inputs;

    double value() const { return values.at(0); }
};

/// Diagonal of A^m for the linear model, by the spectral formula
/// ((-1)^m + (-1-gamma)^m) / 2.
double dm_diagonal(double gamma, int m);

/// z1(t_f) of the boundary-value reconstruction on the linear model
/// (free boundary component K at t0, z2 fixed at t_f).
double linear_bvp_poi(double gamma, double t0, double t_f, double K, double z2_tf);

/// z2(t_f) of the boundary-value reconstruction on the Davis-Skodje model.
double ds_bvp_poi(double gamma, double t0, double t_f, double K, double z1_tf);

/// z1(t_f) of the reverse-mode trajectory optimization with the m-th
/// derivative-norm objective on the linear model.
double linear_opt_poi(double gamma, int m, double t0, double t_f, double z2_tf);

/// z1(t_f) of the nonlocal zero-derivative reconstruction (criterion imposed
/// at t0, RPV fixed at t_f) on the linear model.
double zdp_nonlocal_linear_poi(double gamma, int m, double t0, double t_f, double z2_tf);

/// Closed-form solution of the primal-dual boundary value problem for the
/// linear model with the ||A^m z||^2 running cost. The constants determine
/// the analytic primal state and costate, the constant Hamiltonian value
/// -2 c1 c3 - 2 c2 c4 (1+gamma), and the reconstructed z1(t_f).
struct LinearAdjointConstants {
    double gamma = 0.0;
    int m = 1;
    double t0 = 0.0, t_f = 0.0, z2_tf = 0.0;

    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double xi = 0.0;   // (2 d_m - (-1)^m)^2 / (1 + gamma)
    double d_m = 0.0;  // diagonal of A^m
    double hamiltonian = 0.0;
    double poi_z1_tf = 0.0;

    Vec primal(double t) const;   // z(t) from (c1, c2)
    Vec costate(double t) const;  // lambda(t) from (c1..c4)
};

LinearAdjointConstants linear_adjoint_constants(double gamma, int m, double t0, double t_f,
                                                double z2_tf);

/// Constant Hamiltonian value of the optimal solution, -2c1c3 - 2c2c4(1+gamma).
double hamiltonian_value(double gamma, int m, double t0, double t_f, double z2_tf);

OracleValue describe(const std::string& formula_id,
                     std::vector<std::pair<std::string, double>> inputs,
                     std::vector<double> values);

}  // namespace simkit::oracle
