#pragma once

#include <vector>

#include "simkit/model.hpp"
#include "simkit/types.hpp"

namespace simkit {

/// Exact time derivatives of the flow through a state: deriv(k) = d^k z / dt^k.
struct DerivativeStack {
    Vec base;
    std::vector<Vec> d;  // d[k-1] holds the k-th derivative

    int order() const { return static_cast<int>(d.size()); }
    const Vec& deriv(int k) const { return d.at(static_cast<size_t>(k) - 1); }
};

/// Propagates z(t) as a degree-m Taylor polynomial through S by jet
/// arithmetic: (k+1) z_{k+1} = k-th coefficient of S(z(t)). Exact up to
/// rounding, unlike nested finite differences.
DerivativeStack time_derivatives(const KineticModel& model, const Vec& z, int m);

/// J_S(z) S(z), the second time derivative along the flow.
Vec second_derivative(const KineticModel& model, const Vec& z);

/// det(dz/dt, d^2z/dt^2, ..., d^n z/dt^n); vanishes on the flow-curvature
/// manifold.
double flow_curvature_det(const KineticModel& model, const Vec& z);

}  // namespace simkit
