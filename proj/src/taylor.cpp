#include "simkit/taylor.hpp"

#include <stdexcept>

namespace simkit {

DerivativeStack time_derivatives(const KineticModel& model, const Vec& z, int m) {
    if (m < 1) throw std::invalid_argument("time_derivatives: order must be >= 1");
    if (z.size() != model.dim()) throw std::invalid_argument("time_derivatives: state size");
    if (!model.has_jet_rhs())
        throw std::invalid_argument("model '" + model.name() +
                                    "': RHS is not composable over jet arithmetic");

    const int n = model.dim();
    std::vector<Jet> zs(static_cast<size_t>(n)), out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) zs[static_cast<size_t>(i)] = Jet(m, z(i));

    // Coefficients of S(z(t)) up to order k only involve z-coefficients up to
    // order k, so filling one order per sweep is exact.
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = Jet(m);
        model.rhs_jet(zs, out);
        for (int i = 0; i < n; ++i)
            zs[static_cast<size_t>(i)][k + 1] = out[static_cast<size_t>(i)][k] / (k + 1);
    }

    DerivativeStack stack;
    stack.base = z;
    stack.d.resize(static_cast<size_t>(m));
    double factorial = 1.0;
    for (int k = 1; k <= m; ++k) {
        factorial *= k;
        Vec dk(n);
        for (int i = 0; i < n; ++i) dk(i) = zs[static_cast<size_t>(i)][k] * factorial;
        stack.d[static_cast<size_t>(k) - 1] = dk;
    }
    return stack;
}

Vec second_derivative(const KineticModel& model, const Vec& z) {
    return model.jacobian(z) * model.rhs(z);
}

double flow_curvature_det(const KineticModel& model, const Vec& z) {
    const int n = model.dim();
    if (n < 2) throw std::invalid_argument("flow_curvature_det: needs dimension >= 2");
    const DerivativeStack stack = time_derivatives(model, z, n);
    Mat M(n, n);
    for (int k = 1; k <= n; ++k) M.col(k - 1) = stack.deriv(k);
    return M.determinant();
}

}  // namespace simkit
