#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "simkit/model.hpp"
#include "simkit/types.hpp"

namespace simkit {

enum class IvpMethod {
    rk45,    // adaptive explicit Dormand-Prince 5(4)
    sdirk2,  // L-stable two-stage SDIRK of order 2, Newton inner solves
};

struct IvpOptions {
    IvpMethod method = IvpMethod::rk45;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 2'000'000;
    std::optional<double> fixed_step;  // disables error control
};

class IntegrationError : public SolveError {
public:
    IntegrationError(const std::string& what, double t) : SolveError(what), time(t) {}
    double time;
};

/// Accepted-step history of one integration. Times are strictly monotone
/// (decreasing for backward integration). eval() interpolates with a cubic
/// Hermite on the bracketing step.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Vec> derivs;

    size_t size() const { return times.size(); }
    double start_time() const { return times.front(); }
    double end_time() const { return times.back(); }
    const Vec& start_state() const { return states.front(); }
    const Vec& end_state() const { return states.back(); }
    Vec eval(double t) const;
};

using OdeRhs = std::function<void(double, const Vec&, Vec&)>;
using OdeJac = std::function<Mat(double, const Vec&)>;

/// Integrates y' = f(t, y) from t0 to t1 (either direction). The Jacobian is
/// only consulted by the implicit method; omitted, it is approximated by
/// forward differences.
Trajectory integrate_ode(const OdeRhs& f, const Vec& y0, double t0, double t1,
                         const IvpOptions& opts = {}, const OdeJac& jac = nullptr);

/// Model front-end of integrate_ode (uses the model's analytic Jacobian for
/// implicit steps).
Trajectory integrate(const KineticModel& model, const Vec& z0, double t0, double t1,
                     const IvpOptions& opts = {});

}  // namespace simkit
