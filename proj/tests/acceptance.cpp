// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned here; nothing defers to runtime calibration.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "simkit/adjoint.hpp"
#include "simkit/methods.hpp"
#include "simkit/oracle.hpp"
#include "simkit/taylor.hpp"

using namespace simkit;

namespace {

struct Checker {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
    void close(double got, double want, double tol, const std::string& what) {
        require(std::abs(got - want) <= tol,
                what + ": got " + std::to_string(got) + ", want " + std::to_string(want) +
                    " +- " + std::to_string(tol));
    }
    void rel_close(double got, double want, double tol, const std::string& what) {
        require(std::abs(got - want) <= tol * std::abs(want),
                what + ": got " + std::to_string(got) + ", want " + std::to_string(want) +
                    " (rel " + std::to_string(tol) + ")");
    }
};

RpvSpec fix(int index, double value, std::optional<double> t0 = std::nullopt) {
    RpvSpec rpv;
    rpv.fixed_indices = {index};
    rpv.fixed_values = Vec::Constant(1, value);
    rpv.horizon_t0 = t0;
    return rpv;
}

int failures = 0;

void criterion(int id, const std::string& label, double budget_seconds,
               const std::function<void(Checker&)>& body) {
    Checker check;
    const auto tic = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    if (budget_seconds > 0.0)
        check.require(seconds < budget_seconds,
                      "runtime " + std::to_string(seconds) + " s exceeds " +
                          std::to_string(budget_seconds) + " s");
    if (check.ok) {
        std::printf("[PASS] %d. %s (%.2f s)\n", id, label.c_str(), seconds);
    } else {
        std::printf("[FAIL] %d. %s: %s\n", id, label.c_str(), check.detail.c_str());
        ++failures;
    }
    std::fflush(stdout);
}

}  // namespace

int main() {
    criterion(1, "linear-model boundary-value reconstruction matches the error formula", 5.0,
              [](Checker& check) {
                  for (double gamma : {0.2, 2.0}) {
                      const KineticModel model = make_linear2d(gamma);
                      double previous_gap = std::numeric_limits<double>::infinity();
                      for (double t0 = -2.0; t0 >= -20.0; t0 -= 2.0) {
                          const Poi poi =
                              bvp_reconstruct(model, fix(2, 5.0, t0), Vec::Zero(1));
                          const double expected =
                              oracle::linear_bvp_poi(gamma, t0, 0.0, 0.0, 5.0);
                          check.close(poi.state(0), expected, 1e-6,
                                      "gamma " + std::to_string(gamma) + ", t0 " +
                                          std::to_string(t0));
                          const double gap = std::abs(poi.state(0) - 5.0);
                          check.require(gap <= previous_gap, "monotone convergence toward 5.0");
                          previous_gap = gap;
                      }
                  }
              });

    criterion(2, "Davis-Skodje boundary-value reconstruction matches the error formula", 5.0,
              [](Checker& check) {
                  for (double gamma : {1.2, 3.0}) {
                      const KineticModel model = make_davis_skodje(gamma);
                      double previous_gap = std::numeric_limits<double>::infinity();
                      for (double t0 = -1.0; t0 >= -5.0; t0 -= 0.5) {
                          const Poi poi =
                              bvp_reconstruct(model, fix(1, 2.0, t0), Vec::Zero(1));
                          const double expected = oracle::ds_bvp_poi(gamma, t0, 0.0, 0.0, 2.0);
                          check.close(poi.state(1), expected, 1e-6,
                                      "gamma " + std::to_string(gamma) + ", t0 " +
                                          std::to_string(t0));
                          const double gap = std::abs(poi.state(1) - 2.0 / 3.0);
                          check.require(gap <= previous_gap, "monotone convergence toward 2/3");
                          previous_gap = gap;
                      }
                  }
              });

    criterion(3, "minimal feasible horizon worked example", 0.0, [](Checker& check) {
        const KineticModel model = make_linear2d(1.0);

        const Poi local = local_min_derivative(model, fix(2, 3.0), 2);
        check.close(local.state(0), 2.6471, 5e-4, "local POI z1");
        check.close(local.state(0) / 3.0, 0.8824, 1e-4, "r_loc");

        const Mint0Result base =
            min_feasible_t0(model, 2, 3.0, mint0_polyhedron(-2.0, 122.0, -0.25, 111.0));
        check.close(base.t0_min, -2.6056, 1e-3, "t0_min (b1 = 122)");
        check.close(base.poi.state(0), 2.9980, 5e-4, "z1(0) at t0_min");
        check.close(base.ratio, 0.9993, 1e-4, "r at t0_min");

        const Mint0Result wide =
            min_feasible_t0(model, 2, 3.0, mint0_polyhedron(-2.0, 222.0, -0.25, 111.0));
        check.close(wide.t0_min, -3.2047, 1e-3, "t0_min (b1 = 222)");
        check.close(wide.ratio, 0.9998, 1e-4, "r (b1 = 222)");

        const Mint0Result tight =
            min_feasible_t0(model, 2, 3.0, mint0_polyhedron(-2.0, 22.0, -0.25, 111.0));
        check.close(std::abs(tight.t0_min), 0.8957, 1e-3, "|t0_min| (b1 = 22)");
        check.close(tight.ratio, 0.9794, 1e-4, "r (b1 = 22)");
        std::printf("       note: b1 = 22 root found at t0 = %+.4f (sign recorded, not asserted)\n",
                    tight.t0_min);
    });

    criterion(4, "direct trajectory optimization equals the closed form", 0.0,
              [](Checker& check) {
                  for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
                      const KineticModel model = make_linear2d(gamma);
                      for (double t0 : {-0.5, -1.0, -2.0}) {
                          MethodConfig cfg;
                          cfg.derivative_order = 2;
                          const Poi poi = optimize_trajectory(model, fix(2, 5.0, t0), cfg);
                          const double expected =
                              oracle::linear_opt_poi(gamma, 2, t0, 0.0, 5.0);
                          check.rel_close(poi.state(0), expected, 1e-6,
                                          "gamma " + std::to_string(gamma) + ", t0 " +
                                              std::to_string(t0));
                      }
                  }
              });

    criterion(5, "nonlocal zero-derivative principle equals its closed form", 0.0,
              [](Checker& check) {
                  for (int m : {1, 2, 3})
                      for (double gamma : {1.0, 2.0})
                          for (double t0 : {-1.0, -2.0}) {
                              const KineticModel model = make_linear2d(gamma);
                              const Poi poi = zdp_nonlocal(model, fix(2, 5.0, t0), m);
                              const double expected =
                                  oracle::zdp_nonlocal_linear_poi(gamma, m, t0, 0.0, 5.0);
                              check.close(poi.state(0), expected, 1e-8,
                                          "m " + std::to_string(m) + ", gamma " +
                                              std::to_string(gamma) + ", t0 " +
                                              std::to_string(t0));
                          }
                  const KineticModel model = make_linear2d(2.0);
                  check.close(zdp_nonlocal(model, fix(2, 5.0, -1.0), 20).state(0), 5.0, 1e-8,
                              "m -> infinity surrogate (m = 20)");
                  check.close(zdp_nonlocal(model, fix(2, 5.0, -30.0), 1).state(0), 5.0, 1e-8,
                              "t0 -> -infinity surrogate (t0 = -30)");
              });

    criterion(6, "primal-dual equivalence and Hamiltonian constancy", 0.0, [](Checker& check) {
        const double gamma = 2.0;
        const int m = 2;
        const KineticModel model = make_linear2d(gamma);
        const Phi phi = make_linear_derivative_phi(gamma, m);
        RpvSpec rpv = fix(2, 5.0);
        const AdjointBvpResult sol = solve_adjoint_bvp(model, rpv, -1.0, 0.0, phi);

        const double expected = oracle::linear_opt_poi(gamma, m, -1.0, 0.0, 5.0);
        check.rel_close(sol.poi.state(0), expected, 1e-6, "POI vs closed form");

        const auto hs = hamiltonian_along(model, phi, sol);
        double drift = 0.0;
        for (const double h : hs)
            drift = std::max(drift, std::abs(h - hs.front()) / (1.0 + std::abs(hs.front())));
        check.require(drift <= 1e-6, "H constant along the solution (drift " +
                                         std::to_string(drift) + ")");

        const double h_oracle = oracle::hamiltonian_value(gamma, m, -1.0, 0.0, 5.0);
        check.rel_close(hs.front(), h_oracle, 1e-6, "H vs -2c1c3 - 2c2c4(1+gamma)");
    });

    criterion(7, "generalized Lagrangian exactness", 0.0, [](Checker& check) {
        MethodConfig cfg;
        cfg.objective = MethodConfig::Objective::lagrangian;
        cfg.k1 = 1.0;
        cfg.k2_constant = 1.0;

        const KineticModel lin = make_linear2d(2.0);
        check.close(optimize_trajectory(lin, fix(2, 5.0, -1.0), cfg).state(0), 5.0, 1e-8,
                    "linear model, k1 = k2 = 1");

        const KineticModel ds = make_davis_skodje(3.0);
        MethodConfig cfg_ds = cfg;
        cfg_ds.k2 = [](const Vec& z) { return 3.0 / (z(0) + 1.0); };
        check.close(optimize_trajectory(ds, fix(1, 2.0, -1.0), cfg_ds).state(1), 2.0 / 3.0, 1e-6,
                    "Davis-Skodje, k2 = gamma/(z1+1)");

        const KineticModel lin3 = make_linear3d(2.0, 4.0);
        RpvSpec rpv3;
        rpv3.fixed_indices = {1, 3};
        rpv3.fixed_values = Vec::Ones(2);
        rpv3.horizon_t0 = -1.0;
        check.close(optimize_trajectory(lin3, rpv3, cfg).state(1), std::sqrt(2.0), 1e-7,
                    "3-D linear model, k1 = k2 = 1");
    });

    criterion(8, "method property suite", 0.0, [](Checker& check) {
        // Zero-derivative fast-amplitude contraction per order step.
        {
            const KineticModel model = make_linear2d(3.0);
            const auto& fit = model.analytic()->fit_constants;
            const double c2_a = fit(zdp_local(model, fix(2, 5.0), 13).state, 0.0)(1);
            const double c2_b = fit(zdp_local(model, fix(2, 5.0), 14).state, 0.0)(1);
            check.close(std::abs(c2_b / c2_a), 0.25, 1e-8, "amplitude ratio 1/(1+gamma)");
        }
        // Flow-curvature method returns the exact linear SIM.
        {
            const KineticModel model = make_linear2d(2.0);
            const Poi poi = fcm(model, fix(2, 5.0));
            check.require(poi.diag.residual <= 1e-10, "FCM determinant residual <= 1e-10");
            check.close(poi.state(0), 5.0, 1e-9, "FCM linear SIM point");
        }
        // Truncated functional equation: residuals, oracle value, gap decay.
        {
            const FetPoint p = fet(make_davis_skodje(10.0), 2.0);
            check.require(p.residual_functional <= 1e-12, "functional-equation residual");
            check.require(p.residual_truncated <= 1e-12, "truncated-equation residual");
            const double d = 3.0;  // 1 + z1
            const double slope = ((10.0 - 1.0) + 11.0 * 2.0) / ((10.0 - 1.0) * d * d * d);
            const double z2 = (((10.0 - 1.0) * 2.0 + 10.0 * 4.0) / (d * d) + 2.0 * slope) / 10.0;
            check.close(p.z2, z2, 1e-6, "FET value vs elimination oracle");
            const double gap5 = std::abs(fet(make_davis_skodje(5.0), 2.0).z2 - 2.0 / 3.0);
            const double gap50 = std::abs(fet(make_davis_skodje(50.0), 2.0).z2 - 2.0 / 3.0);
            check.require(gap50 < std::abs(p.z2 - 2.0 / 3.0) && std::abs(p.z2 - 2.0 / 3.0) < gap5,
                          "FET-to-SIM distance decreases in gamma");
        }
        // Stretching ratio on the linear SIM.
        {
            const KineticModel model = make_linear2d(2.0);
            Vec z(2);
            z << 3.0, 3.0;
            check.close(stretching_rates(model, z).ratio, 3.0, 1e-10, "r = 1 + gamma on the SIM");
        }
        // Jet derivatives equal iterated matrix powers.
        {
            const double gamma = 2.0;
            const KineticModel model = make_linear2d(gamma);
            Mat A(2, 2);
            A << -1.0 - gamma / 2.0, gamma / 2.0, gamma / 2.0, -1.0 - gamma / 2.0;
            Vec z(2);
            z << 2.0, 1.0;
            const DerivativeStack stack = time_derivatives(model, z, 8);
            Vec expected = z;
            for (int k = 1; k <= 8; ++k) {
                expected = A * expected;
                check.require((stack.deriv(k) - expected).norm() <= 1e-13 * expected.norm(),
                              "jet derivative order " + std::to_string(k));
            }
        }
    });

    if (failures == 0) std::printf("all acceptance criteria passed\n");
    return failures;
}
