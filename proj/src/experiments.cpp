#include "simkit/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "simkit/adjoint.hpp"
#include "simkit/methods.hpp"
#include "simkit/oracle.hpp"

namespace simkit {

namespace {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

KineticModel build_model(const ConfigMap& cfg, const std::string& sweep_var, double sweep_value) {
    const std::string name = cfg.get("model.name");
    std::map<std::string, double> params;
    for (const char* key : {"gamma", "gamma1", "gamma2"})
        if (cfg.has(std::string("model.") + key)) params[key] = cfg.get_double(std::string("model.") + key);
    if (sweep_var == "gamma") params["gamma"] = sweep_value;
    return make_model_by_name(name, params);
}

RpvSpec build_rpv(const ConfigMap& cfg, int n, const std::string& sweep_var, double sweep_value,
                  bool wants_horizon) {
    RpvSpec rpv;
    if (cfg.has("rpv.fixed_index")) {
        rpv.fixed_indices = {cfg.get_int_or("rpv.fixed_index", 0)};
        rpv.fixed_values = Vec::Constant(1, cfg.get_double("rpv.fixed_value"));
    } else {
        std::istringstream idx(cfg.get("rpv.fixed_indices"));
        std::istringstream val(cfg.get("rpv.fixed_values"));
        std::string tok;
        std::vector<double> values;
        while (std::getline(idx, tok, ',')) rpv.fixed_indices.push_back(std::stoi(tok));
        while (std::getline(val, tok, ',')) values.push_back(std::stod(tok));
        rpv.fixed_values = Eigen::Map<Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
    rpv.t_star = cfg.get_double_or("rpv.t_f", 0.0);
    if (sweep_var == "t0")
        rpv.horizon_t0 = sweep_value;
    else if (cfg.has("method.t0"))
        rpv.horizon_t0 = cfg.get_double("method.t0");
    if (wants_horizon && !rpv.horizon_t0)
        throw std::invalid_argument("method needs a t0 (sweep it or set method.t0)");
    rpv.validate(n);
    return rpv;
}

IvpOptions build_ivp(const ConfigMap& cfg) {
    IvpOptions ivp;
    ivp.rel_tol = cfg.get_double_or("method.rel_tol", 1e-10);
    ivp.abs_tol = cfg.get_double_or("method.abs_tol", 1e-12);
    if (cfg.get_or("method.integrator", "rk45") == "sdirk2") ivp.method = IvpMethod::sdirk2;
    return ivp;
}

std::function<double(const Vec&)> build_k2(const ConfigMap& cfg, double gamma) {
    const std::string spec = cfg.get_or("method.k2", "1.0");
    if (spec == "gamma_over_1_plus_z1")
        return [gamma](const Vec& z) { return gamma / (z(0) + 1.0); };
    const double value = std::stod(spec);
    return [value](const Vec&) { return value; };
}

int method_order(const ConfigMap& cfg, const std::string& sweep_var, double sweep_value) {
    if (sweep_var == "m") return static_cast<int>(std::lround(sweep_value));
    return cfg.get_int_or("method.m", 1);
}

double sim_free_value(const KineticModel& model, const RpvSpec& rpv) {
    const Poi sim = analytic_sim_point(model, rpv);
    return rpv.gather_free(sim.state)(0);
}

struct RowResult {
    std::vector<double> cells;
    bool converged = true;
    std::string error;
};

struct Assertions {
    double max_abs_error = std::numeric_limits<double>::quiet_NaN();
    double max_h_drift = std::numeric_limits<double>::quiet_NaN();
    double max_h_rel_error = std::numeric_limits<double>::quiet_NaN();
    double monotone_to = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::tuple<std::string, double, double>> last_row;  // column, expected, tol
};

Assertions parse_asserts(const ConfigMap& cfg) {
    Assertions a;
    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("assert.", 0) != 0) continue;
        const std::string name = key.substr(7);
        if (name == "max_abs_error") {
            a.max_abs_error = std::stod(value);
        } else if (name == "max_h_drift") {
            a.max_h_drift = std::stod(value);
        } else if (name == "max_h_rel_error") {
            a.max_h_rel_error = std::stod(value);
        } else if (name == "monotone_to") {
            a.monotone_to = std::stod(value);
        } else {
            std::istringstream in(value);
            double expected = 0.0, tol = 0.0;
            if (!(in >> expected >> tol))
                throw std::invalid_argument("assert." + name + ": expected '<value> <tol>'");
            a.last_row.emplace_back(name, expected, tol);
        }
    }
    return a;
}

}  // namespace

std::string ExperimentTable::to_csv() const {
    std::string out = "# config-hash: ";
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash));
    out += hex;
    out += '\n';
    for (size_t c = 0; c < columns.size(); ++c) {
        out += columns[c];
        if (c + 1 < columns.size()) out += ',';
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            out += format_double(row[c]);
            if (c + 1 < row.size()) out += ',';
        }
        out += '\n';
    }
    return out;
}

double ExperimentTable::cell(size_t row, const std::string& column) const {
    for (size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == column) return rows.at(row).at(c);
    throw std::invalid_argument("no column '" + column + "'");
}

ExperimentTable run_experiment(const ConfigMap& cfg) {
    const std::string method = cfg.get("method.name");
    const bool timing = cfg.get_bool_or("output.timing", false);
    const std::string oracle_kind = cfg.get_or("output.oracle", "auto");

    ExperimentTable table;
    table.config_hash = cfg.hash();

    // --- single-row methods -------------------------------------------------
    if (method == "min_t0") {
        const KineticModel model = build_model(cfg, "", 0.0);
        const int m = cfg.get_int_or("method.m", 2);
        const double z2_0 = cfg.get_double("method.z2_0");
        const Polyhedron poly =
            mint0_polyhedron(cfg.get_double("method.n1"), cfg.get_double("method.b1"),
                             cfg.get_double("method.n2"), cfg.get_double("method.b2"));
        const auto window = cfg.get_or("method.window", "at_t0") == "along_trajectory"
                                ? Mint0ConstraintWindow::along_trajectory
                                : Mint0ConstraintWindow::at_t0;

        const auto tic = std::chrono::steady_clock::now();
        const Mint0Result res = min_feasible_t0(model, m, z2_0, poly, 0.0, window);

        RpvSpec rpv;
        rpv.fixed_indices = {2};
        rpv.fixed_values = Vec::Constant(1, z2_0);
        const Poi local = local_min_derivative(model, rpv, m);
        const double wall =
            timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               tic)
                         .count()
                   : 0.0;

        table.columns = {"t0_min", "z1_0", "z2_0", "r", "z1_loc", "r_loc", "iterations", "wall_ms"};
        table.rows.push_back({res.t0_min, res.poi.state(0), res.poi.state(1), res.ratio,
                              local.state(0), local.state(0) / z2_0,
                              static_cast<double>(local.diag.iterations), wall});
    } else {
        // --- swept point methods --------------------------------------------
        std::string sweep_var = cfg.get_or("sweep.variable", "");
        std::vector<double> sweep_values;
        if (sweep_var.empty()) {
            sweep_values.push_back(0.0);  // single run; value unused
        } else {
            const double from = cfg.get_double("sweep.from");
            const double to = cfg.get_double("sweep.to");
            const int count = cfg.get_int_or("sweep.count", 10);
            if (count < 1 || !std::isfinite(from) || !std::isfinite(to))
                throw std::invalid_argument("sweep: need finite from/to and count >= 1");
            for (int i = 0; i < count; ++i)
                sweep_values.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
        }

        const int n_probe = build_model(cfg, "", 0.0).dim();
        {
            RpvSpec probe_rpv = build_rpv(cfg, n_probe, sweep_var, sweep_values.front(), false);
            table.free_column = "z" + std::to_string(probe_rpv.free_indices(n_probe).front());
        }
        const bool is_adjoint = method == "adjoint_bvp";
        table.columns.clear();
        if (!sweep_var.empty()) table.columns.push_back(sweep_var);
        for (int i = 1; i <= n_probe; ++i) table.columns.push_back("z" + std::to_string(i));
        table.columns.insert(table.columns.end(), {"oracle", "abs_error"});
        if (is_adjoint) table.columns.insert(table.columns.end(), {"H", "H_oracle", "H_drift"});
        table.columns.insert(table.columns.end(), {"iterations", "wall_ms"});

        std::vector<RowResult> results(sweep_values.size());
        auto run_row = [&](size_t idx) {
            RowResult& row = results[idx];
            const double sv = sweep_values[idx];
            try {
                const auto tic = std::chrono::steady_clock::now();
                const KineticModel model = build_model(cfg, sweep_var, sv);
                const double gamma =
                    model.params().count("gamma") ? model.param("gamma") : 0.0;
                const bool wants_horizon = method == "bvp_reconstruct" ||
                                           method == "zdp_nonlocal" ||
                                           method == "optimize_trajectory" || is_adjoint;
                const RpvSpec rpv = build_rpv(cfg, model.dim(), sweep_var, sv, wants_horizon);
                const int m = method_order(cfg, sweep_var, sv);
                const IvpOptions ivp = build_ivp(cfg);

                Poi poi;
                double H = std::numeric_limits<double>::quiet_NaN();
                double H_oracle = std::numeric_limits<double>::quiet_NaN();
                double H_drift = std::numeric_limits<double>::quiet_NaN();

                if (method == "bvp_reconstruct") {
                    const int n_free = model.dim() - static_cast<int>(rpv.fixed_indices.size());
                    const Vec K = Vec::Constant(n_free, cfg.get_double_or("method.K", 0.0));
                    poi = bvp_reconstruct(model, rpv, K, ivp);
                } else if (method == "zdp_nonlocal") {
                    poi = zdp_nonlocal(model, rpv, m, ivp);
                } else if (method == "zdp_local") {
                    poi = zdp_local(model, rpv, m);
                } else if (method == "qssa") {
                    poi = qssa(model, rpv);
                } else if (method == "fcm") {
                    poi = fcm(model, rpv);
                } else if (method == "local_min_derivative") {
                    poi = local_min_derivative(model, rpv, m);
                } else if (method == "optimize_trajectory") {
                    MethodConfig mc;
                    mc.derivative_order = m;
                    const std::string obj = cfg.get_or("method.objective", "derivative_norm");
                    if (obj == "lagrangian")
                        mc.objective = MethodConfig::Objective::lagrangian;
                    else if (obj == "endpoint_derivative_norm")
                        mc.objective = MethodConfig::Objective::endpoint_derivative_norm;
                    mc.k1 = cfg.get_double_or("method.k1", 1.0);
                    mc.k2 = build_k2(cfg, gamma);
                    poi = optimize_trajectory(model, rpv, mc);
                } else if (is_adjoint) {
                    const Phi phi = model.name() == "linear2d"
                                        ? make_linear_derivative_phi(gamma, m)
                                        : make_derivative_norm_phi(model, m);
                    const AdjointBvpResult sol =
                        solve_adjoint_bvp(model, rpv, *rpv.horizon_t0, rpv.t_star, phi, ivp);
                    poi = sol.poi;
                    const auto hs = hamiltonian_along(model, phi, sol);
                    H = hs.front();
                    double drift = 0.0;
                    for (const double h : hs)
                        drift = std::max(drift, std::abs(h - hs.front()) / (1.0 + std::abs(hs.front())));
                    H_drift = drift;
                    if (model.name() == "linear2d")
                        H_oracle = oracle::hamiltonian_value(gamma, m, *rpv.horizon_t0, rpv.t_star,
                                                             rpv.fixed_values(0));
                } else {
                    throw std::invalid_argument("unknown method '" + method + "'");
                }

                double oracle_value = std::numeric_limits<double>::quiet_NaN();
                if (oracle_kind != "none") {
                    const double t0 = rpv.horizon_t0.value_or(0.0);
                    if (oracle_kind == "sim") {
                        oracle_value = sim_free_value(model, rpv);
                    } else if (method == "bvp_reconstruct" && model.name() == "linear2d") {
                        oracle_value =
                            oracle::linear_bvp_poi(gamma, t0, rpv.t_star,
                                                   cfg.get_double_or("method.K", 0.0),
                                                   rpv.fixed_values(0));
                    } else if (method == "bvp_reconstruct" && model.name() == "davis_skodje") {
                        oracle_value = oracle::ds_bvp_poi(gamma, t0, rpv.t_star,
                                                          cfg.get_double_or("method.K", 0.0),
                                                          rpv.fixed_values(0));
                    } else if (method == "zdp_nonlocal" && model.name() == "linear2d") {
                        oracle_value = oracle::zdp_nonlocal_linear_poi(gamma, m, t0, rpv.t_star,
                                                                       rpv.fixed_values(0));
                    } else if ((method == "optimize_trajectory" || is_adjoint) &&
                               model.name() == "linear2d" &&
                               cfg.get_or("method.objective", "derivative_norm") ==
                                   "derivative_norm") {
                        oracle_value =
                            oracle::linear_opt_poi(gamma, m, t0, rpv.t_star, rpv.fixed_values(0));
                    } else if (method == "optimize_trajectory") {
                        oracle_value = sim_free_value(model, rpv);
                    }
                }
                const double free_value = rpv.gather_free(poi.state)(0);
                const double abs_error = std::abs(free_value - oracle_value);

                const double wall =
                    timing ? std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - tic)
                                 .count()
                           : 0.0;

                row.cells.clear();
                if (!sweep_var.empty()) row.cells.push_back(sv);
                for (int i = 0; i < model.dim(); ++i) row.cells.push_back(poi.state(i));
                row.cells.insert(row.cells.end(), {oracle_value, abs_error});
                if (is_adjoint) row.cells.insert(row.cells.end(), {H, H_oracle, H_drift});
                row.cells.insert(row.cells.end(),
                                 {static_cast<double>(poi.diag.iterations), wall});
                row.converged = poi.diag.converged;
                if (!poi.diag.converged) row.error = "not converged";
            } catch (const std::exception& e) {
                row.converged = false;
                row.error = e.what();
                row.cells.assign(table.columns.size(), std::numeric_limits<double>::quiet_NaN());
                if (!sweep_var.empty()) row.cells[0] = sv;
            }
        };

        unsigned threads = static_cast<unsigned>(cfg.get_int_or("runtime.threads", 0));
        if (threads == 0)
            threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                      static_cast<unsigned>(sweep_values.size())));
        if (threads <= 1 || sweep_values.size() <= 1) {
            for (size_t i = 0; i < sweep_values.size(); ++i) run_row(i);
        } else {
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&]() {
                    for (size_t i = next.fetch_add(1); i < sweep_values.size();
                         i = next.fetch_add(1))
                        run_row(i);
                });
            for (auto& th : pool) th.join();
        }

        for (size_t i = 0; i < results.size(); ++i) {
            table.rows.push_back(results[i].cells);
            if (!results[i].converged && table.all_converged) {
                table.all_converged = false;
                table.failure = "sweep point " + std::to_string(i) + " (" + sweep_var + " = " +
                                format_double(sweep_values[i]) + "): " + results[i].error;
            }
        }
    }

    // --- assertions ----------------------------------------------------------
    const Assertions asserts = parse_asserts(cfg);
    auto fail = [&](const std::string& why) {
        if (table.asserts_passed) {
            table.asserts_passed = false;
            table.failure = why;
        }
    };
    if (std::isfinite(asserts.max_abs_error)) {
        for (size_t r = 0; r < table.rows.size(); ++r) {
            const double err = table.cell(r, "abs_error");
            if (!(err <= asserts.max_abs_error))
                fail("row " + std::to_string(r) + ": abs_error " + format_double(err) + " > " +
                     format_double(asserts.max_abs_error));
        }
    }
    if (std::isfinite(asserts.monotone_to) && !table.rows.empty()) {
        // Distance of the free component to the target shrinks row over row.
        const std::string free_col = table.free_column;
        for (size_t r = 1; r < table.rows.size(); ++r) {
            const double prev = std::abs(table.cell(r - 1, free_col) - asserts.monotone_to);
            const double cur = std::abs(table.cell(r, free_col) - asserts.monotone_to);
            if (cur > prev * (1.0 + 1e-12) + 1e-15)
                fail("convergence toward " + format_double(asserts.monotone_to) +
                     " is not monotone at row " + std::to_string(r));
        }
    }
    if (std::isfinite(asserts.max_h_drift)) {
        for (size_t r = 0; r < table.rows.size(); ++r)
            if (!(table.cell(r, "H_drift") <= asserts.max_h_drift))
                fail("row " + std::to_string(r) + ": H_drift exceeds bound");
    }
    if (std::isfinite(asserts.max_h_rel_error)) {
        for (size_t r = 0; r < table.rows.size(); ++r) {
            const double h = table.cell(r, "H"), ho = table.cell(r, "H_oracle");
            if (!(std::abs(h - ho) / (1.0 + std::abs(ho)) <= asserts.max_h_rel_error))
                fail("row " + std::to_string(r) + ": |H - H_oracle| exceeds bound");
        }
    }
    for (const auto& [column, expected, tol] : asserts.last_row) {
        const double got = table.cell(table.rows.size() - 1, column);
        if (!(std::abs(got - expected) <= tol))
            fail(column + " = " + format_double(got) + ", expected " + format_double(expected) +
                 " +- " + format_double(tol));
    }
    return table;
}

namespace {

const std::map<std::string, std::string>& presets_impl() {
    static const std::map<std::string, std::string> presets = {
        {"fig1", R"(# Boundary-value reconstruction on the linear model, weak spectral gap.
[model]
name = linear2d
gamma = 0.2

[rpv]
fixed_index = 2
fixed_value = 5.0
t_f = 0.0

[method]
name = bvp_reconstruct
K = 0.0

[sweep]
variable = t0
from = -2.0
to = -20.0
count = 10

[assert]
max_abs_error = 1e-6
monotone_to = 5.0
)"},
        {"fig2", R"(# Boundary-value reconstruction on the linear model, strong spectral gap.
[model]
name = linear2d
gamma = 2.0

[rpv]
fixed_index = 2
fixed_value = 5.0
t_f = 0.0

[method]
name = bvp_reconstruct
K = 0.0

[sweep]
variable = t0
from = -2.0
to = -20.0
count = 10

[assert]
max_abs_error = 1e-6
monotone_to = 5.0
)"},
        {"fig3", R"(# Boundary-value reconstruction on the Davis-Skodje model, gamma = 1.2.
[model]
name = davis_skodje
gamma = 1.2

[rpv]
fixed_index = 1
fixed_value = 2.0
t_f = 0.0

[method]
name = bvp_reconstruct
K = 0.0

[sweep]
variable = t0
from = -1.0
to = -5.0
count = 9

[assert]
max_abs_error = 1e-6
monotone_to = 0.6666666666666666
)"},
        {"fig4", R"(# Boundary-value reconstruction on the Davis-Skodje model, gamma = 3.0.
[model]
name = davis_skodje
gamma = 3.0

[rpv]
fixed_index = 1
fixed_value = 2.0
t_f = 0.0

[method]
name = bvp_reconstruct
K = 0.0

[sweep]
variable = t0
from = -1.0
to = -5.0
count = 9

[assert]
max_abs_error = 1e-6
monotone_to = 0.6666666666666666
)"},
        {"mint0", R"(# Minimal feasible horizon on the linear model (worked polyhedron example).
[model]
name = linear2d
gamma = 1.0

[method]
name = min_t0
m = 2
z2_0 = 3.0
n1 = -2.0
b1 = 122.0
n2 = -0.25
b2 = 111.0

[output]
oracle = none

[assert]
t0_min = -2.6056 1e-3
z1_0 = 2.9980 5e-4
r = 0.9993 1e-4
z1_loc = 2.6471 5e-4
r_loc = 0.8824 1e-4
)"},
        {"hamiltonian", R"(# Primal-dual solve: POI vs the closed form, Hamiltonian constancy and growth.
[model]
name = linear2d
gamma = 2.0

[rpv]
fixed_index = 2
fixed_value = 5.0
t_f = 0.0

[method]
name = adjoint_bvp
m = 2

[sweep]
variable = t0
from = -2.0
to = -8.0
count = 4

[assert]
max_abs_error = 5e-6
max_h_drift = 1e-6
max_h_rel_error = 1e-6
)"},
        {"lagrangian-exact", R"(# Generalized Lagrangian objective k1 = k2 = 1: exact SIM at finite horizons.
[model]
name = linear2d
gamma = 2.0

[rpv]
fixed_index = 2
fixed_value = 5.0
t_f = 0.0

[method]
name = optimize_trajectory
objective = lagrangian
k1 = 1.0
k2 = 1.0

[sweep]
variable = t0
from = -0.5
to = -2.0
count = 4

[output]
oracle = sim

[assert]
max_abs_error = 1e-8
)"},
    };
    return presets;
}

}  // namespace

const std::map<std::string, std::string>& preset_texts() { return presets_impl(); }

ConfigMap preset_config(const std::string& name) {
    const auto& presets = presets_impl();
    auto it = presets.find(name);
    if (it == presets.end()) {
        std::string known;
        for (const auto& [k, _] : presets) known += (known.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown preset '" + name + "' (available: " + known + ")");
    }
    return ConfigMap::parse_text(it->second);
}

std::string portrait_csv(const KineticModel& model, int grid, double t_max, double box,
                         int samples) {
    if (model.dim() != 2) throw std::invalid_argument("portrait: planar models only");
    if (grid < 1 || samples < 2) throw std::invalid_argument("portrait: bad grid/samples");

    IvpOptions ivp;
    ivp.rel_tol = 1e-9;
    ivp.abs_tol = 1e-12;

    std::string out = "# portrait: " + model.name();
    for (const auto& [k, v] : model.params()) out += " " + k + "=" + format_double(v);
    out += "\nseries,sample,t,z1,z2\n";

    int series = 0;
    auto emit_trajectory = (([&](const Vec& z0) {
        const Trajectory traj = integrate(model, z0, 0.0, t_max, ivp);
        for (int s = 0; s < samples; ++s) {
            const double t = t_max * s / (samples - 1);
            const Vec z = traj.eval(t);
            out += "traj_" + std::to_string(series) + "," + std::to_string(s) + "," +
                   format_double(t) + "," + format_double(z(0)) + "," + format_double(z(1)) + "\n";
        }
        ++series;
    }));

    for (int i = 0; i < grid; ++i) {
        const double frac = (i + 0.5) / grid;
        Vec top(2), right(2);
        top << box * frac, box;
        right << box, box * frac;
        emit_trajectory(top);
        emit_trajectory(right);
    }

    // Analytic SIM polyline over the same window.
    const auto& bundle = model.analytic();
    if (bundle) {
        for (int s = 0; s < samples; ++s) {
            const double z1 = box * s / (samples - 1);
            const Vec free = bundle->sim_map(Vec::Constant(1, model.name() == "linear2d"
                                                                  ? z1  // parameterized by z2
                                                                  : z1));
            double x = z1, y = free(0);
            if (model.name() == "linear2d") {
                // canonical parameterization fixes z2; the curve is z1 = z2
                x = free(0);
                y = z1;
            }
            out += "sim," + std::to_string(s) + ",0," + format_double(x) + "," + format_double(y) +
                   "\n";
        }
    }
    return out;
}

}  // namespace simkit
