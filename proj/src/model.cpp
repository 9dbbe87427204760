#include "simkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace simkit {

Polyhedron& Polyhedron::add_row(const Vec& a, double b) {
    const auto rows = normals.rows();
    if (rows == 0) {
        normals.resize(1, a.size());
        offsets.resize(1);
    } else {
        if (a.size() != normals.cols()) throw std::invalid_argument("Polyhedron: row size mismatch");
        normals.conservativeResize(rows + 1, Eigen::NoChange);
        offsets.conservativeResize(rows + 1);
    }
    normals.row(rows) = a.transpose();
    offsets(rows) = b;
    return *this;
}

double Polyhedron::max_violation(const Vec& z) const {
    if (normals.rows() == 0) return -std::numeric_limits<double>::infinity();
    return (normals * z - offsets).maxCoeff();
}

Polyhedron Polyhedron::positivity(int n) {
    Polyhedron p;
    for (int i = 0; i < n; ++i) {
        Vec a = Vec::Zero(n);
        a(i) = -1.0;
        p.add_row(a, 0.0);
    }
    return p;
}

void RpvSpec::validate(int n) const {
    if (fixed_indices.empty()) throw std::invalid_argument("RpvSpec: no fixed components");
    if (static_cast<int>(fixed_indices.size()) != fixed_values.size())
        throw std::invalid_argument("RpvSpec: index/value count mismatch");
    if (static_cast<int>(fixed_indices.size()) >= n)
        throw std::invalid_argument("RpvSpec: no free components left");
    std::vector<int> sorted = fixed_indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("RpvSpec: duplicate fixed index");
    for (int idx : fixed_indices)
        if (idx < 1 || idx > n) throw std::invalid_argument("RpvSpec: index outside 1..n");
    if (horizon_t0 && !(*horizon_t0 < t_star))
        throw std::invalid_argument("RpvSpec: horizon t0 must precede t*");
}

std::vector<int> RpvSpec::free_indices(int n) const {
    std::vector<int> free;
    for (int i = 1; i <= n; ++i)
        if (std::find(fixed_indices.begin(), fixed_indices.end(), i) == fixed_indices.end())
            free.push_back(i);
    return free;
}

Vec RpvSpec::assemble(const Vec& free_values, int n) const {
    Vec z(n);
    const auto free = free_indices(n);
    if (free_values.size() != static_cast<Eigen::Index>(free.size()))
        throw std::invalid_argument("RpvSpec: wrong free-value count");
    for (size_t k = 0; k < fixed_indices.size(); ++k)
        z(fixed_indices[k] - 1) = fixed_values(static_cast<Eigen::Index>(k));
    for (size_t k = 0; k < free.size(); ++k) z(free[k] - 1) = free_values(static_cast<Eigen::Index>(k));
    return z;
}

Vec RpvSpec::gather_free(const Vec& z) const {
    const auto free = free_indices(static_cast<int>(z.size()));
    Vec out(static_cast<Eigen::Index>(free.size()));
    for (size_t k = 0; k < free.size(); ++k) out(static_cast<Eigen::Index>(k)) = z(free[k] - 1);
    return out;
}

Vec RpvSpec::gather_fixed(const Vec& z) const {
    Vec out(static_cast<Eigen::Index>(fixed_indices.size()));
    for (size_t k = 0; k < fixed_indices.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = z(fixed_indices[k] - 1);
    return out;
}

KineticModel::KineticModel(std::string name, int n, RhsFn rhs, JacFn jacobian, JetRhsFn jet_rhs,
                           std::optional<AnalyticBundle> analytic)
    : name_(std::move(name)),
      n_(n),
      rhs_(std::move(rhs)),
      jac_(std::move(jacobian)),
      jet_rhs_(std::move(jet_rhs)),
      analytic_(std::move(analytic)) {
    if (n_ < 1) throw std::invalid_argument("KineticModel: dimension must be positive");
    if (!rhs_ || !jac_) throw std::invalid_argument("KineticModel: rhs and jacobian required");
}

Vec KineticModel::rhs(const Vec& z) const {
    Vec out(n_);
    rhs_(std::span<const double>(z.data(), static_cast<size_t>(n_)),
         std::span<double>(out.data(), static_cast<size_t>(n_)));
    return out;
}

Mat KineticModel::jacobian(const Vec& z) const { return jac_(z); }

void KineticModel::rhs_jet(std::span<const Jet> z, std::span<Jet> out) const {
    if (!jet_rhs_)
        throw std::invalid_argument("model '" + name_ +
                                    "': RHS is not composable over jet arithmetic");
    jet_rhs_(z, out);
}

double KineticModel::param(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end())
        throw std::invalid_argument("model '" + name_ + "' has no parameter '" + key + "'");
    return it->second;
}

namespace {

struct Linear2dRhs {
    double g;
    template <class T>
    void operator()(const T* z, T* dz) const {
        dz[0] = (-1.0 - 0.5 * g) * z[0] + (0.5 * g) * z[1];
        dz[1] = (0.5 * g) * z[0] + (-1.0 - 0.5 * g) * z[1];
    }
};

struct DavisSkodjeRhs {
    double g;
    template <class T>
    void operator()(const T* z, T* dz) const {
        auto one_plus = 1.0 + z[0];
        dz[0] = -z[0];
        dz[1] = -g * z[1] + ((g - 1.0) * z[0] + g * (z[0] * z[0])) / (one_plus * one_plus);
    }
};

struct Linear3dRhs {
    double g1, g2;
    template <class T>
    void operator()(const T* z, T* dz) const {
        const double r = std::sqrt(2.0) * g1 / 4.0;
        dz[0] = (-1.0 - g1 / 4.0 - g2 / 2.0) * z[0] + r * z[1] + (g2 / 2.0 - g1 / 4.0) * z[2];
        dz[1] = r * z[0] + (-1.0 - g1 / 2.0) * z[1] + r * z[2];
        dz[2] = (-g1 / 4.0 + g2 / 2.0) * z[0] + r * z[1] + (-1.0 - g1 / 4.0 - g2 / 2.0) * z[2];
    }
};

}  // namespace

KineticModel make_linear2d(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("linear2d: gamma must be positive");
    Mat A(2, 2);
    A << -1.0 - gamma / 2.0, gamma / 2.0, gamma / 2.0, -1.0 - gamma / 2.0;

    AnalyticBundle bundle;
    bundle.equilibrium = Vec::Zero(2);
    bundle.solution = [gamma](const Vec& c, double t) {
        const double slow = c(0) * std::exp(-t);
        const double fast = c(1) * std::exp((-1.0 - gamma) * t);
        Vec z(2);
        z << slow + fast, slow - fast;
        return z;
    };
    bundle.fit_constants = [gamma](const Vec& z, double t) {
        Vec c(2);
        c << 0.5 * (z(0) + z(1)) * std::exp(t), 0.5 * (z(0) - z(1)) * std::exp((1.0 + gamma) * t);
        return c;
    };
    bundle.sim_rpv_indices = {2};
    bundle.sim_map = [](const Vec& rpv) {
        Vec f(1);
        f << rpv(0);
        return f;
    };

    KineticModel model = make_model("linear2d", 2, Linear2dRhs{gamma},
                                    [A](const Vec&) { return A; }, bundle);
    model.set_param("gamma", gamma);
    return model;
}

KineticModel make_davis_skodje(double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("davis_skodje: gamma must exceed 1");

    AnalyticBundle bundle;
    bundle.equilibrium = Vec::Zero(2);
    bundle.solution = [gamma](const Vec& c, double t) {
        const double z1 = c(0) * std::exp(-t);
        Vec z(2);
        z << z1, c(1) * std::exp(-gamma * t) + c(0) / (c(0) + std::exp(t));
        return z;
    };
    bundle.fit_constants = [gamma](const Vec& z, double t) {
        Vec c(2);
        c << z(0) * std::exp(t), std::exp(gamma * t) * (z(1) - z(0) / (z(0) + 1.0));
        return c;
    };
    bundle.sim_rpv_indices = {1};
    bundle.sim_map = [](const Vec& rpv) {
        Vec f(1);
        f << rpv(0) / (rpv(0) + 1.0);
        return f;
    };

    KineticModel model =
        make_model("davis_skodje", 2, DavisSkodjeRhs{gamma},
                   [gamma](const Vec& z) {
                       Mat J(2, 2);
                       const double d = 1.0 + z(0);
                       J << -1.0, 0.0, ((gamma - 1.0) + (gamma + 1.0) * z(0)) / (d * d * d), -gamma;
                       return J;
                   },
                   bundle);
    model.set_param("gamma", gamma);
    return model;
}

KineticModel make_linear3d(double gamma1, double gamma2) {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
        throw std::invalid_argument("linear3d: gamma1 and gamma2 must be positive");
    const double r = std::sqrt(2.0) * gamma1 / 4.0;
    Mat A(3, 3);
    A << -1.0 - gamma1 / 4.0 - gamma2 / 2.0, r, gamma2 / 2.0 - gamma1 / 4.0,  //
        r, -1.0 - gamma1 / 2.0, r,                                            //
        -gamma1 / 4.0 + gamma2 / 2.0, r, -1.0 - gamma1 / 4.0 - gamma2 / 2.0;

    const double sqrt2 = std::sqrt(2.0);
    AnalyticBundle bundle;
    bundle.equilibrium = Vec::Zero(3);
    bundle.solution = [gamma1, gamma2, sqrt2](const Vec& c, double t) {
        const double a = c(0) * std::exp(-t);
        const double b = c(1) * std::exp((-1.0 - gamma1) * t);
        const double d = c(2) * std::exp((-1.0 - gamma2) * t);
        Vec z(3);
        z << a + b + d, sqrt2 * (a - b), a + b - d;
        return z;
    };
    bundle.fit_constants = [gamma1, gamma2, sqrt2](const Vec& z, double t) {
        const double u = 0.5 * (z(0) + z(2));
        const double v = z(1) / sqrt2;
        Vec c(3);
        c << 0.5 * (u + v) * std::exp(t), 0.5 * (u - v) * std::exp((1.0 + gamma1) * t),
            0.5 * (z(0) - z(2)) * std::exp((1.0 + gamma2) * t);
        return c;
    };
    bundle.sim_rpv_indices = {1, 3};
    bundle.sim_map = [sqrt2](const Vec& rpv) {
        Vec f(1);
        f << (rpv(0) + rpv(1)) / sqrt2;
        return f;
    };

    KineticModel model = make_model("linear3d", 3, Linear3dRhs{gamma1, gamma2},
                                    [A](const Vec&) { return A; }, bundle);
    model.set_param("gamma1", gamma1);
    model.set_param("gamma2", gamma2);
    return model;
}

KineticModel make_model_by_name(const std::string& name,
                                const std::map<std::string, double>& params) {
    auto need = [&](const char* key) {
        auto it = params.find(key);
        if (it == params.end())
            throw std::invalid_argument("model '" + name + "' needs parameter '" + key + "'");
        return it->second;
    };
    if (name == "linear2d") return make_linear2d(need("gamma"));
    if (name == "davis_skodje") return make_davis_skodje(need("gamma"));
    if (name == "linear3d") return make_linear3d(need("gamma1"), need("gamma2"));
    throw std::invalid_argument("unknown model '" + name + "'");
}

Poi analytic_sim_point(const KineticModel& model, const RpvSpec& rpv) {
    const auto& bundle = model.analytic();
    if (!bundle) throw std::invalid_argument("analytic_sim_point: model has no analytic bundle");
    rpv.validate(model.dim());

    std::vector<int> want = bundle->sim_rpv_indices;
    std::vector<int> have = rpv.fixed_indices;
    std::sort(want.begin(), want.end());
    std::sort(have.begin(), have.end());
    if (want != have)
        throw std::invalid_argument(
            "analytic_sim_point: the model's SIM is parameterized by different RPV indices");

    // Feed sim_map in the bundle's canonical index order.
    Vec ordered(static_cast<Eigen::Index>(bundle->sim_rpv_indices.size()));
    for (size_t k = 0; k < bundle->sim_rpv_indices.size(); ++k) {
        const int idx = bundle->sim_rpv_indices[k];
        const auto pos = std::find(rpv.fixed_indices.begin(), rpv.fixed_indices.end(), idx) -
                         rpv.fixed_indices.begin();
        ordered(static_cast<Eigen::Index>(k)) = rpv.fixed_values(static_cast<Eigen::Index>(pos));
    }

    Poi poi;
    poi.method = "analytic_sim";
    poi.state = rpv.assemble(bundle->sim_map(ordered), model.dim());
    poi.diag.converged = true;
    poi.diag.residual = 0.0;
    poi.diag.scaled_residual = 0.0;
    return poi;
}

}  // namespace simkit
