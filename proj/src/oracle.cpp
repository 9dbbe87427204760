#include "simkit/oracle.hpp"

#include <cmath>
#include <vector>

namespace simkit::oracle {

namespace {

// One term sign * e^{log_mag} of an exponential sum. Keeping magnitudes in
// log space lets every formula be evaluated relative to its dominant term, so
// limit probes like t0 = -100 or gamma = 1e3 stay inside double range.
struct ExpTerm {
    double sign;
    double log_mag;
};

ExpTerm term(double coeff, double exponent) {
    if (coeff == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
    return {coeff > 0.0 ? 1.0 : -1.0, std::log(std::abs(coeff)) + exponent};
}

double exp_ratio(const std::vector<ExpTerm>& num, const std::vector<ExpTerm>& den) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : num)
        if (t.sign != 0.0) m = std::max(m, t.log_mag);
    for (const auto& t : den)
        if (t.sign != 0.0) m = std::max(m, t.log_mag);
    auto fold = [m](const std::vector<ExpTerm>& ts) {
        double s = 0.0;
        for (const auto& t : ts)
            if (t.sign != 0.0) s += t.sign * std::exp(t.log_mag - m);
        return s;
    };
    return fold(num) / fold(den);
}

}  // namespace

double dm_diagonal(double gamma, int m) {
    return 0.5 * (parity_sign(m) + neg_pow(1.0 + gamma, m));
}

double linear_bvp_poi(double gamma, double t0, double t_f, double K, double z2_tf) {
    if (!(t0 < t_f)) throw std::invalid_argument("linear_bvp_poi: t0 < t_f required");
    const std::vector<ExpTerm> num = {
        term(2.0 * K, (-2.0 - gamma) * t_f + t0),
        term(-2.0 * z2_tf, (-1.0 - gamma) * t_f),
    };
    const std::vector<ExpTerm> den = {
        term(1.0, (-1.0 - gamma) * t_f),
        term(1.0, -t_f - gamma * t0),
    };
    return z2_tf + exp_ratio(num, den);
}

double ds_bvp_poi(double gamma, double t0, double t_f, double K, double z1_tf) {
    if (!(t0 < t_f)) throw std::invalid_argument("ds_bvp_poi: t0 < t_f required");
    const double decay = std::exp(gamma * (t0 - t_f));  // < 1, underflow harmless
    return z1_tf / (z1_tf + 1.0) + K * decay - z1_tf * decay / (z1_tf + std::exp(t0 - t_f));
}

double linear_opt_poi(double gamma, int m, double t0, double t_f, double z2_tf) {
    if (!(t0 < t_f)) throw std::invalid_argument("linear_opt_poi: t0 < t_f required");
    if (m < 1) throw std::invalid_argument("linear_opt_poi: m >= 1 required");
    // xi = (-1-gamma)^{2m-1} < 0; carried as log magnitude with explicit sign.
    const double lg_xi = (2.0 * m - 1.0) * std::log1p(gamma);
    const std::vector<ExpTerm> num = {
        term(2.0, -2.0 * gamma * t_f - 2.0 * t_f),
        term(-2.0, -2.0 * gamma * t_f - 2.0 * t0),
    };
    const std::vector<ExpTerm> den = {
        term(1.0, -2.0 * gamma * t_f - 2.0 * t0),
        term(-1.0, -2.0 * gamma * t_f - 2.0 * t_f),
        {+1.0, lg_xi + (-1.0 - gamma) * 2.0 * t0},  // -xi e^{(-1-gamma)2t0}
        {-1.0, lg_xi + (-1.0 - gamma) * 2.0 * t_f},
    };
    return z2_tf * (1.0 + exp_ratio(num, den));
}

double zdp_nonlocal_linear_poi(double gamma, int m, double t0, double t_f, double z2_tf) {
    if (!(t0 < t_f)) throw std::invalid_argument("zdp_nonlocal_linear_poi: t0 < t_f required");
    if (m < 1) throw std::invalid_argument("zdp_nonlocal_linear_poi: m >= 1 required");
    const std::vector<ExpTerm> num = {
        term(2.0 * parity_sign(m + 1), (-1.0 - gamma) * t_f),
    };
    const std::vector<ExpTerm> den = {
        term(parity_sign(m), (-1.0 - gamma) * t_f),
        {parity_sign(m), m * std::log1p(gamma) - gamma * t0 - t_f},
    };
    return z2_tf * (1.0 + exp_ratio(num, den));
}

LinearAdjointConstants linear_adjoint_constants(double gamma, int m, double t0, double t_f,
                                                double z2_tf) {
    if (!(gamma > 0.0)) throw std::invalid_argument("linear_adjoint_constants: gamma > 0");
    if (m < 1 || !(t0 < t_f)) throw std::invalid_argument("linear_adjoint_constants: need m >= 1, t0 < t_f");

    LinearAdjointConstants k;
    k.gamma = gamma;
    k.m = m;
    k.t0 = t0;
    k.t_f = t_f;
    k.z2_tf = z2_tf;
    k.d_m = dm_diagonal(gamma, m);
    const double s = parity_sign(m);
    k.xi = (2.0 * k.d_m - s) * (2.0 * k.d_m - s) / (1.0 + gamma);

    const auto E = [](double x) { return std::exp(x); };
    const double xi = k.xi;
    const double den = xi * E((-1.0 - gamma) * 2.0 * t0) - E((-1.0 - gamma) * 2.0 * t_f) * (xi + 1.0) +
                       E(-2.0 * gamma * t_f) * E(-2.0 * t0);
    k.c1 = z2_tf * xi * (E(t_f) * E((-1.0 - gamma) * 2.0 * t0) - E((-1.0 - 2.0 * gamma) * t_f)) / den;
    k.c2 = z2_tf * (E((-1.0 - gamma) * t_f) - E((1.0 - gamma) * t_f) * E(-2.0 * t0)) / den;

    const double q = E(gamma * t_f) - E(gamma * t0);
    k.c3 = z2_tf * xi *
           (E(t_f) * E((-4.0 - gamma) * t0) + E((-1.0 - gamma) * t_f) * E(-2.0 * t0) -
            E((1.0 + gamma) * t_f) * E((-2.0 - gamma) * 2.0 * t0) -
            E((-1.0 - 2.0 * gamma) * t_f) * E((-2.0 + gamma) * t0)) /
           (den * q);
    k.c4 = z2_tf * xi *
           (E(t_f) * E((-2.0 - gamma) * 2.0 * t0) - E(-t_f) * E((-1.0 - gamma) * 2.0 * t0) +
            E((-1.0 - gamma) * t_f) * E((-2.0 - gamma) * t0) -
            E((1.0 - gamma) * t_f) * E((-4.0 - gamma) * t0)) /
           (den * q);

    k.hamiltonian = -2.0 * k.c1 * k.c3 - 2.0 * k.c2 * k.c4 * (1.0 + gamma);
    // The POI error term chi matches the direct-optimization formula term for
    // term once each section's own xi convention is substituted.
    k.poi_z1_tf = linear_opt_poi(gamma, m, t0, t_f, z2_tf);
    return k;
}

Vec LinearAdjointConstants::primal(double t) const {
    const double slow = c1 * std::exp(-t);
    const double fast = c2 * std::exp((-1.0 - gamma) * t);
    Vec z(2);
    z << slow + fast, slow - fast;
    return z;
}

Vec LinearAdjointConstants::costate(double t) const {
    const double grow_slow = c3 * std::exp(t);
    const double grow_fast = c4 * std::exp((1.0 + gamma) * t);
    const double part_slow = c1 * std::exp(-t);
    const double part_fast = c2 * std::exp((-1.0 - gamma) * t) * xi;
    Vec lam(2);
    lam << grow_slow + grow_fast + part_slow + part_fast,
        grow_slow - grow_fast + part_slow - part_fast;
    return lam;
}

double hamiltonian_value(double gamma, int m, double t0, double t_f, double z2_tf) {
    return linear_adjoint_constants(gamma, m, t0, t_f, z2_tf).hamiltonian;
}

OracleValue describe(const std::string& formula_id,
                     std::vector<std::pair<std::string, double>> inputs,
                     std::vector<double> values) {
    return OracleValue{std::move(values), formula_id, std::move(inputs)};
}

}  // namespace simkit::oracle
