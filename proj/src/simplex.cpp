#include "simkit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace simkit {

namespace {

Vec clamp_to_bounds(Vec x, const std::optional<std::pair<Vec, Vec>>& bounds) {
    if (bounds)
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x(i) = std::clamp(x(i), bounds->first(i), bounds->second(i));
    return x;
}

}  // namespace

MinimizeResult minimize(const std::function<double(const Vec&)>& objective, Vec x0,
                        const MinimizeOptions& opts) {
    const Eigen::Index n = x0.size();
    if (n == 0) throw std::invalid_argument("minimize: empty decision vector");
    x0 = clamp_to_bounds(std::move(x0), opts.bounds);

    int evals = 0;
    auto f = [&](const Vec& x) {
        ++evals;
        return objective(x);
    };

    // Deterministic initial simplex: x0 plus one displaced vertex per
    // coordinate (flipped inward when a bound is in the way).
    std::vector<Vec> xs;
    std::vector<double> fs;
    xs.push_back(x0);
    fs.push_back(f(x0));
    if (!std::isfinite(fs[0])) throw std::invalid_argument("minimize: objective not finite at x0");
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec v = x0;
        double step = opts.initial_step * (1.0 + std::abs(x0(i)));
        if (opts.bounds && x0(i) + step > opts.bounds->second(i)) step = -step;
        v(i) += step;
        v = clamp_to_bounds(std::move(v), opts.bounds);
        xs.push_back(v);
        fs.push_back(f(v));
    }

    const size_t np = xs.size();
    std::vector<size_t> order(np);
    auto sort_order = [&]() {
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return fs[a] < fs[b]; });
    };

    MinimizeResult result;
    bool converged = false;
    while (evals < opts.max_evaluations) {
        sort_order();
        const size_t lo = order.front(), hi = order.back(), second_hi = order[np - 2];

        double size = 0.0;
        for (size_t k = 0; k < np; ++k) size = std::max(size, inf_norm(xs[k] - xs[lo]));
        if (size <= opts.tol * (1.0 + inf_norm(xs[lo]))) {
            converged = true;
            break;
        }

        Vec centroid = Vec::Zero(n);
        for (size_t k = 0; k < np; ++k)
            if (k != hi) centroid += xs[k];
        centroid /= static_cast<double>(np - 1);

        auto trial = [&](double coeff) {
            return clamp_to_bounds(centroid + coeff * (centroid - xs[hi]), opts.bounds);
        };

        const Vec xr = trial(1.0);
        const double fr = f(xr);
        if (fr < fs[lo]) {
            const Vec xe = trial(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                xs[hi] = xe;
                fs[hi] = fe;
            } else {
                xs[hi] = xr;
                fs[hi] = fr;
            }
        } else if (fr < fs[second_hi]) {
            xs[hi] = xr;
            fs[hi] = fr;
        } else {
            const Vec xc = trial(fr < fs[hi] ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fs[hi])) {
                xs[hi] = xc;
                fs[hi] = fc;
            } else {  // shrink toward the best vertex
                for (size_t k = 0; k < np; ++k) {
                    if (k == lo) continue;
                    xs[k] = clamp_to_bounds(xs[lo] + 0.5 * (xs[k] - xs[lo]), opts.bounds);
                    fs[k] = f(xs[k]);
                }
            }
        }
    }

    sort_order();
    result.x = xs[order.front()];
    result.value = fs[order.front()];
    result.converged = converged;

    if (opts.gradient_polish) {
        // Central-difference steepest descent with backtracking; refines the
        // simplex result when the objective is smooth enough to warrant it.
        Vec x = result.x;
        double fx = result.value;
        for (int it = 0; it < opts.polish_iterations && evals < opts.max_evaluations; ++it) {
            Vec g(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double h = 1e-6 * (1.0 + std::abs(x(i)));
                Vec xp = x, xm = x;
                xp(i) += h;
                xm(i) -= h;
                g(i) = (f(xp) - f(xm)) / (2.0 * h);
            }
            const double gn = inf_norm(g);
            if (gn <= opts.tol) break;
            double alpha = 1.0 / std::max(1.0, gn);
            bool improved = false;
            for (int back = 0; back < 40; ++back) {
                const Vec xt = clamp_to_bounds(x - alpha * g, opts.bounds);
                const double ft = f(xt);
                if (ft < fx) {
                    x = xt;
                    fx = ft;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!improved) break;
        }
        if (fx < result.value) {
            result.x = x;
            result.value = fx;
        }
    }

    result.evaluations = evals;
    return result;
}

}  // namespace simkit
