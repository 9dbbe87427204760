#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace simkit {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a solver cannot produce a usable result (divergence,
/// singular systems, infeasibility). Precondition violations use
/// std::invalid_argument instead.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double inf_norm(const Vec& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// (-1)^m without going through std::pow.
inline double parity_sign(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

/// (-base)^m for base > 0, exact sign handling.
inline double neg_pow(double base, int m) {
    return parity_sign(m) * std::pow(base, m);
}

}  // namespace simkit
