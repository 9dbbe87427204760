#pragma once

#include <limits>
#include <string>

#include "simkit/types.hpp"

namespace simkit {

/// Solver evidence attached to a reconstructed point. `residual` is the raw
/// terminal residual (inf-norm) of the defining equations; `scaled_residual`
/// is the last Newton-step size relative to the iterate, the meaningful
/// backward-error measure when shooting over long horizons amplifies the raw
/// residual scale.
struct PoiDiagnostics {
    double residual = std::numeric_limits<double>::quiet_NaN();
    double scaled_residual = std::numeric_limits<double>::quiet_NaN();
    double objective = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
    double horizon_t0 = std::numeric_limits<double>::quiet_NaN();
    bool left_feasible_set = false;
    std::string note;
};

/// Point of interest: the full reconstructed state at the anchor time t*.
/// Components listed in the RpvSpec carry the fixed values verbatim.
struct Poi {
    Vec state;
    std::string method;
    PoiDiagnostics diag;
};

}  // namespace simkit
