#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "simkit/config.hpp"
#include "simkit/model.hpp"

namespace simkit {

/// One experiment's output: a numeric table plus convergence/assertion
/// verdicts. to_csv() renders UTF-8 CSV with a leading comment line carrying
/// the config hash; doubles are printed with 17 significant digits.
struct ExperimentTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::uint64_t config_hash = 0;
    std::string free_column;  // z-column of the reconstructed (non-RPV) component
    bool all_converged = true;
    bool asserts_passed = true;
    std::string failure;  // first failing sweep point or assertion

    std::string to_csv() const;
    bool ok() const { return all_converged && asserts_passed; }
    double cell(size_t row, const std::string& column) const;
};

/// Runs the experiment described by the config (model + method + sweep +
/// assertions). Sweep points execute in a worker pool; rows are ordered by
/// sweep value.
ExperimentTable run_experiment(const ConfigMap& cfg);

/// Built-in experiment configs, also shipped under presets/.
const std::map<std::string, std::string>& preset_texts();
ConfigMap preset_config(const std::string& name);

/// Trajectory fan plus the analytic SIM polyline of a planar model, as CSV
/// (columns: series, sample, t, z1, z2).
std::string portrait_csv(const KineticModel& model, int grid = 5, double t_max = 10.0,
                         double box = 5.0, int samples = 120);

}  // namespace simkit
