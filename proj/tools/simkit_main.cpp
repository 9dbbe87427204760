#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simkit/experiments.hpp"
#include "simkit/model.hpp"

namespace {

int write_or_print(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 1;
    }
    out << text;
    return 0;
}

int finish_run(const simkit::ExperimentTable& table, const std::string& out_path) {
    const int io = write_or_print(table.to_csv(), out_path);
    if (io != 0) return io;
    if (!table.ok()) {
        std::cerr << "FAILED: " << table.failure << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simkit: slow invariant manifold reconstruction experiments"};
    app.require_subcommand(1);

    std::string config_path, out_path, preset_name, portrait_model;
    std::vector<std::string> overrides;
    double gamma = 2.0, gamma2 = 0.0, t_max = 10.0, box = 5.0;
    int grid = 5, samples = 120;

    auto* run = app.add_subcommand("run", "run an experiment config file");
    run->add_option("config", config_path, "config file (key = value with [sections])")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "override a key, e.g. --set model.gamma=0.5");
    run->add_option("--out", out_path, "write CSV here instead of stdout");

    auto* preset = app.add_subcommand("preset", "run a built-in experiment preset");
    preset->add_option("name", preset_name, "fig1|fig2|fig3|fig4|mint0|hamiltonian|lagrangian-exact")
        ->required();
    preset->add_option("--set", overrides, "override a key on top of the preset");
    preset->add_option("--out", out_path, "write CSV here instead of stdout");

    auto* portrait = app.add_subcommand("portrait", "phase portrait + SIM polyline CSV");
    portrait->add_option("model", portrait_model, "linear2d | davis_skodje")->required();
    portrait->add_option("--gamma", gamma, "spectral-gap parameter");
    portrait->add_option("--gamma2", gamma2, "second gap parameter (linear3d)");
    portrait->add_option("--grid", grid, "trajectories per box edge");
    portrait->add_option("--tmax", t_max, "integration horizon");
    portrait->add_option("--box", box, "phase-space box size");
    portrait->add_option("--samples", samples, "samples per polyline");
    portrait->add_option("--out", out_path, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *preset) {
            simkit::ConfigMap cfg = *run ? simkit::ConfigMap::parse_file(config_path)
                                         : simkit::preset_config(preset_name);
            for (const auto& o : overrides) cfg.apply_override(o);
            return finish_run(simkit::run_experiment(cfg), out_path);
        }
        if (*portrait) {
            std::map<std::string, double> params{{"gamma", gamma}};
            if (gamma2 > 0.0) {
                params = {{"gamma1", gamma}, {"gamma2", gamma2}};
            }
            const simkit::KineticModel model = simkit::make_model_by_name(portrait_model, params);
            return write_or_print(simkit::portrait_csv(model, grid, t_max, box, samples), out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
