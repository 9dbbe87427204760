#include <doctest.h>

#include <fstream>
#include <sstream>

#include "simkit/experiments.hpp"
#include "simkit/model.hpp"

using namespace simkit;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_SUITE("experiments") {

    TEST_CASE("config parsing, overrides, and hashing") {
        const std::string text = R"(
# comment
[model]
name = linear2d   ; trailing comment
gamma = 2.0

[sweep]
variable = t0
)";
        ConfigMap cfg = ConfigMap::parse_text(text);
        CHECK(cfg.get("model.name") == "linear2d");
        CHECK(cfg.get_double("model.gamma") == 2.0);
        CHECK(cfg.get_or("sweep.count", "10") == "10");
        CHECK_THROWS_AS(cfg.get("missing.key"), std::invalid_argument);

        const std::uint64_t before = cfg.hash();
        cfg.apply_override("model.gamma=0.5");
        CHECK(cfg.get_double("model.gamma") == 0.5);
        CHECK(cfg.hash() != before);

        // Canonical form is order-independent, so the hash is stable.
        ConfigMap again = ConfigMap::parse_text("[sweep]\nvariable=t0\n[model]\ngamma = 0.5\nname=linear2d\n");
        CHECK(again.hash() == cfg.hash());

        CHECK_THROWS_AS(ConfigMap::parse_text("[unterminated\n"), std::invalid_argument);
        CHECK_THROWS_AS(ConfigMap::parse_text("no equals sign\n"), std::invalid_argument);
    }

    TEST_CASE("preset inventory is complete and the shipped files match") {
        const auto& presets = preset_texts();
        for (const char* name :
             {"fig1", "fig2", "fig3", "fig4", "mint0", "hamiltonian", "lagrangian-exact"}) {
            REQUIRE(presets.count(name) == 1);
            const std::string path = std::string(SIMKIT_SOURCE_DIR) + "/presets/" + name + ".cfg";
            CHECK(read_file(path) == presets.at(name));
        }
        CHECK(presets.size() == 7);
        CHECK_THROWS_AS(preset_config("fig9"), std::invalid_argument);
    }

    TEST_CASE("fig4 preset: converged, accurate, monotone") {
        const ExperimentTable table = run_experiment(preset_config("fig4"));
        CHECK(table.ok());
        CHECK(table.rows.size() == 9);
        CHECK(table.free_column == "z2");
        for (size_t r = 0; r < table.rows.size(); ++r)
            CHECK(table.cell(r, "abs_error") <= 1e-6);
        CHECK(table.cell(8, "z2") == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    }

    TEST_CASE("mint0 preset carries the worked-example values") {
        const ExperimentTable table = run_experiment(preset_config("mint0"));
        CHECK(table.ok());
        REQUIRE(table.rows.size() == 1);
        CHECK(table.cell(0, "t0_min") == doctest::Approx(-2.6056).epsilon(1e-3));
        CHECK(table.cell(0, "r") == doctest::Approx(0.9993).epsilon(1e-4));
        CHECK(table.cell(0, "r_loc") == doctest::Approx(0.8824).epsilon(1e-4));
    }

    TEST_CASE("identical configs produce identical CSV bytes") {
        const ExperimentTable a = run_experiment(preset_config("fig4"));
        const ExperimentTable b = run_experiment(preset_config("fig4"));
        CHECK(a.to_csv() == b.to_csv());
        CHECK(a.to_csv().rfind("# config-hash: ", 0) == 0);
    }

    TEST_CASE("CSV layout: 17 significant digits, header matches rows") {
        const ExperimentTable table = run_experiment(preset_config("mint0"));
        const std::string csv = table.to_csv();
        std::istringstream in(csv);
        std::string comment, header, row;
        std::getline(in, comment);
        std::getline(in, header);
        std::getline(in, row);
        CHECK(comment.rfind("# config-hash:", 0) == 0);
        CHECK(std::count(header.begin(), header.end(), ',') ==
              std::count(row.begin(), row.end(), ','));
        CHECK(row.find("2.6055998") != std::string::npos);  // full precision survives
    }

    TEST_CASE("failed assertions and failed solves surface in the exit status") {
        ConfigMap impossible = preset_config("fig4");
        impossible.apply_override("assert.max_abs_error=1e-18");
        const ExperimentTable t1 = run_experiment(impossible);
        CHECK(t1.all_converged);
        CHECK(!t1.asserts_passed);
        CHECK(!t1.ok());
        CHECK(!t1.failure.empty());

        ConfigMap broken = preset_config("fig4");
        broken.apply_override("sweep.variable=gamma");  // sweeps into gamma <= 1
        broken.apply_override("sweep.from=3.0");
        broken.apply_override("sweep.to=0.5");
        broken.apply_override("sweep.count=3");
        broken.apply_override("method.t0=-1.0");
        const ExperimentTable t2 = run_experiment(broken);
        CHECK(!t2.all_converged);
        CHECK(!t2.failure.empty());

        // Configuration errors (as opposed to solve failures) throw.
        ConfigMap bad_model = preset_config("fig4");
        bad_model.apply_override("model.gamma=0.5");
        CHECK_THROWS_AS(run_experiment(bad_model), std::invalid_argument);
    }

    TEST_CASE("single-point run without a sweep section") {
        ConfigMap cfg = ConfigMap::parse_text(R"(
[model]
name = linear2d
gamma = 2.0
[rpv]
fixed_index = 2
fixed_value = 5.0
[method]
name = zdp_local
m = 1
[output]
oracle = none
)");
        const ExperimentTable table = run_experiment(cfg);
        CHECK(table.ok());
        REQUIRE(table.rows.size() == 1);
        CHECK(table.cell(0, "z1") == doctest::Approx(2.5).epsilon(1e-12));
    }

    TEST_CASE("phase portraits carry the SIM polyline and decay to equilibrium") {
        for (const auto& model : {make_linear2d(2.0), make_davis_skodje(3.0)}) {
            const std::string csv = portrait_csv(model, 3, 10.0, 5.0, 40);
            std::istringstream in(csv);
            std::string line;
            std::getline(in, line);  // comment
            std::getline(in, line);  // header
            CHECK(line == "series,sample,t,z1,z2");

            int sim_rows = 0;
            double last_traj_norm = 0.0;
            while (std::getline(in, line)) {
                std::istringstream cells(line);
                std::string series, sample, t, z1s, z2s;
                std::getline(cells, series, ',');
                std::getline(cells, sample, ',');
                std::getline(cells, t, ',');
                std::getline(cells, z1s, ',');
                std::getline(cells, z2s, ',');
                const double z1 = std::stod(z1s), z2 = std::stod(z2s);
                if (series == "sim") {
                    ++sim_rows;
                    if (model.name() == "linear2d") CHECK(z1 == doctest::Approx(z2).epsilon(1e-12));
                    else CHECK(z2 == doctest::Approx(z1 / (1.0 + z1)).epsilon(1e-12));
                } else if (sample == "39") {
                    last_traj_norm = std::max(last_traj_norm, std::abs(z1) + std::abs(z2));
                }
            }
            CHECK(sim_rows == 40);
            CHECK(last_traj_norm < 1e-3);  // dissipative: everything collapses
        }
        CHECK_THROWS_AS(portrait_csv(make_linear3d(2.0, 4.0)), std::invalid_argument);
    }
}
