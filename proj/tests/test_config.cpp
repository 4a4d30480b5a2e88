#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ldspec/config.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/run_config.hpp"

using namespace ldspec;

namespace {
const std::filesystem::path kDataDir = LDSPEC_DATA_DIR;
}

TEST_CASE("config parser: sections, comments, values") {
    const auto cfg = ConfigFile::parse_string("# header\n"
                                              "[alpha]\n"
                                              "x = 1.5e3  # trailing comment\n"
                                              "name = hello\n"
                                              "list = 1, 2.5, -3\n"
                                              "[beta]\n"
                                              "n = 42\n",
                                              "test");
    CHECK(cfg.has_section("alpha"));
    CHECK(cfg.get_double("alpha", "x") == 1500.0);
    CHECK(cfg.get_string("alpha", "name") == "hello");
    const auto list = cfg.get_double_list("alpha", "list");
    REQUIRE(list.size() == 3);
    CHECK(list[2] == -3.0);
    CHECK(cfg.get_uint("beta", "n") == 42);
    CHECK_NOTHROW(cfg.require_all_consumed());
}

TEST_CASE("config parser: errors carry line numbers") {
    CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a]\nx = 1\nx = 2\n", "t"),
                         doctest::Contains("t:3"), ConfigError);
    CHECK_THROWS_WITH_AS(ConfigFile::parse_string("x = 1\n", "t"),
                         doctest::Contains("outside any section"), ConfigError);
    CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a]\nbroken line\n", "t"),
                         doctest::Contains("t:2"), ConfigError);
    CHECK_THROWS_WITH_AS(ConfigFile::parse_string("[a\n", "t"),
                         doctest::Contains("unterminated"), ConfigError);

    const auto cfg = ConfigFile::parse_string("[a]\nx = not_a_number\n", "t");
    CHECK_THROWS_WITH_AS(cfg.get_double("a", "x"), doctest::Contains("t:2"), ConfigError);
}

TEST_CASE("config parser: unknown keys are rejected") {
    const auto cfg = ConfigFile::parse_string("[a]\nx = 1\nsurprise = 2\n", "t");
    CHECK(cfg.get_double("a", "x") == 1.0);
    CHECK_THROWS_WITH_AS(cfg.require_all_consumed(), doctest::Contains("surprise"), ConfigError);
}

TEST_CASE("shipped presets parse and validate") {
    const auto registry = load_species_registry(kDataDir / "constants.cfg");

    const RunConfig c2 = load_run_config(kDataDir / "presets" / "C2.cfg", registry);
    REQUIRE(c2.simulation.has_value());
    REQUIRE(c2.lineshape.has_value());
    CHECK(c2.simulation->cluster.label == "C2");
    CHECK(c2.simulation->cluster.total_count() == 550);
    CHECK(c2.simulation->target_temperatures.size() == 3);
    CHECK(c2.simulation->target_temperatures[0] == doctest::Approx(0.013));
    // the preset trap puts the corrected HD+ radial frequency at 0.81 MHz
    const auto f = secular_frequencies(registry.find("HD+"), c2.simulation->trap);
    CHECK(f.fx == doctest::Approx(0.81e6).epsilon(2e-4));

    const RunConfig c1 = load_run_config(kDataDir / "presets" / "C1.cfg", registry);
    REQUIRE(c1.simulation.has_value());
    CHECK(c1.simulation->cluster.total_count() == 2200);
    CHECK(c1.simulation->run.duration == doctest::Approx(5e-3));

    const RunConfig exp = load_run_config(kDataDir / "presets" / "EXPERIMENT.cfg", registry);
    REQUIRE(exp.spectrum.has_value());
    CHECK_FALSE(exp.simulation.has_value());
    CHECK(exp.spectrum->power_levels.size() == 3);
    CHECK(exp.spectrum->b_field == doctest::Approx(0.4e-4));
    CHECK_NOTHROW(load_transition_model(*exp.spectrum));
}

TEST_CASE("run config: incomplete simulation group rejected") {
    const auto registry = load_species_registry(kDataDir / "constants.cfg");
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "ldspec_partial.cfg";
    std::ofstream(path) << "[cluster]\nlabel = X\n[cluster.HD+]\ncount = 2\n"
                           "init_radius = 1e-5\ninit_half_length = 1e-4\n";
    CHECK_THROWS_WITH_AS(load_run_config(path, registry), doctest::Contains("trap"), ConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("run config: unknown keys anywhere are rejected") {
    const auto registry = load_species_registry(kDataDir / "constants.cfg");
    const auto path = std::filesystem::temp_directory_path() / "ldspec_unknown.cfg";
    {
        std::ifstream src(kDataDir / "presets" / "C2.cfg");
        std::ofstream dst(path);
        dst << src.rdbuf();
        dst << "\n[lineshape2]\ntypo = 1\n";
    }
    CHECK_THROWS_WITH_AS(load_run_config(path, registry), doctest::Contains("typo"), ConfigError);
    std::filesystem::remove(path);
}
