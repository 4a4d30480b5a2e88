#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ldspec/trajectory_io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LDSPEC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path make_workdir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small cluster so the CLI round trip stays in the sub-second range.
void write_tiny_config(const fs::path& path) {
    std::ofstream os(path);
    os << "[cluster]\n"
          "label = tiny\n"
          "[cluster.HD+]\n"
          "count = 8\n"
          "init_radius = 1.2e-5\n"
          "init_half_length = 1.5e-4\n"
          "[cluster.Be+]\n"
          "count = 40\n"
          "init_radius = 6.0e-5\n"
          "init_half_length = 2.5e-4\n"
          "[trap]\n"
          "reference_species = HD+\n"
          "radial_rf_frequency = 8.10933e5\n"
          "axial_frequency = 5.0e4\n"
          "q_parameter = 0.15\n"
          "rf_drive_frequency = 1.52928e7\n"
          "[thermostat]\n"
          "cooled_species = Be+\n"
          "target_temperatures_mk = 20\n"
          "friction_rate = 3.0e4\n"
          "heating_rate = 1.0\n"
          "seed = 4\n"
          "[run]\n"
          "duration = 1.6e-4\n"
          "equilibration = 6.0e-5\n"
          "sample_interval = 5.0e-7\n"
          "workers = 1\n"
          "[lineshape]\n"
          "wavelengths = 1.0e-5, 5.0e-5\n"
          "axis = x\n";
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::uint64_t manifest_hash(const fs::path& manifest) {
    const std::string text = slurp(manifest);
    const std::string key = "\"fnv1a64\": ";
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::strtoull(text.c_str() + pos + key.size(), nullptr, 10);
}

} // namespace

TEST_CASE("cli: version and argument errors") {
    CHECK(run_cli("--version") == 0);
    CHECK(run_cli("simulate") == 2);  // neither --config nor --preset
    CHECK(run_cli("analyze --trajectory /nonexistent.traj") == 2);
}

TEST_CASE("cli: budget on the shipped preset") {
    const fs::path dir = make_workdir("ldspec_cli_budget");
    const int rc = run_cli("budget --preset EXPERIMENT --out " + dir.string());
    CHECK(rc == 0);
    const std::string budget = slurp(dir / "budget.csv");
    CHECK(budget.find("zeeman,0,224") != std::string::npos);
    CHECK(budget.find("dc_stark,0,10") != std::string::npos);
    CHECK(budget.find("total,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("cli: simulate / analyze / lineshape round trip") {
    const fs::path dir = make_workdir("ldspec_cli_sim");
    const fs::path cfg = dir / "tiny.cfg";
    write_tiny_config(cfg);

    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + dir.string() + " --csv") ==
            0);
    const fs::path traj_path = dir / "tiny_T20mK.traj";
    REQUIRE(fs::exists(traj_path));
    REQUIRE(fs::exists(dir / "tiny_T20mK.traj.csv"));
    REQUIRE(fs::exists(dir / "manifest_simulate.json"));
    const std::uint64_t h1 = manifest_hash(dir / "manifest_simulate.json");
    CHECK(h1 == ldspec::fnv1a_file_hash(traj_path));

    // identical rerun: same seed, same trajectory bytes
    const fs::path dir2 = make_workdir("ldspec_cli_sim2");
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + dir2.string()) == 0);
    CHECK(manifest_hash(dir2 / "manifest_simulate.json") == h1);

    REQUIRE(run_cli("analyze --trajectory " + traj_path.string() + " --out " + dir.string() +
                    " --subset 4") == 0);
    CHECK(fs::exists(dir / "motion_stats.csv"));
    CHECK(fs::exists(dir / "histogram.csv"));
    CHECK(fs::exists(dir / "lsd_x.csv"));
    CHECK(fs::exists(dir / "lsd_rho.csv"));

    REQUIRE(run_cli("lineshape --trajectory " + traj_path.string() +
                    " --wavelengths 1e-5,5e-5,2.28e-4 --out " + dir.string()) == 0);
    const std::string summary = slurp(dir / "lamb_dicke_summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);  // header + 3 rows
    CHECK(fs::exists(dir / "lineshape_10um.csv"));
    CHECK(fs::exists(dir / "lineshape_228um.csv"));

    // the long-wavelength row is deep in the Lamb-Dicke regime: L0, Lg, Lsp ~ 1
    {
        std::istringstream rows(summary);
        std::string row;
        std::getline(rows, row);  // header
        while (std::getline(rows, row)) {
            std::istringstream ss(row);
            std::string wl, l0, lg, lsp;
            std::getline(ss, wl, ',');
            std::getline(ss, l0, ',');
            std::getline(ss, lg, ',');
            std::getline(ss, lsp, ',');
            if (std::strtod(wl.c_str(), nullptr) > 2e-4) {
                CHECK(std::strtod(l0.c_str(), nullptr) > 0.95);
                CHECK(std::strtod(lg.c_str(), nullptr) > 0.95);
                CHECK(std::strtod(lsp.c_str(), nullptr) > 0.95);
            }
        }
    }

    // an empty trajectory is a clean configuration error
    {
        ldspec::Trajectory empty;
        empty.sample_interval = 1e-6;
        const fs::path empty_path = dir / "empty.traj";
        ldspec::write_trajectory(empty_path, empty);
        CHECK(run_cli("analyze --trajectory " + empty_path.string() + " --out " + dir.string()) ==
              2);
    }

    // temperature runaway is a numerical failure (exit 3)
    {
        const fs::path hot = dir / "melted.cfg";
        std::ifstream src(cfg);
        std::ofstream dst(hot);
        std::string line;
        while (std::getline(src, line)) {
            if (line.rfind("heating_rate", 0) == 0) line = "heating_rate = 1.0e9";
            if (line.rfind("friction_rate", 0) == 0) line = "friction_rate = 1.0e-3";
            dst << line << "\n";
        }
        dst.close();
        CHECK(run_cli("simulate --config " + hot.string() + " --out " + dir.string()) == 3);
    }

    // unknown key in the config is a config error (exit 2)
    {
        std::ofstream os(cfg, std::ios::app);
        os << "mystery = 1\n";
    }
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + dir.string()) == 2);

    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("cli: spectrum command fits the broad-to-narrow progression") {
    const fs::path dir = make_workdir("ldspec_cli_spectrum");
    REQUIRE(run_cli("spectrum --preset EXPERIMENT --out " + dir.string()) == 0);
    REQUIRE(fs::exists(dir / "fit_report.csv"));
    REQUIRE(fs::exists(dir / "budget.csv"));
    REQUIRE(fs::exists(dir / "spectrum_P0.csv"));
    REQUIRE(fs::exists(dir / "spectrum_P2.csv"));

    std::ifstream report(dir / "fit_report.csv");
    std::string line;
    std::getline(report, line);  // header
    std::vector<double> widths;
    while (std::getline(report, line)) {
        std::istringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');  // power
        std::getline(ss, field, ',');  // center
        std::getline(ss, field, ',');  // center unc
        std::getline(ss, field, ',');  // fwhm
        widths.push_back(std::strtod(field.c_str(), nullptr));
    }
    REQUIRE(widths.size() == 3);
    CHECK(widths[0] > widths[1]);
    CHECK(widths[1] > widths[2]);
    // saturation of the dissociated fraction and, at the lowest power, the
    // unresolved Zeeman pair inflate the fitted width over the pure
    // power-broadened value
    CHECK(widths[0] == doctest::Approx(12e3).epsilon(0.30));
    CHECK(widths[2] == doctest::Approx(1.3e3).epsilon(0.30));
    fs::remove_all(dir);
}
