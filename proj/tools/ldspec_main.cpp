// Command-line front end: simulate | analyze | lineshape | spectrum | budget.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldspec/errors.hpp"
#include "ldspec/lineshape.hpp"
#include "ldspec/motion.hpp"
#include "ldspec/run_config.hpp"
#include "ldspec/trajectory_io.hpp"
#include "ldspec/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string data_dir;
    std::string out = ".";
    std::uint64_t seed = 0;    // 0 keeps the configured seed
    unsigned workers = 0;      // 0 keeps the configured worker count
    bool workers_set = false;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

fs::path resolve_data_dir(const CommonOptions& opt) {
    if (!opt.data_dir.empty()) return opt.data_dir;
    if (const char* env = std::getenv("LDSPEC_DATA_DIR")) return env;
    return LDSPEC_DEFAULT_DATA_DIR;
}

fs::path resolve_config(const CommonOptions& opt, const fs::path& data_dir) {
    if (!opt.config.empty() && !opt.preset.empty())
        throw ldspec::ConfigError("--config and --preset are mutually exclusive");
    if (!opt.config.empty()) return opt.config;
    if (!opt.preset.empty()) return data_dir / "presets" / (opt.preset + ".cfg");
    throw ldspec::ConfigError("one of --config or --preset is required");
}

struct LoadedConfig {
    ldspec::SpeciesRegistry registry;
    ldspec::RunConfig run;
    fs::path config_path;
};

LoadedConfig load(const CommonOptions& opt) {
    const fs::path data_dir = resolve_data_dir(opt);
    LoadedConfig lc;
    lc.registry = ldspec::load_species_registry(data_dir / "constants.cfg");
    lc.config_path = resolve_config(opt, data_dir);
    lc.run = ldspec::load_run_config(lc.config_path, lc.registry);
    if (opt.seed != 0 && lc.run.simulation) lc.run.simulation->thermostat.rng_seed = opt.seed;
    if (opt.workers_set && lc.run.simulation) lc.run.simulation->run.workers = opt.workers;
    return lc;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw ldspec::ConfigError("cannot open '" + path.string() + "' for writing");
    os << j.dump(2) << "\n";
}

json simulation_parameters(const ldspec::SimulationConfig& sim) {
    json cluster;
    cluster["label"] = sim.cluster.label;
    for (const auto& sc : sim.cluster.species)
        cluster["species"][sc.species.name] = {{"count", sc.count},
                                               {"init_radius_m", sc.init_radius},
                                               {"init_half_length_m", sc.init_half_length}};
    json trap = {{"reference_species", sim.trap.reference_species.name},
                 {"radial_rf_frequency_hz", sim.trap.radial_rf_frequency},
                 {"axial_frequency_hz", sim.trap.axial_frequency},
                 {"q_parameter", sim.trap.q_parameter},
                 {"rf_drive_frequency_hz", sim.trap.rf_drive_frequency}};
    json thermostat = {{"cooled_species", sim.thermostat.cooled_species.name},
                       {"friction_rate_per_s", sim.thermostat.friction_rate},
                       {"heating_rate_k_per_s", sim.thermostat.heating_rate},
                       {"seed", sim.thermostat.rng_seed}};
    json run = {{"duration_s", sim.run.duration},
                {"equilibration_s", sim.run.equilibration},
                {"sample_interval_s", sim.run.sample_interval},
                {"workers", sim.run.workers}};
    return {{"cluster", cluster}, {"trap", trap}, {"thermostat", thermostat}, {"run", run}};
}

int cmd_simulate(const CommonOptions& opt, bool csv) {
    const LoadedConfig lc = load(opt);
    if (!lc.run.simulation)
        throw ldspec::ConfigError(lc.config_path.string() + ": no simulation group configured");
    const auto& sim = *lc.run.simulation;
    fs::create_directories(opt.out);

    json manifest;
    manifest["command"] = "simulate";
    manifest["version"] = ldspec::kVersion;
    manifest["config"] = lc.config_path.string();
    manifest["parameters"] = simulation_parameters(sim);
    manifest["outputs"] = json::array();

    for (const double target : sim.target_temperatures) {
        ldspec::ThermostatConfig thermostat = sim.thermostat;
        thermostat.target_temperature = target;

        const auto t0 = std::chrono::steady_clock::now();
        const ldspec::Trajectory traj = ldspec::run(sim.cluster, sim.trap, thermostat, sim.run);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const int mk = static_cast<int>(std::lround(target * 1e3));
        const fs::path traj_path =
            fs::path(opt.out) / (sim.cluster.label + "_T" + std::to_string(mk) + "mK.traj");
        ldspec::write_trajectory(traj_path, traj);
        if (csv)
            ldspec::export_trajectory_csv(traj_path.string() + ".csv", traj);

        json output = {{"file", traj_path.string()},
                       {"fnv1a64", ldspec::fnv1a_file_hash(traj_path)},
                       {"target_temperature_k", target},
                       {"wall_time_s", wall},
                       {"frames", traj.n_frames()},
                       {"sample_interval_s", traj.sample_interval}};
        if (traj.n_frames() > 0)
            for (const auto& s : traj.species)
                output["measured_temperature_k"][s.name] = ldspec::kinetic_temperature(traj, s);
        manifest["outputs"].push_back(output);
        std::printf("simulate: %s target %d mK, %zu frames, %.1f s wall\n",
                    sim.cluster.label.c_str(), mk, traj.n_frames(), wall);
    }
    write_json(fs::path(opt.out) / "manifest_simulate.json", manifest);
    return 0;
}

int cmd_analyze(const CommonOptions& opt, const std::string& traj_file,
                const std::string& species_name, unsigned bins, unsigned subset) {
    const fs::path data_dir = resolve_data_dir(opt);
    const auto registry = ldspec::load_species_registry(data_dir / "constants.cfg");
    const ldspec::Species species = registry.find(species_name);
    const ldspec::Trajectory traj = ldspec::read_trajectory(traj_file);
    if (traj.n_frames() == 0)
        throw ldspec::ConfigError("'" + traj_file + "' holds an empty trajectory");
    fs::create_directories(opt.out);

    const ldspec::MotionStats stats = ldspec::motion_stats(traj, species);
    {
        std::ofstream os(fs::path(opt.out) / "motion_stats.csv");
        os << "species,window_s,delta_x_m,delta_y_m,delta_z_m,n_ions\n";
        os << species.name << "," << fmt(stats.window) << "," << fmt(stats.delta_x) << ","
           << fmt(stats.delta_y) << "," << fmt(stats.delta_z) << "," << stats.per_ion_x.size()
           << "\n";
    }

    auto ions = traj.ions_of(species);
    if (subset > 0 && subset < ions.size()) {
        // deterministic subset draw, seeded by --seed (default 1)
        ldspec::Rng rng(opt.seed == 0 ? 1 : opt.seed);
        for (std::size_t i = ions.size() - 1; i > 0; --i)
            std::swap(ions[i], ions[rng.next_u64() % (i + 1)]);
        ions.resize(subset);
    }
    const ldspec::Histogram2D hist = ldspec::transverse_histogram(traj, ions, bins);
    {
        std::ofstream os(fs::path(opt.out) / "histogram.csv");
        os << "# bins=" << hist.bins_x << " x_min_m=" << fmt(hist.x_min)
           << " x_max_m=" << fmt(hist.x_max) << " ions=" << ions.size() << "\n";
        os << "bin_x_m,bin_y_m,weight\n";
        for (std::size_t iy = 0; iy < hist.bins_y; ++iy)
            for (std::size_t ix = 0; ix < hist.bins_x; ++ix) {
                const double x = hist.x_min + (static_cast<double>(ix) + 0.5) * hist.bin_width_x();
                const double y = hist.y_min + (static_cast<double>(iy) + 0.5) * hist.bin_width_y();
                os << fmt(x) << "," << fmt(y) << "," << fmt(hist.weight[iy * hist.bins_x + ix])
                   << "\n";
            }
    }

    for (const auto coord : {ldspec::MotionCoordinate::X, ldspec::MotionCoordinate::Rho}) {
        const ldspec::SpectralDensity sd = ldspec::linear_spectral_density(traj, coord, species);
        std::ofstream os(fs::path(opt.out) /
                         (coord == ldspec::MotionCoordinate::X ? "lsd_x.csv" : "lsd_rho.csv"));
        os << "# coordinate=" << sd.coordinate << " window=" << sd.window
           << " species=" << species.name << "\n";
        os << "frequency_hz,density_m_per_sqrt_hz\n";
        for (std::size_t k = 0; k < sd.frequency.size(); ++k)
            os << fmt(sd.frequency[k]) << "," << fmt(sd.density[k]) << "\n";
    }

    std::printf("analyze: dx=%.4g um dy=%.4g um dz=%.4g um over %.3g ms (%zu %s ions)\n",
                stats.delta_x * 1e6, stats.delta_y * 1e6, stats.delta_z * 1e6,
                stats.window * 1e3, stats.per_ion_x.size(), species.name.c_str());
    return 0;
}

int cmd_lineshape(const CommonOptions& opt, const std::string& traj_file,
                  std::vector<double> wavelengths, const std::string& axis_name,
                  const std::string& species_name) {
    const fs::path data_dir = resolve_data_dir(opt);
    const auto registry = ldspec::load_species_registry(data_dir / "constants.cfg");
    const ldspec::Species species = registry.find(species_name);
    const ldspec::Trajectory traj = ldspec::read_trajectory(traj_file);
    if (traj.n_frames() == 0)
        throw ldspec::ConfigError("'" + traj_file + "' holds an empty trajectory");
    if (wavelengths.empty())
        throw ldspec::ConfigError("lineshape: at least one --wavelength is required");
    ldspec::Axis axis = ldspec::Axis::X;
    if (axis_name == "y") axis = ldspec::Axis::Y;
    else if (axis_name == "z") axis = ldspec::Axis::Z;
    else if (axis_name != "x") throw ldspec::ConfigError("axis must be x, y or z");
    fs::create_directories(opt.out);

    const ldspec::MotionStats stats = ldspec::motion_stats(traj, species);
    const double delta = stats.delta(axis);

    std::ofstream summary(fs::path(opt.out) / "lamb_dicke_summary.csv");
    summary << "wavelength_m,L0,L_gaussian,L_single_ion,delta_m\n";
    for (const double wl : wavelengths) {
        const ldspec::LineShape ls = ldspec::lineshape(traj, wl, axis, species);
        const double lg = ldspec::gaussian_peak_estimate(delta, wl);
        const double lsp = ldspec::single_ion_peak_estimate(delta, wl);
        summary << fmt(wl) << "," << fmt(ls.peak) << "," << fmt(lg) << "," << fmt(lsp) << ","
                << fmt(delta) << "\n";

        char name[64];
        std::snprintf(name, sizeof(name), "lineshape_%.4gum.csv", wl * 1e6);
        std::ofstream os(fs::path(opt.out) / name);
        os << "# wavelength_m=" << fmt(wl) << " axis=" << axis_name << " species=" << species.name
           << " L0=" << fmt(ls.peak) << " L_gaussian=" << fmt(lg) << " L_single_ion=" << fmt(lsp)
           << "\n";
        os << "detuning_hz,weight\n";
        for (std::size_t k = 0; k < ls.detuning.size(); ++k)
            os << fmt(ls.detuning[k]) << "," << fmt(ls.weight[k]) << "\n";
        std::printf("lineshape: lambda=%.4g um L(0)=%.4f Lg=%.4f Lsp=%.4f\n", wl * 1e6, ls.peak,
                    lg, lsp);
    }
    return 0;
}

int cmd_spectrum(const CommonOptions& opt) {
    const LoadedConfig lc = load(opt);
    if (!lc.run.spectrum)
        throw ldspec::ConfigError(lc.config_path.string() + ": no spectroscopy group configured");
    const auto& sp = *lc.run.spectrum;
    const ldspec::TransitionModel model = ldspec::load_transition_model(sp);
    fs::create_directories(opt.out);

    std::ofstream report(fs::path(opt.out) / "fit_report.csv");
    report << "power_w,center_hz,center_unc_hz,fwhm_hz,fwhm_unc_hz,amplitude,amplitude_unc,"
              "offset,offset_unc,iterations\n";

    int index = 0;
    for (const double power : sp.power_levels) {
        ldspec::BeamConfig beam = sp.beam;
        beam.power = power;
        const double omega = ldspec::rabi_frequency(beam);
        const double gamma = sp.rempd.decoherence_rate;
        const double width =
            std::sqrt(2.0 * omega * omega + gamma * gamma) / (2.0 * ldspec::constants::pi);
        const double span = sp.span_widths * width;

        std::vector<double> detunings(sp.detuning_points);
        for (std::size_t i = 0; i < detunings.size(); ++i)
            detunings[i] = -0.5 * span +
                           span * static_cast<double>(i) /
                               static_cast<double>(detunings.size() - 1);
        const auto signal = ldspec::rempd_spectrum(beam, model, sp.b_field, detunings, sp.rempd);
        const ldspec::LorentzianFit fit = ldspec::fit_lorentzian(detunings, signal);

        char name[64];
        std::snprintf(name, sizeof(name), "spectrum_P%d.csv", index);
        std::ofstream os(fs::path(opt.out) / name);
        os << "# power_w=" << fmt(power) << " rabi_rad_s=" << fmt(omega)
           << " b_field_t=" << fmt(sp.b_field) << " weight_plus=" << fmt(sp.rempd.weight_plus)
           << " dissociation_rate=" << fmt(sp.rempd.dissociation_rate)
           << " exposure_s=" << fmt(sp.rempd.duration)
           << " decoherence_rad_s=" << fmt(sp.rempd.decoherence_rate)
           << " noise_sigma=" << fmt(sp.rempd.noise_sigma) << "\n";
        os << "detuning_hz,signal\n";
        for (std::size_t i = 0; i < detunings.size(); ++i)
            os << fmt(detunings[i]) << "," << fmt(signal[i]) << "\n";

        report << fmt(power) << "," << fmt(fit.params.center) << ","
               << fmt(fit.uncertainty.center) << "," << fmt(fit.params.fwhm) << ","
               << fmt(fit.uncertainty.fwhm) << "," << fmt(fit.params.amplitude) << ","
               << fmt(fit.uncertainty.amplitude) << "," << fmt(fit.params.offset) << ","
               << fmt(fit.uncertainty.offset) << "," << fit.iterations << "\n";
        std::printf("spectrum: P=%.4g W fitted fwhm=%.4g kHz center=%+.3g Hz\n", power,
                    fit.params.fwhm * 1e-3, fit.params.center);
        ++index;
    }

    const ldspec::SystematicsBudget budget =
        ldspec::systematics_budget(sp.b_field, model, sp.light, sp.stark_bound);
    std::ofstream os(fs::path(opt.out) / "budget.csv");
    os << "entry,correction_hz,uncertainty_hz\n";
    for (const auto& e : budget.entries)
        os << e.name << "," << fmt(e.correction) << "," << fmt(e.uncertainty) << "\n";
    os << "total," << fmt(budget.total_correction()) << "," << fmt(budget.total_uncertainty())
       << "\n";
    return 0;
}

int cmd_budget(const CommonOptions& opt) {
    const LoadedConfig lc = load(opt);
    if (!lc.run.spectrum)
        throw ldspec::ConfigError(lc.config_path.string() + ": no spectroscopy group configured");
    const auto& sp = *lc.run.spectrum;
    const ldspec::TransitionModel model = ldspec::load_transition_model(sp);
    const ldspec::SystematicsBudget budget =
        ldspec::systematics_budget(sp.b_field, model, sp.light, sp.stark_bound);

    std::printf("%-14s %18s %18s\n", "entry", "correction_hz", "uncertainty_hz");
    for (const auto& e : budget.entries)
        std::printf("%-14s %18.6g %18.6g\n", e.name.c_str(), e.correction, e.uncertainty);
    std::printf("%-14s %18.6g %18.6g\n", "total", budget.total_correction(),
                budget.total_uncertainty());

    fs::create_directories(opt.out);
    std::ofstream os(fs::path(opt.out) / "budget.csv");
    os << "entry,correction_hz,uncertainty_hz\n";
    for (const auto& e : budget.entries)
        os << e.name << "," << fmt(e.correction) << "," << fmt(e.uncertainty) << "\n";
    os << "total," << fmt(budget.total_correction()) << "," << fmt(budget.total_uncertainty())
       << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coulomb-cluster dynamics and rotational spectroscopy toolkit"};
    app.set_version_flag("--version", ldspec::kVersion);
    app.require_subcommand(1);

    CommonOptions opt;
    bool csv = false;
    std::string traj_file, species_name = "HD+", axis_name = "x";
    unsigned bins = 128, subset = 0;
    std::vector<double> wavelengths;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config) {
            cmd->add_option("--config", opt.config, "Path to a run configuration file");
            cmd->add_option("--preset", opt.preset, "Shipped preset name (C1, C2, EXPERIMENT)");
        }
        cmd->add_option("--data-dir", opt.data_dir, "Directory with constants.cfg and presets/");
        cmd->add_option("--seed", opt.seed, "Override the configured RNG seed");
        cmd->add_option("--out", opt.out, "Output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "Run the MD engine and write trajectories");
    add_common(simulate, true);
    simulate->add_option("--workers", opt.workers, "Force worker count (0 = hardware)")
        ->each([&](const std::string&) { opt.workers_set = true; });
    simulate->add_flag("--csv", csv, "Also export trajectories as CSV");

    auto* analyze = app.add_subcommand("analyze", "Motion statistics, histogram, spectral density");
    add_common(analyze, false);
    analyze->add_option("--trajectory", traj_file, "Trajectory file")->required();
    analyze->add_option("--species", species_name, "Species to analyze (default HD+)");
    analyze->add_option("--bins", bins, "Histogram bins per axis");
    analyze->add_option("--subset", subset, "Random ion subset for the histogram (0 = all)");

    auto* lineshape = app.add_subcommand("lineshape", "Line shapes and Lamb-Dicke peak table");
    add_common(lineshape, false);
    lineshape->add_option("--trajectory", traj_file, "Trajectory file")->required();
    lineshape->add_option("--wavelengths", wavelengths, "Wavelengths in meters")->delimiter(',');
    lineshape->add_option("--axis", axis_name, "Propagation axis (x, y, z)");
    lineshape->add_option("--species", species_name, "Species to probe (default HD+)");

    auto* spectrum = app.add_subcommand("spectrum", "Synthetic REMPD spectra, fits and budget");
    add_common(spectrum, true);

    auto* budget = app.add_subcommand("budget", "Systematic-shift budget table");
    add_common(budget, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(opt, csv);
        if (analyze->parsed()) return cmd_analyze(opt, traj_file, species_name, bins, subset);
        if (lineshape->parsed())
            return cmd_lineshape(opt, traj_file, wavelengths, axis_name, species_name);
        if (spectrum->parsed()) return cmd_spectrum(opt);
        if (budget->parsed()) return cmd_budget(opt);
    } catch (const ldspec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ldspec::NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
