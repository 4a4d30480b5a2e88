#include "ldspec/run_config.hpp"

#include <cmath>

#include "ldspec/errors.hpp"

namespace ldspec {

namespace {

constexpr double kGauss = 1e-4;  // T

Axis parse_axis(const std::string& s, const std::string& origin) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw ConfigError(origin + ": axis must be one of x, y, z (got '" + s + "')");
}

} // namespace

const Species& SpeciesRegistry::find(const std::string& name) const {
    for (const auto& s : species)
        if (s.name == name) return s;
    throw ConfigError("unknown species '" + name + "' (not defined in the constants file)");
}

SpeciesRegistry load_species_registry(const std::filesystem::path& constants_file) {
    const ConfigFile cfg = ConfigFile::parse(constants_file);
    cfg.require_section("constants");

    SpeciesRegistry reg;
    reg.constants.elementary_charge = cfg.get_double("constants", "elementary_charge");
    reg.constants.bohr_radius = cfg.get_double("constants", "bohr_radius");
    reg.constants.reduced_planck = cfg.get_double("constants", "reduced_planck");
    reg.constants.planck = cfg.get_double("constants", "planck");
    reg.constants.boltzmann = cfg.get_double("constants", "boltzmann");
    reg.constants.vacuum_permittivity = cfg.get_double("constants", "vacuum_permittivity");
    reg.constants.speed_of_light = cfg.get_double("constants", "speed_of_light");
    reg.constants.atomic_mass_unit = cfg.get_double("constants", "atomic_mass_unit");

    for (const auto& section : cfg.section_names()) {
        if (section.rfind("species.", 0) != 0) continue;
        const std::string name = section.substr(8);
        const double mass_u = cfg.get_double(section, "mass_u");
        const double charge_e = cfg.get_double(section, "charge_e");
        reg.species.push_back(
            make_species(name, mass_u, static_cast<int>(std::llround(charge_e))));
    }
    cfg.require_all_consumed();
    if (reg.species.empty())
        throw ConfigError(constants_file.string() + ": no [species.*] sections found");
    return reg;
}

RunConfig load_run_config(const std::filesystem::path& config_file,
                          const SpeciesRegistry& registry) {
    const ConfigFile cfg = ConfigFile::parse(config_file);
    RunConfig out;
    out.origin = config_file;

    const bool has_sim = cfg.has_section("cluster") || cfg.has_section("trap") ||
                         cfg.has_section("thermostat") || cfg.has_section("run");
    const bool has_spectrum = cfg.has_section("beam") || cfg.has_section("spectroscopy") ||
                              cfg.has_section("transition") || cfg.has_section("systematics");

    if (has_sim) {
        cfg.require_section("cluster");
        cfg.require_section("trap");
        cfg.require_section("thermostat");
        cfg.require_section("run");

        SimulationConfig sim;
        sim.cluster.label = cfg.get_string("cluster", "label");
        for (const auto& section : cfg.section_names()) {
            if (section.rfind("cluster.", 0) != 0) continue;
            SpeciesCount sc;
            sc.species = registry.find(section.substr(8));
            sc.count = static_cast<std::size_t>(cfg.get_uint(section, "count"));
            sc.init_radius = cfg.get_double(section, "init_radius");
            sc.init_half_length = cfg.get_double(section, "init_half_length");
            sim.cluster.species.push_back(std::move(sc));
        }
        validate_cluster(sim.cluster);

        sim.trap.reference_species = registry.find(cfg.get_string("trap", "reference_species"));
        sim.trap.radial_rf_frequency = cfg.get_double("trap", "radial_rf_frequency");
        sim.trap.axial_frequency = cfg.get_double("trap", "axial_frequency");
        sim.trap.q_parameter = cfg.get_double("trap", "q_parameter");
        sim.trap.rf_drive_frequency = cfg.get_double("trap", "rf_drive_frequency");
        validate_trap(sim.trap);

        sim.thermostat.cooled_species = registry.find(cfg.get_string("thermostat", "cooled_species"));
        sim.thermostat.friction_rate = cfg.get_double("thermostat", "friction_rate");
        sim.thermostat.heating_rate = cfg.get_double("thermostat", "heating_rate");
        sim.thermostat.rng_seed = cfg.get_uint("thermostat", "seed");
        const auto targets_mk = cfg.get_double_list("thermostat", "target_temperatures_mk");
        for (const double t : targets_mk) sim.target_temperatures.push_back(t * 1e-3);
        sim.thermostat.target_temperature = sim.target_temperatures.front();
        validate_thermostat(sim.thermostat);

        sim.run.duration = cfg.get_double("run", "duration");
        sim.run.equilibration = cfg.get_double("run", "equilibration");
        sim.run.sample_interval = cfg.get_double("run", "sample_interval");
        sim.run.workers = static_cast<unsigned>(cfg.get_uint("run", "workers"));
        if (sim.run.duration < 0.0 || sim.run.equilibration < 0.0 ||
            sim.run.sample_interval < 0.0)
            throw ConfigError(config_file.string() + ": [run] durations must be non-negative");
        out.simulation = std::move(sim);
    }

    if (cfg.has_section("lineshape")) {
        LineshapeConfig ls;
        ls.wavelengths = cfg.get_double_list("lineshape", "wavelengths");
        for (const double w : ls.wavelengths)
            if (!(w > 0.0))
                throw ConfigError(config_file.string() + ": wavelengths must be positive");
        ls.axis = parse_axis(cfg.get_string("lineshape", "axis"), config_file.string());
        out.lineshape = std::move(ls);
    }

    if (has_spectrum) {
        cfg.require_section("beam");
        cfg.require_section("spectroscopy");
        cfg.require_section("transition");
        cfg.require_section("systematics");

        SpectrumConfig sp;
        sp.beam.power = cfg.get_double("beam", "power");
        sp.beam.cross_section_area = cfg.get_double("beam", "cross_section_area");
        const double dipole_e_a0 = cfg.get_double("beam", "transition_dipole_e_a0");
        sp.beam.transition_dipole = dipole_e_a0 * registry.constants.elementary_charge *
                                    registry.constants.bohr_radius;
        sp.beam.frequency = cfg.get_double("beam", "frequency");
        validate_beam(sp.beam);

        sp.b_field = cfg.get_double("spectroscopy", "b_field_gauss") * kGauss;
        sp.power_levels = cfg.get_double_list("spectroscopy", "power_levels");
        sp.rempd.decoherence_rate = cfg.get_double("spectroscopy", "decoherence_rate");
        sp.rempd.dissociation_rate = cfg.get_double("spectroscopy", "dissociation_rate");
        sp.rempd.duration = cfg.get_double("spectroscopy", "exposure");
        sp.rempd.noise_sigma = cfg.get_double("spectroscopy", "noise_sigma");
        sp.rempd.noise_seed = cfg.get_uint("spectroscopy", "noise_seed");
        sp.rempd.weight_plus = cfg.get_double("spectroscopy", "weight_plus");
        sp.detuning_points = static_cast<std::size_t>(cfg.get_uint("spectroscopy", "detuning_points"));
        sp.span_widths = cfg.get_double("spectroscopy", "span_widths");
        if (sp.detuning_points < 5)
            throw ConfigError(config_file.string() + ": detuning_points must be >= 5");

        sp.spin_averaged_frequency = cfg.get_double("transition", "spin_averaged_frequency");
        sp.spin_averaged_uncertainty = cfg.get_double("transition", "spin_averaged_uncertainty");
        sp.coefficients_file =
            config_file.parent_path() / cfg.get_string("transition", "coefficients_file");

        sp.light.power = cfg.get_double("systematics", "light_power");
        sp.light.beam_area = cfg.get_double("systematics", "light_beam_area");
        sp.light.scalar_pol_lower = cfg.get_double("systematics", "scalar_pol_lower");
        sp.light.scalar_pol_upper = cfg.get_double("systematics", "scalar_pol_upper");
        sp.light.tensor_pol_upper = cfg.get_double("systematics", "tensor_pol_upper");
        sp.light.geometry_factor = cfg.get_double("systematics", "geometry_factor");
        sp.stark_bound = cfg.get_double("systematics", "stark_bound");
        out.spectrum = std::move(sp);
    }

    cfg.require_all_consumed();
    if (!out.simulation && !out.lineshape && !out.spectrum)
        throw ConfigError(config_file.string() + ": configuration defines no usable group");
    return out;
}

TransitionModel load_transition_model(const SpectrumConfig& spectrum) {
    const auto table = load_coefficients(spectrum.coefficients_file);
    return make_transition_model(spectrum.spin_averaged_frequency,
                                 spectrum.spin_averaged_uncertainty, table);
}

} // namespace ldspec
