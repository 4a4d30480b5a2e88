#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "ldspec/config.hpp"
#include "ldspec/md.hpp"
#include "ldspec/motion.hpp"
#include "ldspec/spectro.hpp"

namespace ldspec {

/// Constants table plus default species definitions read at startup from
/// data/constants.cfg.
struct SpeciesRegistry {
    PhysicalConstants constants{};
    std::vector<Species> species;

    const Species& find(const std::string& name) const;
};

SpeciesRegistry load_species_registry(const std::filesystem::path& constants_file);

struct SimulationConfig {
    ClusterSpec cluster;
    TrapConfig trap;
    ThermostatConfig thermostat;              // target_temperature set per run
    std::vector<double> target_temperatures;  // K, thermostat schedule
    RunOptions run;
};

struct LineshapeConfig {
    std::vector<double> wavelengths;  // m
    Axis axis = Axis::X;
};

struct SpectrumConfig {
    BeamConfig beam;
    double b_field = 0.0;              // T
    std::vector<double> power_levels;  // W
    RempdOptions rempd;
    std::size_t detuning_points = 0;
    double span_widths = 0.0;  // scan span as a multiple of the expected width
    double spin_averaged_frequency = 0.0;
    double spin_averaged_uncertainty = 0.0;
    std::filesystem::path coefficients_file;
    LightShiftInput light;
    double stark_bound = 0.0;  // Hz
};

/// Fully validated run configuration. Groups are optional so that presets
/// can be simulation-only or spectroscopy-only, but every section present in
/// the file must parse against the schema; unknown keys are rejected.
struct RunConfig {
    std::optional<SimulationConfig> simulation;
    std::optional<LineshapeConfig> lineshape;
    std::optional<SpectrumConfig> spectrum;
    std::filesystem::path origin;
};

RunConfig load_run_config(const std::filesystem::path& config_file,
                          const SpeciesRegistry& registry);

TransitionModel load_transition_model(const SpectrumConfig& spectrum);

} // namespace ldspec
