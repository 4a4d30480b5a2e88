#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldspec/rng.hpp"
#include "ldspec/trap.hpp"
#include "ldspec/vec.hpp"

namespace ldspec {

class ThreadPool;

/// Positions and velocities of every ion at one instant. Species are kept as
/// a small table plus a per-ion index.
struct IonState {
    std::vector<Vec3> positions;               // m
    std::vector<Vec3> velocities;              // m/s
    std::vector<std::uint16_t> species_index;  // into species table
    std::vector<Species> species;
    double time = 0.0;                         // s

    std::size_t size() const { return positions.size(); }
    /// Index into the species table, or -1 when the species is absent.
    int species_id(const Species& s) const;
};

/// Laser cooling of the coolant species is modeled as isotropic Langevin
/// friction plus fluctuation-dissipation kicks at target_temperature;
/// heating_rate adds weak white-noise kicks (K/s of kinetic temperature)
/// to all species.
struct ThermostatConfig {
    Species cooled_species;
    double target_temperature = 0.0;  // K
    double friction_rate = 0.0;       // 1/s
    double heating_rate = 0.0;        // K/s, applied to every ion
    std::uint64_t rng_seed = 1;
};

void validate_thermostat(const ThermostatConfig& t);

struct SpeciesCount {
    Species species;
    std::size_t count = 0;
    // initialization cylinder (radius, half length along the trap axis)
    double init_radius = 0.0;       // m
    double init_half_length = 0.0;  // m
};

struct ClusterSpec {
    std::string label;  // e.g. C1, C2
    std::vector<SpeciesCount> species;

    std::size_t total_count() const;
};

void validate_cluster(const ClusterSpec& spec);

/// Uniformly sampled position record of all ions, plus the per-frame kinetic
/// temperature of each species measured at the sampling instants.
struct Trajectory {
    double sample_interval = 0.0;              // s
    std::vector<Species> species;
    std::vector<std::uint16_t> species_index;  // n_ions entries
    std::vector<Vec3> frames;                  // frame-major, n_frames * n_ions
    std::vector<double> species_temperature;   // n_frames * n_species, may be empty

    std::size_t n_ions() const { return species_index.size(); }
    std::size_t n_frames() const { return n_ions() == 0 ? 0 : frames.size() / n_ions(); }
    double duration() const {
        const std::size_t f = n_frames();
        return f == 0 ? 0.0 : static_cast<double>(f - 1) * sample_interval;
    }
    const Vec3& position(std::size_t frame, std::size_t ion) const {
        return frames[frame * n_ions() + ion];
    }
    int species_id(const Species& s) const;
    std::vector<std::size_t> ions_of(const Species& s) const;
};

/// All-pairs Coulomb force on every ion, no cutoff. Throws NumericsError on
/// coincident ions.
std::vector<Vec3> coulomb_forces(const IonState& state);

/// Velocity-Verlet integrator with the thermostat applied after the velocity
/// update. Owns the mutable state; force evaluation is data-parallel with a
/// fixed per-ion summation order, so results are bit-identical for any
/// worker count.
class Simulation {
public:
    /// Without a trap the integrator runs free (used by conservation tests);
    /// with a trap, dt must satisfy dt <= 1/(100 f_max).
    Simulation(IonState state, std::optional<TrapConfig> trap, ThermostatConfig thermostat,
               double dt, unsigned workers = 1);
    ~Simulation();

    void step();
    void run_steps(std::size_t n);

    /// Initialization aid: while enabled, friction and fluctuation kicks act
    /// on every species, not just the cooled one. run() uses this during the
    /// discarded equilibration prefix to crystallize a randomized lattice.
    void set_quench_all(bool enabled) { quench_all_ = enabled; }

    const IonState& state() const { return state_; }
    double dt() const { return dt_; }
    /// Kinetic + trap + Coulomb potential energy (Coulomb repulsion counted
    /// positive, trap zero at the trap center).
    double total_energy() const;
    Vec3 total_momentum() const;

private:
    void compute_accelerations();
    void apply_thermostat();

    IonState state_;
    std::optional<TrapConfig> trap_;
    ThermostatConfig thermostat_;
    double dt_;
    Rng rng_;
    std::unique_ptr<ThreadPool> pool_;
    std::vector<Vec3> accel_;
    // per-ion precomputed quantities
    std::vector<double> charge_pref_;   // k_C * q_i
    std::vector<double> inv_mass_;
    std::vector<Vec3> trap_spring_;     // m * (2 pi f_xi)^2 per axis
    std::vector<std::uint8_t> cooled_;  // 1 for ions of the cooled species
    double friction_decay_ = 1.0;       // exp(-gamma dt)
    std::vector<double> sigma_cool_;    // per species, FD kick amplitude
    std::vector<double> sigma_heat_;    // per species, heating kick amplitude
    bool quench_all_ = false;
};

/// One velocity-Verlet step of trap + Coulomb forces plus thermostat, as a
/// pure function. Seeds a fresh RNG from thermostat.rng_seed on every call;
/// long runs should use Simulation/run so the noise stream advances.
IonState step(const IonState& state, const TrapConfig& trap, const ThermostatConfig& thermostat,
              double dt);

struct RunOptions {
    double duration = 0.0;         // s, sampled extent (after equilibration)
    double equilibration = 0.0;    // s, discarded prefix
    double sample_interval = 0.0;  // s; 0 selects 4 dt
    double dt = 0.0;               // s; 0 selects 1/(200 f_max)
    unsigned workers = 1;          // 0 selects hardware concurrency
};

/// Initializes the cluster (randomized lattice in the configured volume with
/// thermal velocities), equilibrates, then samples. Throws NumericsError
/// ("melted cluster") on temperature runaway.
Trajectory run(const ClusterSpec& spec, const TrapConfig& trap, const ThermostatConfig& thermostat,
               const RunOptions& options);

/// Kinetic temperature of one species: T = (2/3) <m v^2 / 2> / k_B.
double kinetic_temperature(const IonState& state, const Species& s);

/// Mean over the sampled frames [frame_begin, frame_end) of the recorded
/// species temperature; the full record when frame_end == 0.
double kinetic_temperature(const Trajectory& traj, const Species& s, std::size_t frame_begin = 0,
                           std::size_t frame_end = 0);

double total_energy(const IonState& state, const TrapConfig& trap);
Vec3 total_momentum(const IonState& state);

/// Deterministic randomized-lattice initial condition used by run().
IonState init_cluster(const ClusterSpec& spec, const ThermostatConfig& thermostat, Rng& rng);

} // namespace ldspec
