#include "ldspec/md.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/thread_pool.hpp"

namespace ldspec {

namespace {

// Ions closer than this are treated as a singular configuration.
constexpr double kMinSeparation = 1.0e-12;  // m

double max_secular_frequency(const std::vector<Species>& species, const TrapConfig& trap) {
    double f_max = 0.0;
    for (const auto& s : species) {
        const SecularFrequencies f = secular_frequencies(s, trap);
        f_max = std::max({f_max, f.fx, f.fz});
    }
    return f_max;
}

} // namespace

int IonState::species_id(const Species& s) const {
    for (std::size_t k = 0; k < species.size(); ++k)
        if (species[k] == s) return static_cast<int>(k);
    return -1;
}

int Trajectory::species_id(const Species& s) const {
    for (std::size_t k = 0; k < species.size(); ++k)
        if (species[k] == s) return static_cast<int>(k);
    return -1;
}

std::vector<std::size_t> Trajectory::ions_of(const Species& s) const {
    std::vector<std::size_t> out;
    const int id = species_id(s);
    if (id < 0) return out;
    for (std::size_t i = 0; i < species_index.size(); ++i)
        if (species_index[i] == static_cast<std::uint16_t>(id)) out.push_back(i);
    return out;
}

void validate_thermostat(const ThermostatConfig& t) {
    validate_species(t.cooled_species);
    if (t.friction_rate < 0.0) throw ConfigError("thermostat: friction_rate must be >= 0");
    if (t.target_temperature < 0.0)
        throw ConfigError("thermostat: target_temperature must be >= 0");
    if (t.heating_rate < 0.0) throw ConfigError("thermostat: heating_rate must be >= 0");
}

std::size_t ClusterSpec::total_count() const {
    std::size_t n = 0;
    for (const auto& sc : species) n += sc.count;
    return n;
}

void validate_cluster(const ClusterSpec& spec) {
    if (spec.species.empty() || spec.total_count() < 1)
        throw ConfigError("cluster '" + spec.label + "': needs at least one ion");
    for (const auto& sc : spec.species) {
        validate_species(sc.species);
        if (sc.count > 0 && !(sc.init_radius > 0.0 && sc.init_half_length > 0.0))
            throw ConfigError("cluster '" + spec.label + "': species '" + sc.species.name +
                              "' needs a positive initialization volume");
    }
}

std::vector<Vec3> coulomb_forces(const IonState& state) {
    const std::size_t n = state.size();
    const double k_c = PhysicalConstants::reference().coulomb_constant();
    std::vector<Vec3> forces(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 ri = state.positions[i];
        const double qi = state.species[state.species_index[i]].charge;
        Vec3 f{};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec3 d = ri - state.positions[j];
            const double r2 = norm_sq(d);
            if (r2 < kMinSeparation * kMinSeparation)
                throw NumericsError("singular configuration: coincident ions");
            const double qj = state.species[state.species_index[j]].charge;
            const double w = k_c * qi * qj / (r2 * std::sqrt(r2));
            f += w * d;
        }
        forces[i] = f;
    }
    return forces;
}

Simulation::Simulation(IonState state, std::optional<TrapConfig> trap, ThermostatConfig thermostat,
                       double dt, unsigned workers)
    : state_(std::move(state)), trap_(std::move(trap)), thermostat_(std::move(thermostat)),
      dt_(dt), rng_(thermostat_.rng_seed) {
    validate_thermostat(thermostat_);
    if (!(dt_ > 0.0)) throw ConfigError("integrator: dt must be positive");
    if (state_.positions.size() != state_.velocities.size() ||
        state_.positions.size() != state_.species_index.size())
        throw ConfigError("integrator: inconsistent state arrays");

    if (trap_) {
        validate_trap(*trap_);
        const double f_max = max_secular_frequency(state_.species, *trap_);
        if (dt_ > 1.0 / (100.0 * f_max))
            throw ConfigError("integrator: dt exceeds 1/(100 f_max)");
    }

    const std::size_t n = state_.size();
    const double k_c = PhysicalConstants::reference().coulomb_constant();
    const double k_b = PhysicalConstants::reference().boltzmann;

    charge_pref_.resize(n);
    inv_mass_.resize(n);
    cooled_.assign(n, 0);
    trap_spring_.assign(n, Vec3{});
    accel_.assign(n, Vec3{});

    std::vector<Vec3> omega2(state_.species.size());
    if (trap_) {
        for (std::size_t k = 0; k < state_.species.size(); ++k) {
            const SecularFrequencies f = secular_frequencies(state_.species[k], *trap_);
            const double wx = constants::two_pi * f.fx;
            const double wy = constants::two_pi * f.fy;
            const double wz = constants::two_pi * f.fz;
            omega2[k] = {wx * wx, wy * wy, wz * wz};
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Species& s = state_.species[state_.species_index[i]];
        charge_pref_[i] = k_c * s.charge;
        inv_mass_[i] = 1.0 / s.mass;
        trap_spring_[i] = omega2[state_.species_index[i]];
        cooled_[i] = (s == thermostat_.cooled_species) ? 1 : 0;
    }

    friction_decay_ = std::exp(-thermostat_.friction_rate * dt_);
    sigma_cool_.resize(state_.species.size());
    sigma_heat_.resize(state_.species.size());
    for (std::size_t k = 0; k < state_.species.size(); ++k) {
        const double m = state_.species[k].mass;
        sigma_cool_[k] = std::sqrt(k_b * thermostat_.target_temperature / m *
                                   (1.0 - friction_decay_ * friction_decay_));
        sigma_heat_[k] = std::sqrt(k_b * thermostat_.heating_rate * dt_ / m);
    }

    if (workers != 1) pool_ = std::make_unique<ThreadPool>(workers);
    compute_accelerations();
}

Simulation::~Simulation() = default;

void Simulation::compute_accelerations() {
    const std::size_t n = state_.size();
    const Vec3* pos = state_.positions.data();
    const double* cp = charge_pref_.data();
    std::atomic<bool> singular{false};
    const double min_r2 = kMinSeparation * kMinSeparation;

    auto row_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double xi = pos[i].x, yi = pos[i].y, zi = pos[i].z;
            double ax = 0.0, ay = 0.0, az = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dx = xi - pos[j].x;
                const double dy = yi - pos[j].y;
                const double dz = zi - pos[j].z;
                const double r2 = dx * dx + dy * dy + dz * dz;
                if (r2 < min_r2) {
                    singular.store(true, std::memory_order_relaxed);
                    continue;
                }
                const double inv_r = 1.0 / std::sqrt(r2);
                const double w = cp[j] * inv_r * inv_r * inv_r;
                ax += w * dx;
                ay += w * dy;
                az += w * dz;
            }
            const Species& s = state_.species[state_.species_index[i]];
            const double scale = s.charge * inv_mass_[i];
            const Vec3& k = trap_spring_[i];
            accel_[i] = {ax * scale - k.x * pos[i].x, ay * scale - k.y * pos[i].y,
                         az * scale - k.z * pos[i].z};
        }
    };

    if (pool_)
        pool_->parallel_for(n, row_range);
    else
        row_range(0, n);

    if (singular.load())
        throw NumericsError("singular configuration: coincident ions");
}

void Simulation::apply_thermostat() {
    const bool cool = thermostat_.friction_rate > 0.0;
    const bool heat = thermostat_.heating_rate > 0.0;
    if (!cool && !heat) return;
    const std::size_t n = state_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec3& v = state_.velocities[i];
        const std::size_t k = state_.species_index[i];
        if (cool && (cooled_[i] || quench_all_)) {
            v.x = v.x * friction_decay_ + sigma_cool_[k] * rng_.normal();
            v.y = v.y * friction_decay_ + sigma_cool_[k] * rng_.normal();
            v.z = v.z * friction_decay_ + sigma_cool_[k] * rng_.normal();
        }
        if (heat) {
            v.x += sigma_heat_[k] * rng_.normal();
            v.y += sigma_heat_[k] * rng_.normal();
            v.z += sigma_heat_[k] * rng_.normal();
        }
    }
}

void Simulation::step() {
    const std::size_t n = state_.size();
    const double half_dt = 0.5 * dt_;
    for (std::size_t i = 0; i < n; ++i) {
        state_.velocities[i] += half_dt * accel_[i];
        state_.positions[i] += dt_ * state_.velocities[i];
    }
    compute_accelerations();
    for (std::size_t i = 0; i < n; ++i) state_.velocities[i] += half_dt * accel_[i];
    apply_thermostat();
    state_.time += dt_;
}

void Simulation::run_steps(std::size_t n) {
    for (std::size_t s = 0; s < n; ++s) step();
}

double Simulation::total_energy() const {
    const std::size_t n = state_.size();
    const double k_c = PhysicalConstants::reference().coulomb_constant();
    double kinetic = 0.0, trap_pot = 0.0, coulomb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Species& s = state_.species[state_.species_index[i]];
        kinetic += 0.5 * s.mass * norm_sq(state_.velocities[i]);
        const Vec3& k = trap_spring_[i];
        const Vec3& r = state_.positions[i];
        trap_pot += 0.5 * s.mass * (k.x * r.x * r.x + k.y * r.y * r.y + k.z * r.z * r.z);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Species& sj = state_.species[state_.species_index[j]];
            coulomb += k_c * s.charge * sj.charge / norm(state_.positions[i] - state_.positions[j]);
        }
    }
    return kinetic + trap_pot + coulomb;
}

Vec3 Simulation::total_momentum() const { return ldspec::total_momentum(state_); }

IonState step(const IonState& state, const TrapConfig& trap, const ThermostatConfig& thermostat,
              double dt) {
    Simulation sim(state, trap, thermostat, dt, 1);
    sim.step();
    return sim.state();
}

double kinetic_temperature(const IonState& state, const Species& s) {
    const int id = state.species_id(s);
    if (id < 0) throw ConfigError("kinetic_temperature: species '" + s.name + "' absent");
    const double k_b = PhysicalConstants::reference().boltzmann;
    double mean_kin = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.species_index[i] != static_cast<std::uint16_t>(id)) continue;
        mean_kin += 0.5 * s.mass * norm_sq(state.velocities[i]);
        ++count;
    }
    if (count == 0) throw ConfigError("kinetic_temperature: species '" + s.name + "' absent");
    return (2.0 / 3.0) * (mean_kin / static_cast<double>(count)) / k_b;
}

double kinetic_temperature(const Trajectory& traj, const Species& s, std::size_t frame_begin,
                           std::size_t frame_end) {
    const int id = traj.species_id(s);
    if (id < 0 || traj.species_temperature.empty())
        throw ConfigError("kinetic_temperature: species '" + s.name +
                          "' absent or no temperature record");
    const std::size_t frames = traj.n_frames();
    if (frame_end == 0 || frame_end > frames) frame_end = frames;
    if (frame_begin >= frame_end)
        throw ConfigError("kinetic_temperature: empty frame window");
    double sum = 0.0;
    for (std::size_t f = frame_begin; f < frame_end; ++f)
        sum += traj.species_temperature[f * traj.species.size() + static_cast<std::size_t>(id)];
    return sum / static_cast<double>(frame_end - frame_begin);
}

double total_energy(const IonState& state, const TrapConfig& trap) {
    const std::size_t n = state.size();
    const double k_c = PhysicalConstants::reference().coulomb_constant();
    std::vector<Vec3> omega2(state.species.size());
    for (std::size_t k = 0; k < state.species.size(); ++k) {
        const SecularFrequencies f = secular_frequencies(state.species[k], trap);
        omega2[k] = {constants::two_pi * f.fx * constants::two_pi * f.fx,
                     constants::two_pi * f.fy * constants::two_pi * f.fy,
                     constants::two_pi * f.fz * constants::two_pi * f.fz};
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Species& s = state.species[state.species_index[i]];
        const Vec3& w2 = omega2[state.species_index[i]];
        const Vec3& r = state.positions[i];
        e += 0.5 * s.mass * norm_sq(state.velocities[i]);
        e += 0.5 * s.mass * (w2.x * r.x * r.x + w2.y * r.y * r.y + w2.z * r.z * r.z);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Species& sj = state.species[state.species_index[j]];
            e += k_c * s.charge * sj.charge / norm(state.positions[i] - state.positions[j]);
        }
    }
    return e;
}

Vec3 total_momentum(const IonState& state) {
    Vec3 p{};
    for (std::size_t i = 0; i < state.size(); ++i)
        p += state.species[state.species_index[i]].mass * state.velocities[i];
    return p;
}

IonState init_cluster(const ClusterSpec& spec, const ThermostatConfig& thermostat, Rng& rng) {
    validate_cluster(spec);
    const double k_b = PhysicalConstants::reference().boltzmann;

    IonState state;
    for (const auto& sc : spec.species) state.species.push_back(sc.species);

    for (std::size_t k = 0; k < spec.species.size(); ++k) {
        const auto& sc = spec.species[k];
        if (sc.count == 0) continue;
        const double volume = constants::pi * sc.init_radius * sc.init_radius *
                              (2.0 * sc.init_half_length);
        const double a_ws = std::cbrt(3.0 * volume /
                                      (4.0 * constants::pi * static_cast<double>(sc.count)));
        double d_min = 0.9 * a_ws;
        const double sigma_v = std::sqrt(k_b * thermostat.target_temperature / sc.species.mass);

        for (std::size_t i = 0; i < sc.count; ++i) {
            Vec3 p{};
            bool placed = false;
            int attempts = 0;
            while (!placed) {
                const double r = sc.init_radius * std::sqrt(rng.uniform());
                const double phi = constants::two_pi * rng.uniform();
                p = {r * std::cos(phi), r * std::sin(phi),
                     (2.0 * rng.uniform() - 1.0) * sc.init_half_length};
                placed = true;
                for (const auto& q : state.positions) {
                    if (norm_sq(p - q) < d_min * d_min) {
                        placed = false;
                        break;
                    }
                }
                if (!placed && ++attempts >= 5000) {
                    d_min *= 0.85;  // volume too tight for the requested spacing
                    attempts = 0;
                }
            }
            state.positions.push_back(p);
            state.velocities.push_back(
                {sigma_v * rng.normal(), sigma_v * rng.normal(), sigma_v * rng.normal()});
            state.species_index.push_back(static_cast<std::uint16_t>(k));
        }
    }
    return state;
}

Trajectory run(const ClusterSpec& spec, const TrapConfig& trap, const ThermostatConfig& thermostat,
               const RunOptions& options) {
    validate_cluster(spec);
    validate_trap(trap);
    validate_thermostat(thermostat);

    std::vector<Species> species_table;
    for (const auto& sc : spec.species) species_table.push_back(sc.species);
    const double f_max = max_secular_frequency(species_table, trap);

    const double dt = options.dt > 0.0 ? options.dt : 1.0 / (200.0 * f_max);
    const double wanted_interval =
        options.sample_interval > 0.0 ? options.sample_interval : 4.0 * dt;
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(wanted_interval / dt)));
    const double sample_interval = static_cast<double>(stride) * dt;

    Trajectory traj;
    traj.sample_interval = sample_interval;
    traj.species = species_table;

    if (options.duration == 0.0) return traj;  // degenerate input: empty trajectory

    if (options.duration < 100.0 / f_max)
        throw ConfigError("run: sampled duration must cover at least 100 secular periods");

    Rng rng(thermostat.rng_seed);
    IonState initial = init_cluster(spec, thermostat, rng);
    traj.species_index = initial.species_index;

    Simulation sim(std::move(initial), trap, thermostat, dt, options.workers);

    // Equilibration prefix, discarded. The first part is a quench with
    // friction on every species so a randomized lattice crystallizes well
    // inside the prefix; the remainder runs the configured thermostat.
    const std::size_t equil_steps =
        static_cast<std::size_t>(std::llround(options.equilibration / dt));
    const std::size_t quench_steps = equil_steps * 2 / 5;
    sim.set_quench_all(true);
    sim.run_steps(quench_steps);
    sim.set_quench_all(false);
    sim.run_steps(equil_steps - quench_steps);

    const std::size_t n_frames =
        static_cast<std::size_t>(std::floor(options.duration / sample_interval)) + 1;
    const std::size_t n_ions = sim.state().size();
    const std::size_t n_species = species_table.size();
    traj.frames.reserve(n_frames * n_ions);
    traj.species_temperature.reserve(n_frames * n_species);

    const double melt_threshold =
        std::max(1.0, 200.0 * thermostat.target_temperature);  // K

    for (std::size_t f = 0; f < n_frames; ++f) {
        if (f > 0) sim.run_steps(stride);
        const IonState& s = sim.state();
        traj.frames.insert(traj.frames.end(), s.positions.begin(), s.positions.end());
        for (std::size_t k = 0; k < n_species; ++k) {
            const double t_k = kinetic_temperature(s, species_table[k]);
            traj.species_temperature.push_back(t_k);
            if (!std::isfinite(t_k) || t_k > melt_threshold)
                throw NumericsError("melted cluster: temperature runaway in species '" +
                                    species_table[k].name + "'");
        }
    }
    return traj;
}

} // namespace ldspec
