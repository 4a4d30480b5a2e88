#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/md.hpp"
#include "ldspec/trajectory_io.hpp"

using namespace ldspec;

namespace {

TrapConfig test_trap() {
    TrapConfig trap;
    trap.reference_species = species::hd_plus();
    trap.radial_rf_frequency = 8.10933e5;
    trap.axial_frequency = 5.0e4;
    trap.q_parameter = 0.15;
    trap.rf_drive_frequency = 1.52928e7;
    return trap;
}

ThermostatConfig thermostat_off() {
    ThermostatConfig t;
    t.cooled_species = species::be_plus();
    t.target_temperature = 0.0;
    t.friction_rate = 0.0;
    t.heating_rate = 0.0;
    t.rng_seed = 1;
    return t;
}

ClusterSpec tiny_cluster(std::size_t n_hd, std::size_t n_be) {
    ClusterSpec spec;
    spec.label = "tiny";
    spec.species.push_back({species::hd_plus(), n_hd, 1.0e-5, 1.2e-4});
    spec.species.push_back({species::be_plus(), n_be, 6.0e-5, 2.0e-4});
    return spec;
}

IonState two_ion_state(double separation) {
    IonState state;
    state.species = {species::hd_plus()};
    state.species_index = {0, 0};
    state.positions = {{0, 0, -0.5 * separation}, {0, 0, 0.5 * separation}};
    state.velocities = {{}, {}};
    return state;
}

} // namespace

TEST_CASE("coulomb forces: two elementary charges at 10 um") {
    const IonState state = two_ion_state(10e-6);
    const auto forces = coulomb_forces(state);
    // Coulomb's law by hand: k e^2 / r^2
    const auto& c = PhysicalConstants::reference();
    const double expected = c.coulomb_constant() * c.elementary_charge * c.elementary_charge /
                            (10e-6 * 10e-6);
    CHECK(norm(forces[0]) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(norm(forces[0]) == doctest::Approx(2.306e-18).epsilon(2e-3));
    // opposite directions, exactly
    CHECK(forces[0].z == -forces[1].z);
    CHECK(forces[0].z < 0.0);
}

TEST_CASE("coulomb forces: newton's third law and symmetric middle ion") {
    IonState state;
    state.species = {species::hd_plus()};
    state.species_index = {0, 0, 0};
    state.positions = {{0, 0, -2e-5}, {0, 0, 0}, {0, 0, 2e-5}};
    state.velocities = {{}, {}, {}};
    const auto forces = coulomb_forces(state);
    CHECK(forces[1].x == 0.0);
    CHECK(forces[1].y == 0.0);
    CHECK(forces[1].z == 0.0);

    // third law on a disordered configuration
    IonState random_state;
    random_state.species = {species::hd_plus(), species::be_plus()};
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        random_state.species_index.push_back(static_cast<std::uint16_t>(i % 2));
        random_state.positions.push_back(
            {1e-4 * rng.normal(), 1e-4 * rng.normal(), 3e-4 * rng.normal()});
        random_state.velocities.push_back({});
    }
    const auto f = coulomb_forces(random_state);
    Vec3 sum{};
    double scale = 0.0;
    for (const auto& fi : f) {
        sum += fi;
        scale += norm(fi);
    }
    CHECK(norm(sum) < 1e-12 * scale);
}

TEST_CASE("coulomb forces: coincident ions are singular") {
    IonState state = two_ion_state(0.0);
    CHECK_THROWS_AS(coulomb_forces(state), NumericsError);
}

TEST_CASE("step: dt precondition") {
    const TrapConfig trap = test_trap();
    IonState state = two_ion_state(2e-5);
    const double f_max = secular_frequencies(species::hd_plus(), trap).fx;
    CHECK_THROWS_AS(step(state, trap, thermostat_off(), 2.0 / (100.0 * f_max)), ConfigError);
    CHECK_NOTHROW(step(state, trap, thermostat_off(), 1.0 / (200.0 * f_max)));
}

TEST_CASE("step: single ion energy oscillation bounded at O(dt^2)") {
    const TrapConfig trap = test_trap();
    IonState state;
    state.species = {species::hd_plus()};
    state.species_index = {0};
    state.positions = {{2e-6, 0, 0}};
    state.velocities = {{0, 0.2, 0}};

    const double f_max = secular_frequencies(species::hd_plus(), trap).fx;
    const double dt = 1.0 / (200.0 * f_max);
    Simulation sim(state, trap, thermostat_off(), dt, 1);
    const double e0 = sim.total_energy();
    double max_rel = 0.0;
    const auto period_steps = static_cast<std::size_t>(1.0 / (f_max * dt)) + 1;
    for (std::size_t s = 0; s < period_steps; ++s) {
        sim.step();
        max_rel = std::max(max_rel, std::abs(sim.total_energy() - e0) / e0);
    }
    // velocity-Verlet energy wobble ~ (w dt)^2 / 8 ~ 1.2e-4
    CHECK(max_rel < 5e-4);
}

TEST_CASE("step: equilibrium two-ion crystal is a fixed point") {
    const TrapConfig trap = test_trap();
    const Species hd = species::hd_plus();
    const auto& c = PhysicalConstants::reference();
    const double wz = constants::two_pi * secular_frequencies(hd, trap).fz;
    // k q^2 / d^2 = m wz^2 d / 2
    const double d = std::cbrt(2.0 * c.coulomb_constant() * hd.charge * hd.charge /
                               (hd.mass * wz * wz));
    IonState state = two_ion_state(d);
    Simulation sim(state, trap, thermostat_off(), 1.0 / (200.0 * 0.81e6), 1);
    sim.run_steps(10);
    CHECK(std::abs(sim.state().positions[0].z + 0.5 * d) < 1e-12);
    CHECK(std::abs(sim.state().positions[1].z - 0.5 * d) < 1e-12);
}

TEST_CASE("momentum conserved without trap and thermostat") {
    IonState state;
    state.species = {species::hd_plus(), species::be_plus()};
    Rng rng(11);
    for (int i = 0; i < 16; ++i) {
        state.species_index.push_back(static_cast<std::uint16_t>(i % 2));
        state.positions.push_back({1e-4 * rng.normal(), 1e-4 * rng.normal(), 1e-4 * rng.normal()});
        state.velocities.push_back({0.3 * rng.normal(), 0.3 * rng.normal(), 0.3 * rng.normal()});
    }
    Simulation sim(state, std::nullopt, thermostat_off(), 5e-9, 1);
    const Vec3 p0 = sim.total_momentum();
    double p_scale = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        p_scale += state.species[state.species_index[i]].mass * norm(state.velocities[i]);
    sim.run_steps(10000);
    const Vec3 p1 = sim.total_momentum();
    CHECK(norm(p1 - p0) < 1e-12 * p_scale);
}

TEST_CASE("run: determinism and worker-count invariance") {
    const ClusterSpec spec = tiny_cluster(6, 18);
    const TrapConfig trap = test_trap();
    ThermostatConfig thermo = thermostat_off();
    thermo.target_temperature = 0.02;
    thermo.friction_rate = 3e4;
    thermo.heating_rate = 1.0;
    thermo.rng_seed = 99;

    RunOptions opts;
    opts.duration = 1.5e-4;
    opts.equilibration = 4e-5;
    opts.sample_interval = 1e-6;
    opts.workers = 1;

    const Trajectory a = run(spec, trap, thermo, opts);
    const Trajectory b = run(spec, trap, thermo, opts);
    REQUIRE(a.n_frames() == b.n_frames());
    bool identical = true;
    for (std::size_t i = 0; i < a.frames.size(); ++i)
        identical = identical && a.frames[i].x == b.frames[i].x &&
                    a.frames[i].y == b.frames[i].y && a.frames[i].z == b.frames[i].z;
    CHECK(identical);

    opts.workers = 2;
    const Trajectory c = run(spec, trap, thermo, opts);
    REQUIRE(c.n_frames() == a.n_frames());
    bool same_across_workers = true;
    for (std::size_t i = 0; i < a.frames.size(); ++i)
        same_across_workers = same_across_workers && a.frames[i].x == c.frames[i].x &&
                              a.frames[i].y == c.frames[i].y && a.frames[i].z == c.frames[i].z;
    CHECK(same_across_workers);
}

TEST_CASE("run: zero duration gives an empty trajectory") {
    const Trajectory traj = run(tiny_cluster(2, 6), test_trap(), thermostat_off(), RunOptions{});
    CHECK(traj.n_frames() == 0);
    CHECK(traj.duration() == 0.0);
}

TEST_CASE("run: too-short duration rejected") {
    RunOptions opts;
    opts.duration = 1e-5;  // below 100 secular periods
    CHECK_THROWS_AS(run(tiny_cluster(2, 6), test_trap(), thermostat_off(), opts), ConfigError);
}

TEST_CASE("run: temperature runaway raises the melted-cluster diagnostic") {
    ThermostatConfig thermo;
    thermo.cooled_species = species::be_plus();
    thermo.target_temperature = 1e-3;
    thermo.friction_rate = 1e-3;   // effectively no cooling
    thermo.heating_rate = 1e7;     // violent heating
    thermo.rng_seed = 5;
    RunOptions opts;
    opts.duration = 1.5e-4;
    opts.equilibration = 0.0;
    opts.sample_interval = 1e-6;
    CHECK_THROWS_WITH_AS(run(tiny_cluster(4, 12), test_trap(), thermo, opts),
                         doctest::Contains("melted cluster"), NumericsError);
}

TEST_CASE("kinetic temperature") {
    IonState state;
    state.species = {species::hd_plus(), species::be_plus()};
    state.species_index = {0, 0};
    state.positions = {{0, 0, 0}, {0, 0, 1e-5}};
    state.velocities = {{}, {}};
    CHECK(kinetic_temperature(state, species::hd_plus()) == 0.0);
    CHECK_THROWS_AS(kinetic_temperature(state, species::be_plus()), ConfigError);

    // one ion at the speed that makes m v^2 / 2 = (3/2) kB 10 mK
    const auto& c = PhysicalConstants::reference();
    const Species hd = species::hd_plus();
    const double v = std::sqrt(3.0 * c.boltzmann * 0.01 / hd.mass);
    state.velocities[0] = {v, 0, 0};
    state.velocities[1] = {v, 0, 0};
    CHECK(kinetic_temperature(state, hd) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("trajectory io round trip") {
    const ClusterSpec spec = tiny_cluster(3, 9);
    ThermostatConfig thermo = thermostat_off();
    thermo.target_temperature = 0.02;
    thermo.friction_rate = 2e4;
    RunOptions opts;
    opts.duration = 1.3e-4;
    opts.equilibration = 2e-5;
    opts.sample_interval = 2e-6;
    const Trajectory traj = run(spec, test_trap(), thermo, opts);

    const auto path = std::filesystem::temp_directory_path() / "ldspec_test_roundtrip.traj";
    write_trajectory(path, traj);
    const Trajectory back = read_trajectory(path);

    REQUIRE(back.n_frames() == traj.n_frames());
    REQUIRE(back.n_ions() == traj.n_ions());
    CHECK(back.sample_interval == traj.sample_interval);
    CHECK(back.species_index == traj.species_index);
    CHECK(back.species_temperature == traj.species_temperature);
    bool identical = true;
    for (std::size_t i = 0; i < traj.frames.size(); ++i)
        identical = identical && back.frames[i].x == traj.frames[i].x &&
                    back.frames[i].y == traj.frames[i].y && back.frames[i].z == traj.frames[i].z;
    CHECK(identical);
    CHECK(back.species[0].name == "HD+");

    const std::uint64_t h1 = fnv1a_file_hash(path);
    write_trajectory(path, traj);
    CHECK(fnv1a_file_hash(path) == h1);

    // truncated file rejected
    std::FILE* f = std::fopen(path.string().c_str(), "rb+");
    REQUIRE(f);
    std::fclose(f);
    std::filesystem::resize_file(path, 40);
    CHECK_THROWS_AS(read_trajectory(path), ConfigError);
    std::filesystem::remove(path);
}
