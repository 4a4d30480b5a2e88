#pragma once

namespace ldspec {

/// CODATA-style reference values, SI units throughout. The canonical table
/// lives here; data/constants.cfg ships the same numbers for startup
/// consumption and a unit test guards the two against drift.
struct PhysicalConstants {
    double elementary_charge;    // C
    double bohr_radius;          // m
    double reduced_planck;       // J s
    double planck;               // J s
    double boltzmann;            // J/K
    double vacuum_permittivity;  // F/m
    double speed_of_light;       // m/s
    double atomic_mass_unit;     // kg

    /// 1/(4 pi eps0), N m^2 / C^2
    double coulomb_constant() const;

    /// Atomic unit of polarisability 4 pi eps0 a0^3, C^2 m^2 / J.
    double polarisability_au() const;

    static const PhysicalConstants& reference();
};

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
} // namespace constants

} // namespace ldspec
