#pragma once

#include <string>

#include "ldspec/constants.hpp"
#include "ldspec/vec.hpp"

namespace ldspec {

struct Species {
    std::string name;
    double mass = 0.0;    // kg
    double charge = 0.0;  // C, positive integer multiple of e

    bool operator==(const Species& o) const { return name == o.name; }
};

/// Throws ConfigError unless mass > 0 and charge is a positive integer
/// multiple of the elementary charge.
void validate_species(const Species& s);

Species make_species(const std::string& name, double mass_u, int charge_e);

namespace species {
/// Repository default coolant ion, 9.0122 u.
Species be_plus();
/// Repository default molecular ion, 3.0214 u.
Species hd_plus();
} // namespace species

/// Linear quadrupole trap in the pseudopotential approximation, specified
/// through the secular frequencies of a reference species. q_parameter and
/// rf_drive_frequency are reporting metadata only; forces never use them.
struct TrapConfig {
    Species reference_species;
    double radial_rf_frequency = 0.0;  // Hz, pure-RF radial secular frequency of the reference
    double axial_frequency = 0.0;      // Hz, axial secular frequency of the reference
    double q_parameter = 0.0;          // dimensionless, metadata
    double rf_drive_frequency = 0.0;   // Hz, metadata
};

/// Throws ConfigError unless the reference species is trapped (positive
/// effective radial frequency squared) and q_parameter lies in (0, 0.9).
void validate_trap(const TrapConfig& trap);

struct SecularFrequencies {
    double fx = 0.0;  // Hz, effective radial (includes -fz^2/2 defocusing)
    double fy = 0.0;  // Hz, equals fx
    double fz = 0.0;  // Hz, axial
};

/// Secular frequencies of an arbitrary species in the trap. The pure-RF
/// radial part scales as (charge/mass) relative to the reference species and
/// the axial part as sqrt(charge/mass); the returned radial values carry the
/// -fz^2/2 defocusing correction. Throws ConfigError ("untrapped species")
/// when the effective radial frequency squared is not positive.
SecularFrequencies secular_frequencies(const Species& s, const TrapConfig& trap);

/// Harmonic pseudopotential force on one ion: F_xi = -m (2 pi f_xi)^2 xi.
Vec3 pseudopotential_force(const Vec3& position, const Species& s, const TrapConfig& trap);

/// Lamb-Dicke condition: motion range strictly below wavelength / 2 pi.
bool is_lamb_dicke(double motion_range, double wavelength);

} // namespace ldspec
