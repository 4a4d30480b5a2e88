#include "ldspec/trap.hpp"

#include <cmath>

#include "ldspec/errors.hpp"

namespace ldspec {

void validate_species(const Species& s) {
    if (!(s.mass > 0.0))
        throw ConfigError("species '" + s.name + "': mass must be positive");
    const double e = PhysicalConstants::reference().elementary_charge;
    const double q_over_e = s.charge / e;
    const double nearest = std::round(q_over_e);
    if (nearest < 1.0 || std::abs(q_over_e - nearest) > 1e-9)
        throw ConfigError("species '" + s.name +
                          "': charge must be a positive integer multiple of e");
}

Species make_species(const std::string& name, double mass_u, int charge_e) {
    const auto& c = PhysicalConstants::reference();
    Species s{name, mass_u * c.atomic_mass_unit,
              static_cast<double>(charge_e) * c.elementary_charge};
    validate_species(s);
    return s;
}

namespace species {

Species be_plus() { return make_species("Be+", 9.0122, 1); }
Species hd_plus() { return make_species("HD+", 3.0214, 1); }

} // namespace species

void validate_trap(const TrapConfig& trap) {
    validate_species(trap.reference_species);
    if (!(trap.radial_rf_frequency > 0.0))
        throw ConfigError("trap: radial_rf_frequency must be positive");
    if (trap.axial_frequency < 0.0)
        throw ConfigError("trap: axial_frequency must be non-negative");
    const double fr2 = trap.radial_rf_frequency * trap.radial_rf_frequency -
                       0.5 * trap.axial_frequency * trap.axial_frequency;
    if (!(fr2 > 0.0))
        throw ConfigError("trap: reference species is untrapped "
                          "(radial_rf^2 - axial^2/2 must be positive)");
    if (!(trap.q_parameter > 0.0 && trap.q_parameter < 0.9))
        throw ConfigError("trap: q_parameter must lie in (0, 0.9)");
}

SecularFrequencies secular_frequencies(const Species& s, const TrapConfig& trap) {
    validate_trap(trap);
    validate_species(s);

    const Species& ref = trap.reference_species;
    // charge-to-mass ratio relative to the reference species
    const double scale = (s.charge / s.mass) / (ref.charge / ref.mass);

    const double f_rf = trap.radial_rf_frequency * scale;
    const double fz = trap.axial_frequency * std::sqrt(scale);
    const double fr2 = f_rf * f_rf - 0.5 * fz * fz;
    if (!(fr2 > 0.0))
        throw ConfigError("untrapped species '" + s.name +
                          "': effective radial frequency squared is not positive");
    const double fr = std::sqrt(fr2);
    return {fr, fr, fz};
}

Vec3 pseudopotential_force(const Vec3& position, const Species& s, const TrapConfig& trap) {
    const SecularFrequencies f = secular_frequencies(s, trap);
    const double wx = constants::two_pi * f.fx;
    const double wy = constants::two_pi * f.fy;
    const double wz = constants::two_pi * f.fz;
    return {-s.mass * wx * wx * position.x,
            -s.mass * wy * wy * position.y,
            -s.mass * wz * wz * position.z};
}

bool is_lamb_dicke(double motion_range, double wavelength) {
    return motion_range < wavelength / constants::two_pi;
}

} // namespace ldspec
