#include "ldspec/constants.hpp"

namespace ldspec {

double PhysicalConstants::coulomb_constant() const {
    return 1.0 / (4.0 * constants::pi * vacuum_permittivity);
}

double PhysicalConstants::polarisability_au() const {
    const double a0 = bohr_radius;
    return 4.0 * constants::pi * vacuum_permittivity * a0 * a0 * a0;
}

const PhysicalConstants& PhysicalConstants::reference() {
    static const PhysicalConstants table{
        1.602176634e-19,    // elementary_charge
        5.29177210903e-11,  // bohr_radius
        1.054571817e-34,    // reduced_planck
        6.62607015e-34,     // planck
        1.380649e-23,       // boltzmann
        8.8541878128e-12,   // vacuum_permittivity
        299792458.0,        // speed_of_light
        1.66053906660e-27,  // atomic_mass_unit
    };
    return table;
}

} // namespace ldspec
