#pragma once

#include <optional>
#include <vector>

#include "ldspec/md.hpp"
#include "ldspec/motion.hpp"

namespace ldspec {

/// Motional spectroscopy line shape: ensemble-averaged power spectrum of the
/// phase factor exp(i 2 pi xi_i(t) / lambda) over the trajectory, normalized
/// to unit total weight. The zero-detuning bin is the Lamb-Dicke peak.
struct LineShape {
    std::vector<double> detuning;  // Hz, ascending, resolution 1/(n dt)
    std::vector<double> weight;    // >= 0, sums to 1
    double peak = 0.0;             // weight of the zero-detuning bin, L(0)
    double wavelength = 0.0;       // m
    Axis axis = Axis::X;
};

/// Rectangular-window line shape; any tapering would leak the Lamb-Dicke
/// peak out of the DC bin. A species filter restricts the ensemble (the
/// probed molecular ions); without it every ion enters the average.
LineShape lineshape(const Trajectory& traj, double wavelength, Axis axis = Axis::X,
                    const std::optional<Species>& only = std::nullopt);

/// L(0): squared magnitude of each ion's time-averaged phase factor,
/// ensemble-averaged. Equals the zero-detuning bin of lineshape().
double lamb_dicke_peak(const Trajectory& traj, double wavelength, Axis axis = Axis::X,
                       const std::optional<Species>& only = std::nullopt);

/// Gaussian-coordinate closed form exp(-(2 pi dx / lambda)^2).
double gaussian_peak_estimate(double delta_x, double wavelength);

/// Harmonic single-ion closed form J0(2 pi sqrt(2) dx / lambda)^2.
double single_ion_peak_estimate(double delta_x, double wavelength);

/// Bessel function of the first kind, order zero; absolute accuracy better
/// than 1e-10 over [0, 20] (power series at small argument, Hankel
/// asymptotic expansion at large).
double bessel_j0(double z);

} // namespace ldspec
