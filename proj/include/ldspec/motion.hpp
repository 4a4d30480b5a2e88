#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ldspec/md.hpp"

namespace ldspec {

enum class Axis { X = 0, Y = 1, Z = 2 };

/// Per-ion r.m.s. coordinate variation over the analysis window (square root
/// of the per-ion variance), ensemble-averaged per axis.
struct MotionStats {
    double delta_x = 0.0;  // m
    double delta_y = 0.0;  // m
    double delta_z = 0.0;  // m
    std::vector<double> per_ion_x;
    std::vector<double> per_ion_y;
    std::vector<double> per_ion_z;
    double window = 0.0;  // s

    double delta(Axis a) const { return a == Axis::X ? delta_x : (a == Axis::Y ? delta_y : delta_z); }
};

/// All-axes motion statistics for one species. Requires >= 2 samples.
MotionStats motion_stats(const Trajectory& traj, const Species& s);

/// Ensemble-averaged r.m.s. variation of one coordinate.
double coordinate_rms_variation(const Trajectory& traj, const Species& s, Axis axis);

struct Histogram2D {
    std::size_t bins_x = 0, bins_y = 0;
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    std::vector<double> weight;  // row-major [iy * bins_x + ix], sums to 1

    double bin_width_x() const { return (x_max - x_min) / static_cast<double>(bins_x); }
    double bin_width_y() const { return (y_max - y_min) / static_cast<double>(bins_y); }
};

/// Compound histogram of the transverse positions (x_i, y_i) of the selected
/// ions over all frames, normalized to unit total. The default span covers
/// +-3x the largest per-ion r.m.s. radius of the selection.
Histogram2D transverse_histogram(const Trajectory& traj, std::span<const std::size_t> ions,
                                 std::size_t bins = 128);

enum class MotionCoordinate { X, Rho };
enum class SpectralWindow { Rectangular, Hann };

/// One-sided amplitude spectral density, m/sqrt(Hz). Parseval-consistent:
/// the integral of density^2 over the grid equals the (window-weighted)
/// time-domain variance of the coordinate.
struct SpectralDensity {
    std::vector<double> frequency;  // Hz, uniform, 0 .. Nyquist
    std::vector<double> density;    // m/sqrt(Hz)
    std::string coordinate;         // "x" or "rho"
    std::string window;             // window function used

    double resolution() const { return frequency.size() > 1 ? frequency[1] : 0.0; }
};

/// Ensemble average (in power) of the per-ion linear spectral density of
/// x_i(t) or of rho_i(t) = sqrt(x^2 + y^2); each ion's time mean is removed
/// first. Requires >= 256 samples.
SpectralDensity linear_spectral_density(const Trajectory& traj, MotionCoordinate coord,
                                        const Species& s,
                                        SpectralWindow window = SpectralWindow::Hann);

} // namespace ldspec
