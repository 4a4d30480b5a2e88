#include "ldspec/motion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/fft.hpp"

namespace ldspec {

namespace {

std::vector<std::size_t> require_ions(const Trajectory& traj, const Species& s) {
    auto ions = traj.ions_of(s);
    if (ions.empty())
        throw ConfigError("trajectory contains no ions of species '" + s.name + "'");
    return ions;
}

// variance of one coordinate of one ion over all frames (two-pass)
double coordinate_variance(const Trajectory& traj, std::size_t ion, int axis) {
    const std::size_t n = traj.n_frames();
    double mean = 0.0;
    for (std::size_t f = 0; f < n; ++f) mean += traj.position(f, ion)[axis];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t f = 0; f < n; ++f) {
        const double d = traj.position(f, ion)[axis] - mean;
        var += d * d;
    }
    return var / static_cast<double>(n);
}

} // namespace

MotionStats motion_stats(const Trajectory& traj, const Species& s) {
    if (traj.n_frames() < 2)
        throw ConfigError("motion_stats: need at least 2 samples");
    const auto ions = require_ions(traj, s);

    MotionStats stats;
    stats.window = traj.duration();
    for (int axis = 0; axis < 3; ++axis) {
        auto& per_ion = axis == 0 ? stats.per_ion_x : (axis == 1 ? stats.per_ion_y : stats.per_ion_z);
        per_ion.reserve(ions.size());
        double sum = 0.0;
        for (const std::size_t ion : ions) {
            const double rms = std::sqrt(coordinate_variance(traj, ion, axis));
            per_ion.push_back(rms);
            sum += rms;
        }
        const double ensemble = sum / static_cast<double>(ions.size());
        (axis == 0 ? stats.delta_x : axis == 1 ? stats.delta_y : stats.delta_z) = ensemble;
    }
    return stats;
}

double coordinate_rms_variation(const Trajectory& traj, const Species& s, Axis axis) {
    return motion_stats(traj, s).delta(axis);
}

Histogram2D transverse_histogram(const Trajectory& traj, std::span<const std::size_t> ions,
                                 std::size_t bins) {
    if (ions.empty()) throw ConfigError("transverse_histogram: no ions selected");
    if (bins == 0) throw ConfigError("transverse_histogram: need at least one bin");
    const std::size_t n = traj.n_frames();
    if (n == 0) throw ConfigError("transverse_histogram: empty trajectory");

    double max_rms_radius = 0.0;
    for (const std::size_t ion : ions) {
        double mean_r2 = 0.0;
        for (std::size_t f = 0; f < n; ++f) {
            const Vec3& p = traj.position(f, ion);
            mean_r2 += p.x * p.x + p.y * p.y;
        }
        max_rms_radius = std::max(max_rms_radius, std::sqrt(mean_r2 / static_cast<double>(n)));
    }
    double span = 3.0 * max_rms_radius;
    if (span == 0.0) span = 1e-9;  // all ions pinned at the axis

    Histogram2D h;
    h.bins_x = h.bins_y = bins;
    h.x_min = h.y_min = -span;
    h.x_max = h.y_max = span;
    h.weight.assign(bins * bins, 0.0);

    double total = 0.0;
    const double inv_w = static_cast<double>(bins) / (2.0 * span);
    for (const std::size_t ion : ions) {
        for (std::size_t f = 0; f < n; ++f) {
            const Vec3& p = traj.position(f, ion);
            const double fx = (p.x - h.x_min) * inv_w;
            const double fy = (p.y - h.y_min) * inv_w;
            if (fx < 0.0 || fy < 0.0) continue;
            const auto ix = static_cast<std::size_t>(fx);
            const auto iy = static_cast<std::size_t>(fy);
            if (ix >= bins || iy >= bins) continue;
            h.weight[iy * bins + ix] += 1.0;
            total += 1.0;
        }
    }
    if (total > 0.0)
        for (double& w : h.weight) w /= total;
    return h;
}

SpectralDensity linear_spectral_density(const Trajectory& traj, MotionCoordinate coord,
                                        const Species& s, SpectralWindow window) {
    const std::size_t n = traj.n_frames();
    if (n < 256) throw ConfigError("linear_spectral_density: need at least 256 samples");
    const auto ions = require_ions(traj, s);
    const double fs = 1.0 / traj.sample_interval;

    std::vector<double> w(n);
    for (std::size_t t = 0; t < n; ++t) {
        w[t] = window == SpectralWindow::Hann
                   ? 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(t) /
                                          static_cast<double>(n - 1))
                   : 1.0;
    }
    double s2 = 0.0;
    for (const double wt : w) s2 += wt * wt;

    const std::size_t n_out = n / 2 + 1;
    std::vector<double> power(n_out, 0.0);
    std::vector<std::complex<double>> series(n);

    for (const std::size_t ion : ions) {
        double mean = 0.0;
        for (std::size_t f = 0; f < n; ++f) {
            const Vec3& p = traj.position(f, ion);
            const double v = coord == MotionCoordinate::X ? p.x : std::hypot(p.x, p.y);
            series[f] = v;
            mean += v;
        }
        mean /= static_cast<double>(n);
        for (std::size_t f = 0; f < n; ++f)
            series[f] = (series[f].real() - mean) * w[f];

        const auto spectrum = dft(series);
        for (std::size_t k = 0; k < n_out; ++k) {
            const bool edge = (k == 0) || (2 * k == n);
            power[k] += (edge ? 1.0 : 2.0) * std::norm(spectrum[k]) / (fs * s2);
        }
    }

    SpectralDensity out;
    out.coordinate = coord == MotionCoordinate::X ? "x" : "rho";
    out.window = window == SpectralWindow::Hann ? "hann" : "rectangular";
    out.frequency.resize(n_out);
    out.density.resize(n_out);
    const double inv_ions = 1.0 / static_cast<double>(ions.size());
    for (std::size_t k = 0; k < n_out; ++k) {
        out.frequency[k] = static_cast<double>(k) * fs / static_cast<double>(n);
        out.density[k] = std::sqrt(power[k] * inv_ions);
    }
    return out;
}

} // namespace ldspec
