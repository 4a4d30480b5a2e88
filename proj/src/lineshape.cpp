#include "ldspec/lineshape.hpp"

#include <cmath>
#include <complex>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/fft.hpp"

namespace ldspec {

namespace {

std::vector<std::size_t> select_ions(const Trajectory& traj, const std::optional<Species>& only) {
    if (only) {
        auto ions = traj.ions_of(*only);
        if (ions.empty())
            throw ConfigError("trajectory contains no ions of species '" + only->name + "'");
        return ions;
    }
    std::vector<std::size_t> ions(traj.n_ions());
    for (std::size_t i = 0; i < ions.size(); ++i) ions[i] = i;
    if (ions.empty()) throw ConfigError("trajectory contains no ions");
    return ions;
}

// Power series sum in extended precision; usable to z ~ 20 before
// cancellation erodes the last digits, switched out well before that.
long double j0_series(long double z) {
    const long double q = 0.25L * z * z;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k <= 200; ++k) {
        term *= -q / (static_cast<long double>(k) * static_cast<long double>(k));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

// Hankel asymptotic expansion with optimal truncation.
long double j0_asymptotic(long double z) {
    constexpr int kMaxCoeff = 40;
    long double g[kMaxCoeff + 1];
    g[0] = 1.0L;
    for (int m = 1; m <= kMaxCoeff; ++m) {
        const long double odd = 2.0L * m - 1.0L;
        g[m] = g[m - 1] * odd * odd / (8.0L * m);
    }

    long double p = 0.0L, q = 0.0L;
    long double prev = 1e30L;
    long double sign = 1.0L;
    for (int k = 0; 2 * k + 1 <= kMaxCoeff; ++k) {
        const long double tp = g[2 * k] / std::pow(z, 2.0L * k);
        const long double tq = g[2 * k + 1] / std::pow(z, 2.0L * k + 1.0L);
        if (tp > prev) break;  // series started diverging
        p += sign * tp;
        q += -sign * tq;
        prev = tp;
        sign = -sign;
    }

    const long double chi = z - 0.25L * 3.14159265358979323846264338L;
    const long double amp = std::sqrt(2.0L / (3.14159265358979323846264338L * z));
    return amp * (p * std::cos(chi) - q * std::sin(chi));
}

} // namespace

double bessel_j0(double z) {
    const long double az = std::abs(static_cast<long double>(z));
    // The asymptotic branch reaches 1e-10 absolute accuracy only for
    // arguments >~ 12, so the series covers a wider range than usual.
    if (az <= 12.0L) return static_cast<double>(j0_series(az));
    return static_cast<double>(j0_asymptotic(az));
}

LineShape lineshape(const Trajectory& traj, double wavelength, Axis axis,
                    const std::optional<Species>& only) {
    if (!(wavelength > 0.0)) throw ConfigError("lineshape: wavelength must be positive");
    const std::size_t n = traj.n_frames();
    if (n == 0) throw ConfigError("lineshape: empty trajectory");
    const auto ions = select_ions(traj, only);
    const int ax = static_cast<int>(axis);
    const double k_wave = constants::two_pi / wavelength;

    std::vector<double> weight(n, 0.0);
    std::vector<std::complex<double>> series(n);
    for (const std::size_t ion : ions) {
        for (std::size_t f = 0; f < n; ++f) {
            const double phase = k_wave * traj.position(f, ion)[ax];
            series[f] = {std::cos(phase), std::sin(phase)};
        }
        const auto spectrum = dft(series);
        for (std::size_t k = 0; k < n; ++k) weight[k] += std::norm(spectrum[k]);
    }
    const double norm = 1.0 /
        (static_cast<double>(ions.size()) * static_cast<double>(n) * static_cast<double>(n));
    for (double& w : weight) w *= norm;

    // reorder DFT bins to an ascending detuning grid
    const std::size_t n_neg = n / 2;
    const double df = 1.0 / (static_cast<double>(n) * traj.sample_interval);

    LineShape ls;
    ls.wavelength = wavelength;
    ls.axis = axis;
    ls.detuning.resize(n);
    ls.weight.resize(n);
    for (std::size_t out = 0; out < n; ++out) {
        const std::size_t k = (out + n - n_neg) % n;
        const double f_signed = (k < n - n_neg) ? static_cast<double>(k)
                                                : static_cast<double>(k) - static_cast<double>(n);
        ls.detuning[out] = f_signed * df;
        ls.weight[out] = weight[k];
    }
    ls.peak = weight[0];
    return ls;
}

double lamb_dicke_peak(const Trajectory& traj, double wavelength, Axis axis,
                       const std::optional<Species>& only) {
    if (!(wavelength > 0.0)) throw ConfigError("lamb_dicke_peak: wavelength must be positive");
    const std::size_t n = traj.n_frames();
    if (n == 0) throw ConfigError("lamb_dicke_peak: empty trajectory");
    const auto ions = select_ions(traj, only);
    const int ax = static_cast<int>(axis);
    const double k_wave = constants::two_pi / wavelength;

    double sum = 0.0;
    for (const std::size_t ion : ions) {
        double re = 0.0, im = 0.0;
        for (std::size_t f = 0; f < n; ++f) {
            const double phase = k_wave * traj.position(f, ion)[ax];
            re += std::cos(phase);
            im += std::sin(phase);
        }
        re /= static_cast<double>(n);
        im /= static_cast<double>(n);
        sum += re * re + im * im;
    }
    return sum / static_cast<double>(ions.size());
}

double gaussian_peak_estimate(double delta_x, double wavelength) {
    if (!(delta_x >= 0.0) || !(wavelength > 0.0))
        throw ConfigError("gaussian_peak_estimate: arguments must be positive");
    const double a = constants::two_pi * delta_x / wavelength;
    return std::exp(-a * a);
}

double single_ion_peak_estimate(double delta_x, double wavelength) {
    if (!(delta_x >= 0.0) || !(wavelength > 0.0))
        throw ConfigError("single_ion_peak_estimate: arguments must be positive");
    const double j = bessel_j0(constants::two_pi * std::sqrt(2.0) * delta_x / wavelength);
    return j * j;
}

} // namespace ldspec
