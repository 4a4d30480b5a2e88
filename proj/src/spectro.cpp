#include "ldspec/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/rng.hpp"

namespace ldspec {

void validate_beam(const BeamConfig& beam) {
    if (!(beam.power >= 0.0) || !(beam.cross_section_area > 0.0) ||
        !(beam.transition_dipole > 0.0) || !(beam.frequency > 0.0))
        throw ConfigError("beam: power must be >= 0 and area, dipole, frequency positive");
}

double rabi_frequency(const BeamConfig& beam) {
    validate_beam(beam);
    const auto& c = PhysicalConstants::reference();
    const double e_sq = 2.0 * beam.power /
                        (c.vacuum_permittivity * c.speed_of_light * beam.cross_section_area);
    return beam.transition_dipole * std::sqrt(e_sq) / c.reduced_planck;
}

double power_broadened_fwhm(double omega_rabi) {
    if (omega_rabi < 0.0) throw ConfigError("power_broadened_fwhm: negative Rabi frequency");
    return std::sqrt(2.0) * omega_rabi / constants::two_pi;
}

double doppler_fwhm(double f0, double temperature, double mass) {
    if (!(f0 > 0.0) || !(mass > 0.0) || temperature < 0.0)
        throw ConfigError("doppler_fwhm: needs f0 > 0, mass > 0, T >= 0");
    const auto& c = PhysicalConstants::reference();
    return f0 / c.speed_of_light *
           std::sqrt(8.0 * std::log(2.0) * c.boltzmann * temperature / mass);
}

std::vector<double> rempd_spectrum(const BeamConfig& beam, const TransitionModel& model,
                                   double b_field, std::span<const double> detunings,
                                   const RempdOptions& options) {
    if (!(options.duration > 0.0)) throw ConfigError("rempd_spectrum: duration must be positive");
    if (options.weight_plus < 0.0 || options.weight_plus > 1.0)
        throw ConfigError("rempd_spectrum: weight_plus must lie in [0, 1]");
    const double omega = rabi_frequency(beam);
    const double gamma2 = options.decoherence_rate * options.decoherence_rate;
    const double f0 = transition_frequency(model, Branch::TPlus, 0.0);
    const double off_plus = transition_frequency(model, Branch::TPlus, b_field) - f0;
    const double off_minus = transition_frequency(model, Branch::TMinus, b_field) - f0;

    auto rho = [&](double detuning, double offset) {
        const double d = constants::two_pi * (detuning - offset);
        return 0.25 * omega * omega / (d * d + 0.5 * omega * omega + 0.25 * gamma2);
    };

    Rng noise(options.noise_seed);
    std::vector<double> signal;
    signal.reserve(detunings.size());
    for (const double detuning : detunings) {
        if (!std::isfinite(detuning)) throw ConfigError("rempd_spectrum: non-finite detuning");
        const double excitation = options.weight_plus * rho(detuning, off_plus) +
                                  (1.0 - options.weight_plus) * rho(detuning, off_minus);
        double s = 1.0 - std::exp(-options.dissociation_rate * excitation * options.duration);
        if (options.noise_sigma > 0.0) s += options.noise_sigma * noise.normal();
        signal.push_back(s);
    }
    return signal;
}

namespace {

struct NormalizedFitData {
    std::vector<double> x, y;
    double x_shift = 0.0, x_scale = 1.0;
    double y_shift = 0.0, y_scale = 1.0;
};

// Solve a 4x4 linear system in place; returns false when singular.
bool solve4(double a[4][4], double b[4], double out[4]) {
    int perm[4] = {0, 1, 2, 3};
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[perm[r]][col]) > std::abs(a[perm[pivot]][col])) pivot = r;
        std::swap(perm[col], perm[pivot]);
        const double diag = a[perm[col]][col];
        if (std::abs(diag) < 1e-300) return false;
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[perm[r]][col] / diag;
            for (int c2 = col; c2 < 4; ++c2) a[perm[r]][c2] -= f * a[perm[col]][c2];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    for (int col = 3; col >= 0; --col) {
        double s = b[perm[col]];
        for (int c2 = col + 1; c2 < 4; ++c2) s -= a[perm[col]][c2] * out[c2];
        out[col] = s / a[perm[col]][col];
    }
    return true;
}

// Inverse of a symmetric positive-definite 4x4 (Gauss-Jordan).
bool invert4(const double in[4][4], double out[4][4]) {
    double a[4][8];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            a[r][c] = in[r][c];
            a[r][c + 4] = (r == c) ? 1.0 : 0.0;
        }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-300) return false;
        for (int c = 0; c < 8; ++c) std::swap(a[col][c], a[pivot][c]);
        const double inv_d = 1.0 / a[col][col];
        for (int c = 0; c < 8; ++c) a[col][c] *= inv_d;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (int c = 0; c < 8; ++c) a[r][c] -= f * a[col][c];
        }
    }
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r][c] = a[r][c + 4];
    return true;
}

double lorentz(const double p[4], double x) {
    const double h = 0.25 * p[1] * p[1];  // (fwhm/2)^2
    const double u = x - p[0];
    return p[2] * h / (u * u + h) + p[3];
}

void jacobian_row(const double p[4], double x, double j[4]) {
    const double half = 0.5 * p[1];
    const double h = half * half;
    const double u = x - p[0];
    const double d = u * u + h;
    const double inv_d2 = 1.0 / (d * d);
    j[0] = p[2] * h * 2.0 * u * inv_d2;     // d/d center
    j[1] = p[2] * half * u * u * inv_d2;    // d/d fwhm
    j[2] = h / d;                           // d/d amplitude
    j[3] = 1.0;                             // d/d offset
}

double sum_sq_residuals(const NormalizedFitData& d, const double p[4]) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double r = d.y[i] - lorentz(p, d.x[i]);
        ssr += r * r;
    }
    return ssr;
}

} // namespace

LorentzianFit fit_lorentzian(std::span<const double> detunings, std::span<const double> signal,
                             std::optional<LorentzianParams> initial_guess) {
    const std::size_t n = detunings.size();
    if (n != signal.size()) throw ConfigError("fit_lorentzian: size mismatch");
    if (n < 5) throw ConfigError("fit_lorentzian: need at least 5 points");

    const double y_min = *std::min_element(signal.begin(), signal.end());
    const double y_max = *std::max_element(signal.begin(), signal.end());
    if (!(y_max > y_min)) throw NumericsError("fit_lorentzian: degenerate constant data");

    // Normalize to O(1) internally; absolute detunings can be ~1e12 Hz.
    NormalizedFitData d;
    d.y_shift = y_min;
    d.y_scale = y_max - y_min;

    double w_sum = 0.0, centroid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = signal[i] - y_min;
        w_sum += w;
        centroid += w * detunings[i];
    }
    centroid /= w_sum;
    double second = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        second += (signal[i] - y_min) * (detunings[i] - centroid) * (detunings[i] - centroid);
    double width_est = 2.0 * std::sqrt(second / w_sum);
    if (!(width_est > 0.0)) {
        const auto [lo, hi] = std::minmax_element(detunings.begin(), detunings.end());
        width_est = (*hi - *lo) / static_cast<double>(n);
    }
    d.x_shift = centroid;
    d.x_scale = width_est;
    d.x.resize(n);
    d.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.x[i] = (detunings[i] - d.x_shift) / d.x_scale;
        d.y[i] = (signal[i] - d.y_shift) / d.y_scale;
    }

    double p[4];
    if (initial_guess) {
        p[0] = (initial_guess->center - d.x_shift) / d.x_scale;
        p[1] = initial_guess->fwhm / d.x_scale;
        p[2] = initial_guess->amplitude / d.y_scale;
        p[3] = (initial_guess->offset - d.y_shift) / d.y_scale;
    } else {
        p[0] = 0.0;  // weighted centroid, already shifted out
        p[1] = 1.0;  // second-moment estimate, already scaled out
        p[2] = 1.0;  // peak minus baseline
        p[3] = 0.0;  // baseline
    }

    double lambda = 1e-3;
    double ssr = sum_sq_residuals(d, p);
    int iterations = 0;
    bool converged = false;
    constexpr int kMaxIterations = 200;
    constexpr double kRelTol = 1e-8;

    while (iterations < kMaxIterations && !converged) {
        ++iterations;
        double jtj[4][4] = {};
        double jtr[4] = {};
        double jrow[4];
        for (std::size_t i = 0; i < n; ++i) {
            jacobian_row(p, d.x[i], jrow);
            const double r = d.y[i] - lorentz(p, d.x[i]);
            for (int a = 0; a < 4; ++a) {
                jtr[a] += jrow[a] * r;
                for (int b = a; b < 4; ++b) jtj[a][b] += jrow[a] * jrow[b];
            }
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        bool accepted = false;
        for (int tries = 0; tries < 32 && !accepted; ++tries) {
            double damped[4][4];
            double rhs[4] = {jtr[0], jtr[1], jtr[2], jtr[3]};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    damped[a][b] = jtj[a][b] * (a == b ? 1.0 + lambda : 1.0);
            double delta[4];
            if (!solve4(damped, rhs, delta)) {
                lambda *= 5.0;
                continue;
            }
            double trial[4] = {p[0] + delta[0], p[1] + delta[1], p[2] + delta[2], p[3] + delta[3]};
            const double trial_ssr = sum_sq_residuals(d, trial);
            if (trial_ssr <= ssr) {
                // Parameters live in normalized O(1) space, so the small
                // denominator floor keeps zero-valued parameters (offset of
                // a baseline-free line) from stalling the relative test.
                double max_rel = 0.0;
                for (int a = 0; a < 4; ++a)
                    max_rel = std::max(max_rel, std::abs(delta[a]) / (std::abs(p[a]) + 1e-6));
                for (int a = 0; a < 4; ++a) p[a] = trial[a];
                ssr = trial_ssr;
                lambda = std::max(lambda / 3.0, 1e-14);
                accepted = true;
                if (max_rel < kRelTol) converged = true;
            } else {
                lambda *= 5.0;
            }
        }
        if (!accepted) converged = true;  // no downhill direction left
    }

    if (!converged) {
        char msg[256];
        std::snprintf(msg, sizeof(msg),
                      "fit_lorentzian: no convergence after %d iterations "
                      "(last iterate: center=%.17g fwhm=%.17g amplitude=%.17g offset=%.17g)",
                      iterations, p[0] * d.x_scale + d.x_shift, std::abs(p[1]) * d.x_scale,
                      p[2] * d.y_scale, p[3] * d.y_scale + d.y_shift);
        throw NumericsError(msg);
    }

    // covariance from the residuals at the solution
    double jtj[4][4] = {};
    double jrow[4];
    for (std::size_t i = 0; i < n; ++i) {
        jacobian_row(p, d.x[i], jrow);
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) jtj[a][b] += jrow[a] * jrow[b];
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];
    double cov[4][4];
    const double s2 = n > 4 ? ssr / static_cast<double>(n - 4) : 0.0;
    double sigma[4] = {0.0, 0.0, 0.0, 0.0};
    if (invert4(jtj, cov))
        for (int a = 0; a < 4; ++a) sigma[a] = std::sqrt(std::max(0.0, cov[a][a] * s2));

    LorentzianFit fit;
    fit.params.center = p[0] * d.x_scale + d.x_shift;
    fit.params.fwhm = std::abs(p[1]) * d.x_scale;
    fit.params.amplitude = p[2] * d.y_scale;
    fit.params.offset = p[3] * d.y_scale + d.y_shift;
    fit.uncertainty.center = sigma[0] * d.x_scale;
    fit.uncertainty.fwhm = sigma[1] * d.x_scale;
    fit.uncertainty.amplitude = sigma[2] * d.y_scale;
    fit.uncertainty.offset = sigma[3] * d.y_scale;
    fit.iterations = iterations;
    fit.residual_rms = std::sqrt(ssr / static_cast<double>(n)) * d.y_scale;
    return fit;
}

double light_shift(const LightShiftInput& in) {
    if (!(in.beam_area > 0.0)) throw ConfigError("light_shift: beam_area must be positive");
    if (in.power < 0.0) throw ConfigError("light_shift: power must be >= 0");
    const auto& c = PhysicalConstants::reference();
    const double e0_sq =
        2.0 * in.power / (c.vacuum_permittivity * c.speed_of_light * in.beam_area);
    const double alpha_eff_au = (in.scalar_pol_upper - in.scalar_pol_lower) +
                                in.geometry_factor * in.tensor_pol_upper;
    const double alpha_eff = alpha_eff_au * c.polarisability_au();
    return -alpha_eff * e0_sq / (4.0 * c.planck);
}

double SystematicsBudget::total_correction() const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.correction;
    return sum;
}

double SystematicsBudget::total_uncertainty() const {
    double sq = 0.0;
    for (const auto& e : entries) sq += e.uncertainty * e.uncertainty;
    return std::sqrt(sq);
}

SystematicsBudget systematics_budget(double b_field, const TransitionModel& model,
                                     const LightShiftInput& light, double stark_bound) {
    if (stark_bound < 0.0) throw ConfigError("systematics_budget: stark bound must be >= 0");
    SystematicsBudget budget;
    const double half_split = 0.5 * zeeman_pair_stats(model, b_field).splitting;
    budget.entries.push_back(
        {"zeeman", 0.0, half_split, "pair mean is field-free; uncertainty = half T+/T- splitting"});
    budget.entries.push_back({"dc_stark", 0.0, stark_bound, "configured bound"});
    const double shift = light_shift(light);
    budget.entries.push_back(
        {"light_shift", -shift, std::abs(shift), "computed from configured polarisabilities"});
    budget.entries.push_back({"collisions", 0.0, 0.0, "negligible under UHV conditions"});
    return budget;
}

} // namespace ldspec
