#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ldspec/hyperfine.hpp"

namespace ldspec {

struct BeamConfig {
    double power = 0.0;              // W
    double cross_section_area = 0.0; // m^2
    double transition_dipole = 0.0;  // C m
    double frequency = 0.0;          // Hz, carrier
};

void validate_beam(const BeamConfig& beam);

/// Rabi angular frequency mu E / hbar with E = sqrt(2 P / (eps0 c A)), rad/s.
double rabi_frequency(const BeamConfig& beam);

/// Power-broadened FWHM sqrt(2) Omega / (2 pi), Hz.
double power_broadened_fwhm(double omega_rabi);

/// Gaussian Doppler FWHM (f0/c) sqrt(8 ln 2 kB T / m), Hz.
double doppler_fwhm(double f0, double temperature, double mass);

struct RempdOptions {
    double dissociation_rate = 0.0;   // 1/s, effective rate at full excitation
    double duration = 0.0;            // s, exposure
    double decoherence_rate = 0.0;    // rad/s, Gamma in the steady-state form
    double weight_plus = 0.5;         // T+ branch weight; T- gets 1 - weight_plus
    double noise_sigma = 0.0;         // additive Gaussian noise, signal units
    std::uint64_t noise_seed = 0;
};

/// Synthetic REMPD signal over detunings relative to f(B = 0): steady-state
/// two-level excitation per Zeeman branch,
///   rho_ee(D) = (Omega^2/4) / (D^2 + Omega^2/2 + Gamma^2/4),
/// branch-weighted, converted to a dissociated fraction
/// 1 - exp(-Gamma_d rho_ee t), plus optional noise.
std::vector<double> rempd_spectrum(const BeamConfig& beam, const TransitionModel& model,
                                   double b_field, std::span<const double> detunings,
                                   const RempdOptions& options);

struct LorentzianParams {
    double center = 0.0;     // Hz
    double fwhm = 0.0;       // Hz
    double amplitude = 0.0;  // signal units
    double offset = 0.0;     // signal units
};

struct LorentzianFit {
    LorentzianParams params;
    LorentzianParams uncertainty;  // 1-sigma from the residual covariance
    int iterations = 0;
    double residual_rms = 0.0;
};

/// Damped least-squares (Levenberg-Marquardt) fit of
///   A (G/2)^2 / ((x - x0)^2 + (G/2)^2) + offset.
/// Converges when the relative parameter change drops below 1e-8; throws
/// NumericsError after 200 iterations (message carries the last iterate) or
/// on degenerate constant data. Needs >= 5 points.
LorentzianFit fit_lorentzian(std::span<const double> detunings, std::span<const double> signal,
                             std::optional<LorentzianParams> initial_guess = std::nullopt);

struct LightShiftInput {
    double power = 0.0;             // W
    double beam_area = 0.0;         // m^2
    double scalar_pol_lower = 0.0;  // atomic units
    double scalar_pol_upper = 0.0;  // atomic units
    double tensor_pol_upper = 0.0;  // atomic units
    double geometry_factor = -1.0;  // weight of the tensor part
};

/// Differential a.c. Stark shift of the transition, Hz. Convention: the
/// returned value is the shift of the transition frequency; a positive
/// effective polarisability difference lowers it. E^2 is the squared field
/// amplitude of the beam, so the time-averaged shift is -dAlpha E^2 / (4 h).
double light_shift(const LightShiftInput& in);

struct BudgetEntry {
    std::string name;
    double correction = 0.0;   // Hz, to add to a measured frequency
    double uncertainty = 0.0;  // Hz
    std::string source;
};

/// Totals are recomputed from the entries on every call, never stored.
struct SystematicsBudget {
    std::vector<BudgetEntry> entries;

    double total_correction() const;
    double total_uncertainty() const;  // root sum of squares
};

/// Zeeman (correction 0, uncertainty = half the T+/T- splitting), d.c. Stark
/// (configured bound), light shift (computed), collisions (negligible).
SystematicsBudget systematics_budget(double b_field, const TransitionModel& model,
                                     const LightShiftInput& light, double stark_bound);

} // namespace ldspec
