#pragma once

#include <array>
#include <filesystem>
#include <vector>

namespace ldspec {

/// Effective spin Hamiltonian coefficients of one rovibrational state (v, N).
/// E1..E9 are hyperfine coefficients in Hz; E10..E13 are Zeeman coefficients
/// in Hz/T.
struct SpinCoefficients {
    int v = 0;
    int n = 0;
    std::array<double, 13> e{};

    /// 1-based accessor, E(1) .. E(13).
    double operator()(int index) const { return e[static_cast<std::size_t>(index - 1)]; }
};

/// Throws ConfigError if any of the thirteen entries is not finite.
void validate_coefficients(const SpinCoefficients& c);

enum class Branch { TPlus, TMinus };

/// Spin energy of the stretched state (J = N + 2, Jz = +-J) in a magnetic
/// field, in Hz:
///   E/h = +-(2 E10 N + E11 + 2 E12 + E13) B/2 + E4/4 + E5/2
///         + (E1 + E2 + 2 E3 + E6 + 2 E7 + 2 E8 + E9) N/2
///         - (2 E6 + 4 E7 + 4 E8 + 2 E9) N^2/2
double stretched_state_energy(const SpinCoefficients& c, Branch sign, double b_field);

/// Rotational transition between the stretched states of (v=0, N=0, J=2)
/// and (v=0, N=1, J'=3).
struct TransitionModel {
    double spin_averaged_frequency = 0.0;    // Hz
    double spin_averaged_uncertainty = 0.0;  // Hz
    SpinCoefficients lower;                  // (0, 0)
    SpinCoefficients upper;                  // (0, 1)
};

/// Builds the model from a coefficient table; requires entries for
/// (v=0, N=0) and (v=0, N=1).
TransitionModel make_transition_model(double spin_averaged_frequency,
                                      double spin_averaged_uncertainty,
                                      const std::vector<SpinCoefficients>& table);

/// Hyperfine shift at B = 0: upper minus lower stretched-state energy, Hz.
double hyperfine_shift(const TransitionModel& model);

/// f(T+-) = f_spin_avg + [E_upper(+-, B) - E_lower(+-, B)], Hz.
double transition_frequency(const TransitionModel& model, Branch branch, double b_field);

struct ZeemanPairStats {
    double mean = 0.0;       // Hz, (f(T+) + f(T-)) / 2
    double splitting = 0.0;  // Hz, |f(T+) - f(T-)|
};

ZeemanPairStats zeeman_pair_stats(const TransitionModel& model, double b_field);

/// Parses a coefficient data file (one [state v=.. N=..] section per state,
/// keys E1..E13, units declared in a [units] section). Errors carry line
/// numbers; duplicate (v, N) sections and malformed numbers are rejected.
std::vector<SpinCoefficients> load_coefficients(const std::filesystem::path& path);

/// Round-trip serialization of a coefficient table.
void write_coefficients(const std::filesystem::path& path,
                        const std::vector<SpinCoefficients>& table);

} // namespace ldspec
