#include "ldspec/hyperfine.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ldspec/config.hpp"
#include "ldspec/errors.hpp"

namespace ldspec {

void validate_coefficients(const SpinCoefficients& c) {
    for (int i = 1; i <= 13; ++i)
        if (!std::isfinite(c(i)))
            throw ConfigError("spin coefficients (v=" + std::to_string(c.v) + ", N=" +
                              std::to_string(c.n) + "): E" + std::to_string(i) + " is missing");
}

double stretched_state_energy(const SpinCoefficients& c, Branch sign, double b_field) {
    validate_coefficients(c);
    const double n = static_cast<double>(c.n);
    const double s = sign == Branch::TPlus ? 1.0 : -1.0;
    const double zeeman = (2.0 * c(10) * n + c(11) + 2.0 * c(12) + c(13)) * b_field / 2.0;
    const double scalar = c(4) / 4.0 + c(5) / 2.0;
    const double linear_n = (c(1) + c(2) + 2.0 * c(3) + c(6) + 2.0 * c(7) + 2.0 * c(8) + c(9)) * n / 2.0;
    const double quadratic_n = (2.0 * c(6) + 4.0 * c(7) + 4.0 * c(8) + 2.0 * c(9)) * n * n / 2.0;
    return s * zeeman + scalar + linear_n - quadratic_n;
}

TransitionModel make_transition_model(double spin_averaged_frequency,
                                      double spin_averaged_uncertainty,
                                      const std::vector<SpinCoefficients>& table) {
    TransitionModel model;
    model.spin_averaged_frequency = spin_averaged_frequency;
    model.spin_averaged_uncertainty = spin_averaged_uncertainty;
    bool have_lower = false, have_upper = false;
    for (const auto& c : table) {
        if (c.v == 0 && c.n == 0) {
            model.lower = c;
            have_lower = true;
        } else if (c.v == 0 && c.n == 1) {
            model.upper = c;
            have_upper = true;
        }
    }
    if (!have_lower || !have_upper)
        throw ConfigError("transition model needs coefficient sets for (v=0, N=0) and (v=0, N=1)");
    return model;
}

double hyperfine_shift(const TransitionModel& model) {
    return stretched_state_energy(model.upper, Branch::TPlus, 0.0) -
           stretched_state_energy(model.lower, Branch::TPlus, 0.0);
}

double transition_frequency(const TransitionModel& model, Branch branch, double b_field) {
    return model.spin_averaged_frequency +
           stretched_state_energy(model.upper, branch, b_field) -
           stretched_state_energy(model.lower, branch, b_field);
}

ZeemanPairStats zeeman_pair_stats(const TransitionModel& model, double b_field) {
    const double f_plus = transition_frequency(model, Branch::TPlus, b_field);
    const double f_minus = transition_frequency(model, Branch::TMinus, b_field);
    return {0.5 * (f_plus + f_minus), std::abs(f_plus - f_minus)};
}

std::vector<SpinCoefficients> load_coefficients(const std::filesystem::path& path) {
    const ConfigFile cfg = ConfigFile::parse(path);

    cfg.require_section("units");
    if (cfg.get_string("units", "hyperfine") != "Hz" || cfg.get_string("units", "zeeman") != "Hz/T")
        throw ConfigError(cfg.origin() + ": [units] must declare hyperfine = Hz, zeeman = Hz/T");

    std::vector<SpinCoefficients> table;
    for (const auto& section : cfg.section_names()) {
        if (section == "units") continue;
        int v = 0, n = 0;
        if (std::sscanf(section.c_str(), "state v=%d N=%d", &v, &n) != 2)
            throw ConfigError(cfg.origin() + ": section [" + section +
                              "] is not of the form [state v=<int> N=<int>]");
        for (const auto& prior : table)
            if (prior.v == v && prior.n == n)
                throw ConfigError(cfg.origin() + ": duplicate coefficient set for (v=" +
                                  std::to_string(v) + ", N=" + std::to_string(n) + ")");
        SpinCoefficients c;
        c.v = v;
        c.n = n;
        for (int i = 1; i <= 13; ++i)
            c.e[static_cast<std::size_t>(i - 1)] = cfg.get_double(section, "E" + std::to_string(i));
        validate_coefficients(c);
        table.push_back(c);
    }
    if (table.empty())
        throw ConfigError(cfg.origin() + ": no coefficient sets found");
    cfg.require_all_consumed();
    return table;
}

void write_coefficients(const std::filesystem::path& path,
                        const std::vector<SpinCoefficients>& table) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
    os << "[units]\nhyperfine = Hz\nzeeman = Hz/T\n";
    char buf[64];
    for (const auto& c : table) {
        os << "\n[state v=" << c.v << " N=" << c.n << "]\n";
        for (int i = 1; i <= 13; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", c(i));
            os << "E" << i << " = " << buf << "\n";
        }
    }
}

} // namespace ldspec
