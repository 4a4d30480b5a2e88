#include <doctest.h>

#include <cmath>

#include "ldspec/constants.hpp"
#include "ldspec/errors.hpp"
#include "ldspec/lineshape.hpp"
#include "oracles.hpp"

using namespace ldspec;

TEST_CASE("bessel j0 matches the extended-precision series oracle on [0, 20]") {
    double max_err = 0.0;
    double worst = 0.0;
    for (double z = 0.0; z <= 20.0; z += 0.01) {
        const double err =
            std::abs(bessel_j0(z) - static_cast<double>(oracles::j0_series(z)));
        if (err > max_err) {
            max_err = err;
            worst = z;
        }
    }
    CAPTURE(worst);
    CHECK(max_err < 1e-10);
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-10);  // first zero
}

TEST_CASE("static ions put all weight into the zero-detuning bin") {
    Trajectory traj = oracles::synthetic_trajectory({{0, 0, 0}, {0, 0, 0}}, 256, 1e-6);
    std::size_t i = 0;
    for (auto& p : traj.frames) p = {3e-6 * static_cast<double>(i++ % 2), 0, 0};
    const LineShape ls = lineshape(traj, 50e-6);
    CHECK(ls.peak == doctest::Approx(1.0).epsilon(1e-12));
    double total = 0.0;
    for (const double w : ls.weight) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lamb_dicke_peak(traj, 50e-6) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vanishing phase modulation: huge wavelength gives L(0) ~ 1") {
    const Trajectory traj =
        oracles::synthetic_trajectory({{2e-6, 3.3e5, 0.0}, {1e-6, 4.1e5, 0.7}}, 1024, 2e-7);
    CHECK(lamb_dicke_peak(traj, 2e-6 * 1e6) > 0.999);
}

TEST_CASE("single sinusoidal ion: L(0) equals J0(ka)^2") {
    const double amplitude = 2.3e-6;
    const std::size_t frames = 4000;
    const double dt = 1e-7;
    const double freq = 25.0 / (static_cast<double>(frames) * dt);  // integer periods
    const Trajectory traj = oracles::synthetic_trajectory({{amplitude, freq, 0.0}}, frames, dt);

    for (const double wavelength : {8e-6, 12e-6, 30e-6}) {
        const double k = constants::two_pi / wavelength;
        const double expected = oracles::quadrature_peak(amplitude, k);
        const double j0 = static_cast<double>(oracles::j0_series(k * amplitude));
        CHECK(expected == doctest::Approx(j0 * j0).epsilon(1e-6));  // oracle self-consistency
        CHECK(lamb_dicke_peak(traj, wavelength) == doctest::Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("zero-bin consistency between lineshape and lamb_dicke_peak") {
    const Trajectory traj = oracles::ring_trajectory(3, 8e-6, 0.5e-6, 700, 1e-6, 5);
    for (const double wavelength : {10e-6, 50e-6, 228e-6}) {
        const LineShape ls = lineshape(traj, wavelength);
        const double peak = lamb_dicke_peak(traj, wavelength);
        CHECK(std::abs(ls.peak - peak) < 1e-9);
        double total = 0.0;
        for (const double w : ls.weight) total += w;
        CHECK(std::abs(total - 1.0) < 1e-6);
        for (const double w : ls.weight) CHECK(w >= 0.0);
    }
}

TEST_CASE("L(0) is invariant under a constant displacement") {
    const Trajectory traj = oracles::synthetic_trajectory({{1.5e-6, 2.9e5, 0.2}}, 900, 2e-7);
    Trajectory shifted = traj;
    for (auto& p : shifted.frames) p.x += 4.2e-6;
    const double a = lamb_dicke_peak(traj, 12e-6);
    const double b = lamb_dicke_peak(shifted, 12e-6);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("detuning grid is uniform with resolution 1/(n dt)") {
    const std::size_t frames = 500;
    const double dt = 1e-6;
    const Trajectory traj = oracles::synthetic_trajectory({{1e-6, 5e4, 0.0}}, frames, dt);
    const LineShape ls = lineshape(traj, 20e-6);
    REQUIRE(ls.detuning.size() == frames);
    const double df = 1.0 / (static_cast<double>(frames) * dt);
    for (std::size_t k = 1; k < ls.detuning.size(); ++k)
        CHECK(ls.detuning[k] - ls.detuning[k - 1] == doctest::Approx(df).epsilon(1e-9));
    // zero-detuning bin present and carrying the peak
    std::size_t zero_bin = 0;
    for (std::size_t k = 0; k < ls.detuning.size(); ++k)
        if (std::abs(ls.detuning[k]) < 0.5 * df) zero_bin = k;
    CHECK(ls.weight[zero_bin] == doctest::Approx(ls.peak).epsilon(1e-12));
}

TEST_CASE("gaussian peak estimate") {
    CHECK(gaussian_peak_estimate(0.0, 228e-6) == 1.0);
    const double at_bound = gaussian_peak_estimate(228e-6 / constants::two_pi, 228e-6);
    CHECK(at_bound == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // direct formula evaluation at the tube-cluster scale
    CHECK(gaussian_peak_estimate(8.4e-6, 228e-6) == doctest::Approx(0.9478).epsilon(1e-4));
    CHECK_THROWS_AS(gaussian_peak_estimate(1e-6, 0.0), ConfigError);
}

TEST_CASE("single-ion peak estimate") {
    CHECK(single_ion_peak_estimate(0.0, 10e-6) == 1.0);
    // argument at the first J0 zero
    const double dx_zero = 2.404825557695773 * 10e-6 / (constants::two_pi * std::sqrt(2.0));
    CHECK(single_ion_peak_estimate(dx_zero, 10e-6) < 1e-8);
    // string-cluster scale: J0(1.51059)^2 ~ 0.256
    const double z = constants::two_pi * std::sqrt(2.0) * 1.7e-6 / 10e-6;
    const double j0 = static_cast<double>(oracles::j0_series(z));
    CHECK(single_ion_peak_estimate(1.7e-6, 10e-6) == doctest::Approx(j0 * j0).epsilon(1e-10));
    CHECK(single_ion_peak_estimate(1.7e-6, 10e-6) == doctest::Approx(0.256).epsilon(2e-3));
}

TEST_CASE("estimators: monotone in dx and approach 1 for long wavelengths") {
    double prev = 2.0;
    for (double dx = 0.0; dx <= 10e-6; dx += 0.5e-6) {
        const double lg = gaussian_peak_estimate(dx, 228e-6);
        CHECK(lg < prev);  // strictly decreasing in dx/lambda
        prev = lg;
    }
    CHECK(gaussian_peak_estimate(8.4e-6, 1.0) > 1.0 - 1e-8);
    CHECK(single_ion_peak_estimate(8.4e-6, 1.0) > 1.0 - 1e-8);
}

TEST_CASE("tubular surrogate: single-ion estimate beats the gaussian one") {
    // Arcsine-distributed x (ring) is the regime where the harmonic
    // single-ion form is the better description of the exact L(0).
    const double radius = 10e-6;
    const Trajectory traj = oracles::ring_trajectory(6, radius, 0.2e-6, 6000, 1e-6, 77);
    const MotionStats stats = motion_stats(traj, species::hd_plus());
    double err_g = 0.0, err_sp = 0.0;
    int count = 0;
    for (double wavelength = 50e-6; wavelength <= 500e-6; wavelength += 50e-6) {
        const double exact = lamb_dicke_peak(traj, wavelength);
        err_g += std::abs(gaussian_peak_estimate(stats.delta_x, wavelength) - exact);
        err_sp += std::abs(single_ion_peak_estimate(stats.delta_x, wavelength) - exact);
        ++count;
    }
    CHECK(err_sp / count <= err_g / count);
}

TEST_CASE("lineshape rejects bad input") {
    const Trajectory traj = oracles::synthetic_trajectory({{1e-6, 1e5, 0.0}}, 64, 1e-6);
    CHECK_THROWS_AS(lineshape(traj, 0.0), ConfigError);
    CHECK_THROWS_AS(lineshape(traj, -1e-6), ConfigError);
    CHECK_THROWS_AS(lineshape(traj, 10e-6, Axis::X, species::be_plus()), ConfigError);
}
