#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tmsim/protocol.hpp"
#include "tmsim/spectroscopy.hpp"

using namespace tmsim;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

// paper-setting probe: Omega01 = 2 pi 1.5 kHz, gamma = 10.36 / ms, t = 0.17 ms
spectro::SidebandModel paper_probe() {
    return spectro::SidebandModel(2.0 * pi * 1.5e3, 0.13, 10.36e3, 0.17e-3);
}

// nearly unitary probe for small-pulse limits
spectro::SidebandModel soft_probe(double theta) {
    const double om = 2.0 * pi * 1.5e3;
    return spectro::SidebandModel(om, 0.13, 1e-9, theta / om);
}

gauss::OscillatorConfig rb85_osc() {
    return gauss::OscillatorConfig(84.911789732 * gauss::k_amu, 2.0 * pi * 125e3,
                                   2.0 * pi * 37.26e3);
}

} // namespace

TEST_CASE("sideband populations") {
    const auto model = paper_probe();
    const auto vac = fock::tmsv_probabilities(0.0, 5);
    const auto pops = spectro::sideband_populations(vac, model);
    const double gt = model.gamma * model.pulse_duration;
    CHECK(pops.p_minus == doctest::Approx((1.0 - std::exp(-gt)) / 2.0).epsilon(1e-13));

    // gamma t -> 0 sends the ground-state red population to zero
    const auto soft = soft_probe(0.05);
    const auto pops0 = spectro::sideband_populations(vac, soft);
    CHECK(pops0.p_minus < 1e-9);
    CHECK(pops0.p_plus > 0.0);

    // paper parameters occupy a sensible range
    const auto tmsv = fock::tmsv_probabilities(1.0, 60);
    const auto p1 = spectro::sideband_populations(tmsv, model);
    CHECK(p1.p_plus > p1.p_minus);
    CHECK(p1.p_plus < 1.0);
}

TEST_CASE("sideband ratio") {
    SUBCASE("perfect ground state gives zero in the unitary limit") {
        const auto vac = fock::tmsv_probabilities(0.0, 5);
        CHECK(spectro::ratio_R(vac, soft_probe(0.3)) < 1e-9);
    }

    SUBCASE("small-pulse thermal limit approaches nbar / (nbar + 1)") {
        for (double nb : {0.06, 0.5, 1.0}) {
            VectorXd th(61);
            for (int n = 0; n <= 60; ++n) th[n] = std::pow(nb / (1 + nb), n) / (1 + nb);
            const double r = spectro::ratio_R(th, soft_probe(0.04));
            CHECK(std::abs(r - nb / (nb + 1.0)) < 1e-3);
        }
    }

    SUBCASE("monotone in r for both families at paper parameters") {
        const auto model = paper_probe();
        double prev_t = -1.0, prev_s = -1.0;
        for (double r = 0.0; r <= 1.5 + 1e-9; r += 0.05) {
            const double rt = spectro::ratio_R(fock::tmsv_probabilities(r, 25), model, 0.02);
            const double rs = spectro::ratio_R(fock::smsv_probabilities(r, 25).probs, model);
            CHECK(rt >= prev_t - 1e-12);
            CHECK(rs >= prev_s - 1e-12);
            prev_t = rt;
            prev_s = rs;
        }
    }

    SUBCASE("families separate through the phonon-number variance") {
        // same mean, double variance: the single-mode curve sits strictly
        // below the two-mode curve at the paper's pulse parameters
        const auto model = paper_probe();
        for (double r = 0.25; r <= 1.5 + 1e-9; r += 0.25) {
            const double rt = spectro::ratio_R(fock::tmsv_probabilities(r, 25), model, 0.02);
            const double rs = spectro::ratio_R(fock::smsv_probabilities(r, 25).probs, model);
            CHECK(rs < rt);
        }
    }

    SUBCASE("truncation robustness at r <= 1.2") {
        const auto model = paper_probe();
        for (double r : {0.6, 1.0, 1.2}) {
            const double r25 = spectro::ratio_R(fock::tmsv_probabilities(r, 25), model, 0.02);
            const double r35 = spectro::ratio_R(fock::tmsv_probabilities(r, 35), model, 0.02);
            CHECK(std::abs(r25 - r35) < 1e-4);
        }
    }

    SUBCASE("regression value for the thermal-weighted table") {
        // frozen from this implementation's converged sums (n <= 25, l <= 50)
        const auto dist =
            fock::thermal_weighted_distribution(fock::TwoModeSqueezeOp(1.2), 0.06, 25);
        const double r = spectro::ratio_R(dist, paper_probe(), 0.02);
        CHECK(r == doctest::Approx(0.93526).epsilon(2e-4));
    }

    SUBCASE("undefined ratio") {
        const auto vac = fock::tmsv_probabilities(0.0, 3);
        spectro::SidebandModel zero_pulse(1.0, 0.13, 1e-12, 1e-30);
        CHECK_THROWS_AS(spectro::ratio_R(vac, zero_pulse), UndefinedRatioError);
    }
}

TEST_CASE("velocity sigma of protocol states") {
    const auto osc = rb85_osc();
    SUBCASE("vacuum along x gives the ground-state velocity width") {
        const auto vac = gauss::GaussianState::vacuum(2);
        const double sv = spectro::velocity_sigma(vac, spectro::ScanAxis::X, osc);
        CHECK(sv == doctest::Approx(osc.dv0()).epsilon(1e-12));
        CHECK(sv * 1e2 == doctest::Approx(1.7139).epsilon(1e-3)); // cm/s for Rb-85 at 125 kHz
    }

    SUBCASE("two-mode output along x-prime is time independent at sqrt(cosh 2r)") {
        const double r = 0.89;
        protocol::TwoModeProtocol proto(osc, pi / 2.0, 0.0, r);
        for (double t_us : {0.0, 1.0, 2.7, 5.0}) {
            const auto input = proto.input_state_at(t_us * 1e-6);
            const double sv = spectro::velocity_sigma(input, spectro::ScanAxis::XPrime, osc);
            CHECK(sv / osc.dv0() == doctest::Approx(std::sqrt(std::cosh(2.0 * r))).epsilon(1e-10));
        }
    }

    SUBCASE("x-prime of the input equals x of the beam-splitter output") {
        protocol::TwoModeProtocol proto(osc, pi / 2.0, 0.06, 0.89);
        const double a =
            spectro::velocity_sigma(proto.input_state_at(1e-6), spectro::ScanAxis::XPrime, osc);
        const double b =
            spectro::velocity_sigma(proto.state_at(1e-6), spectro::ScanAxis::X, osc);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("velocity scan synthesis and fitting") {
    const auto osc = rb85_osc();
    const auto vac = gauss::GaussianState::vacuum(2);

    SUBCASE("noiseless round trip recovers sigma to 0.1%") {
        spectro::VelocimetryModel model;
        model.points = 41;
        const auto scan = spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, model);
        const auto fit = spectro::gaussian_fit(scan);
        CHECK(std::abs(fit.sigma - osc.dv0()) / osc.dv0() < 1e-3);
        CHECK(fit.amplitude == doctest::Approx(model.amplitude).epsilon(1e-6));
        CHECK(fit.offset == doctest::Approx(model.offset).epsilon(1e-6));
    }

    SUBCASE("instrument convolution broadens at the percent level at 0.1 ms") {
        spectro::VelocimetryModel model;
        model.points = 81;
        model.convolve_instrument = true;
        const auto scan = spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, model);
        const auto fit = spectro::gaussian_fit(scan);
        const double shift = (fit.sigma - osc.dv0()) / osc.dv0();
        CHECK(shift > 1e-4); // it does broaden
        CHECK(shift < 2e-2); // but stays small next to the Doppler width
    }

    SUBCASE("seeded noise reproducibility") {
        spectro::NoiseSpec noise{0.02, 77};
        const auto a =
            spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, {}, noise);
        const auto b =
            spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, {}, noise);
        CHECK((a.excited_fraction - b.excited_fraction).norm() == 0.0);
        spectro::NoiseSpec other{0.02, 78};
        const auto c =
            spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, {}, other);
        CHECK((a.excited_fraction - c.excited_fraction).norm() > 0.0);
    }

    SUBCASE("noisy fit stays within a few standard errors") {
        spectro::NoiseSpec noise{0.02, 5};
        const auto scan =
            spectro::synthesize_velocity_scan(vac, spectro::ScanAxis::X, osc, {}, noise);
        const auto fit = spectro::gaussian_fit(scan);
        CHECK(std::abs(fit.sigma - osc.dv0()) < 4.0 * fit.std_errors[2]);
    }
}

TEST_CASE("sideband spectrum synthesis") {
    const auto model = paper_probe();
    const double omega = 2.0 * pi * 125e3;
    const VectorXd grid = VectorXd::LinSpaced(801, -2.0 * omega, 2.0 * omega);

    SUBCASE("ground state: red sideband area vanishes, blue visible") {
        const auto vac = fock::tmsv_probabilities(0.0, 5);
        const auto probe = soft_probe(0.4);
        const auto trace =
            spectro::synthesize_sideband_spectrum(vac, probe, 0.05 * omega, omega, grid);
        const double step = grid[1] - grid[0];
        double red = 0.0, blue = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            if (grid[i] < -0.5 * omega) red += trace.fraction[i] * step;
            if (grid[i] > 0.5 * omega) blue += trace.fraction[i] * step;
        }
        CHECK(red < 1e-6);
        CHECK(blue > 1e-3);
    }

    SUBCASE("thermal state: red/blue area ratio equals ratio_R") {
        VectorXd th(41);
        const double nb = 0.4;
        for (int n = 0; n <= 40; ++n) th[n] = std::pow(nb / (1 + nb), n) / (1 + nb);
        const auto dist = fock::FockDistribution::from_product(th, th);
        const auto trace =
            spectro::synthesize_sideband_spectrum(dist, model, 0.04 * omega, omega, grid);
        const double step = grid[1] - grid[0];
        double red = 0.0, blue = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            if (grid[i] < -0.5 * omega) red += trace.fraction[i] * step;
            if (grid[i] > 0.5 * omega) blue += trace.fraction[i] * step;
        }
        CHECK(red / blue == doctest::Approx(spectro::ratio_R(dist, model)).epsilon(1e-6));
    }

    SUBCASE("zero inhomogeneity collapses peaks to the grid resolution") {
        const auto vac = fock::tmsv_probabilities(0.3, 20);
        const auto trace = spectro::synthesize_sideband_spectrum(vac, model, 0.0, omega, grid);
        // peak width floor = one grid step; value at half a peak-width away
        // from the carrier drops fast
        Eigen::Index i0;
        (grid.cwiseAbs()).minCoeff(&i0);
        CHECK(trace.fraction[i0] > 10.0 * trace.fraction[i0 + 8]);
    }
}
