#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tmsim/protocol.hpp"

using namespace tmsim;
using Eigen::MatrixXd;

namespace {

constexpr double pi = std::numbers::pi;

gauss::OscillatorConfig make_osc(double omega_khz, double omega_prime_khz) {
    return gauss::OscillatorConfig(84.911789732 * gauss::k_amu, 2.0 * pi * omega_khz * 1e3,
                                   2.0 * pi * omega_prime_khz * 1e3);
}

} // namespace

TEST_CASE("squeeze amplitude from the frequency jump") {
    CHECK(protocol::squeeze_amplitude_from_jump(std::exp(1.0), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(protocol::squeeze_amplitude_from_jump(1.0, 1.0) == 0.0);
    // paper settings: 125 kHz jumped to 37.26 kHz / 21.73 kHz
    CHECK(protocol::squeeze_amplitude_from_jump(125.0, 37.26) == doctest::Approx(1.21).epsilon(1e-3));
    CHECK(protocol::squeeze_amplitude_from_jump(125.0, 21.73) == doctest::Approx(1.75).epsilon(1e-3));
    CHECK(protocol::squeeze_amplitude_from_jump(100.0, 125.0) < 0.0);
    CHECK_THROWS_AS(protocol::squeeze_amplitude_from_jump(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(protocol::squeeze_amplitude_from_jump(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("single-mode jump protocol") {
    SUBCASE("no jump leaves the vacuum untouched") {
        const auto osc = make_osc(125.0, 125.0);
        const auto res = protocol::single_mode_jump_protocol(osc);
        CHECK((res.state.cov() - gauss::GaussianState::vacuum(1).cov()).cwiseAbs().maxCoeff() <
              1e-14);
    }

    SUBCASE("net squeeze equals ln(omega/omega')") {
        const auto osc = make_osc(125.0, 37.26);
        const double r = protocol::squeeze_amplitude_from_jump(osc.omega, osc.omega_prime);
        const auto res = protocol::single_mode_jump_protocol(osc);

        Eigen::SelfAdjointEigenSolver<MatrixXd> es(res.state.cov());
        CHECK(es.eigenvalues()[0] == doctest::Approx(std::exp(-2.0 * r) / 4.0).epsilon(1e-12));
        CHECK(es.eigenvalues()[1] == doctest::Approx(std::exp(2.0 * r) / 4.0).epsilon(1e-12));

        // same spectrum as the direct squeeze, i.e. equal up to a rotation
        const auto direct = gauss::apply_squeeze(gauss::GaussianState::vacuum(1), 0,
                                                 gauss::SqueezeParams(r, 0.0));
        Eigen::SelfAdjointEigenSolver<MatrixXd> es2(direct.cov());
        CHECK(std::abs(es.eigenvalues()[0] - es2.eigenvalues()[0]) < 1e-12);
        CHECK(std::abs(es.eigenvalues()[1] - es2.eigenvalues()[1]) < 1e-12);

        // pure state: variance product 1/16
        CHECK(res.state.cov().determinant() == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    }

    SUBCASE("schedule covers one quarter period at the jumped frequency") {
        const auto osc = make_osc(125.0, 37.26);
        const auto res = protocol::single_mode_jump_protocol(osc);
        REQUIRE(res.schedule.events.size() == 2);
        CHECK(res.schedule.events[0].first == 0.0);
        CHECK(res.schedule.events[0].second == osc.omega_prime);
        CHECK(res.schedule.events[1].first ==
              doctest::Approx(pi / (2.0 * osc.omega_prime)).epsilon(1e-15));
        CHECK(res.schedule.events[1].second == osc.omega);
        CHECK(res.schedule.total_duration ==
              doctest::Approx(pi / (2.0 * osc.omega_prime)).epsilon(1e-15));
        CHECK(res.schedule.events[0].first < res.schedule.events[1].first);
    }
}

TEST_CASE("two-mode protocol") {
    const auto osc = make_osc(125.0, 37.26);
    const double r = protocol::squeeze_amplitude_from_jump(osc.omega, osc.omega_prime);
    const double period = 2.0 * pi / osc.omega;

    SUBCASE("out-of-phase output widths are constant and equal") {
        protocol::TwoModeProtocol proto(osc, pi / 2.0);
        const double expected = std::cosh(2.0 * r) / 4.0;
        double dev = 0.0;
        for (double t = 0.0; t <= 2.0 * period; t += period / 40.0) {
            const auto out = proto.state_at(t);
            for (int q = 0; q < 4; ++q)
                dev = std::max(dev, std::abs(out.variance(q) - expected));
        }
        CHECK(dev < 1e-10);
    }

    SUBCASE("in-phase output factorizes and breathes at 2 omega") {
        protocol::TwoModeProtocol proto(osc, 0.0);
        for (double t = 0.0; t <= 2.0 * period; t += period / 24.0) {
            const auto out = proto.state_at(t);
            CHECK(out.cov().block<2, 2>(0, 2).cwiseAbs().maxCoeff() < 1e-10);
            const double w = std::sqrt(out.variance(1));
            CHECK(std::abs(w - gauss::single_mode_width_vs_time(r, osc.omega, t)) < 1e-10);
        }
    }

    SUBCASE("no squeeze keeps the vacuum at all phases and times") {
        const auto iso = make_osc(125.0, 125.0);
        for (double phase : {0.0, pi / 2.0, 1.1}) {
            protocol::TwoModeProtocol proto(iso, phase);
            for (double t : {0.0, 1e-6, 3.3e-6}) {
                const auto out = proto.state_at(t);
                CHECK((out.cov() - gauss::GaussianState::vacuum(2).cov()).cwiseAbs().maxCoeff() <
                      1e-13);
            }
        }
    }

    SUBCASE("jump sequence and direct squeeze produce the same trajectory") {
        protocol::TwoModeProtocol jump(osc, pi / 2.0, 0.06);
        protocol::TwoModeProtocol direct(osc, pi / 2.0, 0.06, r);
        for (double t : {0.0, 0.7e-6, 2.0e-6, 5.5e-6}) {
            CHECK((jump.state_at(t).cov() - direct.state_at(t).cov()).cwiseAbs().maxCoeff() <
                  1e-10);
        }
    }

    SUBCASE("criteria at the phase-aligned snapshot") {
        protocol::TwoModeProtocol proto(osc, pi / 2.0, 0.0, 0.88);
        const auto out = proto.state_at(0.0);
        CHECK(gauss::duan_simon_value(out, 0, 1) ==
              doctest::Approx(std::exp(-1.76)).epsilon(1e-10));
        CHECK(gauss::epr_product(out, 0, 1) ==
              doctest::Approx(std::exp(-1.76) / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("inhomogeneity model conversions") {
    const double tau = 80e-6;
    const double sigma = protocol::sigma_omega_from_decay_time(tau);
    CHECK(sigma == doctest::Approx(1.0 / (std::sqrt(2.0) * tau)).epsilon(1e-14));
    CHECK(protocol::decay_time_from_sigma_omega(sigma) == doctest::Approx(tau).epsilon(1e-14));
    CHECK_THROWS_AS(protocol::InhomogeneityModel(-1.0, 21), std::invalid_argument);
    CHECK_THROWS_AS(protocol::InhomogeneityModel(1.0, 0), std::invalid_argument);
}

TEST_CASE("echo ratio versus delay") {
    const auto osc = make_osc(125.0, 37.26);
    const spectro::SidebandModel probe(2.0 * pi * 1.5e3, 0.13, 10.36e3, 0.17e-3);
    const spectro::SidebandModel soft(2.0 * pi * 1.5e3, 0.13, 1e-9, 0.05 / (2.0 * pi * 1.5e3));

    SUBCASE("perfect echo on the ground state gives zero red sideband") {
        const auto trace = protocol::echo_ratio_vs_delay(1.2, {0.0}, osc, {}, soft, 0.0);
        REQUIRE(trace.size() == 1);
        CHECK(trace[0].second < 1e-8);
    }

    SUBCASE("no spread reproduces the undamped 2-omega oscillation") {
        const double period = pi / osc.omega; // breathing period
        std::vector<double> taus;
        for (int i = 0; i <= 16; ++i) taus.push_back(i * period / 8.0);
        const auto trace = protocol::echo_ratio_vs_delay(1.2, taus, osc, {}, probe, 0.06);
        for (int i = 0; i <= 8; ++i)
            CHECK(trace[i].second == doctest::Approx(trace[i + 8].second).epsilon(1e-10));
        // oscillation actually moves
        double lo = 1e9, hi = -1e9;
        for (const auto& [t, v] : trace) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo > 0.05);
    }

    SUBCASE("monotone peak decay under a gaussian spread") {
        const protocol::InhomogeneityModel inhom(protocol::sigma_omega_from_decay_time(40e-6), 21);
        const double period = pi / osc.omega;
        std::vector<double> taus;
        for (int k = 0; k < 12; ++k) taus.push_back((k + 0.5) * period); // near successive maxima
        const auto trace = protocol::echo_ratio_vs_delay(1.0, taus, osc, inhom, probe, 0.06);
        const double floor = trace.back().second;
        for (size_t k = 0; k + 1 < trace.size(); ++k)
            CHECK(trace[k].second - floor >= trace[k + 1].second - floor - 1e-9);
    }

    SUBCASE("monte carlo cross-validates the quadrature ensemble") {
        const double sigma = protocol::sigma_omega_from_decay_time(80e-6);
        const protocol::InhomogeneityModel gh(sigma, 21);
        const protocol::InhomogeneityModel mc(sigma, 4000, true, 99);
        const std::vector<double> taus = {10e-6, 40e-6};
        const auto a = protocol::echo_ratio_vs_delay(1.0, taus, osc, gh, probe, 0.06);
        const auto b = protocol::echo_ratio_vs_delay(1.0, taus, osc, mc, probe, 0.06);
        for (size_t i = 0; i < taus.size(); ++i)
            CHECK(std::abs(a[i].second - b[i].second) < 0.01);
        // seeded reproducibility
        const auto c = protocol::echo_ratio_vs_delay(1.0, taus, osc, mc, probe, 0.06);
        CHECK(b[0].second == c[0].second);
        CHECK(b[1].second == c[1].second);
    }

    SUBCASE("input validation") {
        CHECK_THROWS_AS(protocol::echo_ratio_vs_delay(-1.0, {0.0}, osc, {}, probe, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(protocol::echo_ratio_vs_delay(1.0, {-1e-6}, osc, {}, probe, 0.0),
                        std::invalid_argument);
    }
}
