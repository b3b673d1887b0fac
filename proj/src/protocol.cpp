#include "tmsim/protocol.hpp"

#include <cmath>
#include <numbers>

#include "tmsim/fock.hpp"
#include "tmsim/quadrature.hpp"

namespace tmsim::protocol {

using gauss::GaussianState;

namespace {

constexpr double k_pi = std::numbers::pi;

// Sudden re-expression of the quadratures when the trap frequency switches
// w_from -> w_to: equivalent to a theta = 0 squeeze of amplitude
// (1/2) ln(w_from / w_to) (conjugate quadrature for upward jumps).
GaussianState apply_jump(const GaussianState& state, int mode, double w_from, double w_to) {
    const double r_half = 0.5 * std::log(w_from / w_to);
    const gauss::SqueezeParams params(std::abs(r_half), r_half >= 0.0 ? 0.0 : k_pi / 2.0);
    return gauss::apply_squeeze(state, mode, params);
}

// Full jump-rotate-jump sequence on one mode, followed by the quarter-period
// phase alignment that leaves the mode squeezed at phase zero (position
// variance contracted when r > 0... see squeeze_matrix convention).
GaussianState jump_squeeze_sequence(const GaussianState& state, int mode,
                                    const gauss::OscillatorConfig& config) {
    GaussianState s = apply_jump(state, mode, config.omega, config.omega_prime);
    s = gauss::apply_rotation(s, mode, k_pi / 2.0);
    s = apply_jump(s, mode, config.omega_prime, config.omega);
    // Sequence output is squeezed at phase pi/2; a quarter period of free
    // evolution re-references it to phase 0.
    return gauss::apply_rotation(s, mode, k_pi / 2.0);
}

GaussianState direct_squeeze_sequence(const GaussianState& state, int mode, double r) {
    const gauss::SqueezeParams params(std::abs(r), r >= 0.0 ? 0.0 : k_pi / 2.0);
    return gauss::apply_squeeze(state, mode, params);
}

} // namespace

double squeeze_amplitude_from_jump(double omega, double omega_prime) {
    if (!(omega > 0.0) || !(omega_prime > 0.0))
        throw std::invalid_argument("squeeze_amplitude_from_jump: frequencies must be positive");
    return std::log(omega / omega_prime);
}

JumpProtocolResult single_mode_jump_protocol(const gauss::OscillatorConfig& config,
                                             double nbar0) {
    GaussianState s = GaussianState::thermal(1, nbar0);
    s = apply_jump(s, 0, config.omega, config.omega_prime);
    s = gauss::apply_rotation(s, 0, k_pi / 2.0);
    s = apply_jump(s, 0, config.omega_prime, config.omega);

    JumpSchedule schedule{config, {}, 0.0};
    schedule.events.emplace_back(0.0, config.omega_prime);
    schedule.events.emplace_back(k_pi / (2.0 * config.omega_prime), config.omega);
    schedule.total_duration = k_pi / (2.0 * config.omega_prime);
    return {std::move(s), std::move(schedule)};
}

TwoModeProtocol::TwoModeProtocol(const gauss::OscillatorConfig& config, double relative_phase,
                                 double nbar0, std::optional<double> r_override)
    : config_(config),
      relative_phase_(relative_phase),
      r_(r_override ? *r_override : squeeze_amplitude_from_jump(config.omega, config.omega_prime)),
      base_(GaussianState::thermal(2, nbar0)) {
    // Mode 1 (y) is squeezed first; the delay relative_phase / omega then
    // advances its phase before mode 0 (x) is squeezed.
    if (r_override) {
        base_ = direct_squeeze_sequence(base_, 1, r_);
    } else {
        base_ = jump_squeeze_sequence(base_, 1, config_);
    }
    base_ = gauss::apply_rotation(base_, 0, relative_phase_);
    base_ = gauss::apply_rotation(base_, 1, relative_phase_);
    if (r_override) {
        base_ = direct_squeeze_sequence(base_, 0, r_);
    } else {
        base_ = jump_squeeze_sequence(base_, 0, config_);
    }
}

GaussianState TwoModeProtocol::evolved(double t) const {
    const double phi = config_.omega * t;
    GaussianState s = gauss::apply_rotation(base_, 0, phi);
    return gauss::apply_rotation(s, 1, phi);
}

GaussianState TwoModeProtocol::state_at(double t) const {
    return gauss::apply_beam_splitter_50_50(evolved(t), 0, 1);
}

GaussianState TwoModeProtocol::input_state_at(double t) const { return evolved(t); }

InhomogeneityModel::InhomogeneityModel(double sigma_omega, int ensemble_size, bool monte_carlo,
                                       uint64_t seed)
    : sigma_omega(sigma_omega), ensemble_size(ensemble_size), monte_carlo(monte_carlo),
      seed(seed) {
    if (!(sigma_omega >= 0.0))
        throw std::invalid_argument("InhomogeneityModel: sigma_omega must be >= 0");
    if (ensemble_size < 1)
        throw std::invalid_argument("InhomogeneityModel: ensemble_size must be >= 1");
}

double sigma_omega_from_decay_time(double tau_e) {
    if (!(tau_e > 0.0))
        throw std::invalid_argument("sigma_omega_from_decay_time: tau_e must be positive");
    return 1.0 / (std::numbers::sqrt2 * tau_e);
}

double decay_time_from_sigma_omega(double sigma_omega) {
    if (!(sigma_omega > 0.0))
        throw std::invalid_argument("decay_time_from_sigma_omega: sigma_omega must be positive");
    return 1.0 / (std::numbers::sqrt2 * sigma_omega);
}

namespace {

// splitmix64-based uniform; keeps the Monte Carlo mode reproducible without
// depending on the standard library's distribution internals.
class NormalSampler {
public:
    explicit NormalSampler(uint64_t seed) : state_(seed) {}
    double operator()() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * k_pi * uniform());
    }

private:
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
};

Eigen::Matrix2d echo_site_cov(double r, double phi, double nbar0) {
    const double v0 = (2.0 * nbar0 + 1.0) / 4.0;
    const double c = std::cos(phi), s = std::sin(phi);
    Eigen::Matrix2d sq, rot, unsq;
    sq << std::exp(-r), 0.0, 0.0, std::exp(r);
    rot << c, s, -s, c;
    unsq << std::exp(r), 0.0, 0.0, std::exp(-r);
    Eigen::Matrix2d m = unsq * rot * sq;
    return v0 * m * m.transpose();
}

int adaptive_cap(double v_max, double gate, int hard_cap) {
    // Tail of the phonon distribution decays like b^n, b = (4v-1)/(4v+1).
    const double b = (4.0 * v_max - 1.0) / (4.0 * v_max + 1.0);
    if (b <= 0.0) return std::min(32, hard_cap);
    const int n = static_cast<int>(std::ceil(std::log(gate * (1.0 - b)) / std::log(b)));
    return std::clamp(n, 32, hard_cap);
}

} // namespace

std::vector<std::pair<double, double>> echo_ratio_vs_delay(
    double r, const std::vector<double>& tau_grid, const gauss::OscillatorConfig& config,
    const InhomogeneityModel& inhom, const spectro::SidebandModel& sideband, double nbar0,
    const EchoOptions& options) {
    if (!(r >= 0.0))
        throw std::invalid_argument("echo_ratio_vs_delay: r must be nonnegative");
    for (double tau : tau_grid)
        if (!(tau >= 0.0))
            throw std::invalid_argument("echo_ratio_vs_delay: tau grid must be nonnegative");

    // Site frequencies and weights: Gauss-Hermite by default, seeded Monte
    // Carlo for cross-validation.
    std::vector<double> site_omega, site_weight;
    if (inhom.sigma_omega == 0.0) {
        site_omega = {config.omega};
        site_weight = {1.0};
    } else if (inhom.monte_carlo) {
        NormalSampler gen(inhom.seed == 0 ? 0x5eedULL : inhom.seed);
        for (int i = 0; i < inhom.ensemble_size; ++i) {
            site_omega.push_back(config.omega + inhom.sigma_omega * gen());
            site_weight.push_back(1.0 / inhom.ensemble_size);
        }
    } else {
        const auto rule = quad::gauss_hermite(inhom.ensemble_size);
        const double spi = std::sqrt(k_pi);
        for (int i = 0; i < inhom.ensemble_size; ++i) {
            site_omega.push_back(config.omega +
                                 std::numbers::sqrt2 * inhom.sigma_omega * rule.nodes[i]);
            site_weight.push_back(rule.weights[i] / spi);
        }
    }

    // Worst-case variance over the whole run bounds the table size.
    const double v_worst = (2.0 * nbar0 + 1.0) / 4.0 * std::exp(4.0 * std::abs(r));
    const int global_cap = adaptive_cap(v_worst, options.gate, options.n_max);

    std::vector<std::pair<double, double>> out;
    out.reserve(tau_grid.size());
    Eigen::VectorXd avg(global_cap + 1);
    for (double tau : tau_grid) {
        avg.setZero();
        for (size_t s = 0; s < site_omega.size(); ++s) {
            const Eigen::Matrix2d cov = echo_site_cov(r, site_omega[s] * tau, nbar0);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov, Eigen::EigenvaluesOnly);
            const int cap = adaptive_cap(es.eigenvalues()[1], options.gate, global_cap);
            const Eigen::VectorXd p =
                fock::phonon_distribution_from_cov(es.eigenvalues()[0], es.eigenvalues()[1], cap);
            avg.head(cap + 1) += site_weight[s] * p;
        }
        out.emplace_back(tau, spectro::ratio_R(avg, sideband));
    }
    return out;
}

} // namespace tmsim::protocol
