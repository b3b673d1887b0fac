#include "tmsim/spectroscopy.hpp"

#include <cmath>
#include <numbers>

namespace tmsim::spectro {

namespace {

// Deterministic standard-normal generator (xoshiro-free: splitmix64 stream +
// Box-Muller) so artifacts are reproducible across standard libraries.
class NormalGen {
public:
    explicit NormalGen(uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double flop_term(double n_scale, const SidebandModel& m) {
    return (1.0 - std::exp(-m.gamma * m.pulse_duration) *
                      std::cos(std::sqrt(n_scale) * m.rabi_01 * m.pulse_duration)) /
           2.0;
}

} // namespace

SidebandModel::SidebandModel(double rabi_01, double lamb_dicke, double gamma,
                             double pulse_duration)
    : rabi_01(rabi_01), lamb_dicke(lamb_dicke), gamma(gamma), pulse_duration(pulse_duration) {
    if (!(rabi_01 > 0.0)) throw std::invalid_argument("SidebandModel: rabi_01 must be positive");
    if (!(lamb_dicke > 0.0))
        throw std::invalid_argument("SidebandModel: lamb_dicke must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("SidebandModel: gamma must be positive");
    if (!(pulse_duration > 0.0))
        throw std::invalid_argument("SidebandModel: pulse_duration must be positive");
}

SidebandPopulations sideband_populations(const Eigen::VectorXd& marginal,
                                         const SidebandModel& model) {
    double p_plus = 0.0, p_minus = 0.0;
    for (Eigen::Index n = 0; n < marginal.size(); ++n) {
        p_plus += marginal[n] * flop_term(static_cast<double>(n) + 1.0, model);
        p_minus += marginal[n] * flop_term(static_cast<double>(n), model);
    }
    return {p_plus, p_minus};
}

SidebandPopulations sideband_populations(const fock::FockDistribution& dist,
                                         const SidebandModel& model, double gate) {
    if (dist.truncation_mass > gate)
        throw std::invalid_argument("sideband_populations: truncation mass exceeds gate");
    return sideband_populations(dist.marginal(0), model);
}

double ratio_R(const Eigen::VectorXd& marginal, const SidebandModel& model) {
    const auto p = sideband_populations(marginal, model);
    if (!(p.p_plus > 0.0))
        throw UndefinedRatioError("ratio_R: blue sideband population vanishes");
    return p.p_minus / p.p_plus;
}

double ratio_R(const fock::FockDistribution& dist, const SidebandModel& model, double gate) {
    if (dist.truncation_mass > gate)
        throw std::invalid_argument("ratio_R: truncation mass exceeds gate");
    return ratio_R(dist.marginal(0), model);
}

double velocity_sigma(const gauss::GaussianState& state, ScanAxis axis,
                      const gauss::OscillatorConfig& config) {
    const auto& c = state.cov();
    double var_pbar = 0.0;
    switch (axis) {
    case ScanAxis::X:
        var_pbar = c(1, 1);
        break;
    case ScanAxis::Y:
        if (state.mode_count() < 2)
            throw std::invalid_argument("velocity_sigma: axis y needs a two-mode state");
        var_pbar = c(3, 3);
        break;
    case ScanAxis::XPrime:
    case ScanAxis::YPrime: {
        if (state.mode_count() < 2)
            throw std::invalid_argument("velocity_sigma: 45-degree axis needs a two-mode state");
        const double sgn = (axis == ScanAxis::XPrime) ? 1.0 : -1.0;
        // pbar' = (pbar_y +- pbar_x) / sqrt(2)
        var_pbar = 0.5 * (c(1, 1) + c(3, 3)) + sgn * c(1, 3);
        break;
    }
    }
    // v = 2 dv0 pbar
    return 2.0 * config.dv0() * std::sqrt(var_pbar);
}

VelocityScan synthesize_velocity_scan(const gauss::GaussianState& state, ScanAxis axis,
                                      const gauss::OscillatorConfig& config,
                                      const VelocimetryModel& model,
                                      const std::optional<NoiseSpec>& noise) {
    if (model.points < 8)
        throw std::invalid_argument("synthesize_velocity_scan: need at least 8 points");
    const double sigma_v = velocity_sigma(state, axis, config);
    const double sigma_delta = model.k_eff * sigma_v;
    const double half_span = model.span_sigmas * sigma_delta;

    VelocityScan scan;
    scan.k_eff = model.k_eff;
    scan.detunings = Eigen::VectorXd::LinSpaced(model.points, -half_span, half_span);
    scan.excited_fraction.resize(model.points);
    for (int i = 0; i < model.points; ++i) {
        const double d = scan.detunings[i];
        scan.excited_fraction[i] =
            model.amplitude * std::exp(-d * d / (2.0 * sigma_delta * sigma_delta)) + model.offset;
    }

    if (model.convolve_instrument) {
        // sinc^2 response of the square probe pulse, discretized on the scan
        // grid out to its fourth zero and renormalized.
        const double step = scan.detunings[1] - scan.detunings[0];
        const double zero1 = 2.0 * std::numbers::pi / model.pulse_duration;
        const int half_k = std::max(1, static_cast<int>(std::ceil(4.0 * zero1 / step)));
        Eigen::VectorXd kernel(2 * half_k + 1);
        for (int k = -half_k; k <= half_k; ++k) {
            const double u = (k * step) * model.pulse_duration / 2.0;
            const double s = (std::abs(u) < 1e-12) ? 1.0 : std::sin(u) / u;
            kernel[k + half_k] = s * s;
        }
        kernel /= kernel.sum();
        Eigen::VectorXd base = scan.excited_fraction;
        for (int i = 0; i < model.points; ++i) {
            double acc = 0.0;
            for (int k = -half_k; k <= half_k; ++k) {
                const int j = std::clamp(i + k, 0, model.points - 1);
                acc += kernel[k + half_k] * base[j];
            }
            scan.excited_fraction[i] = acc;
        }
    }

    if (noise) {
        NormalGen gen(noise->seed);
        const double sd = noise->fraction * model.amplitude;
        for (int i = 0; i < model.points; ++i) scan.excited_fraction[i] += sd * gen();
        scan.noise_seed = noise->seed;
    }
    for (int i = 0; i < model.points; ++i)
        scan.excited_fraction[i] = std::clamp(scan.excited_fraction[i], 0.0, 1.0);
    return scan;
}

fit::GaussianPeakFit gaussian_fit(const VelocityScan& scan) {
    const Eigen::VectorXd v = scan.detunings / scan.k_eff;
    return fit::fit_gaussian_peak(v, scan.excited_fraction);
}

SpectrumTrace synthesize_sideband_spectrum(const fock::FockDistribution& dist,
                                           const SidebandModel& model, double sigma_omega,
                                           double omega, const Eigen::VectorXd& detunings,
                                           double gate) {
    if (!(sigma_omega >= 0.0))
        throw std::invalid_argument("synthesize_sideband_spectrum: sigma_omega must be >= 0");
    if (detunings.size() < 2)
        throw std::invalid_argument("synthesize_sideband_spectrum: need a detuning grid");
    const auto pops = sideband_populations(dist, model, gate);
    // Carrier area: same flopping expression at the carrier Rabi frequency
    // Omega01 / eta, display scale only.
    SidebandModel carrier(model.rabi_01 / model.lamb_dicke, model.lamb_dicke, model.gamma,
                          model.pulse_duration);
    const double carrier_area = flop_term(1.0, carrier);

    // Width floor of one grid step keeps sigma_omega = 0 plottable.
    const double step = std::abs(detunings[1] - detunings[0]);
    const double sig = std::max(sigma_omega, step);

    SpectrumTrace trace;
    trace.detunings = detunings;
    trace.fraction = Eigen::VectorXd::Zero(detunings.size());
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sig);
    struct Peak {
        double center, area;
    };
    const Peak peaks[3] = {{-omega, pops.p_minus}, {0.0, carrier_area}, {+omega, pops.p_plus}};
    for (const auto& pk : peaks) {
        for (Eigen::Index i = 0; i < detunings.size(); ++i) {
            const double d = detunings[i] - pk.center;
            trace.fraction[i] += pk.area * norm * std::exp(-d * d / (2.0 * sig * sig));
        }
    }
    return trace;
}

} // namespace tmsim::spectro
