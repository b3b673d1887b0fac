#ifndef TMSIM_PROTOCOL_HPP
#define TMSIM_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tmsim/gaussian.hpp"
#include "tmsim/spectroscopy.hpp"

namespace tmsim::protocol {

/// Squeezing amplitude of a sudden trap-frequency jump, ln(omega/omega_prime).
/// Negative for an upward jump; downstream treats that as squeezing of the
/// conjugate quadrature.
double squeeze_amplitude_from_jump(double omega, double omega_prime);

/// Timed list of trap-frequency switches.
struct JumpSchedule {
    gauss::OscillatorConfig config;
    std::vector<std::pair<double, double>> events; // (time s, new frequency rad/s)
    double total_duration = 0.0;
};

struct JumpProtocolResult {
    gauss::GaussianState state;
    JumpSchedule schedule;
};

/// Jump-rotate-jump squeezing sequence: switch omega -> omega', free-evolve a
/// quarter period pi/(2 omega'), switch back. Net effect on the input is a
/// single-mode squeeze of amplitude ln(omega/omega') up to an overall
/// phase-space rotation.
JumpProtocolResult single_mode_jump_protocol(const gauss::OscillatorConfig& config,
                                             double nbar0 = 0.0);

/// Two-mode sequence: both modes receive the jump squeeze, the second one
/// delayed so the squeeze phases differ by relative_phase; free evolution then
/// runs both, and the virtual 50/50 beam splitter projects onto the 45-degree
/// basis. state_at(t) is phase-referenced so the in-phase output width follows
/// [cosh 2r + sinh 2r cos(2 omega t)]^{1/2} / 2 exactly.
class TwoModeProtocol {
public:
    TwoModeProtocol(const gauss::OscillatorConfig& config, double relative_phase,
                    double nbar0 = 0.0, std::optional<double> r_override = std::nullopt);

    /// Output state after the beam splitter at free-evolution time t.
    gauss::GaussianState state_at(double t) const;

    /// The two independently squeezed modes before the beam splitter.
    gauss::GaussianState input_state_at(double t) const;

    double r() const { return r_; }
    double relative_phase() const { return relative_phase_; }
    const gauss::OscillatorConfig& config() const { return config_; }

private:
    gauss::OscillatorConfig config_;
    double relative_phase_;
    double r_;
    gauss::GaussianState base_; // both squeeze sequences applied, phase-aligned

    gauss::GaussianState evolved(double t) const;
};

/// Static Gaussian spread of the trap frequency across lattice sites.
struct InhomogeneityModel {
    double sigma_omega = 0.0; // rad/s
    int ensemble_size = 21;   // quadrature order / sample count
    bool monte_carlo = false; // cross-validation mode; default is deterministic quadrature
    uint64_t seed = 0;

    InhomogeneityModel() = default;
    InhomogeneityModel(double sigma_omega, int ensemble_size, bool monte_carlo = false,
                       uint64_t seed = 0);
};

/// sigma_omega giving the 2-omega beat a Gaussian envelope exp(-(tau/tau_e)^2):
/// the site average <cos 2 w tau> = cos(2 omega tau) exp(-2 sigma^2 tau^2), so
/// sigma = 1 / (sqrt(2) tau_e).
double sigma_omega_from_decay_time(double tau_e);
double decay_time_from_sigma_omega(double sigma_omega);

struct EchoOptions {
    int n_max = 1024;      // hard cap on the phonon table
    double gate = 1e-3;    // truncation-mass target for the adaptive cap
};

/// R(tau) of the squeeze / free-evolve / unsqueeze echo on a thermal input,
/// ensemble-averaged over the site-frequency spread. Oscillates at 2 omega
/// with an envelope set by sigma_omega.
std::vector<std::pair<double, double>> echo_ratio_vs_delay(
    double r, const std::vector<double>& tau_grid, const gauss::OscillatorConfig& config,
    const InhomogeneityModel& inhom, const spectro::SidebandModel& sideband, double nbar0 = 0.0,
    const EchoOptions& options = {});

} // namespace tmsim::protocol

#endif
