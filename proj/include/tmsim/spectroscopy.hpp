#ifndef TMSIM_SPECTROSCOPY_HPP
#define TMSIM_SPECTROSCOPY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "tmsim/fit.hpp"
#include "tmsim/fock.hpp"
#include "tmsim/gaussian.hpp"

namespace tmsim::spectro {

/// Parameters of the Raman sideband probe: the |n=0> -> |n=1> two-photon Rabi
/// frequency Omega_{0,1} = eta Omega, the Lamb-Dicke parameter eta (assumed
/// small), the uniform Rabi-flopping decay rate gamma and the pulse duration.
struct SidebandModel {
    double rabi_01;        // rad/s
    double lamb_dicke;     // dimensionless
    double gamma;          // 1/s
    double pulse_duration; // s

    SidebandModel(double rabi_01, double lamb_dicke, double gamma, double pulse_duration);
};

struct SidebandPopulations {
    double p_plus;  // first blue sideband, proportional units
    double p_minus; // first red sideband, same normalization
};

/// Sideband populations after Rabi flopping,
///   P+- ~ sum_n P(n) [1 - e^{-gamma t} cos(sqrt(n + {1,0}) Omega01 t)] / 2,
/// summed over the x'-marginal of the distribution. Both populations share one
/// arbitrary normalization; only their ratio is observable.
SidebandPopulations sideband_populations(const fock::FockDistribution& dist,
                                         const SidebandModel& model,
                                         double gate = fock::k_default_truncation_gate);
SidebandPopulations sideband_populations(const Eigen::VectorXd& marginal,
                                         const SidebandModel& model);

/// Ratio of first red to first blue sideband population.
double ratio_R(const fock::FockDistribution& dist, const SidebandModel& model,
               double gate = fock::k_default_truncation_gate);
double ratio_R(const Eigen::VectorXd& marginal, const SidebandModel& model);

enum class ScanAxis { X, Y, XPrime, YPrime };

/// Synthetic Raman-velocimetry trace: excited fraction versus two-photon
/// detuning (relative to the hyperfine splitting).
struct VelocityScan {
    Eigen::VectorXd detunings;        // rad/s
    Eigen::VectorXd excited_fraction; // in [0, 1]
    double k_eff;                     // rad/m
    std::optional<uint64_t> noise_seed;
};

/// Instrument and noise model for scan synthesis. The 0.1 ms square probe
/// pulse contributes a sinc^2 line shape, negligible next to the Doppler
/// widths here; convolve_instrument switches it on.
struct VelocimetryModel {
    double k_eff = 2.0 * (2.0 * 3.14159265358979323846 / 795e-9); // counter-propagating D1 Raman pair
    double amplitude = 0.8;
    double offset = 0.05;
    double pulse_duration = 1e-4; // s
    bool convolve_instrument = false;
    int points = 41;
    double span_sigmas = 4.0; // half-span of the detuning grid in Doppler sigmas
};

struct NoiseSpec {
    double fraction; // Gaussian noise sigma as a fraction of the peak amplitude
    uint64_t seed;
};

/// Velocity standard deviation (m/s) of the state's momentum marginal along
/// the chosen axis; the 45-degree axes read the virtual beam-splitter outputs
/// of a two-mode state.
double velocity_sigma(const gauss::GaussianState& state, ScanAxis axis,
                      const gauss::OscillatorConfig& config);

/// Synthesizes the velocimetry trace of the state along the axis: a Gaussian
/// in detuning delta = k_eff v with the state's velocity marginal, optional
/// sinc^2 instrument convolution and optional seeded Gaussian noise.
VelocityScan synthesize_velocity_scan(const gauss::GaussianState& state, ScanAxis axis,
                                      const gauss::OscillatorConfig& config,
                                      const VelocimetryModel& model = {},
                                      const std::optional<NoiseSpec>& noise = std::nullopt);

/// Gaussian fit of a scan on the velocity axis (center and sigma in m/s).
fit::GaussianPeakFit gaussian_fit(const VelocityScan& scan);

struct SpectrumTrace {
    Eigen::VectorXd detunings; // rad/s, relative to the carrier
    Eigen::VectorXd fraction;
};

/// Three-peak Lamb-Dicke spectrum: carrier at 0, first blue sideband at
/// +omega, first red at -omega. Peak areas follow the flopping populations
/// (the carrier uses the bare Rabi frequency Omega01 / eta and an arbitrary
/// display scale); each peak is a Gaussian of width sigma_omega.
SpectrumTrace synthesize_sideband_spectrum(const fock::FockDistribution& dist,
                                           const SidebandModel& model, double sigma_omega,
                                           double omega, const Eigen::VectorXd& detunings,
                                           double gate = fock::k_default_truncation_gate);

} // namespace tmsim::spectro

#endif
