#ifndef TMSIM_SCENARIO_HPP
#define TMSIM_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmsim/gaussian.hpp"
#include "tmsim/protocol.hpp"
#include "tmsim/spectroscopy.hpp"

namespace tmsim::scenario {

/// Flat, unit-suffixed scenario description; see configs/ for examples.
struct ScenarioConfig {
    // oscillator
    double mass_amu = 84.911789732; // Rb-85
    double omega_khz = 125.0;
    std::optional<double> omega_prime_khz; // exactly one of this / r
    // protocol
    double relative_phase_rad = 1.5707963267948966;
    std::optional<double> r;
    // cooling
    double nbar0 = 0.0;
    // sideband probe
    double rabi01_khz = 1.5;  // Omega01 = 2 pi rabi01_khz 1e3 rad/s
    double lamb_dicke = 0.13;
    double gamma_per_ms = 10.36; // decay rate in 1/ms
    double pulse_ms = 0.17;
    // inhomogeneity (at most one of the two)
    std::optional<double> sigma_omega_krad_s;
    std::optional<double> target_decay_us;
    int ensemble_order = 21;
    // velocimetry
    int scan_points = 41;
    double scan_span_sigmas = 4.0;
    double noise_fraction = 0.02;
    bool instrument_response = false;
    std::optional<double> k_eff_per_m;
    // grids
    double time_max_us = 16.0;
    int time_points = 81;
    double r_min = 0.0, r_max = 1.5, r_step = 0.05;
    double tau_max_us = 200.0, tau_step_us = 0.4;
    int fock_n_max = 25;
    double wigner_extent = 3.0; // quadrature units
    int wigner_points = 81;
    double wigner_time_us = 0.0;
    // output
    std::string output_directory = "out";
    bool emit_csv = true;
    bool emit_json = true;
    uint64_t seed = 1;

    // ---- derived quantities ----
    double mass_kg() const;
    double omega() const;       // rad/s
    double omega_prime() const; // rad/s (from r when not given directly)
    double squeeze_r() const;   // from the frequency pair when not given directly
    double sigma_omega() const; // rad/s (0 when neither inhomogeneity key set)
    gauss::OscillatorConfig oscillator() const;
    spectro::SidebandModel sideband() const;
    spectro::VelocimetryModel velocimetry() const;
    protocol::InhomogeneityModel inhomogeneity() const;

    /// Canonical serialized form; the config hash is the FNV-1a of this.
    std::string canonical_json() const;
    std::string hash() const;
};

/// Parses and validates a config file. Throws ConfigError with a key-anchored
/// message on any problem. `overrides` entries look like "protocol.r=0.9".
ScenarioConfig load_config(const std::filesystem::path& path,
                           const std::vector<std::string>& overrides = {});
ScenarioConfig parse_config(const std::string& json_text,
                            const std::vector<std::string>& overrides = {},
                            const std::string& origin = "<config>");

/// Validation report of derived quantities (no execution).
std::string validate_report(const ScenarioConfig& cfg);

/// Runs one subcommand, writing artifacts into out_dir and returning the
/// one-line summary. Valid names: widths, criteria, fock, ratio, echo,
/// wigner, velocimetry.
std::string run_scenario(const std::string& subcommand, const ScenarioConfig& cfg,
                         const std::filesystem::path& out_dir);

std::vector<std::string> subcommand_names();

} // namespace tmsim::scenario

#endif
