#include "tmsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "tmsim/fit.hpp"
#include "tmsim/fock.hpp"
#include "tmsim/io.hpp"

namespace tmsim::scenario {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double k_pi = std::numbers::pi;

double get_num(const json& j, const std::string& section, const std::string& key, double fallback,
               bool* present = nullptr) {
    if (present) *present = false;
    if (!j.contains(section)) return fallback;
    const auto& s = j.at(section);
    if (!s.contains(key)) return fallback;
    if (!s.at(key).is_number())
        throw ConfigError(section + "." + key + ": expected a number");
    if (present) *present = true;
    return s.at(key).get<double>();
}

int get_int(const json& j, const std::string& section, const std::string& key, int fallback) {
    if (!j.contains(section) || !j.at(section).contains(key)) return fallback;
    const auto& v = j.at(section).at(key);
    if (!v.is_number_integer())
        throw ConfigError(section + "." + key + ": expected an integer");
    return v.get<int>();
}

bool get_bool(const json& j, const std::string& section, const std::string& key, bool fallback) {
    if (!j.contains(section) || !j.at(section).contains(key)) return fallback;
    const auto& v = j.at(section).at(key);
    if (!v.is_boolean())
        throw ConfigError(section + "." + key + ": expected a boolean");
    return v.get<bool>();
}

} // namespace

double ScenarioConfig::mass_kg() const { return mass_amu * gauss::k_amu; }
double ScenarioConfig::omega() const { return 2.0 * k_pi * omega_khz * 1e3; }

double ScenarioConfig::omega_prime() const {
    if (omega_prime_khz) return 2.0 * k_pi * *omega_prime_khz * 1e3;
    return omega() * std::exp(-*r);
}

double ScenarioConfig::squeeze_r() const {
    if (r) return *r;
    return std::log(omega() / omega_prime());
}

double ScenarioConfig::sigma_omega() const {
    if (sigma_omega_krad_s) return *sigma_omega_krad_s * 1e3;
    if (target_decay_us) return protocol::sigma_omega_from_decay_time(*target_decay_us * 1e-6);
    return 0.0;
}

gauss::OscillatorConfig ScenarioConfig::oscillator() const {
    return gauss::OscillatorConfig(mass_kg(), omega(), omega_prime());
}

spectro::SidebandModel ScenarioConfig::sideband() const {
    return spectro::SidebandModel(2.0 * k_pi * rabi01_khz * 1e3, lamb_dicke, gamma_per_ms * 1e3,
                                  pulse_ms * 1e-3);
}

spectro::VelocimetryModel ScenarioConfig::velocimetry() const {
    spectro::VelocimetryModel m;
    if (k_eff_per_m) m.k_eff = *k_eff_per_m;
    m.points = scan_points;
    m.span_sigmas = scan_span_sigmas;
    m.convolve_instrument = instrument_response;
    return m;
}

protocol::InhomogeneityModel ScenarioConfig::inhomogeneity() const {
    return protocol::InhomogeneityModel(sigma_omega(), ensemble_order);
}

std::string ScenarioConfig::canonical_json() const {
    json j;
    j["oscillator"]["mass_amu"] = mass_amu;
    j["oscillator"]["omega_khz"] = omega_khz;
    if (omega_prime_khz) j["oscillator"]["omega_prime_khz"] = *omega_prime_khz;
    j["protocol"]["relative_phase_rad"] = relative_phase_rad;
    if (r) j["protocol"]["r"] = *r;
    j["cooling"]["nbar0"] = nbar0;
    j["sideband"] = {{"rabi01_khz", rabi01_khz},
                     {"lamb_dicke", lamb_dicke},
                     {"gamma_per_ms", gamma_per_ms},
                     {"pulse_ms", pulse_ms}};
    if (sigma_omega_krad_s) j["inhomogeneity"]["sigma_omega_krad_s"] = *sigma_omega_krad_s;
    if (target_decay_us) j["inhomogeneity"]["target_decay_us"] = *target_decay_us;
    j["inhomogeneity"]["ensemble_order"] = ensemble_order;
    j["velocimetry"] = {{"points", scan_points},
                        {"span_sigmas", scan_span_sigmas},
                        {"noise_fraction", noise_fraction},
                        {"instrument_response", instrument_response}};
    if (k_eff_per_m) j["velocimetry"]["k_eff_per_m"] = *k_eff_per_m;
    j["grids"] = {{"time_max_us", time_max_us},   {"time_points", time_points},
                  {"r_min", r_min},               {"r_max", r_max},
                  {"r_step", r_step},             {"tau_max_us", tau_max_us},
                  {"tau_step_us", tau_step_us},   {"fock_n_max", fock_n_max},
                  {"wigner_extent", wigner_extent}, {"wigner_points", wigner_points},
                  {"wigner_time_us", wigner_time_us}};
    j["seed"] = seed;
    return j.dump();
}

std::string ScenarioConfig::hash() const { return io::fnv1a_hex(canonical_json()); }

namespace {

void apply_override(json& j, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key.path=value, got '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value; // bare strings allowed
    }
    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty())
        throw ConfigError("--set: empty key path");
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
    (*node)[parts.back()] = parsed;
}

ScenarioConfig from_json(const json& j, const std::string& origin) {
    static const std::vector<std::string> known_sections = {
        "oscillator", "protocol", "cooling", "sideband", "inhomogeneity",
        "velocimetry", "grids", "output", "seed"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known_sections.begin(), known_sections.end(), key) == known_sections.end())
            throw ConfigError(origin + ": unknown section '" + key + "'");
    }

    ScenarioConfig c;
    c.mass_amu = get_num(j, "oscillator", "mass_amu", c.mass_amu);
    c.omega_khz = get_num(j, "oscillator", "omega_khz", c.omega_khz);
    bool has_wp = false, has_r = false;
    const double wp = get_num(j, "oscillator", "omega_prime_khz", 0.0, &has_wp);
    c.relative_phase_rad = get_num(j, "protocol", "relative_phase_rad", c.relative_phase_rad);
    const double rv = get_num(j, "protocol", "r", 0.0, &has_r);
    if (has_wp == has_r)
        throw ConfigError(origin +
                          ": exactly one of oscillator.omega_prime_khz and protocol.r "
                          "must be specified");
    if (has_wp) c.omega_prime_khz = wp;
    if (has_r) c.r = rv;

    c.nbar0 = get_num(j, "cooling", "nbar0", c.nbar0);
    c.rabi01_khz = get_num(j, "sideband", "rabi01_khz", c.rabi01_khz);
    c.lamb_dicke = get_num(j, "sideband", "lamb_dicke", c.lamb_dicke);
    c.gamma_per_ms = get_num(j, "sideband", "gamma_per_ms", c.gamma_per_ms);
    c.pulse_ms = get_num(j, "sideband", "pulse_ms", c.pulse_ms);

    bool has_sig = false, has_decay = false;
    const double sig = get_num(j, "inhomogeneity", "sigma_omega_krad_s", 0.0, &has_sig);
    const double dec = get_num(j, "inhomogeneity", "target_decay_us", 0.0, &has_decay);
    if (has_sig && has_decay)
        throw ConfigError(origin +
                          ": inhomogeneity.sigma_omega_krad_s and "
                          "inhomogeneity.target_decay_us are mutually exclusive");
    if (has_sig) c.sigma_omega_krad_s = sig;
    if (has_decay) c.target_decay_us = dec;
    c.ensemble_order = get_int(j, "inhomogeneity", "ensemble_order", c.ensemble_order);

    c.scan_points = get_int(j, "velocimetry", "points", c.scan_points);
    c.scan_span_sigmas = get_num(j, "velocimetry", "span_sigmas", c.scan_span_sigmas);
    c.noise_fraction = get_num(j, "velocimetry", "noise_fraction", c.noise_fraction);
    c.instrument_response = get_bool(j, "velocimetry", "instrument_response",
                                     c.instrument_response);
    bool has_keff = false;
    const double keff = get_num(j, "velocimetry", "k_eff_per_m", 0.0, &has_keff);
    if (has_keff) c.k_eff_per_m = keff;

    c.time_max_us = get_num(j, "grids", "time_max_us", c.time_max_us);
    c.time_points = get_int(j, "grids", "time_points", c.time_points);
    c.r_min = get_num(j, "grids", "r_min", c.r_min);
    c.r_max = get_num(j, "grids", "r_max", c.r_max);
    c.r_step = get_num(j, "grids", "r_step", c.r_step);
    c.tau_max_us = get_num(j, "grids", "tau_max_us", c.tau_max_us);
    c.tau_step_us = get_num(j, "grids", "tau_step_us", c.tau_step_us);
    c.fock_n_max = get_int(j, "grids", "fock_n_max", c.fock_n_max);
    c.wigner_extent = get_num(j, "grids", "wigner_extent", c.wigner_extent);
    c.wigner_points = get_int(j, "grids", "wigner_points", c.wigner_points);
    c.wigner_time_us = get_num(j, "grids", "wigner_time_us", c.wigner_time_us);

    if (j.contains("output")) {
        const auto& out = j.at("output");
        if (out.contains("directory")) c.output_directory = out.at("directory").get<std::string>();
        if (out.contains("formats")) {
            c.emit_csv = false;
            c.emit_json = false;
            for (const auto& f : out.at("formats")) {
                const std::string name = f.get<std::string>();
                if (name == "csv") c.emit_csv = true;
                else if (name == "json") c.emit_json = true;
                else throw ConfigError(origin + ": output.formats entries must be csv or json");
            }
            if (!c.emit_csv && !c.emit_json)
                throw ConfigError(origin + ": output.formats must not be empty");
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw ConfigError(origin + ": seed: expected an integer");
        c.seed = j.at("seed").get<uint64_t>();
    }

    // Semantic checks.
    auto positive = [&](double v, const char* key) {
        if (!(v > 0.0)) throw ConfigError(origin + ": " + key + " must be positive");
    };
    positive(c.mass_amu, "oscillator.mass_amu");
    positive(c.omega_khz, "oscillator.omega_khz");
    if (c.omega_prime_khz) positive(*c.omega_prime_khz, "oscillator.omega_prime_khz");
    if (!(c.nbar0 >= 0.0)) throw ConfigError(origin + ": cooling.nbar0 must be nonnegative");
    if (c.r && !(*c.r >= 0.0)) throw ConfigError(origin + ": protocol.r must be nonnegative");
    positive(c.rabi01_khz, "sideband.rabi01_khz");
    positive(c.lamb_dicke, "sideband.lamb_dicke");
    positive(c.gamma_per_ms, "sideband.gamma_per_ms");
    positive(c.pulse_ms, "sideband.pulse_ms");
    if (c.sigma_omega_krad_s && !(*c.sigma_omega_krad_s >= 0.0))
        throw ConfigError(origin + ": inhomogeneity.sigma_omega_krad_s must be nonnegative");
    if (c.target_decay_us) positive(*c.target_decay_us, "inhomogeneity.target_decay_us");
    if (c.ensemble_order < 1)
        throw ConfigError(origin + ": inhomogeneity.ensemble_order must be >= 1");
    if (c.scan_points < 8)
        throw ConfigError(origin + ": velocimetry.points must be >= 8");
    if (!(c.noise_fraction >= 0.0))
        throw ConfigError(origin + ": velocimetry.noise_fraction must be nonnegative");
    if (c.fock_n_max < 0) throw ConfigError(origin + ": grids.fock_n_max must be nonnegative");
    if (c.time_points < 2) throw ConfigError(origin + ": grids.time_points must be >= 2");
    if (c.wigner_points < 2) throw ConfigError(origin + ": grids.wigner_points must be >= 2");
    positive(c.r_step, "grids.r_step");
    positive(c.tau_step_us, "grids.tau_step_us");
    return c;
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides,
                            const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);
    return from_json(j, origin);
}

ScenarioConfig load_config(const fs::path& path, const std::vector<std::string>& overrides) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), overrides, path.string());
}

std::string validate_report(const ScenarioConfig& cfg) {
    std::ostringstream os;
    const auto osc = cfg.oscillator();
    os << "config_hash=" << cfg.hash() << "\n";
    os << "r=" << io::fmt_double(cfg.squeeze_r()) << "\n";
    os << "omega_khz=" << io::fmt_double(cfg.omega() / (2e3 * k_pi)) << "\n";
    os << "omega_prime_khz=" << io::fmt_double(cfg.omega_prime() / (2e3 * k_pi)) << "\n";
    os << "dx0_nm=" << io::fmt_double(osc.dx0() * 1e9) << "\n";
    os << "dv0_cm_s=" << io::fmt_double(osc.dv0() * 1e2) << "\n";
    os << "sigma_omega_krad_s=" << io::fmt_double(cfg.sigma_omega() / 1e3) << "\n";
    if (cfg.sigma_omega() > 0.0)
        os << "envelope_decay_us="
           << io::fmt_double(protocol::decay_time_from_sigma_omega(cfg.sigma_omega()) * 1e6)
           << "\n";
    os << "nbar0=" << io::fmt_double(cfg.nbar0) << "\n";
    return os.str();
}

namespace {

io::CsvMetadata meta_for(const ScenarioConfig& cfg, const std::string& schema) {
    return {schema, cfg.hash(), cfg.seed};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json json_meta(const ScenarioConfig& cfg, const std::string& schema) {
    return json{{"tool", "tmsim"},
                {"version", io::k_version},
                {"schema", schema},
                {"config_hash", cfg.hash()},
                {"seed", cfg.seed}};
}

std::string run_widths(const ScenarioConfig& cfg, const fs::path& out) {
    const auto osc = cfg.oscillator();
    const double r = cfg.squeeze_r();
    protocol::TwoModeProtocol epr(osc, k_pi / 2.0, cfg.nbar0, cfg.r);
    protocol::TwoModeProtocol inphase(osc, 0.0, cfg.nbar0, cfg.r);

    auto trace = [&](const protocol::TwoModeProtocol& proto, double theta_diff) {
        io::Table t;
        t.columns = {"t_us", "width", "width_model", "velocity_cm_s"};
        for (int i = 0; i < cfg.time_points; ++i) {
            const double t_us = cfg.time_max_us * i / (cfg.time_points - 1);
            const double tt = t_us * 1e-6;
            const auto state = proto.state_at(tt);
            const double w = std::sqrt(state.variance(1));
            const double tx = osc.omega * tt;
            const double model = gauss::momentum_uncertainty_eq2(r, tx, tx + theta_diff) *
                                 std::sqrt(2.0 * cfg.nbar0 + 1.0);
            t.rows.push_back({t_us, w, model, 2.0 * osc.dv0() * w * 1e2});
        }
        return t;
    };

    if (cfg.emit_csv) {
        io::write_table(out / "widths_epr.csv", meta_for(cfg, "widths.v1"),
                        trace(epr, k_pi / 2.0));
        io::write_table(out / "widths_inphase.csv", meta_for(cfg, "widths.v1"),
                        trace(inphase, 0.0));
        const auto jump = protocol::single_mode_jump_protocol(osc, cfg.nbar0);
        io::Table sched;
        sched.columns = {"time_us", "frequency_hz"};
        for (const auto& [tt, w] : jump.schedule.events)
            sched.rows.push_back({tt * 1e6, w / (2.0 * k_pi)});
        io::write_table(out / "jump_schedule.csv", meta_for(cfg, "schedule.v1"), sched);
    }
    const double flat = std::sqrt(epr.state_at(0.0).variance(1));
    std::ostringstream os;
    os << "widths: r=" << io::fmt_double(r) << " epr width/vacuum=" << io::fmt_double(2.0 * flat);
    return os.str();
}

std::string run_criteria(const ScenarioConfig& cfg, const fs::path& out) {
    const auto osc = cfg.oscillator();
    const double r = cfg.squeeze_r();
    protocol::TwoModeProtocol proto(osc, cfg.relative_phase_rad, cfg.nbar0, cfg.r);
    const auto state = proto.state_at(0.0);
    const double duan = gauss::duan_simon_value(state, 0, 1);
    const double epr = gauss::epr_product(state, 0, 1);
    const double surrogate = gauss::epr_product_surrogate(r) * (2.0 * cfg.nbar0 + 1.0);

    json j;
    j["metadata"] = json_meta(cfg, "criteria.v1");
    j["inputs"] = {{"r", r},
                   {"nbar0", cfg.nbar0},
                   {"relative_phase_rad", cfg.relative_phase_rad}};
    j["duan_simon"] = {{"value", duan},
                       {"threshold", 1.0},
                       {"inseparable", duan < 1.0}};
    j["epr"] = {{"product", epr},
                {"surrogate_closed_form", surrogate},
                {"threshold", 0.25},
                {"steering", epr < 0.25}};
    if (cfg.emit_json)
        io::write_text(out / "criteria.json", dump_json(j));
    std::ostringstream os;
    os << "criteria: duan_simon=" << io::fmt_double(duan) << " (<1: " << (duan < 1.0 ? "yes" : "no")
       << ") epr_product=" << io::fmt_double(epr) << " (steering: "
       << (epr < 0.25 ? "yes" : "no") << ")";
    return os.str();
}

std::string run_fock(const ScenarioConfig& cfg, const fs::path& out) {
    const double r = cfg.squeeze_r();
    const int n = cfg.fock_n_max;
    const fock::TwoModeSqueezeOp op(r);
    const auto tmsv = fock::thermal_weighted_distribution(op, cfg.nbar0, n);
    const auto smsv = fock::smsv_probabilities(r, n);
    const auto smsv2d = fock::FockDistribution::from_product(smsv.probs, smsv.probs);

    if (cfg.emit_csv) {
        std::vector<double> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        auto as_rows = [n](const Eigen::MatrixXd& m) {
            std::vector<std::vector<double>> rows(n + 1, std::vector<double>(n + 1));
            for (int i = 0; i <= n; ++i)
                for (int k = 0; k <= n; ++k) rows[i][k] = m(i, k);
            return rows;
        };
        io::write_matrix(out / "fock_tmsv.csv", meta_for(cfg, "fock.v1"), "nx\\ny", idx, idx,
                         as_rows(tmsv.probs));
        io::write_matrix(out / "fock_smsv2d.csv", meta_for(cfg, "fock.v1"), "nx\\ny", idx, idx,
                         as_rows(smsv2d.probs));
    }
    std::ostringstream os;
    os << "fock: r=" << io::fmt_double(r) << " nbar0=" << io::fmt_double(cfg.nbar0)
       << " tmsv truncation_mass=" << io::fmt_double(tmsv.truncation_mass);
    return os.str();
}

std::string run_ratio(const ScenarioConfig& cfg, const fs::path& out) {
    const auto model = cfg.sideband();
    io::Table t;
    t.columns = {"r", "R_tmsv", "R_smsv", "R_tmsv_thermal"};
    const int n = cfg.fock_n_max;
    // The paper-parameter curves reach truncation masses of a few 1e-3 at the
    // top of the r grid with the standard n <= 25 cap; the ratio is insensitive
    // at that level, so the gate is relaxed accordingly here.
    const double gate = 0.02;
    for (double r = cfg.r_min; r <= cfg.r_max + 1e-12; r += cfg.r_step) {
        const auto tmsv = fock::tmsv_probabilities(r, n);
        const auto smsv = fock::smsv_probabilities(r, n);
        const auto weighted =
            fock::thermal_weighted_distribution(fock::TwoModeSqueezeOp(r), cfg.nbar0, n);
        t.rows.push_back({r, spectro::ratio_R(tmsv, model, gate),
                          spectro::ratio_R(smsv.probs, model),
                          spectro::ratio_R(weighted, model, gate)});
    }
    if (cfg.emit_csv)
        io::write_table(out / "ratio_vs_r.csv", meta_for(cfg, "ratio.v1"), t);
    std::ostringstream os;
    os << "ratio: " << t.rows.size() << " r points, R_tmsv(" << io::fmt_double(cfg.r_max)
       << ")=" << io::fmt_double(t.rows.back()[1]);
    return os.str();
}

std::string run_echo(const ScenarioConfig& cfg, const fs::path& out) {
    const auto osc = cfg.oscillator();
    const double r = cfg.squeeze_r();
    std::vector<double> taus;
    for (double tau = 0.0; tau <= cfg.tau_max_us + 1e-12; tau += cfg.tau_step_us)
        taus.push_back(tau * 1e-6);
    const auto trace = protocol::echo_ratio_vs_delay(r, taus, osc, cfg.inhomogeneity(),
                                                     cfg.sideband(), cfg.nbar0);

    io::Table t;
    t.columns = {"tau_us", "R"};
    Eigen::VectorXd tv(trace.size()), rv(trace.size());
    for (size_t i = 0; i < trace.size(); ++i) {
        t.rows.push_back({trace[i].first * 1e6, trace[i].second});
        tv[static_cast<Eigen::Index>(i)] = trace[i].first;
        rv[static_cast<Eigen::Index>(i)] = trace[i].second;
    }
    if (cfg.emit_csv)
        io::write_table(out / "echo.csv", meta_for(cfg, "echo.v1"), t);

    std::ostringstream os;
    os << "echo: " << trace.size() << " tau points";
    if (cfg.sigma_omega() > 0.0) {
        const auto fitres = fit::fit_decaying_sinusoid(tv, rv, 2.0 * osc.omega);
        const double decay_us = fitres.decay_time * 1e6;
        const double period_us = 2.0 * k_pi / fitres.angular_freq * 1e6;
        if (cfg.emit_json) {
            json j;
            j["metadata"] = json_meta(cfg, "echo_fit.v1");
            j["sigma_omega_krad_s"] = cfg.sigma_omega() / 1e3;
            j["fit"] = {{"decay_us", decay_us},
                        {"period_us", period_us},
                        {"baseline", fitres.baseline},
                        {"osc_amplitude", fitres.osc_amplitude},
                        {"residual_norm", fitres.residual_norm}};
            io::write_text(out / "echo_fit.json", dump_json(j));
        }
        os << " fitted decay_us=" << io::fmt_double(decay_us)
           << " period_us=" << io::fmt_double(period_us);
    }
    return os.str();
}

std::string run_wigner(const ScenarioConfig& cfg, const fs::path& out) {
    const auto osc = cfg.oscillator();
    protocol::TwoModeProtocol proto(osc, cfg.relative_phase_rad, cfg.nbar0, cfg.r);
    const double tt = cfg.wigner_time_us * 1e-6;
    const auto input = proto.input_state_at(tt);
    const auto output = proto.state_at(tt);

    const double e = cfg.wigner_extent;
    const gauss::GridSpec spec{-e, e, -e, e, cfg.wigner_points, cfg.wigner_points};
    struct Pane {
        const char* file;
        const gauss::GaussianState* state;
        int axis_a, axis_b;
    };
    const Pane panes[] = {
        {"wigner_px_x.csv", &input, 1, 0},   // input mode x
        {"wigner_py_y.csv", &input, 3, 2},   // input mode y
        {"wigner_py_px.csv", &input, 3, 1},  // input momentum correlations
        {"wigner_pxp_xp.csv", &output, 1, 0} // beam-splitter output port x'
    };
    if (cfg.emit_csv) {
        for (const auto& p : panes) {
            const auto grid = gauss::wigner_projection(*p.state, p.axis_a, p.axis_b, spec);
            std::vector<double> a(grid.a_coords.begin(), grid.a_coords.end());
            std::vector<double> b(grid.b_coords.begin(), grid.b_coords.end());
            std::vector<std::vector<double>> vals(a.size(), std::vector<double>(b.size()));
            for (size_t i = 0; i < a.size(); ++i)
                for (size_t k = 0; k < b.size(); ++k)
                    vals[i][k] = grid.values(static_cast<int>(i), static_cast<int>(k));
            io::write_matrix(out / p.file, meta_for(cfg, "wigner.v1"), "a\\b", a, b, vals);
        }
    }
    std::ostringstream os;
    os << "wigner: 4 panes at t_us=" << io::fmt_double(cfg.wigner_time_us);
    return os.str();
}

std::string run_velocimetry(const ScenarioConfig& cfg, const fs::path& out) {
    const auto osc = cfg.oscillator();
    protocol::TwoModeProtocol proto(osc, cfg.relative_phase_rad, cfg.nbar0, cfg.r);
    const auto input = proto.input_state_at(0.0);
    const auto ground = gauss::GaussianState::vacuum(2);
    const auto model = cfg.velocimetry();

    struct Item {
        const char* name;
        const gauss::GaussianState* state;
        spectro::ScanAxis axis;
    };
    const Item items[] = {{"x", &input, spectro::ScanAxis::X},
                          {"y", &input, spectro::ScanAxis::Y},
                          {"xprime", &input, spectro::ScanAxis::XPrime},
                          {"ground", &ground, spectro::ScanAxis::X}};
    json fits;
    fits["metadata"] = json_meta(cfg, "velocimetry_fits.v1");
    uint64_t stream = cfg.seed;
    for (const auto& item : items) {
        const spectro::NoiseSpec noise{cfg.noise_fraction, stream++};
        const auto scan = spectro::synthesize_velocity_scan(
            *item.state, item.axis, osc, model,
            cfg.noise_fraction > 0.0 ? std::optional<spectro::NoiseSpec>(noise) : std::nullopt);
        if (cfg.emit_csv) {
            io::Table t;
            t.columns = {"detuning_krad_s", "velocity_cm_s", "excited_fraction"};
            for (Eigen::Index i = 0; i < scan.detunings.size(); ++i)
                t.rows.push_back({scan.detunings[i] / 1e3,
                                  scan.detunings[i] / scan.k_eff * 1e2,
                                  scan.excited_fraction[i]});
            io::write_table(out / (std::string("velocimetry_") + item.name + ".csv"),
                            meta_for(cfg, "velocimetry.v1"), t);
        }
        const auto f = spectro::gaussian_fit(scan);
        fits["fits"][item.name] = {{"sigma_cm_s", f.sigma * 1e2},
                                   {"sigma_se_cm_s", f.std_errors[2] * 1e2},
                                   {"center_cm_s", f.center * 1e2},
                                   {"amplitude", f.amplitude},
                                   {"offset", f.offset},
                                   {"residual_norm", f.residual_norm}};
    }
    if (cfg.emit_json)
        io::write_text(out / "velocimetry_fits.json", dump_json(fits));
    std::ostringstream os;
    os << "velocimetry: 4 scans, sigma_xprime_cm_s="
       << io::fmt_double(fits["fits"]["xprime"]["sigma_cm_s"].get<double>());
    return os.str();
}

} // namespace

std::vector<std::string> subcommand_names() {
    return {"widths", "criteria", "fock", "ratio", "echo", "wigner", "velocimetry"};
}

std::string run_scenario(const std::string& subcommand, const ScenarioConfig& cfg,
                         const fs::path& out_dir) {
    ensure_dir(out_dir);
    try {
        if (subcommand == "widths") return run_widths(cfg, out_dir);
        if (subcommand == "criteria") return run_criteria(cfg, out_dir);
        if (subcommand == "fock") return run_fock(cfg, out_dir);
        if (subcommand == "ratio") return run_ratio(cfg, out_dir);
        if (subcommand == "echo") return run_echo(cfg, out_dir);
        if (subcommand == "wigner") return run_wigner(cfg, out_dir);
        if (subcommand == "velocimetry") return run_velocimetry(cfg, out_dir);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("subcommand '") + subcommand + "' failed: " + e.what());
    }
    throw ConfigError("unknown subcommand: " + subcommand);
}

} // namespace tmsim::scenario
