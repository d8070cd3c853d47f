#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spincav/core.hpp"
#include "spincav/spectral.hpp"

namespace spincav::harness {

// Malformed, unknown or out-of-range configuration; maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SystemSpec {
    double cavity_ghz = 2.6915;
    double spin_offset_mhz = 0.0;   // omega_s - omega_c
    double probe_offset_mhz = 0.0;  // omega_p - omega_c
    double kappa_mhz = 0.4;         // amplitude decay rate (HWHM) over 2 pi
    double gamma_mhz = 0.0;
    double coupling_mhz = 8.56;     // Omega, never 2 Omega

    bool operator==(const SystemSpec&) const = default;
};

struct DensitySpec {
    std::string kind = "q-gaussian";  // q-gaussian | lorentzian | dirac
    double q = 1.39;
    double fwhm_mhz = 9.4;            // q-Gaussian
    double delta_mhz = 4.0;           // Lorentzian HWHM
    double tail_tolerance = 1e-6;
    double max_half_width = 100.0;    // in units of delta
    double grid_step_mhz = 0.0;       // 0 picks the default and refines it for t_max

    bool operator==(const DensitySpec&) const = default;
};

struct DriveSpec {
    double eta_kappa = 1.0;  // drive strength in units of kappa
    double tau_ns = 800.0;   // pulse length (single pulse) or per-pulse duration (trains)
    int pulses = 1;

    bool operator==(const DriveSpec&) const = default;
};

struct TimeSpec {
    double dt_ns = 0.05;
    double tail_ns = -1.0;        // < 0 picks 5 / Gamma_markov, extended until 3 decades
    double max_tail_ns = 20000.0;
    int output_stride = 1;
    double fit_span_ns = 6000.0;  // single-photon decay window for rate fits
    double fit_dt_ns = 0.5;

    bool operator==(const TimeSpec&) const = default;
};

struct SweepSpec {
    // coupling_mhz | two_coupling_mhz | probe_offset_mhz | probe_offset_rabi | tau_ns
    std::string parameter;
    std::vector<double> values;

    bool operator==(const SweepSpec&) const = default;
};

struct ScanSpec {
    double tau_min_ns = 40.0;
    double tau_max_ns = 64.0;
    double tau_step_ns = 1.0;

    bool operator==(const ScanSpec&) const = default;
};

struct LorentzSpec {
    double delta_mhz = 4.0;
    double coupling_mhz = 0.0;  // 0 fits (Omega, Delta) to the q-Gaussian Rabi period and steady state
    double fit_rabi_mhz = 19.2;

    bool operator==(const LorentzSpec&) const = default;
};

struct ScenarioConfig {
    std::string scenario = "long-pulse";
    SystemSpec system;
    DensitySpec density;
    DriveSpec drive;
    TimeSpec time;
    SweepSpec sweep;
    ScanSpec scan;
    LorentzSpec lorentz;
    double rabi_reference_mhz = 19.2;       // Omega_R / 2 pi used for detunings quoted in Rabi units
    double reference_coupling_mhz = 8.56;   // train-compare decay-rate reference
    std::string output = "spincav_out";

    bool operator==(const ScenarioConfig&) const = default;
};

const std::vector<std::string>& scenario_names();

nlohmann::ordered_json to_json(const ScenarioConfig& config);
// Strict: unknown keys, wrong types and invalid values raise ConfigError.
ScenarioConfig from_json(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

// key=value with dotted paths, e.g. system.coupling_mhz=25 or sweep.values=[1,2].
void apply_override(nlohmann::json& doc, const std::string& assignment);
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

// FNV-1a over the canonical dump.
std::uint64_t config_hash(const ScenarioConfig& config);
std::string hex(std::uint64_t value);

// Physical objects built from the configuration.
SystemParams make_params(const ScenarioConfig& config);
SpinDensity make_density(const DensitySpec& spec, double center);
// Frequency step small enough to resolve t_max without recurrences.
double bath_step(const DensitySpec& spec, const SpinDensity& density, double t_max);

}  // namespace spincav::harness
