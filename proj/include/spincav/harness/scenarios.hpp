#pragma once

#include <vector>

#include "spincav/core.hpp"
#include "spincav/harness/config.hpp"
#include "spincav/harness/table.hpp"
#include "spincav/spectral.hpp"

namespace spincav::harness {

// Nearest positive multiple of dt.
double snap_to_grid(double tau, double dt);

// Local maxima whose drop to the higher of the two side minima exceeds rel * peak value.
std::vector<Eigen::Index> prominent_maxima(const Eigen::Ref<const Eigen::ArrayXd>& y, double rel);

// Largest (max - next min) / (max + next min) over consecutive extrema; 0 without oscillation.
double oscillation_contrast(const Eigen::Ref<const Eigen::ArrayXd>& y);

// One long rectangular pulse followed by a free-decay tail.
struct LongPulseTrace {
    ComplexSeries amplitude;
    ComplexSeries spin;
    double tau_d = 0.0;
    double tail = 0.0;
    std::size_t drive_end = 0;   // index of t = tau_d
    double steady_intensity = 0.0;
    nlohmann::ordered_json derived = nlohmann::ordered_json::object();
};
LongPulseTrace long_pulse_trace(const ScenarioConfig& config);

// Single-photon free decay rate (|A|^2) from the branch-cut inversion or a drive-free Volterra run.
struct RateFit {
    double gamma = 0.0;
    std::string method;
    std::size_t poles = 0;
    std::vector<std::string> diagnostics;
};
RateFit fitted_decay_rate(const SystemParams& params, const SpinDensity& density, const TimeSpec& time);

// |A_st|^2 for the long-pulse drive of the configuration.
double steady_intensity(const ScenarioConfig& config);

RunResult run_long_pulse(const ScenarioConfig& config);
RunResult run_pulse_train_map(const ScenarioConfig& config);
RunResult run_gamma_sweep(const ScenarioConfig& config);
RunResult run_train_compare(const ScenarioConfig& config);
RunResult run_max_amplitude_scan(const ScenarioConfig& config);
RunResult run_lorentz_analytic(const ScenarioConfig& config);

RunResult run_scenario(const ScenarioConfig& config);

}  // namespace spincav::harness
