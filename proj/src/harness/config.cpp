#include "spincav/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spincav::harness {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SystemSpec, cavity_ghz, spin_offset_mhz, probe_offset_mhz, kappa_mhz,
                                                gamma_mhz, coupling_mhz)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DensitySpec, kind, q, fwhm_mhz, delta_mhz, tail_tolerance,
                                                max_half_width, grid_step_mhz)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DriveSpec, eta_kappa, tau_ns, pulses)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TimeSpec, dt_ns, tail_ns, max_tail_ns, output_stride, fit_span_ns,
                                                fit_dt_ns)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SweepSpec, parameter, values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScanSpec, tau_min_ns, tau_max_ns, tau_step_ns)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LorentzSpec, delta_mhz, coupling_mhz, fit_rabi_mhz)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScenarioConfig, scenario, system, density, drive, time, sweep, scan,
                                                lorentz, rabi_reference_mhz, reference_coupling_mhz, output)

namespace {

const std::vector<std::string> kSweepParameters{"",           "coupling_mhz",      "two_coupling_mhz",
                                                "probe_offset_mhz", "probe_offset_rabi", "tau_ns"};

// Every key of doc must exist in reference with a compatible type.
void check_keys(const nlohmann::json& doc, const nlohmann::ordered_json& reference, const std::string& path) {
    if (!doc.is_object()) throw ConfigError("config: " + (path.empty() ? std::string("document") : path) +
                                            " must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        auto ref = reference.find(it.key());
        if (ref == reference.end()) throw ConfigError("config: unknown key '" + key + "'");
        if (ref->is_object()) {
            check_keys(it.value(), *ref, key);
        } else if (ref->is_number() && !it.value().is_number()) {
            throw ConfigError("config: '" + key + "' must be a number");
        } else if (ref->is_string() && !it.value().is_string()) {
            throw ConfigError("config: '" + key + "' must be a string");
        } else if (ref->is_array() && !it.value().is_array()) {
            throw ConfigError("config: '" + key + "' must be an array");
        }
    }
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

void validate(const ScenarioConfig& c) {
    const auto& names = scenario_names();
    require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "unknown scenario '" + c.scenario + "'");
    require(c.density.kind == "q-gaussian" || c.density.kind == "lorentzian" || c.density.kind == "dirac",
            "density.kind must be q-gaussian, lorentzian or dirac");
    require(c.system.cavity_ghz > 0.0, "system.cavity_ghz must be positive");
    require(c.time.dt_ns > 0.0, "time.dt_ns must be positive");
    require(c.time.output_stride >= 1, "time.output_stride must be >= 1");
    require(c.time.fit_span_ns > 0.0 && c.time.fit_dt_ns > 0.0, "time.fit_span_ns and time.fit_dt_ns must be positive");
    require(c.time.max_tail_ns > 0.0, "time.max_tail_ns must be positive");
    require(c.drive.pulses >= 1, "drive.pulses must be >= 1");
    require(c.drive.tau_ns > 0.0, "drive.tau_ns must be positive");
    require(std::isfinite(c.drive.eta_kappa), "drive.eta_kappa must be finite");
    require(c.scan.tau_step_ns > 0.0 && c.scan.tau_min_ns > 0.0 && c.scan.tau_max_ns >= c.scan.tau_min_ns,
            "scan needs 0 < tau_min_ns <= tau_max_ns and tau_step_ns > 0");
    require(c.lorentz.delta_mhz > 0.0 && c.lorentz.coupling_mhz >= 0.0 && c.lorentz.fit_rabi_mhz > 0.0,
            "lorentz rates must be positive");
    require(c.rabi_reference_mhz > 0.0, "rabi_reference_mhz must be positive");
    require(std::find(kSweepParameters.begin(), kSweepParameters.end(), c.sweep.parameter) != kSweepParameters.end(),
            "unknown sweep.parameter '" + c.sweep.parameter + "'");
    require(c.sweep.parameter.empty() || !c.sweep.values.empty(), "sweep.values is empty");
    if (c.density.kind == "q-gaussian")
        require(c.density.q > 1.0 && c.density.q < 3.0 && c.density.fwhm_mhz > 0.0,
                "q-gaussian needs 1 < q < 3 and fwhm_mhz > 0");
    if (c.density.kind == "lorentzian") require(c.density.delta_mhz > 0.0, "lorentzian needs delta_mhz > 0");
    require(c.density.tail_tolerance > 0.0 && c.density.max_half_width > 0.0 && c.density.grid_step_mhz >= 0.0,
            "density support settings must be positive");
    try {
        make_params(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"long-pulse",    "train-map", "gamma-sweep",     "train-compare",
                                                "max-scan",      "lorentz-analytic"};
    return names;
}

nlohmann::ordered_json to_json(const ScenarioConfig& config) {
    nlohmann::json j = config;
    return nlohmann::ordered_json::parse(j.dump());
}

ScenarioConfig from_json(const nlohmann::json& input) {
    nlohmann::json doc = input;
    // the cavity linewidth may be given as the full width instead of kappa
    if (doc.is_object() && doc.contains("system") && doc["system"].is_object() &&
        doc["system"].contains("cavity_fwhm_mhz")) {
        auto& sys = doc["system"];
        if (sys.contains("kappa_mhz")) throw ConfigError("config: give either system.kappa_mhz or system.cavity_fwhm_mhz");
        if (!sys["cavity_fwhm_mhz"].is_number()) throw ConfigError("config: 'system.cavity_fwhm_mhz' must be a number");
        sys["kappa_mhz"] = sys["cavity_fwhm_mhz"].get<double>() / 2.0;
        sys.erase("cavity_fwhm_mhz");
    }
    check_keys(doc, to_json(ScenarioConfig{}), "");
    ScenarioConfig config;
    try {
        config = doc.get<ScenarioConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate(config);
    return config;
}

ScenarioConfig load_config(const std::string& path) { return load_config(path, {}); }

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        value = text;  // bare strings such as kind=lorentzian
    }
    nlohmann::json* node = &doc;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        parts.push_back(part);
    }
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) throw ConfigError("override key '" + key + "' does not name an object");
        node = &(*node)[parts[i]];
        if (node->is_null()) *node = nlohmann::json::object();
    }
    if (!node->is_object()) throw ConfigError("override key '" + key + "' does not name an object");
    (*node)[parts.back()] = value;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    for (const auto& o : overrides) apply_override(doc, o);
    return from_json(doc);
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    const std::string text = to_json(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

SystemParams make_params(const ScenarioConfig& config) {
    const auto& s = config.system;
    const double wc = ghz_to_angular(s.cavity_ghz);
    return SystemParams(wc, wc + mhz_to_angular(s.spin_offset_mhz), wc + mhz_to_angular(s.probe_offset_mhz),
                        mhz_to_angular(s.kappa_mhz), mhz_to_angular(s.gamma_mhz), mhz_to_angular(s.coupling_mhz));
}

SpinDensity make_density(const DensitySpec& spec, double center) {
    SupportPolicy policy;
    policy.tail_tolerance = spec.tail_tolerance;
    policy.max_half_width = spec.max_half_width;
    if (spec.kind == "q-gaussian") return SpinDensity::q_gaussian_from_fwhm(spec.q, mhz_to_angular(spec.fwhm_mhz), center, policy);
    if (spec.kind == "lorentzian") return SpinDensity::lorentzian(mhz_to_angular(spec.delta_mhz), center, policy);
    if (spec.kind == "dirac") return SpinDensity::dirac(center);
    throw ConfigError("config: unknown density kind '" + spec.kind + "'");
}

double bath_step(const DensitySpec& spec, const SpinDensity& density, double t_max) {
    if (density.kind() == DensityKind::DiracDelta) return 0.0;
    double step = spec.grid_step_mhz > 0.0 ? mhz_to_angular(spec.grid_step_mhz) : default_grid_step(density);
    const double limit = 0.9 * pi / (4.0 * t_max);
    return std::min(step, limit);
}

}  // namespace spincav::harness
