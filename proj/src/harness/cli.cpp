#include "spincav/harness/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spincav/harness/config.hpp"
#include "spincav/harness/scenarios.hpp"
#include "spincav/harness/validate.hpp"

namespace spincav::harness {

namespace {

int run_config(const std::string& scenario, const std::string& path, const std::vector<std::string>& overrides,
               const std::string& out_prefix, std::ostream& out) {
    ScenarioConfig config = load_config(path, overrides);
    std::vector<std::string> notes;
    if (config.scenario != scenario) {
        notes.push_back("config scenario '" + config.scenario + "' replaced by subcommand '" + scenario + "'");
        config.scenario = scenario;
    }
    if (!out_prefix.empty()) config.output = out_prefix;

    auto t0 = std::chrono::steady_clock::now();
    RunResult result = run_scenario(config);
    double run_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Manifest manifest;
    manifest.config = to_json(config);
    manifest.config_hash = hex(config_hash(config));
    manifest.derived = result.derived;
    manifest.diagnostics = notes;
    manifest.diagnostics.insert(manifest.diagnostics.end(), result.diagnostics.begin(), result.diagnostics.end());
    manifest.csv_path = config.output + ".csv";
    manifest.rows = result.table.n_rows();
    manifest.timings["run"] = run_s;
    result.table.config_hash = manifest.config_hash;

    std::filesystem::path csv(manifest.csv_path);
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    result.table.write_csv(manifest.csv_path);
    manifest.write(config.output + ".json");
    out << scenario << ": " << result.table.n_rows() << " rows -> " << manifest.csv_path << " (" << run_s << " s)\n";
    return 0;
}

int run_validate(std::ostream& out) {
    auto checks = run_validation();
    bool ok = true;
    for (const auto& c : checks) {
        out << (c.passed ? "ok    " : "FAIL  ") << c.name << "  value " << c.value << "  tol " << c.tolerance << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"spincav: cavity amplitude dynamics of an inhomogeneously broadened spin ensemble"};
    app.require_subcommand(1);
    std::string path, out_prefix;
    std::vector<std::string> overrides;
    std::vector<CLI::App*> runners;
    for (const auto& name : scenario_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
        sub->add_option("config", path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("overrides", overrides, "key=value overrides, dotted keys (system.coupling_mhz=25)");
        sub->add_option("-o,--out", out_prefix, "output prefix for <prefix>.csv and <prefix>.json");
        runners.push_back(sub);
    }
    CLI::App* validate = app.add_subcommand("validate", "run the fast invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        if (validate->parsed()) return run_validate(out);
        for (CLI::App* sub : runners)
            if (sub->parsed()) return run_config(sub->get_name(), path, overrides, out_prefix, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace spincav::harness
