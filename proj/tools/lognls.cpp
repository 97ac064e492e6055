// Command-line front door: run a scenario from a config file, sweep one
// parameter axis, render figures from manifests, or run the verification
// suite.
//
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 configuration
// error, 3 numerical abort.
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lognls/harness.hpp"
#include "lognls/verify.hpp"

namespace {

void print_manifest(const lognls::RunManifest& m) {
    std::printf("scenario %s (%.1fs)\n", m.scenario.c_str(), m.wall_seconds);
    if (!m.error.empty()) std::printf("  ERROR: %s\n", m.error.c_str());
    for (const lognls::Assertion& a : m.assertions)
        std::printf("  [%s] %s — %s\n", a.pass ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
    for (const std::string& o : m.outputs) std::printf("  wrote %s\n", o.c_str());
}

int manifest_exit_code(const lognls::RunManifest& m) {
    if (m.numerical_abort) return 3;
    return m.all_pass() ? 0 : 1;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D logarithmic Schrodinger simulation laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* cmd_run = app.add_subcommand("run", "run one scenario from a config file");
    cmd_run->add_option("config", config_path, "key=value config file")->required();

    std::string sweep_config, sweep_axis, sweep_values;
    auto* cmd_sweep = app.add_subcommand("sweep", "run a scenario over one parameter axis");
    cmd_sweep->add_option("config", sweep_config, "key=value config file")->required();
    cmd_sweep->add_option("--axis", sweep_axis, "parameter name")->required();
    cmd_sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    std::string figures_dir;
    auto* cmd_figures = app.add_subcommand("figures", "render SVG figures from manifests");
    cmd_figures->add_option("manifest-dir", figures_dir, "directory with *_manifest.json")->required();

    std::string verify_out = "out/verify";
    auto* cmd_verify = app.add_subcommand("verify", "run the acceptance suite");
    cmd_verify->add_option("--out-dir", verify_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const lognls::Scenario s = lognls::parse_config_file(config_path);
            const lognls::RunManifest m = lognls::run_scenario(s);
            print_manifest(m);
            return manifest_exit_code(m);
        }
        if (cmd_sweep->parsed()) {
            const lognls::Scenario s = lognls::parse_config_file(sweep_config);
            const auto manifests = lognls::sweep(s, sweep_axis, split_csv(sweep_values));
            int code = 0;
            for (const lognls::RunManifest& m : manifests) {
                print_manifest(m);
                code = std::max(code, manifest_exit_code(m));
            }
            return code;
        }
        if (cmd_figures->parsed()) {
            for (const std::string& f : lognls::emit_figures(figures_dir))
                std::printf("wrote %s\n", f.c_str());
            return 0;
        }
        if (cmd_verify->parsed()) {
            const auto results = lognls::verify::run_all(verify_out);
            return lognls::verify::report(results);
        }
    } catch (const lognls::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
