// Scenario catalog for the reference experiments, key=value configuration,
// batch execution, CSV persistence, and SVG figure emission.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lognls/solver.hpp"

namespace lognls {

inline constexpr const char* kVersionTag = "lognls-1.0.0";
inline constexpr const char* kCsvSchemaComment = "# lognls-csv v1";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One experiment with its full parameter set. Every default is either a
/// parameter of the reference experiments or a documented choice; user
/// overrides are recorded in `overrides` and land in the manifest.
struct Scenario {
    std::string name;
    double a = 16.0;
    int K = 8;
    std::vector<int> K_list;  // used by sweep_sobolev
    BoundaryCondition bc = BoundaryCondition::Neumann;
    double lambda = 1.0;
    double T = 1.0;
    long J = 1000;
    std::string initial = "tanh";  // tanh | one_minus_cos | gausson | file:<path>
    double omega = -1.0;
    long record_every = 0;  // 0: max(1, J/200)
    std::string out_dir = "out";
    std::map<std::string, std::string> overrides;
};

/// The catalog defaults. Throws ConfigError for an unknown name.
Scenario scenario_defaults(const std::string& name);

/// Line-oriented "key=value" text, '#' comments, lists comma-separated.
/// Unknown keys, duplicate keys and type mismatches are hard errors.
Scenario parse_config(const std::string& text);
Scenario parse_config_file(const std::string& path);

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunManifest {
    std::string scenario;
    std::string version = kVersionTag;
    std::map<std::string, std::string> params;  // canonical full set
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
    std::vector<Assertion> assertions;
    std::string error;            // nonempty when the run failed outright
    bool numerical_abort = false;

    bool all_pass() const;
};

/// Executes the scenario, writes its CSV outputs and manifest under
/// s.out_dir, and evaluates the scenario's assertions.
RunManifest run_scenario(const Scenario& s);

/// Independent runs over one parameter axis, executed concurrently,
/// collected in input order. Per-run failures are isolated into their
/// manifests; the sweep itself does not throw for them.
std::vector<RunManifest> sweep(const Scenario& parent, const std::string& axis,
                               const std::vector<std::string>& values);

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

/// Builds the figure set from the manifests found in a directory (and its
/// immediate subdirectories): Sobolev-norm panels per regularity, state
/// snapshots for the tanh run, |u| profiles and min|u| for the cos run.
/// Returns the written file paths.
std::vector<std::string> emit_figures(const std::string& manifest_dir);

/// Diagnostics CSV ("# lognls-csv v1" schema header).
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

/// Initial data named by the scenario (file:<path> is two-column x, re, im
/// resampled by linear interpolation).
Field initial_field(const Scenario& s, const GridPtr& grid);

} // namespace lognls
