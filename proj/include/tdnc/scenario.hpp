#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tdnc/analysis.hpp"
#include "tdnc/serialize.hpp"

namespace tdnc {

// scenario file problems: parse errors, unresolved references, invariant
// violations (exit code 2 at the CLI)
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// dominance verdict failed in verify mode (exit code 4)
struct dominance_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct model_decl {
    enum class kind { automatic, gcra, poisson_iat, md1_vsd, explicit_model };
    kind k = kind::automatic;
    double T = 0.0, tau = 0.0;  // gcra
    double D = 0.0;             // md1_vsd
    std::optional<nlohmann::json> explicit_json;
};

struct flow_decl {
    std::string name;
    source_spec source;
    model_decl model;
    std::vector<std::string> path;  // node names, in order
};

struct node_decl {
    std::string name;
    server_spec server;
};

struct aggregate_decl {
    std::string node;
    std::string tagged;
    std::string cross;
};

struct analysis_decl {
    enum class kind { delay, backlog, output, concatenation, superposition, leftover };
    kind k = kind::delay;
    std::string flow;                // delay/backlog/output/concatenation/leftover (tagged)
    std::vector<std::string> flows;  // superposition
};

struct sim_params {
    long packets = 10000;
    int replications = 1;
    std::uint64_t seed = 1;
};

struct scenario {
    grid_spec grid;
    bool eta_auto = true;
    double eta = 0.1;
    std::vector<flow_decl> flows;
    std::vector<node_decl> nodes;
    std::vector<aggregate_decl> aggregates;
    std::vector<analysis_decl> analysis;
    sim_params simulation;
};

scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const scenario& s);
scenario load_scenario(const std::string& path);

enum class run_mode { analyze, simulate, verify, curves };

struct report {
    nlohmann::json summary;  // deterministic part, given (scenario, seed)
    double runtime_ms = 0.0;
    bool all_pass = true;
    int exit_code = 0;
};

// Runs the requested properties. analyze computes bounds only, simulate
// empirical CCDFs only, verify both plus dominance verdicts; curves dumps
// every declared model. Output CSVs and report.json land in out_dir.
report run(const scenario& s, run_mode mode, const std::string& out_dir);

}  // namespace tdnc
