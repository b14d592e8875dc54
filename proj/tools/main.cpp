// tdnc - time-domain stochastic network calculus toolkit
//
// analyze <scenario>   compute the requested bounds
// simulate <scenario>  run the packet-level simulation only
// verify <scenario>    bounds + simulation + dominance verdicts
// curves <scenario>    dump every declared model curve/bound as CSV
//
// exit codes: 0 success/pass, 1 usage, 2 validation, 3 stability,
//             4 dominance failure

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "tdnc/scenario.hpp"

using namespace tdnc;

namespace {

struct cli_opts {
    std::string scenario_path;
    std::string out_dir;
    double grid_step = 0.0;
    double horizon = 0.0;
    long packets = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, cli_opts& o) {
    cmd->add_option("scenario", o.scenario_path, "scenario JSON file")->required();
    const char* env = std::getenv("TDNC_OUT");
    o.out_dir = env ? env : "tdnc_out";
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--grid-step", o.grid_step, "override grid step");
    cmd->add_option("--horizon", o.horizon, "override grid horizon");
    cmd->add_option("--packets", o.packets, "override packets per replication");
    cmd->add_option("--replications", o.replications, "override replication count");
    cmd->add_option("--seed", o.seed, "override seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
}

int run_mode_cmd(const cli_opts& o, run_mode mode) {
    try {
        scenario s = load_scenario(o.scenario_path);
        if (o.grid_step > 0.0 || o.horizon > 0.0) {
            double step = o.grid_step > 0.0 ? o.grid_step : s.grid.step;
            double hor = o.horizon > 0.0 ? o.horizon : s.grid.horizon;
            s.grid = grid_spec(step, hor);
        }
        if (o.packets > 0) s.simulation.packets = o.packets;
        if (o.replications > 0) s.simulation.replications = o.replications;
        if (o.seed_set) s.simulation.seed = o.seed;
        report r = run(s, mode, o.out_dir);
        std::cout << r.summary.dump(2) << "\n";
        if (mode == run_mode::verify)
            std::cout << (r.all_pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
        return r.exit_code;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const stability_error& e) {
        std::cerr << "stability error: " << e.what() << " (lambda_rate=" << e.report.lambda_rate
                  << ", gamma_rate=" << e.report.gamma_rate << ")\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-domain stochastic network calculus toolkit"};
    app.require_subcommand(1);

    cli_opts oa, os, ov, oc;
    CLI::App* analyze = app.add_subcommand("analyze", "compute bounds");
    add_common(analyze, oa);
    CLI::App* simulate = app.add_subcommand("simulate", "run the simulator");
    add_common(simulate, os);
    CLI::App* verify = app.add_subcommand("verify", "bounds vs simulation");
    add_common(verify, ov);
    CLI::App* curves = app.add_subcommand("curves", "dump model curves");
    add_common(curves, oc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (analyze->parsed()) return run_mode_cmd(oa, run_mode::analyze);
    if (simulate->parsed()) return run_mode_cmd(os, run_mode::simulate);
    if (verify->parsed()) return run_mode_cmd(ov, run_mode::verify);
    if (curves->parsed()) return run_mode_cmd(oc, run_mode::curves);
    return 1;
}
