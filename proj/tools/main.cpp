// fogplace: generate fog scenarios, compute service placements, run the
// failure simulator and export figure-ready CSVs.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <iostream>

#include <CLI11.hpp>

#include "fogplace/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fog service placement toolkit"};
    app.require_subcommand(1);
    // `fogplace --config f.ini <cmd>` reads the file's [<cmd>] section;
    // explicit flags always win
    app.set_config("--config", "", "read options from a config file; flags win");

    fogplace::GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "generate a random scenario");
    generate->add_option("--seed", gen.seed, "random seed");
    generate->add_option("--devices", gen.params.n_devices, "number of fog devices");
    generate->add_option("--gateway-frac", gen.params.gateway_fraction,
                         "fraction of devices acting as gateways");
    generate->add_option("--apps", gen.params.n_apps, "number of applications");
    generate->add_option("--ba-m", gen.params.ba_m, "edges per new node in the topology");
    generate->add_option("--popularity", gen.params.popularity,
                         "per (gateway, app) workload probability");
    generate->add_option("--out", gen.out_path, "scenario output path")->required();
    generate->add_option("--dump-edges", gen.dump_edges_path,
                         "also write the topology as 'u v pr bw' lines");

    fogplace::PlaceOptions place;
    auto* placec = app.add_subcommand("place", "compute a service placement");
    placec->add_option("--scenario", place.scenario_path, "scenario file")->required();
    placec->add_option("--policy", place.policy, "partition | greedy | cloud-only")
        ->check(CLI::IsMember({"partition", "greedy", "cloud-only"}));
    placec->add_option("--out", place.out_path, "placement output path")->required();
    placec->add_option("--dump-dendrogram", place.dump_dendrogram_path,
                       "also write the device community hierarchy as text");

    fogplace::SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "run the failure simulator");
    simulate->add_option("--scenario", sim.scenario_path, "scenario file")->required();
    simulate->add_option("--placement", sim.placement_path, "placement file")->required();
    simulate->add_option("--duration", sim.duration_ms, "simulated time in ms");
    simulate->add_option("--failures", sim.failures, "all | none")
        ->check(CLI::IsMember({"all", "none"}));
    simulate->add_option("--seed", sim.seed, "failure-order seed");
    simulate->add_option("--out-dir", sim.out_dir, "run output directory")->required();

    fogplace::ReportOptions report;
    auto* reportc = app.add_subcommand("report", "aggregate runs into figure CSVs");
    reportc->add_option("--runs", report.run_dirs, "run directories")->required();
    reportc->add_option("--out-dir", report.out_dir, "report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (generate->parsed()) fogplace::cmd_generate(gen, std::cout);
        if (placec->parsed()) fogplace::cmd_place(place, std::cout);
        if (simulate->parsed()) fogplace::cmd_simulate(sim, std::cout);
        if (reportc->parsed()) fogplace::cmd_report(report, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
