#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fogplace/scenario.hpp"

namespace fogplace {

// Command implementations behind the CLI; they throw DataError (exit code 2
// territory) and std::invalid_argument for bad parameters.

struct GenerateOptions {
    std::uint64_t seed = 1;
    ExperimentParams params;
    std::string out_path;
    std::string dump_edges_path;  // optional: topology as "u v pr bw" lines
};

void cmd_generate(const GenerateOptions& options, std::ostream& log);

struct PlaceOptions {
    std::string scenario_path;
    std::string policy = "partition";  // partition | greedy | cloud-only
    std::string out_path;
    std::string dump_dendrogram_path;  // optional, partition policy only
};

void cmd_place(const PlaceOptions& options, std::ostream& log);

struct SimulateOptions {
    std::string scenario_path;
    std::string placement_path;
    double duration_ms = 10000.0;
    std::string failures = "all";  // all | none
    std::uint64_t seed = 1;
    std::string out_dir;
};

void cmd_simulate(const SimulateOptions& options, std::ostream& log);

struct ReportOptions {
    std::vector<std::string> run_dirs;
    std::string out_dir;
};

void cmd_report(const ReportOptions& options, std::ostream& log);

}  // namespace fogplace
