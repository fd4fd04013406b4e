#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fogplace/graph.hpp"
#include "fogplace/model.hpp"
#include "fogplace/scenario.hpp"
#include "fogplace/sim.hpp"

namespace fogplace {

// Shortest round-trip decimal text for a double; always a dot separator.
std::string format_double(double value);
double parse_double(const std::string& text);  // DataError on garbage

// ---- scenario / placement / params JSON -----------------------------------

void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);  // validates, DataError

struct PlacementFile {
    std::string policy;
    std::uint64_t seed = 0;
    PlacementMatrix matrix;
};

void save_placement(const PlacementFile& placement, const std::string& path);
PlacementFile load_placement(const std::string& path);

void save_params(const ExperimentParams& params, std::uint64_t seed, const std::string& path);

// ---- run CSVs --------------------------------------------------------------

// workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit (done_ms NA
// when the request never completed; satisfied is 0/1)
void write_requests_csv(const MetricsStore& metrics, const std::vector<Application>& apps,
                        std::ostream& out);

// failed_count,app,ratio
void write_availability_csv(const MetricsStore& metrics, std::ostream& out);

// index,time_ms,device
void write_failures_csv(const FailureSchedule& schedule, std::ostream& out);

struct RequestRow {
    int workload = 0;
    int app = 0;
    double emit_ms = 0.0;
    bool has_done = false;
    double done_ms = 0.0;
    bool satisfied = false;
    int failed_count_at_emit = 0;
};

std::vector<RequestRow> read_requests_csv(std::istream& in);
std::vector<AvailabilityRow> read_availability_csv(std::istream& in);
FailureSchedule read_failures_csv(std::istream& in);

// ---- debug formats ---------------------------------------------------------

// one link per line: "u v pr bw"
void write_edge_list(const InfrastructureGraph& infra, std::ostream& out);

struct EdgeListEntry {
    int u = 0;
    int v = 0;
    double propagation_ms = 0.0;
    double bandwidth = 0.0;
};

std::vector<EdgeListEntry> read_edge_list(std::istream& in);

// one community per line, indented by depth: "depth: id id id"
void write_dendrogram(const Dendrogram& dendrogram, std::ostream& out);

}  // namespace fogplace
