#pragma once

#include <cstdint>

#include "fogplace/model.hpp"

namespace fogplace {

struct IntRange {
    std::int64_t min = 0;
    std::int64_t max = 0;
};

struct RealRange {
    double min = 0.0;
    double max = 0.0;
};

// Experiment characterization; defaults are the reference parameter table
// (link 5 ms / 75000 bytes-per-ms, resources 10-25, speed 100-1000,
// deadlines 300-50000 ms, 2-10 services of 1-6 units, 20000-60000
// instructions and 1.5-4.5 MB per message, request period 200-1000 ms,
// popularity 0.25). The cloud link and cloud speed have no table entry and
// are exposed here.
struct ExperimentParams {
    int n_devices = 100;
    double gateway_fraction = 0.25;
    int ba_m = 2;
    int n_apps = 20;

    double link_propagation_ms = 5.0;
    double link_bandwidth = 75000.0;  // bytes per ms

    IntRange device_resources{10, 25};
    IntRange device_speed{100, 1000};
    IntRange app_deadline{300, 50000};
    IntRange services_per_app{2, 10};
    IntRange service_consumption{1, 6};
    IntRange message_instructions{20000, 60000};
    IntRange message_size{1500000, 4500000};
    RealRange workload_period{200.0, 1000.0};
    double popularity = 0.25;

    double cloud_propagation_ms = 100.0;
    double cloud_bandwidth = 75000.0;
    double cloud_speed = 1000.0;

    void validate() const;  // std::invalid_argument on empty ranges etc.
};

// Seed-deterministic scenario: preferential-attachment fog topology with
// table-constant links, uniform device attributes, lowest-betweenness
// gateways, the cloud attached to the highest-betweenness device,
// growing-network applications, and Bernoulli(popularity) workloads with at
// least one workload per application.
Scenario generate_scenario(const ExperimentParams& params, std::uint64_t seed);

struct ScenarioSummary {
    int service_count = 0;
    double total_consumption = 0.0;   // resource units demanded by one copy of everything
    double total_fog_capacity = 0.0;  // cloud excluded
    int workload_count = 0;
    double mean_request_rate = 0.0;   // mean over workloads of 1/period, requests per ms
};

ScenarioSummary scenario_summary(const Scenario& scenario);

}  // namespace fogplace
