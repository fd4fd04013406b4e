#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fogplace/model.hpp"

namespace fogplace {

struct FailureEvent {
    double time_ms = 0.0;
    int device = 0;
};

// Permanent node failures, strictly increasing in time; never the cloud.
struct FailureSchedule {
    std::vector<FailureEvent> events;
};

// Every non-cloud device fails exactly once, in seeded random order, at
// equally spaced times k*duration/(n+1).
FailureSchedule build_failure_schedule(const InfrastructureGraph& infra,
                                       double duration_ms, std::uint64_t seed);

struct RequestRecord {
    int workload = 0;
    int app = 0;
    double emit_ms = 0.0;
    std::optional<double> done_ms;  // absent: never completed
    int failed_count_at_emit = 0;

    bool operator==(const RequestRecord&) const = default;
};

struct AvailabilityRow {
    int failed_count = 0;
    int app = 0;
    double ratio = 0.0;  // share of the app's workloads that can reach every service

    bool operator==(const AvailabilityRow&) const = default;
};

struct MetricsStore {
    std::vector<RequestRecord> requests;       // emission order
    std::vector<AvailabilityRow> availability;  // one block per snapshot, apps ascending
    std::map<int, double> busy_ms;              // per-device accumulated execution time

    bool operator==(const MetricsStore&) const = default;
};

// Per application, the share of its workloads whose
// gateway is alive and can reach at least one alive instance of every
// service over alive devices. Applications without workloads are skipped.
std::map<int, double> availability_snapshot(const InfrastructureGraph& infra,
                                            const std::set<int>& alive,
                                            const PlacementMatrix& placement,
                                            const std::vector<Workload>& workloads,
                                            const std::vector<Application>& apps);

// Deterministic event-driven run: periodic request emission, per-message
// routing to the nearest alive instance, single FIFO server per device,
// permanent failures with message/queue loss, and an availability snapshot
// at t=0 and after every failure.
MetricsStore run_simulation(const Scenario& scenario, const PlacementMatrix& placement,
                            const FailureSchedule& schedule, double duration_ms);

// Scope for deadline satisfaction: a specific workload, a whole application,
// or the entire system (both fields empty).
struct SatisfactionScope {
    std::optional<int> workload_id;
    std::optional<int> app_id;
};

// Share of in-scope requests finished strictly before their application
// deadline; unfinished requests count in the denominator only. DataError on
// an empty scope.
double deadline_satisfaction(const MetricsStore& metrics,
                             const std::vector<Application>& apps,
                             const SatisfactionScope& scope);

}  // namespace fogplace
