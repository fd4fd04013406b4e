#pragma once

#include <map>
#include <optional>
#include <vector>

#include "fogplace/graph.hpp"
#include "fogplace/model.hpp"

namespace fogplace {

// Remaining capacity of every non-cloud device. Value semantics: callers
// copy it for tentative allocation and assign back to commit.
class UsageLedger {
public:
    static UsageLedger from_infrastructure(const InfrastructureGraph& infra);

    double remaining(int device) const;
    bool fits(int device, double amount) const;
    void reserve(int device, double amount);  // DataError when it does not fit

    bool operator==(const UsageLedger&) const = default;

private:
    std::map<int, double> remaining_;
};

// Recursive closure partition of one application. Level 0 holds the full
// service set; each following level splits every non-singleton set into the
// closures of its root's out-neighbors plus the root itself, keeping the
// sets in split order (children by descending size, root last, singletons
// carried through in place). The last level is all singletons.
struct PartitionLevels {
    std::vector<std::vector<ClosureSet>> levels;
};

PartitionLevels closure_partition_levels(const Application& app);

// Theoretical user-perceived response time used to rank devices: network
// latency from the gateway for the application's external message plus the
// execution time of all the application's messages on this device. Lower is
// better; unreachable devices get +infinity.
double device_fitness(const Device& device, const Application& app, int gateway,
                      const InfrastructureGraph& infra);

// Second phase: map all services of one application onto the devices of one
// community, best-fitness device first, trying closure sets from largest to
// smallest. Returns the service-to-device map and commits the ledger on
// success; returns nullopt and leaves the ledger untouched when the
// community cannot hold the application.
std::optional<std::map<int, int>> place_services_in_devices(
    const Application& app, const std::vector<int>& community, UsageLedger& ledger,
    int gateway, const InfrastructureGraph& infra);

// First phase: walk applications by ascending deadline and their workloads
// by id; for each workload try the gateway's communities deepest-first,
// skipping to the next workload once the application is already present in
// one of them. Services always keep their cloud instance.
PlacementMatrix partition_place(const InfrastructureGraph& infra,
                                const Dendrogram& dendrogram,
                                const std::vector<Application>& apps,
                                const std::vector<Workload>& workloads);

// Baseline: per workload, place each service (topological order) on the
// feasible device closest to the gateway by delay, reusing instances that
// already exist there.
PlacementMatrix greedy_baseline_place(const InfrastructureGraph& infra,
                                      const std::vector<Application>& apps,
                                      const std::vector<Workload>& workloads);

// Static objective used by the exhaustive search: number of
// (workload, service) pairs whose response-time estimate exceeds the
// application deadline, then the sum of those over-deadline estimates.
// Compared lexicographically.
struct PlacementObjective {
    long long missed = 0;
    double missed_estimate_sum = 0.0;

    friend bool operator<(const PlacementObjective& x, const PlacementObjective& y) {
        if (x.missed != y.missed) return x.missed < y.missed;
        return x.missed_estimate_sum < y.missed_estimate_sum;
    }
    friend bool operator<=(const PlacementObjective& x, const PlacementObjective& y) {
        return !(y < x);
    }
};

PlacementObjective placement_objective(const InfrastructureGraph& infra,
                                       const std::vector<Application>& apps,
                                       const std::vector<Workload>& workloads,
                                       const PlacementMatrix& placement);

// Desk-scale oracle: enumerates every feasible assignment of each service to
// the cloud or one fog device and returns the objective minimizer (ties:
// lexicographically smallest entry set). Guarded to at most ~1e7
// configurations; throws DataError beyond that.
PlacementMatrix brute_force_place(const InfrastructureGraph& infra,
                                  const std::vector<Application>& apps,
                                  const std::vector<Workload>& workloads);

}  // namespace fogplace
