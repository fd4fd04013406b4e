#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogplace {

// Raised for malformed inputs: unknown ids, broken invariants, unreadable
// files. The CLI maps it to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DeviceKind { Cloud, Fog, Gateway };

std::string to_string(DeviceKind kind);
DeviceKind device_kind_from_string(const std::string& s);

// Cloud capacity sentinel; feasibility checks skip unbounded devices.
inline constexpr double kUnboundedResources = std::numeric_limits<double>::infinity();

struct Device {
    int id = 0;
    DeviceKind kind = DeviceKind::Fog;
    double resources = 0.0;  // capacity in resource units, infinite for the cloud
    double speed = 0.0;      // instructions per ms

    bool is_cloud() const { return kind == DeviceKind::Cloud; }
};

// Bidirectional link; endpoints are stored normalized with a < b.
struct NetworkLink {
    int a = 0;
    int b = 0;
    double propagation_ms = 0.0;
    double bandwidth = 0.0;  // bytes per ms
};

// Transmission delay for one packet over one link (ms).
double network_delay(const NetworkLink& link, std::int64_t size_bytes);

class InfrastructureGraph {
public:
    InfrastructureGraph() = default;

    // Validates all structural invariants (one cloud, positive capacities,
    // undirected link set, connectivity, attachment link present); throws
    // DataError on violation.
    static InfrastructureGraph build(std::vector<Device> devices,
                                     std::vector<NetworkLink> links,
                                     int cloud_attachment);

    bool has_device(int id) const { return index_.count(id) != 0; }
    const Device& device(int id) const;
    const std::vector<Device>& devices() const { return devices_; }  // ascending id
    const std::vector<NetworkLink>& links() const { return links_; }

    const NetworkLink* find_link(int a, int b) const;  // nullptr when absent
    const NetworkLink& link(int a, int b) const;       // DataError when absent

    // neighbors ascending; second = index into links()
    const std::vector<std::pair<int, std::size_t>>& adjacency(int id) const;

    int cloud_id() const { return cloud_id_; }
    int cloud_attachment() const { return cloud_attachment_; }
    std::vector<int> device_ids() const;  // ascending

private:
    std::vector<Device> devices_;
    std::map<int, std::size_t> index_;
    std::vector<NetworkLink> links_;
    std::map<std::pair<int, int>, std::size_t> link_index_;
    std::map<int, std::vector<std::pair<int, std::size_t>>> adjacency_;
    int cloud_id_ = -1;
    int cloud_attachment_ = -1;
};

// Source id of the request message that enters an application from outside.
inline constexpr int kExternalSource = -1;

struct Service {
    int id = 0;      // globally unique across applications
    int app_id = 0;
    double consumption = 0.0;  // resource units
    bool is_entry_point = false;
};

struct MessageSpec {
    int source = kExternalSource;  // service id, or kExternalSource
    int target = 0;
    std::int64_t size_bytes = 0;
    std::int64_t instructions = 0;  // execution load at the target

    bool is_external() const { return source == kExternalSource; }
};

struct Application {
    int id = 0;
    std::vector<Service> services;
    std::vector<MessageSpec> messages;
    double deadline_ms = 0.0;

    const Service* find_service(int service_id) const;
    // These two throw DataError when the application is structurally broken;
    // run validate_application first for a diagnostic list.
    const Service& entry_point() const;
    const MessageSpec& external_message() const;
};

struct Workload {
    int id = 0;
    int gateway = 0;  // device id of kind gateway
    int app_id = 0;
    double period_ms = 0.0;  // time between consecutive requests
};

// Everything one experiment needs; the unit of the scenario JSON file.
struct Scenario {
    InfrastructureGraph infra;
    std::vector<Application> apps;
    std::vector<Workload> workloads;
    std::uint64_t seed = 0;
};

// Binary service-to-device map; an entry (u, i) means an instance of
// service u runs on device i.
class PlacementMatrix {
public:
    void add(int service, int device) { entries_.emplace(service, device); }
    bool contains(int service, int device) const {
        return entries_.count({service, device}) != 0;
    }
    const std::set<std::pair<int, int>>& entries() const { return entries_; }
    std::vector<int> devices_hosting(int service) const;  // ascending
    std::size_t size() const { return entries_.size(); }

    // One instance of every service always runs in the cloud.
    static PlacementMatrix cloud_only(const std::vector<Application>& apps, int cloud_id);

    bool operator==(const PlacementMatrix&) const = default;

private:
    std::set<std::pair<int, int>> entries_;
};

struct DeviceUsage {
    int device = 0;
    double used = 0.0;
    double capacity = 0.0;
};

struct FeasibilityReport {
    bool ok = false;
    std::vector<DeviceUsage> usage;  // every non-cloud device, ascending id
};

// Resource-capacity check: on every non-cloud device the consumption of the
// services placed there must not exceed the available resources.
FeasibilityReport placement_feasible(const PlacementMatrix& placement,
                                     const InfrastructureGraph& infra,
                                     const std::vector<Application>& apps);

// Structural checks for one application; empty result means valid.
std::vector<std::string> validate_application(const Application& app);

// Workload/infrastructure cross-checks (gateway kind, app existence, period).
std::vector<std::string> validate_scenario(const Scenario& scenario);

}  // namespace fogplace
