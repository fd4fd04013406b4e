#include "fogplace/scenario.hpp"

#include <algorithm>
#include <stdexcept>

#include "fogplace/graph.hpp"
#include "fogplace/rng.hpp"

namespace fogplace {

namespace {

void check_range(const IntRange& r, const char* name) {
    if (r.min > r.max) throw std::invalid_argument(std::string(name) + ": empty range");
    if (r.min <= 0) throw std::invalid_argument(std::string(name) + ": values must be positive");
}

}  // namespace

void ExperimentParams::validate() const {
    if (n_devices < 2) throw std::invalid_argument("n_devices: need at least 2");
    if (!(gateway_fraction > 0.0 && gateway_fraction < 1.0)) {
        throw std::invalid_argument("gateway_fraction: must be in (0, 1)");
    }
    if (ba_m < 1 || ba_m >= n_devices) throw std::invalid_argument("ba_m: need n_devices > ba_m >= 1");
    if (n_apps < 1) throw std::invalid_argument("n_apps: need at least 1");
    if (!(link_propagation_ms >= 0.0)) throw std::invalid_argument("link_propagation_ms: negative");
    if (!(link_bandwidth > 0.0)) throw std::invalid_argument("link_bandwidth: must be positive");
    check_range(device_resources, "device_resources");
    check_range(device_speed, "device_speed");
    check_range(app_deadline, "app_deadline");
    check_range(services_per_app, "services_per_app");
    check_range(service_consumption, "service_consumption");
    check_range(message_instructions, "message_instructions");
    check_range(message_size, "message_size");
    if (workload_period.min > workload_period.max || workload_period.min <= 0.0) {
        throw std::invalid_argument("workload_period: invalid range");
    }
    if (popularity < 0.0 || popularity > 1.0) {
        throw std::invalid_argument("popularity: must be in [0, 1]");
    }
    if (!(cloud_propagation_ms >= 0.0) || !(cloud_bandwidth > 0.0) || !(cloud_speed > 0.0)) {
        throw std::invalid_argument("cloud link/speed: invalid");
    }
}

Scenario generate_scenario(const ExperimentParams& params, std::uint64_t seed) {
    params.validate();

    // Draw order is fixed: topology, per-device attributes, applications
    // (count, deadline, sub-seed, consumptions, message parameters), then
    // workloads. Changing it changes every seeded scenario.
    const UndirectedGraph topo = generate_barabasi_albert(params.n_devices, params.ba_m, seed);
    Rng rng(seed);

    std::map<int, double> resources;
    std::map<int, double> speed;
    for (int id = 0; id < params.n_devices; ++id) {
        resources[id] = static_cast<double>(
            rng.uniform_int(params.device_resources.min, params.device_resources.max));
        speed[id] = static_cast<double>(
            rng.uniform_int(params.device_speed.min, params.device_speed.max));
    }

    const auto centrality = node_betweenness(topo);
    int attachment = -1;
    double best = -1.0;
    for (const auto& [id, score] : centrality) {
        if (score > best) {  // ascending ids: ties keep the smaller id
            best = score;
            attachment = id;
        }
    }
    const std::vector<int> gateways = select_gateways(topo, params.gateway_fraction, attachment);
    const std::set<int> gateway_set(gateways.begin(), gateways.end());

    const int cloud_id = params.n_devices;
    std::vector<Device> devices;
    for (int id = 0; id < params.n_devices; ++id) {
        devices.push_back({id, gateway_set.count(id) ? DeviceKind::Gateway : DeviceKind::Fog,
                           resources[id], speed[id]});
    }
    devices.push_back({cloud_id, DeviceKind::Cloud, kUnboundedResources, params.cloud_speed});

    std::vector<NetworkLink> links;
    for (const auto& [a, b] : topo.edges()) {
        links.push_back({a, b, params.link_propagation_ms, params.link_bandwidth});
    }
    links.push_back({attachment, cloud_id, params.cloud_propagation_ms, params.cloud_bandwidth});

    std::vector<Application> apps;
    int next_service = 0;
    for (int app_id = 0; app_id < params.n_apps; ++app_id) {
        const int n_services = static_cast<int>(
            rng.uniform_int(params.services_per_app.min, params.services_per_app.max));
        const double deadline = static_cast<double>(
            rng.uniform_int(params.app_deadline.min, params.app_deadline.max));
        const std::uint64_t app_seed = rng.next_u64();
        const DirectedTree tree = generate_gn_application(n_services, app_seed);

        Application app;
        app.id = app_id;
        app.deadline_ms = deadline;
        const int base = next_service;
        for (int local = 0; local < n_services; ++local) {
            const double consumption = static_cast<double>(
                rng.uniform_int(params.service_consumption.min, params.service_consumption.max));
            app.services.push_back({base + local, app_id, consumption, local == 0});
        }
        next_service += n_services;

        const auto draw_message = [&](int source, int target) {
            MessageSpec m;
            m.source = source;
            m.target = target;
            m.instructions =
                rng.uniform_int(params.message_instructions.min, params.message_instructions.max);
            m.size_bytes = rng.uniform_int(params.message_size.min, params.message_size.max);
            return m;
        };
        app.messages.push_back(draw_message(kExternalSource, base));
        for (const auto& [parent, child] : tree.edges) {
            app.messages.push_back(draw_message(base + parent, base + child));
        }
        apps.push_back(std::move(app));
    }

    std::vector<Workload> workloads;
    for (int gw : gateways) {
        for (int app_id = 0; app_id < params.n_apps; ++app_id) {
            if (rng.bernoulli(params.popularity)) {
                const double period =
                    rng.uniform_real(params.workload_period.min, params.workload_period.max);
                workloads.push_back({static_cast<int>(workloads.size()), gw, app_id, period});
            }
        }
    }
    // every application keeps at least one workload so that availability
    // ratios are always defined
    for (int app_id = 0; app_id < params.n_apps; ++app_id) {
        const bool present = std::any_of(workloads.begin(), workloads.end(),
                                         [&](const Workload& w) { return w.app_id == app_id; });
        if (present) continue;
        const int gw = gateways[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(gateways.size()) - 1))];
        const double period =
            rng.uniform_real(params.workload_period.min, params.workload_period.max);
        workloads.push_back({static_cast<int>(workloads.size()), gw, app_id, period});
    }

    Scenario scenario;
    scenario.infra = InfrastructureGraph::build(std::move(devices), std::move(links), attachment);
    scenario.apps = std::move(apps);
    scenario.workloads = std::move(workloads);
    scenario.seed = seed;
    return scenario;
}

ScenarioSummary scenario_summary(const Scenario& scenario) {
    ScenarioSummary s;
    for (const auto& app : scenario.apps) {
        s.service_count += static_cast<int>(app.services.size());
        for (const auto& svc : app.services) s.total_consumption += svc.consumption;
    }
    for (const auto& d : scenario.infra.devices()) {
        if (!d.is_cloud()) s.total_fog_capacity += d.resources;
    }
    s.workload_count = static_cast<int>(scenario.workloads.size());
    double rate = 0.0;
    for (const auto& w : scenario.workloads) rate += 1.0 / w.period_ms;
    s.mean_request_rate = scenario.workloads.empty() ? 0.0 : rate / s.workload_count;
    return s;
}

}  // namespace fogplace
