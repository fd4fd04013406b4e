#include "fogplace/model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace fogplace {

std::string to_string(DeviceKind kind) {
    switch (kind) {
        case DeviceKind::Cloud: return "cloud";
        case DeviceKind::Fog: return "fog";
        case DeviceKind::Gateway: return "gateway";
    }
    throw std::logic_error("bad DeviceKind");
}

DeviceKind device_kind_from_string(const std::string& s) {
    if (s == "cloud") return DeviceKind::Cloud;
    if (s == "fog") return DeviceKind::Fog;
    if (s == "gateway") return DeviceKind::Gateway;
    throw DataError("unknown device kind: " + s);
}

double network_delay(const NetworkLink& link, std::int64_t size_bytes) {
    return link.propagation_ms + static_cast<double>(size_bytes) / link.bandwidth;
}

InfrastructureGraph InfrastructureGraph::build(std::vector<Device> devices,
                                               std::vector<NetworkLink> links,
                                               int cloud_attachment) {
    if (devices.empty()) throw DataError("infrastructure: no devices");

    InfrastructureGraph g;
    std::sort(devices.begin(), devices.end(),
              [](const Device& x, const Device& y) { return x.id < y.id; });

    for (auto& d : devices) {
        if (g.index_.count(d.id)) {
            throw DataError("infrastructure: duplicate device id " + std::to_string(d.id));
        }
        if (d.kind == DeviceKind::Cloud) {
            if (g.cloud_id_ >= 0) throw DataError("infrastructure: more than one cloud device");
            g.cloud_id_ = d.id;
            d.resources = kUnboundedResources;
        } else if (!(d.resources > 0.0)) {
            throw DataError("infrastructure: device " + std::to_string(d.id) +
                            " must have positive resources");
        }
        if (!(d.speed > 0.0)) {
            throw DataError("infrastructure: device " + std::to_string(d.id) +
                            " must have positive speed");
        }
        g.index_[d.id] = g.devices_.size();
        g.devices_.push_back(d);
        g.adjacency_[d.id];
    }
    if (g.cloud_id_ < 0) throw DataError("infrastructure: no cloud device");

    for (auto& l : links) {
        if (l.a == l.b) throw DataError("infrastructure: self-loop on device " + std::to_string(l.a));
        if (l.a > l.b) std::swap(l.a, l.b);
        if (!g.index_.count(l.a) || !g.index_.count(l.b)) {
            throw DataError("infrastructure: link endpoint does not exist");
        }
        if (g.link_index_.count({l.a, l.b})) {
            throw DataError("infrastructure: duplicate link " + std::to_string(l.a) + "-" +
                            std::to_string(l.b));
        }
        if (l.propagation_ms < 0.0) throw DataError("infrastructure: negative propagation");
        if (!(l.bandwidth > 0.0)) throw DataError("infrastructure: bandwidth must be positive");
        const std::size_t idx = g.links_.size();
        g.link_index_[{l.a, l.b}] = idx;
        g.links_.push_back(l);
        g.adjacency_[l.a].emplace_back(l.b, idx);
        g.adjacency_[l.b].emplace_back(l.a, idx);
    }
    for (auto& [id, nbrs] : g.adjacency_) {
        (void)id;
        std::sort(nbrs.begin(), nbrs.end());
    }

    if (!g.index_.count(cloud_attachment)) {
        throw DataError("infrastructure: cloud attachment device does not exist");
    }
    if (cloud_attachment == g.cloud_id_) {
        throw DataError("infrastructure: cloud cannot attach to itself");
    }
    g.cloud_attachment_ = cloud_attachment;
    if (!g.find_link(g.cloud_id_, cloud_attachment)) {
        throw DataError("infrastructure: missing link between cloud and its attachment");
    }

    // connectivity
    std::set<int> seen{g.devices_.front().id};
    std::deque<int> frontier{g.devices_.front().id};
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (const auto& [v, li] : g.adjacency_.at(u)) {
            (void)li;
            if (seen.insert(v).second) frontier.push_back(v);
        }
    }
    if (seen.size() != g.devices_.size()) {
        throw DataError("infrastructure: graph is not connected");
    }
    return g;
}

const Device& InfrastructureGraph::device(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown device id " + std::to_string(id));
    return devices_[it->second];
}

const NetworkLink* InfrastructureGraph::find_link(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = link_index_.find({a, b});
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

const NetworkLink& InfrastructureGraph::link(int a, int b) const {
    const NetworkLink* l = find_link(a, b);
    if (!l) {
        throw DataError("unknown link " + std::to_string(a) + "-" + std::to_string(b));
    }
    return *l;
}

const std::vector<std::pair<int, std::size_t>>& InfrastructureGraph::adjacency(int id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) throw DataError("unknown device id " + std::to_string(id));
    return it->second;
}

std::vector<int> InfrastructureGraph::device_ids() const {
    std::vector<int> ids;
    ids.reserve(devices_.size());
    for (const auto& d : devices_) ids.push_back(d.id);
    return ids;
}

const Service* Application::find_service(int service_id) const {
    for (const auto& s : services) {
        if (s.id == service_id) return &s;
    }
    return nullptr;
}

const Service& Application::entry_point() const {
    for (const auto& s : services) {
        if (s.is_entry_point) return s;
    }
    throw DataError("application " + std::to_string(id) + " has no entry point");
}

const MessageSpec& Application::external_message() const {
    for (const auto& m : messages) {
        if (m.is_external()) return m;
    }
    throw DataError("application " + std::to_string(id) + " has no external message");
}

std::vector<int> PlacementMatrix::devices_hosting(int service) const {
    std::vector<int> out;
    for (auto it = entries_.lower_bound({service, std::numeric_limits<int>::min()});
         it != entries_.end() && it->first == service; ++it) {
        out.push_back(it->second);
    }
    return out;
}

PlacementMatrix PlacementMatrix::cloud_only(const std::vector<Application>& apps, int cloud_id) {
    PlacementMatrix p;
    for (const auto& app : apps) {
        for (const auto& s : app.services) p.add(s.id, cloud_id);
    }
    return p;
}

FeasibilityReport placement_feasible(const PlacementMatrix& placement,
                                     const InfrastructureGraph& infra,
                                     const std::vector<Application>& apps) {
    std::map<int, double> consumption;
    for (const auto& app : apps) {
        for (const auto& s : app.services) {
            if (!consumption.emplace(s.id, s.consumption).second) {
                throw DataError("duplicate service id " + std::to_string(s.id));
            }
        }
    }

    std::map<int, double> used;
    for (const auto& [service, device] : placement.entries()) {
        auto it = consumption.find(service);
        if (it == consumption.end()) {
            throw DataError("placement references unknown service " + std::to_string(service));
        }
        const Device& d = infra.device(device);  // throws on unknown device
        if (d.is_cloud()) continue;
        used[device] += it->second;
    }

    FeasibilityReport report;
    report.ok = true;
    for (const auto& d : infra.devices()) {
        if (d.is_cloud()) continue;
        const double u = used.count(d.id) ? used[d.id] : 0.0;
        report.usage.push_back({d.id, u, d.resources});
        if (u > d.resources) report.ok = false;
    }
    return report;
}

namespace {

std::string svc(int id) { return "service " + std::to_string(id); }

}  // namespace

std::vector<std::string> validate_application(const Application& app) {
    std::vector<std::string> out;

    if (app.services.empty()) {
        out.push_back("no services");
        return out;
    }
    if (!(app.deadline_ms > 0.0)) out.push_back("deadline must be positive");

    std::set<int> ids;
    int entry_count = 0;
    int entry_id = -1;
    for (const auto& s : app.services) {
        if (!ids.insert(s.id).second) out.push_back("duplicate " + svc(s.id));
        if (!(s.consumption > 0.0)) out.push_back(svc(s.id) + ": consumption must be positive");
        if (s.is_entry_point) {
            ++entry_count;
            entry_id = s.id;
        }
    }
    if (entry_count == 0) out.push_back("no entry point");
    if (entry_count > 1) out.push_back("multiple entry points");

    int external_count = 0;
    std::set<std::pair<int, int>> seen_specs;
    std::map<int, std::vector<int>> edges;  // service-to-service only
    for (const auto& m : app.messages) {
        if (!(m.size_bytes > 0)) out.push_back("message to " + svc(m.target) + ": size must be positive");
        if (!(m.instructions > 0)) {
            out.push_back("message to " + svc(m.target) + ": instructions must be positive");
        }
        if (!ids.count(m.target)) {
            out.push_back("message targets unknown " + svc(m.target));
            continue;
        }
        if (m.is_external()) {
            ++external_count;
            if (entry_count == 1 && m.target != entry_id) {
                out.push_back("external message does not target the entry point");
            }
            continue;
        }
        if (!ids.count(m.source)) {
            out.push_back("message from unknown " + svc(m.source));
            continue;
        }
        if (m.source == m.target) {
            out.push_back("message from " + svc(m.source) + " to itself");
            continue;
        }
        if (!seen_specs.insert({m.source, m.target}).second) {
            out.push_back("duplicate message " + std::to_string(m.source) + "->" +
                          std::to_string(m.target));
        }
        edges[m.source].push_back(m.target);
    }
    if (external_count == 0) out.push_back("missing external message");
    if (external_count > 1) out.push_back("multiple external messages");

    // cycle check over service-to-service edges (iterative DFS, three colors)
    std::map<int, int> color;  // 0 white, 1 grey, 2 black
    bool cycle = false;
    for (const auto& s : app.services) {
        if (color[s.id] != 0 || cycle) continue;
        std::vector<std::pair<int, std::size_t>> stack{{s.id, 0}};
        color[s.id] = 1;
        while (!stack.empty() && !cycle) {
            auto& [u, next] = stack.back();
            const auto& outs = edges[u];
            if (next < outs.size()) {
                const int v = outs[next++];
                if (color[v] == 1) {
                    cycle = true;
                } else if (color[v] == 0) {
                    color[v] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                color[u] = 2;
                stack.pop_back();
            }
        }
        if (cycle) break;
    }
    if (cycle) out.push_back("cycle detected");

    if (entry_count == 1 && !cycle) {
        std::set<int> reached{entry_id};
        std::deque<int> frontier{entry_id};
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop_front();
            for (int v : edges[u]) {
                if (reached.insert(v).second) frontier.push_back(v);
            }
        }
        for (const auto& s : app.services) {
            if (!reached.count(s.id)) out.push_back("unreachable " + svc(s.id));
        }
    }
    return out;
}

std::vector<std::string> validate_scenario(const Scenario& scenario) {
    std::vector<std::string> out;
    std::set<int> app_ids;
    std::set<int> service_ids;
    for (const auto& app : scenario.apps) {
        if (!app_ids.insert(app.id).second) {
            out.push_back("duplicate application id " + std::to_string(app.id));
        }
        for (const auto& s : app.services) {
            if (!service_ids.insert(s.id).second) {
                out.push_back("service id " + std::to_string(s.id) + " used by more than one application");
            }
            if (s.app_id != app.id) {
                out.push_back("service " + std::to_string(s.id) + " carries wrong app_id");
            }
        }
        for (const auto& v : validate_application(app)) {
            out.push_back("application " + std::to_string(app.id) + ": " + v);
        }
    }
    std::set<int> workload_ids;
    for (const auto& w : scenario.workloads) {
        if (!workload_ids.insert(w.id).second) {
            out.push_back("duplicate workload id " + std::to_string(w.id));
        }
        if (!scenario.infra.has_device(w.gateway)) {
            out.push_back("workload " + std::to_string(w.id) + ": unknown gateway");
        } else if (scenario.infra.device(w.gateway).kind != DeviceKind::Gateway) {
            out.push_back("workload " + std::to_string(w.id) + ": device " +
                          std::to_string(w.gateway) + " is not a gateway");
        }
        if (!app_ids.count(w.app_id)) {
            out.push_back("workload " + std::to_string(w.id) + ": unknown application");
        }
        if (!(w.period_ms > 0.0)) {
            out.push_back("workload " + std::to_string(w.id) + ": period must be positive");
        }
    }
    return out;
}

}  // namespace fogplace
