#include "fogplace/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fogplace {

UsageLedger UsageLedger::from_infrastructure(const InfrastructureGraph& infra) {
    UsageLedger ledger;
    for (const auto& d : infra.devices()) {
        if (!d.is_cloud()) ledger.remaining_[d.id] = d.resources;
    }
    return ledger;
}

double UsageLedger::remaining(int device) const {
    auto it = remaining_.find(device);
    if (it == remaining_.end()) throw DataError("ledger: unknown device " + std::to_string(device));
    return it->second;
}

bool UsageLedger::fits(int device, double amount) const {
    return amount <= remaining(device);
}

void UsageLedger::reserve(int device, double amount) {
    auto it = remaining_.find(device);
    if (it == remaining_.end()) throw DataError("ledger: unknown device " + std::to_string(device));
    if (amount > it->second) {
        throw DataError("ledger: device " + std::to_string(device) + " over capacity");
    }
    it->second -= amount;
}

PartitionLevels closure_partition_levels(const Application& app) {
    std::map<int, std::vector<int>> out_edges;
    for (const auto& m : app.messages) {
        if (!m.is_external()) out_edges[m.source].push_back(m.target);
    }
    for (auto& [u, vs] : out_edges) {
        (void)u;
        std::sort(vs.begin(), vs.end());
    }

    PartitionLevels result;
    result.levels.push_back({transitive_closure(app, app.entry_point().id)});

    while (true) {
        const auto& current = result.levels.back();
        const bool any_split = std::any_of(current.begin(), current.end(),
                                           [](const ClosureSet& s) { return s.members.size() > 1; });
        if (!any_split) break;

        std::vector<ClosureSet> next;
        for (const auto& set : current) {
            if (set.members.size() == 1) {
                next.push_back(set);
                continue;
            }
            std::vector<ClosureSet> children;
            std::size_t covered = 1;  // the root itself
            for (int child : out_edges[set.root]) {
                ClosureSet closure = transitive_closure(app, child);
                for (const auto& other : children) {
                    for (int member : closure.members) {
                        if (other.members.count(member)) {
                            throw DataError("application " + std::to_string(app.id) +
                                            ": overlapping closures (non-tree structure)");
                        }
                    }
                }
                covered += closure.members.size();
                children.push_back(std::move(closure));
            }
            if (covered != set.members.size()) {
                throw DataError("application " + std::to_string(app.id) +
                                ": overlapping closures (non-tree structure)");
            }
            std::stable_sort(children.begin(), children.end(),
                             [](const ClosureSet& x, const ClosureSet& y) {
                                 if (x.members.size() != y.members.size()) {
                                     return x.members.size() > y.members.size();
                                 }
                                 return x.root < y.root;
                             });
            for (auto& c : children) next.push_back(std::move(c));
            next.push_back({set.root, {set.root}});
        }
        result.levels.push_back(std::move(next));
    }
    return result;
}

namespace {

std::int64_t total_instructions(const Application& app) {
    std::int64_t total = 0;
    for (const auto& m : app.messages) total += m.instructions;
    return total;
}

}  // namespace

double device_fitness(const Device& device, const Application& app, int gateway,
                      const InfrastructureGraph& infra) {
    const auto alive = all_alive(infra);
    const auto route =
        min_delay_path(infra, alive, gateway, device.id, app.external_message().size_bytes);
    if (!route) return std::numeric_limits<double>::infinity();
    return route->delay_ms + static_cast<double>(total_instructions(app)) / device.speed;
}

std::optional<std::map<int, int>> place_services_in_devices(
    const Application& app, const std::vector<int>& community, UsageLedger& ledger,
    int gateway, const InfrastructureGraph& infra) {
    const PartitionLevels levels = closure_partition_levels(app);

    std::map<int, double> consumption;
    for (const auto& s : app.services) consumption[s.id] = s.consumption;

    // one Dijkstra from the gateway covers the latency term for the whole
    // community; values equal device_fitness per device
    const auto dist = min_delays_from(infra, all_alive(infra), gateway,
                                      app.external_message().size_bytes);
    const double exec_total = static_cast<double>(total_instructions(app));
    std::vector<std::pair<double, int>> ranked;  // (fitness, device id)
    ranked.reserve(community.size());
    for (int id : community) {
        auto it = dist.find(id);
        const double latency =
            it == dist.end() ? std::numeric_limits<double>::infinity() : it->second;
        ranked.emplace_back(latency + exec_total / infra.device(id).speed, id);
    }
    std::sort(ranked.begin(), ranked.end());

    UsageLedger tentative = ledger;
    std::map<int, int> mapping;
    std::set<int> placed;

    for (const auto& [fitness, device] : ranked) {
        (void)fitness;
        for (const auto& level : levels.levels) {
            for (const auto& set : level) {
                const bool untouched = std::none_of(set.members.begin(), set.members.end(),
                                                    [&](int s) { return placed.count(s) != 0; });
                if (!untouched) continue;
                double total = 0.0;
                for (int s : set.members) total += consumption.at(s);
                if (!tentative.fits(device, total)) continue;
                tentative.reserve(device, total);
                for (int s : set.members) {
                    mapping[s] = device;
                    placed.insert(s);
                }
                if (placed.size() == app.services.size()) {
                    ledger = std::move(tentative);
                    return mapping;
                }
            }
        }
    }
    return std::nullopt;  // community rejected; ledger untouched
}

namespace {

std::vector<std::size_t> deadline_order(const std::vector<Application>& apps) {
    std::vector<std::size_t> order(apps.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (apps[x].deadline_ms != apps[y].deadline_ms) {
            return apps[x].deadline_ms < apps[y].deadline_ms;
        }
        return apps[x].id < apps[y].id;
    });
    return order;
}

std::vector<const Workload*> workloads_for_app(const std::vector<Workload>& workloads,
                                               int app_id) {
    std::vector<const Workload*> out;
    for (const auto& w : workloads) {
        if (w.app_id == app_id) out.push_back(&w);
    }
    std::sort(out.begin(), out.end(),
              [](const Workload* x, const Workload* y) { return x->id < y->id; });
    return out;
}

}  // namespace

PlacementMatrix partition_place(const InfrastructureGraph& infra,
                                const Dendrogram& dendrogram,
                                const std::vector<Application>& apps,
                                const std::vector<Workload>& workloads) {
    PlacementMatrix placement = PlacementMatrix::cloud_only(apps, infra.cloud_id());
    UsageLedger ledger = UsageLedger::from_infrastructure(infra);
    std::map<int, std::set<std::size_t>> hosted_in;  // app id -> community indices

    for (std::size_t idx : deadline_order(apps)) {
        const Application& app = apps[idx];
        for (const Workload* user : workloads_for_app(workloads, app.id)) {
            for (std::size_t ci : communities_for_device(dendrogram, user->gateway)) {
                if (hosted_in[app.id].count(ci)) break;  // this user is already served
                const auto mapping = place_services_in_devices(
                    app, dendrogram.communities[ci].members, ledger, user->gateway, infra);
                if (mapping) {
                    for (const auto& [service, device] : *mapping) placement.add(service, device);
                    hosted_in[app.id].insert(ci);
                    break;
                }
                // rejected: try the next (shallower) community
            }
            // no community fits: this user stays on the cloud instances
        }
    }
    return placement;
}

PlacementMatrix greedy_baseline_place(const InfrastructureGraph& infra,
                                      const std::vector<Application>& apps,
                                      const std::vector<Workload>& workloads) {
    PlacementMatrix placement = PlacementMatrix::cloud_only(apps, infra.cloud_id());
    UsageLedger ledger = UsageLedger::from_infrastructure(infra);
    const auto alive = all_alive(infra);

    for (std::size_t idx : deadline_order(apps)) {
        const Application& app = apps[idx];

        // topological order, smallest id first among ready services
        std::map<int, int> indegree;
        std::map<int, std::vector<int>> out_edges;
        for (const auto& s : app.services) indegree[s.id];
        for (const auto& m : app.messages) {
            if (m.is_external()) continue;
            ++indegree[m.target];
            out_edges[m.source].push_back(m.target);
        }
        std::set<int> ready;
        for (const auto& [s, deg] : indegree) {
            if (deg == 0) ready.insert(s);
        }
        std::vector<int> topo;
        while (!ready.empty()) {
            const int u = *ready.begin();
            ready.erase(ready.begin());
            topo.push_back(u);
            for (int v : out_edges[u]) {
                if (--indegree[v] == 0) ready.insert(v);
            }
        }

        for (const Workload* user : workloads_for_app(workloads, app.id)) {
            const auto dist =
                min_delays_from(infra, alive, user->gateway, app.external_message().size_bytes);
            std::vector<std::pair<double, int>> ranked;
            for (const auto& d : infra.devices()) {
                if (d.is_cloud()) continue;
                auto it = dist.find(d.id);
                if (it != dist.end()) ranked.emplace_back(it->second, d.id);
            }
            std::sort(ranked.begin(), ranked.end());

            for (int service : topo) {
                const double need = app.find_service(service)->consumption;
                for (const auto& [delay, device] : ranked) {
                    (void)delay;
                    if (placement.contains(service, device)) break;  // nearby instance exists
                    if (ledger.fits(device, need)) {
                        ledger.reserve(device, need);
                        placement.add(service, device);
                        break;
                    }
                }
                // nothing feasible: the cloud instance serves this user
            }
        }
    }
    return placement;
}

namespace {

struct ObjectiveContext {
    // fitness_for[w] maps device id -> response-time estimate for workload w
    std::vector<std::map<int, double>> fitness_for;
    std::vector<const Application*> app_for;  // per workload
};

ObjectiveContext build_objective_context(const InfrastructureGraph& infra,
                                         const std::vector<Application>& apps,
                                         const std::vector<Workload>& workloads) {
    ObjectiveContext ctx;
    const auto alive = all_alive(infra);
    for (const auto& w : workloads) {
        const Application* app = nullptr;
        for (const auto& a : apps) {
            if (a.id == w.app_id) {
                app = &a;
                break;
            }
        }
        if (!app) throw DataError("workload " + std::to_string(w.id) + ": unknown application");
        const auto dist = min_delays_from(infra, alive, w.gateway, app->external_message().size_bytes);
        const double exec_total = static_cast<double>(total_instructions(*app));
        std::map<int, double> fit;
        for (const auto& d : infra.devices()) {
            auto it = dist.find(d.id);
            if (it == dist.end()) continue;
            fit[d.id] = it->second + exec_total / d.speed;
        }
        ctx.fitness_for.push_back(std::move(fit));
        ctx.app_for.push_back(app);
    }
    return ctx;
}

}  // namespace

PlacementObjective placement_objective(const InfrastructureGraph& infra,
                                       const std::vector<Application>& apps,
                                       const std::vector<Workload>& workloads,
                                       const PlacementMatrix& placement) {
    const ObjectiveContext ctx = build_objective_context(infra, apps, workloads);
    PlacementObjective obj;
    for (std::size_t wi = 0; wi < workloads.size(); ++wi) {
        const Application& app = *ctx.app_for[wi];
        for (const auto& s : app.services) {
            double best = std::numeric_limits<double>::infinity();
            for (int device : placement.devices_hosting(s.id)) {
                auto it = ctx.fitness_for[wi].find(device);
                if (it != ctx.fitness_for[wi].end()) best = std::min(best, it->second);
            }
            if (best > app.deadline_ms) {
                ++obj.missed;
                obj.missed_estimate_sum += best;
            }
        }
    }
    return obj;
}

PlacementMatrix brute_force_place(const InfrastructureGraph& infra,
                                  const std::vector<Application>& apps,
                                  const std::vector<Workload>& workloads) {
    struct Item {
        int service;
        double consumption;
    };
    std::vector<Item> items;
    for (const auto& app : apps) {
        for (const auto& s : app.services) items.push_back({s.id, s.consumption});
    }
    std::sort(items.begin(), items.end(),
              [](const Item& x, const Item& y) { return x.service < y.service; });

    std::vector<int> fog_ids;
    for (const auto& d : infra.devices()) {
        if (!d.is_cloud()) fog_ids.push_back(d.id);
    }

    const double option_count = static_cast<double>(fog_ids.size()) + 1.0;
    double configurations = 1.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        configurations *= option_count;
        if (configurations > 1e7) {
            throw DataError("brute_force_place: instance too large (> 1e7 configurations)");
        }
    }

    const ObjectiveContext ctx = build_objective_context(infra, apps, workloads);
    std::map<int, double> capacity;
    for (const auto& d : infra.devices()) {
        if (!d.is_cloud()) capacity[d.id] = d.resources;
    }
    const int cloud = infra.cloud_id();

    // service -> position in items, for the per-config objective scan
    std::map<int, std::size_t> item_index;
    for (std::size_t i = 0; i < items.size(); ++i) item_index[items[i].service] = i;

    std::vector<std::size_t> choice(items.size(), 0);  // 0 = cloud only, k>0 = fog_ids[k-1]
    bool have_best = false;
    PlacementObjective best_obj;
    std::vector<std::pair<int, int>> best_entries;

    const PlacementMatrix cloud_rows = PlacementMatrix::cloud_only(apps, cloud);

    while (true) {
        // feasibility
        std::map<int, double> used;
        bool feasible = true;
        for (std::size_t i = 0; i < items.size() && feasible; ++i) {
            if (choice[i] == 0) continue;
            const int device = fog_ids[choice[i] - 1];
            used[device] += items[i].consumption;
            if (used[device] > capacity[device]) feasible = false;
        }

        if (feasible) {
            PlacementObjective obj;
            for (std::size_t wi = 0; wi < workloads.size(); ++wi) {
                const Application& app = *ctx.app_for[wi];
                const auto& fit = ctx.fitness_for[wi];
                for (const auto& s : app.services) {
                    double best = std::numeric_limits<double>::infinity();
                    auto itc = fit.find(cloud);
                    if (itc != fit.end()) best = itc->second;
                    const std::size_t pos = item_index.at(s.id);
                    if (choice[pos] != 0) {
                        auto itf = fit.find(fog_ids[choice[pos] - 1]);
                        if (itf != fit.end()) best = std::min(best, itf->second);
                    }
                    if (best > app.deadline_ms) {
                        ++obj.missed;
                        obj.missed_estimate_sum += best;
                    }
                }
            }

            bool take = false;
            std::vector<std::pair<int, int>> entries;
            if (!have_best || obj < best_obj) {
                take = true;
            } else if (!(best_obj < obj)) {  // objective tie: smallest entry set wins
                entries.assign(cloud_rows.entries().begin(), cloud_rows.entries().end());
                for (std::size_t i = 0; i < items.size(); ++i) {
                    if (choice[i] != 0) entries.emplace_back(items[i].service, fog_ids[choice[i] - 1]);
                }
                std::sort(entries.begin(), entries.end());
                take = entries < best_entries;
            }
            if (take) {
                if (entries.empty()) {
                    entries.assign(cloud_rows.entries().begin(), cloud_rows.entries().end());
                    for (std::size_t i = 0; i < items.size(); ++i) {
                        if (choice[i] != 0) {
                            entries.emplace_back(items[i].service, fog_ids[choice[i] - 1]);
                        }
                    }
                    std::sort(entries.begin(), entries.end());
                }
                have_best = true;
                best_obj = obj;
                best_entries = std::move(entries);
            }
        }

        // odometer increment
        std::size_t pos = 0;
        while (pos < choice.size()) {
            if (++choice[pos] <= static_cast<std::size_t>(fog_ids.size())) break;
            choice[pos] = 0;
            ++pos;
        }
        if (pos == choice.size()) break;
    }

    PlacementMatrix best;
    for (const auto& [service, device] : best_entries) best.add(service, device);
    return best;
}

}  // namespace fogplace
