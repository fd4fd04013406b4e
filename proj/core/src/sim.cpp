#include "fogplace/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "fogplace/graph.hpp"
#include "fogplace/rng.hpp"

namespace fogplace {

FailureSchedule build_failure_schedule(const InfrastructureGraph& infra,
                                       double duration_ms, std::uint64_t seed) {
    if (!(duration_ms > 0.0)) {
        throw std::invalid_argument("build_failure_schedule: duration must be positive");
    }
    std::vector<int> devices;
    for (const auto& d : infra.devices()) {
        if (!d.is_cloud()) devices.push_back(d.id);
    }
    Rng rng(seed);
    rng.shuffle(devices);

    FailureSchedule schedule;
    const double spacing = duration_ms / (static_cast<double>(devices.size()) + 1.0);
    for (std::size_t k = 0; k < devices.size(); ++k) {
        schedule.events.push_back({spacing * static_cast<double>(k + 1), devices[k]});
    }
    return schedule;
}

std::map<int, double> availability_snapshot(const InfrastructureGraph& infra,
                                            const std::set<int>& alive,
                                            const PlacementMatrix& placement,
                                            const std::vector<Workload>& workloads,
                                            const std::vector<Application>& apps) {
    // reachable sets are shared between workloads behind the same gateway
    std::map<int, std::set<int>> reachable_from;
    auto reachable = [&](int gateway) -> const std::set<int>& {
        auto it = reachable_from.find(gateway);
        if (it != reachable_from.end()) return it->second;
        std::set<int> seen;
        if (alive.count(gateway)) {
            seen.insert(gateway);
            std::deque<int> frontier{gateway};
            while (!frontier.empty()) {
                const int u = frontier.front();
                frontier.pop_front();
                for (const auto& [v, li] : infra.adjacency(u)) {
                    (void)li;
                    if (alive.count(v) && seen.insert(v).second) frontier.push_back(v);
                }
            }
        }
        return reachable_from.emplace(gateway, std::move(seen)).first->second;
    };

    std::map<int, double> ratios;
    for (const auto& app : apps) {
        int total = 0;
        int able = 0;
        for (const auto& w : workloads) {
            if (w.app_id != app.id) continue;
            ++total;
            const auto& seen = reachable(w.gateway);
            if (seen.empty()) continue;  // dead gateway
            bool all_services = true;
            for (const auto& s : app.services) {
                bool found = false;
                for (int device : placement.devices_hosting(s.id)) {
                    if (seen.count(device)) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    all_services = false;
                    break;
                }
            }
            if (all_services) ++able;
        }
        if (total > 0) ratios[app.id] = static_cast<double>(able) / static_cast<double>(total);
    }
    return ratios;
}

namespace {

// Event classes; lower runs first at equal times.
enum EventKlass : int { kFailure = 0, kEmit = 1, kArrival = 2, kCompletion = 3 };

struct Event {
    double time = 0.0;
    int klass = 0;
    std::uint64_t seq = 0;
    std::uint64_t payload = 0;  // failure index / workload index / message id

    bool operator>(const Event& o) const {
        if (time != o.time) return time > o.time;
        if (klass != o.klass) return klass > o.klass;
        return seq > o.seq;
    }
};

struct Msg {
    std::uint64_t request = 0;
    int service = 0;                  // target service executed on arrival
    std::int64_t instructions = 0;
    int dest = 0;
    std::vector<int> path;            // source first
    std::vector<double> arrive_at;    // cumulative arrival time at each path node
    bool dropped = false;
};

struct RequestState {
    int workload = 0;
    int app_index = 0;
    double emit = 0.0;
    int failed_at_emit = 0;
    std::set<int> completed;
    bool doomed = false;
    std::optional<double> done;
};

struct DeviceState {
    std::deque<std::uint64_t> queue;
    std::optional<std::uint64_t> running;
};

struct AppIndex {
    const Application* app;
    std::map<int, std::vector<const MessageSpec*>> out_specs;  // by source service
};

}  // namespace

MetricsStore run_simulation(const Scenario& scenario, const PlacementMatrix& placement,
                            const FailureSchedule& schedule, double duration_ms) {
    const InfrastructureGraph& infra = scenario.infra;

    std::map<int, AppIndex> apps_by_id;
    for (const auto& app : scenario.apps) {
        AppIndex idx{&app, {}};
        for (const auto& m : app.messages) {
            if (!m.is_external()) idx.out_specs[m.source].push_back(&m);
        }
        apps_by_id.emplace(app.id, std::move(idx));
    }

    std::map<int, std::vector<int>> instance_hosts;  // service -> hosting devices
    for (const auto& [service, device] : placement.entries()) {
        instance_hosts[service].push_back(device);
    }

    std::set<int> alive = all_alive(infra);
    int failed_count = 0;

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t next_seq = 0;
    auto schedule_event = [&](double t, int klass, std::uint64_t payload) {
        events.push({t, klass, next_seq++, payload});
    };

    std::vector<RequestState> requests;
    std::vector<Msg> msgs;
    std::set<std::uint64_t> in_flight;
    std::map<int, DeviceState> device_state;
    for (const auto& d : infra.devices()) device_state[d.id];

    MetricsStore metrics;
    auto snapshot = [&]() {
        const auto ratios =
            availability_snapshot(infra, alive, placement, scenario.workloads, scenario.apps);
        for (const auto& [app, ratio] : ratios) {
            metrics.availability.push_back({failed_count, app, ratio});
        }
    };

    auto doom = [&](std::uint64_t req) {
        if (!requests[req].done) requests[req].doomed = true;
    };

    // Route a message from src to the nearest alive instance of `service`.
    // Returns false (and dooms the request) when no instance is reachable.
    auto emit_message = [&](std::uint64_t req, int service, std::int64_t size,
                            std::int64_t instructions, int src, double now) -> bool {
        const auto dist = min_delays_from(infra, alive, src, size);
        int chosen = -1;
        double best = 0.0;
        auto hosts = instance_hosts.find(service);
        if (hosts != instance_hosts.end()) {
            for (int device : hosts->second) {  // ascending: ties keep the smaller id
                if (!alive.count(device)) continue;
                auto it = dist.find(device);
                if (it == dist.end()) continue;
                if (chosen < 0 || it->second < best - 1e-9 * std::max(1.0, best)) {
                    chosen = device;
                    best = it->second;
                }
            }
        }
        if (chosen < 0) {
            doom(req);
            return false;
        }
        const auto route = min_delay_path(infra, alive, src, chosen, size);
        if (!route) {
            doom(req);
            return false;
        }
        Msg m;
        m.request = req;
        m.service = service;
        m.instructions = instructions;
        m.dest = chosen;
        m.path = route->path;
        m.arrive_at.reserve(m.path.size());
        double t = now;
        m.arrive_at.push_back(t);
        for (std::size_t i = 1; i < m.path.size(); ++i) {
            t += network_delay(infra.link(m.path[i - 1], m.path[i]), size);
            m.arrive_at.push_back(t);
        }
        const std::uint64_t id = msgs.size();
        msgs.push_back(std::move(m));
        in_flight.insert(id);
        schedule_event(t, kArrival, id);
        return true;
    };

    auto start_next = [&](int device, double now) {
        DeviceState& st = device_state[device];
        while (!st.running && !st.queue.empty()) {
            const std::uint64_t id = st.queue.front();
            st.queue.pop_front();
            if (msgs[id].dropped) continue;
            st.running = id;
            const double exec = static_cast<double>(msgs[id].instructions) /
                                infra.device(device).speed;
            schedule_event(now + exec, kCompletion, id);
        }
    };

    // initial emissions and failures
    for (std::size_t wi = 0; wi < scenario.workloads.size(); ++wi) {
        const Workload& w = scenario.workloads[wi];
        if (w.period_ms <= duration_ms) schedule_event(w.period_ms, kEmit, wi);
    }
    for (std::size_t fi = 0; fi < schedule.events.size(); ++fi) {
        schedule_event(schedule.events[fi].time_ms, kFailure, fi);
    }

    snapshot();  // t = 0, nothing failed

    std::map<int, std::uint64_t> emissions_done;  // workload index -> count

    while (!events.empty()) {
        const Event ev = events.top();
        events.pop();

        switch (ev.klass) {
            case kFailure: {
                const int dead = schedule.events[ev.payload].device;
                alive.erase(dead);
                ++failed_count;
                DeviceState& st = device_state[dead];
                for (std::uint64_t id : st.queue) {
                    msgs[id].dropped = true;
                    doom(msgs[id].request);
                }
                st.queue.clear();
                if (st.running) {
                    msgs[*st.running].dropped = true;
                    doom(msgs[*st.running].request);
                    st.running.reset();
                }
                // drop messages whose remaining path crosses the dead device
                for (auto it = in_flight.begin(); it != in_flight.end();) {
                    Msg& m = msgs[*it];
                    bool crosses = false;
                    for (std::size_t i = 0; i < m.path.size(); ++i) {
                        if (m.path[i] == dead && m.arrive_at[i] >= ev.time - 1e-9) {
                            crosses = true;
                            break;
                        }
                    }
                    if (crosses) {
                        m.dropped = true;
                        doom(m.request);
                        it = in_flight.erase(it);
                    } else {
                        ++it;
                    }
                }
                snapshot();
                break;
            }
            case kEmit: {
                const Workload& w = scenario.workloads[ev.payload];
                const std::uint64_t count = ++emissions_done[static_cast<int>(ev.payload)];
                const double next = static_cast<double>(count + 1) * w.period_ms;
                if (next <= duration_ms) schedule_event(next, kEmit, ev.payload);

                const AppIndex& app = apps_by_id.at(w.app_id);
                const std::uint64_t req = requests.size();
                RequestState rs;
                rs.workload = w.id;
                rs.app_index = w.app_id;
                rs.emit = ev.time;
                rs.failed_at_emit = failed_count;
                requests.push_back(rs);

                const MessageSpec& external = app.app->external_message();
                if (alive.count(w.gateway)) {
                    emit_message(req, external.target, external.size_bytes,
                                 external.instructions, w.gateway, ev.time);
                } else {
                    doom(req);
                }
                break;
            }
            case kArrival: {
                Msg& m = msgs[ev.payload];
                if (m.dropped) break;
                in_flight.erase(ev.payload);
                device_state[m.dest].queue.push_back(ev.payload);
                start_next(m.dest, ev.time);
                break;
            }
            case kCompletion: {
                // emit_message below may grow msgs, so copy what we need
                const Msg m = msgs[ev.payload];
                if (m.dropped) break;
                DeviceState& st = device_state[m.dest];
                if (!st.running || *st.running != ev.payload) break;  // stale
                st.running.reset();
                metrics.busy_ms[m.dest] +=
                    static_cast<double>(m.instructions) / infra.device(m.dest).speed;

                {
                    RequestState& rs = requests[m.request];
                    rs.completed.insert(m.service);
                    const AppIndex& app = apps_by_id.at(rs.app_index);
                    if (!rs.doomed && !rs.done &&
                        rs.completed.size() == app.app->services.size()) {
                        rs.done = ev.time;
                    }
                }
                const AppIndex& app = apps_by_id.at(requests[m.request].app_index);
                auto outs = app.out_specs.find(m.service);
                if (outs != app.out_specs.end()) {
                    for (const MessageSpec* spec : outs->second) {
                        emit_message(m.request, spec->target, spec->size_bytes,
                                     spec->instructions, m.dest, ev.time);
                    }
                }
                start_next(m.dest, ev.time);
                break;
            }
        }
    }

    metrics.requests.reserve(requests.size());
    for (const auto& rs : requests) {
        metrics.requests.push_back(
            {rs.workload, rs.app_index, rs.emit, rs.done, rs.failed_at_emit});
    }
    return metrics;
}

double deadline_satisfaction(const MetricsStore& metrics,
                             const std::vector<Application>& apps,
                             const SatisfactionScope& scope) {
    std::map<int, double> deadline;
    for (const auto& app : apps) deadline[app.id] = app.deadline_ms;

    long long total = 0;
    long long satisfied = 0;
    for (const auto& r : metrics.requests) {
        if (scope.workload_id && r.workload != *scope.workload_id) continue;
        if (scope.app_id && r.app != *scope.app_id) continue;
        ++total;
        auto it = deadline.find(r.app);
        if (it == deadline.end()) throw DataError("request for unknown application");
        if (r.done_ms && *r.done_ms - r.emit_ms < it->second) ++satisfied;
    }
    if (total == 0) throw DataError("deadline_satisfaction: empty scope");
    return static_cast<double>(satisfied) / static_cast<double>(total);
}

}  // namespace fogplace
