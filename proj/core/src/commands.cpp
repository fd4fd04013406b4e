#include "fogplace/commands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fogplace/graph.hpp"
#include "fogplace/io.hpp"
#include "fogplace/placement.hpp"
#include "fogplace/sim.hpp"

namespace fogplace {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

std::ifstream open_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

// hop counts (unweighted BFS) from one device over the full graph
std::map<int, int> hop_distances(const InfrastructureGraph& infra, int from) {
    std::map<int, int> dist{{from, 0}};
    std::deque<int> frontier{from};
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (const auto& [v, li] : infra.adjacency(u)) {
            (void)li;
            if (!dist.count(v)) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return dist;
}

}  // namespace

void cmd_generate(const GenerateOptions& options, std::ostream& log) {
    if (options.out_path.empty()) throw std::invalid_argument("generate: missing --out");
    const Scenario scenario = generate_scenario(options.params, options.seed);
    save_scenario(scenario, options.out_path);
    const fs::path params_path = fs::path(options.out_path).parent_path() / "params.json";
    save_params(options.params, options.seed, params_path.string());
    if (!options.dump_edges_path.empty()) {
        std::ostringstream buf;
        write_edge_list(scenario.infra, buf);
        write_file(options.dump_edges_path, buf.str());
    }

    const ScenarioSummary s = scenario_summary(scenario);
    int gateways = 0;
    for (const auto& d : scenario.infra.devices()) {
        if (d.kind == DeviceKind::Gateway) ++gateways;
    }
    log << "scenario written to " << options.out_path << "\n"
        << "  devices: " << scenario.infra.devices().size() - 1 << " fog (" << gateways
        << " gateways) + cloud\n"
        << "  applications: " << scenario.apps.size() << " with " << s.service_count
        << " services (" << format_double(s.total_consumption) << " resource units demanded)\n"
        << "  fog capacity: " << format_double(s.total_fog_capacity) << " resource units\n"
        << "  workloads: " << s.workload_count << " (mean rate "
        << format_double(s.mean_request_rate) << " req/ms)\n";
}

void cmd_place(const PlaceOptions& options, std::ostream& log) {
    if (options.out_path.empty()) throw std::invalid_argument("place: missing --out");
    const Scenario scenario = load_scenario(options.scenario_path);

    if (!options.dump_dendrogram_path.empty() && options.policy != "partition") {
        throw std::invalid_argument("place: --dump-dendrogram needs --policy partition");
    }

    PlacementMatrix matrix;
    if (options.policy == "partition") {
        const Dendrogram dendrogram = girvan_newman(fog_graph(scenario.infra));
        matrix = partition_place(scenario.infra, dendrogram, scenario.apps, scenario.workloads);
        if (!options.dump_dendrogram_path.empty()) {
            std::ostringstream buf;
            write_dendrogram(dendrogram, buf);
            write_file(options.dump_dendrogram_path, buf.str());
        }
    } else if (options.policy == "greedy") {
        matrix = greedy_baseline_place(scenario.infra, scenario.apps, scenario.workloads);
    } else if (options.policy == "cloud-only") {
        matrix = PlacementMatrix::cloud_only(scenario.apps, scenario.infra.cloud_id());
    } else {
        throw std::invalid_argument("place: unknown policy '" + options.policy + "'");
    }

    const FeasibilityReport report = placement_feasible(matrix, scenario.infra, scenario.apps);
    if (!report.ok) throw DataError("place: policy produced an infeasible placement");

    save_placement({options.policy, scenario.seed, matrix}, options.out_path);

    std::map<int, double> consumption;
    for (const auto& app : scenario.apps) {
        for (const auto& s : app.services) consumption[s.id] = s.consumption;
    }
    int instances = 0;
    double units = 0.0;
    for (const auto& [service, device] : matrix.entries()) {
        if (device == scenario.infra.cloud_id()) continue;
        ++instances;
        units += consumption.at(service);
    }
    log << "placement written to " << options.out_path << "\n"
        << "  policy: " << options.policy << "\n"
        << "  fog instances: " << instances << " (" << format_double(units)
        << " resource units)\n";
}

void cmd_simulate(const SimulateOptions& options, std::ostream& log) {
    if (options.out_dir.empty()) throw std::invalid_argument("simulate: missing --out-dir");
    if (options.failures != "all" && options.failures != "none") {
        throw std::invalid_argument("simulate: --failures must be 'all' or 'none'");
    }
    if (!(options.duration_ms > 0.0)) {
        throw std::invalid_argument("simulate: duration must be positive");
    }

    const Scenario scenario = load_scenario(options.scenario_path);
    const PlacementFile placement = load_placement(options.placement_path);

    std::set<int> known_services;
    for (const auto& app : scenario.apps) {
        for (const auto& s : app.services) known_services.insert(s.id);
    }
    for (const auto& [service, device] : placement.matrix.entries()) {
        if (!known_services.count(service)) {
            throw DataError("simulate: placement references service " + std::to_string(service) +
                            " absent from the scenario");
        }
        if (!scenario.infra.has_device(device)) {
            throw DataError("simulate: placement references device " + std::to_string(device) +
                            " absent from the scenario");
        }
    }
    if (!placement_feasible(placement.matrix, scenario.infra, scenario.apps).ok) {
        throw DataError("simulate: placement is infeasible for this scenario");
    }

    FailureSchedule schedule;
    if (options.failures == "all") {
        schedule = build_failure_schedule(scenario.infra, options.duration_ms, options.seed);
    }

    const MetricsStore metrics =
        run_simulation(scenario, placement.matrix, schedule, options.duration_ms);

    fs::create_directories(options.out_dir);
    const fs::path dir(options.out_dir);
    {
        std::ostringstream buf;
        write_requests_csv(metrics, scenario.apps, buf);
        write_file(dir / "requests.csv", buf.str());
    }
    {
        std::ostringstream buf;
        write_availability_csv(metrics, buf);
        write_file(dir / "availability.csv", buf.str());
    }
    {
        std::ostringstream buf;
        write_failures_csv(schedule, buf);
        write_file(dir / "failures.csv", buf.str());
    }
    // the run directory is self-contained for cmd_report
    fs::copy_file(options.scenario_path, dir / "scenario.json",
                  fs::copy_options::overwrite_existing);
    fs::copy_file(options.placement_path, dir / "placement.json",
                  fs::copy_options::overwrite_existing);

    long long done = 0;
    long long satisfied = 0;
    std::map<int, double> deadline;
    for (const auto& app : scenario.apps) deadline[app.id] = app.deadline_ms;
    for (const auto& r : metrics.requests) {
        if (!r.done_ms) continue;
        ++done;
        if (*r.done_ms - r.emit_ms < deadline.at(r.app)) ++satisfied;
    }
    log << "run written to " << options.out_dir << "\n"
        << "  requests: " << metrics.requests.size() << " emitted, " << done << " completed, "
        << satisfied << " within deadline\n"
        << "  failures: " << schedule.events.size() << "\n";
}

namespace {

struct RunData {
    std::string policy;
    Scenario scenario;
    PlacementFile placement;
    std::vector<RequestRow> requests;
    std::vector<AvailabilityRow> availability;
    FailureSchedule failures;
};

RunData load_run(const std::string& dir) {
    const fs::path p(dir);
    RunData run;
    run.scenario = load_scenario((p / "scenario.json").string());
    run.placement = load_placement((p / "placement.json").string());
    run.policy = run.placement.policy;
    {
        auto in = open_file(p / "requests.csv");
        run.requests = read_requests_csv(in);
    }
    {
        auto in = open_file(p / "availability.csv");
        run.availability = read_availability_csv(in);
    }
    {
        auto in = open_file(p / "failures.csv");
        run.failures = read_failures_csv(in);
    }
    return run;
}

}  // namespace

void cmd_report(const ReportOptions& options, std::ostream& log) {
    if (options.run_dirs.empty()) throw std::invalid_argument("report: no run directories");
    if (options.out_dir.empty()) throw std::invalid_argument("report: missing --out-dir");

    std::vector<RunData> runs;
    for (const auto& dir : options.run_dirs) runs.push_back(load_run(dir));

    fs::create_directories(options.out_dir);
    const fs::path out(options.out_dir);

    // qos_evolution.csv: requests bucketed by the number of devices already
    // failed when they were emitted
    {
        std::map<std::pair<int, std::string>, std::pair<long long, long long>> buckets;
        for (const auto& run : runs) {
            for (const auto& r : run.requests) {
                auto& [total, sat] = buckets[{r.failed_count_at_emit, run.policy}];
                ++total;
                if (r.satisfied) ++sat;
            }
        }
        std::ostringstream buf;
        buf << "failed_count,policy,total_requests,satisfied\n";
        for (const auto& [key, counts] : buckets) {
            buf << key.first << ',' << key.second << ',' << counts.first << ',' << counts.second
                << '\n';
        }
        write_file(out / "qos_evolution.csv", buf.str());
    }

    // availability_users.csv: workloads able to reach all their services,
    // plus the hypothetical all-services-in-gateways upper bound (workloads
    // whose own gateway is still alive)
    {
        std::map<std::pair<int, std::string>, std::pair<long long, long long>> rows;
        for (const auto& run : runs) {
            std::map<int, long long> app_workloads;
            for (const auto& w : run.scenario.workloads) ++app_workloads[w.app_id];

            std::map<int, long long> reachable;  // failed_count -> users
            for (const auto& a : run.availability) {
                reachable[a.failed_count] +=
                    std::llround(a.ratio * static_cast<double>(app_workloads.at(a.app)));
            }
            // alive gateways after k failures
            std::set<int> dead;
            std::map<int, long long> bound;
            for (int k = 0; k <= static_cast<int>(run.failures.events.size()); ++k) {
                if (k > 0) dead.insert(run.failures.events[k - 1].device);
                if (!reachable.count(k)) continue;
                long long alive_users = 0;
                for (const auto& w : run.scenario.workloads) {
                    if (!dead.count(w.gateway)) ++alive_users;
                }
                bound[k] = alive_users;
            }
            for (const auto& [k, users] : reachable) {
                auto& row = rows[{k, run.policy}];
                row.first += users;
                row.second += bound.at(k);
            }
        }
        std::ostringstream buf;
        buf << "failed_count,policy,reachable_users,all_in_gateways\n";
        for (const auto& [key, row] : rows) {
            buf << key.first << ',' << key.second << ',' << row.first << ',' << row.second << '\n';
        }
        write_file(out / "availability_users.csv", buf.str());
    }

    // response_times.csv: completed requests grouped by (app, gateway, policy)
    {
        std::map<std::tuple<int, int, std::string>, std::vector<double>> groups;
        for (const auto& run : runs) {
            std::map<int, int> gateway_of;
            for (const auto& w : run.scenario.workloads) gateway_of[w.id] = w.gateway;
            for (const auto& r : run.requests) {
                if (!r.has_done) continue;
                groups[{r.app, gateway_of.at(r.workload), run.policy}].push_back(r.done_ms -
                                                                                 r.emit_ms);
            }
        }
        std::ostringstream buf;
        buf << "app,gateway,policy,mean_ms,p95_ms,n\n";
        for (auto& [key, times] : groups) {
            std::sort(times.begin(), times.end());
            double sum = 0.0;
            for (double t : times) sum += t;
            const double mean = sum / static_cast<double>(times.size());
            // nearest-rank p95
            const auto rank = static_cast<std::size_t>(
                std::ceil(0.95 * static_cast<double>(times.size())));
            const double p95 = times[std::max<std::size_t>(rank, 1) - 1];
            buf << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
                << format_double(mean) << ',' << format_double(p95) << ',' << times.size() << '\n';
        }
        write_file(out / "response_times.csv", buf.str());
    }

    // placement.csv
    {
        std::set<std::tuple<int, int, std::string>> rows;
        for (const auto& run : runs) {
            for (const auto& [service, device] : run.placement.matrix.entries()) {
                rows.insert({service, device, run.policy});
            }
        }
        std::ostringstream buf;
        buf << "service,device,policy\n";
        for (const auto& [service, device, policy] : rows) {
            buf << service << ',' << device << ',' << policy << '\n';
        }
        write_file(out / "placement.csv", buf.str());
    }

    // usage.csv: non-cloud devices; one row set per distinct placement
    {
        std::set<std::tuple<int, std::string, std::string, std::string>> rows;
        for (const auto& run : runs) {
            const auto report =
                placement_feasible(run.placement.matrix, run.scenario.infra, run.scenario.apps);
            for (const auto& u : report.usage) {
                rows.insert({u.device, format_double(u.used), format_double(u.capacity),
                             format_double(u.used / u.capacity)});
            }
        }
        std::ostringstream buf;
        buf << "device,used,capacity,utilization\n";
        for (const auto& [device, used, capacity, util] : rows) {
            buf << device << ',' << used << ',' << capacity << ',' << util << '\n';
        }
        write_file(out / "usage.csv", buf.str());
    }

    // hops.csv: BFS hop count from each workload's gateway to the nearest
    // instance of every service it uses
    {
        std::set<std::tuple<int, int, int, int>> rows;
        for (const auto& run : runs) {
            std::map<int, std::map<int, int>> hops_from;  // gateway -> hop map
            std::map<int, const Application*> app_by_id;
            for (const auto& app : run.scenario.apps) app_by_id[app.id] = &app;
            for (const auto& w : run.scenario.workloads) {
                if (!hops_from.count(w.gateway)) {
                    hops_from[w.gateway] = hop_distances(run.scenario.infra, w.gateway);
                }
                const auto& hops = hops_from[w.gateway];
                for (const auto& s : app_by_id.at(w.app_id)->services) {
                    int best = -1;
                    for (int device : run.placement.matrix.devices_hosting(s.id)) {
                        auto it = hops.find(device);
                        if (it != hops.end() && (best < 0 || it->second < best)) best = it->second;
                    }
                    rows.insert({w.id, w.app_id, s.id, best});
                }
            }
        }
        std::ostringstream buf;
        buf << "workload,app,service,hop_distance_to_nearest_instance\n";
        for (const auto& [workload, app, service, hops] : rows) {
            buf << workload << ',' << app << ',' << service << ',' << hops << '\n';
        }
        write_file(out / "hops.csv", buf.str());
    }

    const auto& first = runs.front().scenario;
    const auto& cloud_link =
        first.infra.link(first.infra.cloud_id(), first.infra.cloud_attachment());
    log << "report written to " << options.out_dir << " (" << runs.size() << " run"
        << (runs.size() == 1 ? "" : "s") << ")\n"
        << "  cloud link (configured, no reference figure): "
        << format_double(cloud_link.propagation_ms) << " ms propagation, "
        << format_double(cloud_link.bandwidth) << " bytes/ms bandwidth\n";
}

}  // namespace fogplace
