#include "fogplace/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fogplace {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw DataError("not a number: '" + text + "'");
    }
    return value;
}

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write failed: " + path);
}

template <typename T>
T get_field(const json& j, const char* key) {
    if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("bad field '") + key + "': " + e.what());
    }
}

}  // namespace

void save_scenario(const Scenario& scenario, const std::string& path) {
    json j;
    j["seed"] = scenario.seed;
    j["cloud_attachment"] = scenario.infra.cloud_attachment();

    json devices = json::array();
    for (const auto& d : scenario.infra.devices()) {
        json jd;
        jd["id"] = d.id;
        jd["kind"] = to_string(d.kind);
        if (d.is_cloud()) {
            jd["resources"] = nullptr;  // unbounded
        } else {
            jd["resources"] = d.resources;
        }
        jd["speed"] = d.speed;
        devices.push_back(jd);
    }
    j["devices"] = devices;

    json links = json::array();
    for (const auto& l : scenario.infra.links()) {
        json jl;
        jl["endpoints"] = {l.a, l.b};
        jl["propagation"] = l.propagation_ms;
        jl["bandwidth"] = l.bandwidth;
        links.push_back(jl);
    }
    j["links"] = links;

    json apps = json::array();
    for (const auto& app : scenario.apps) {
        json ja;
        ja["id"] = app.id;
        ja["deadline"] = app.deadline_ms;
        json services = json::array();
        for (const auto& s : app.services) {
            services.push_back({{"id", s.id},
                                {"app_id", s.app_id},
                                {"consumption", s.consumption},
                                {"is_entry_point", s.is_entry_point}});
        }
        ja["services"] = services;
        json messages = json::array();
        for (const auto& m : app.messages) {
            json jm;
            if (m.is_external()) {
                jm["source"] = nullptr;
            } else {
                jm["source"] = m.source;
            }
            jm["target"] = m.target;
            jm["size"] = m.size_bytes;
            jm["instructions"] = m.instructions;
            messages.push_back(jm);
        }
        ja["messages"] = messages;
        apps.push_back(ja);
    }
    j["applications"] = apps;

    json workloads = json::array();
    for (const auto& w : scenario.workloads) {
        workloads.push_back(
            {{"id", w.id}, {"gateway", w.gateway}, {"app_id", w.app_id}, {"period", w.period_ms}});
    }
    j["workloads"] = workloads;

    write_text_file(path, j.dump(2) + "\n");
}

Scenario load_scenario(const std::string& path) {
    const json j = load_json_file(path);

    Scenario scenario;
    scenario.seed = get_field<std::uint64_t>(j, "seed");

    std::vector<Device> devices;
    for (const auto& jd : get_field<json>(j, "devices")) {
        Device d;
        d.id = get_field<int>(jd, "id");
        d.kind = device_kind_from_string(get_field<std::string>(jd, "kind"));
        if (d.kind == DeviceKind::Cloud) {
            d.resources = kUnboundedResources;
        } else {
            d.resources = get_field<double>(jd, "resources");
        }
        d.speed = get_field<double>(jd, "speed");
        devices.push_back(d);
    }

    std::vector<NetworkLink> links;
    for (const auto& jl : get_field<json>(j, "links")) {
        NetworkLink l;
        const auto endpoints = get_field<std::vector<int>>(jl, "endpoints");
        if (endpoints.size() != 2) throw DataError("link endpoints must be a pair");
        l.a = endpoints[0];
        l.b = endpoints[1];
        l.propagation_ms = get_field<double>(jl, "propagation");
        l.bandwidth = get_field<double>(jl, "bandwidth");
        links.push_back(l);
    }

    scenario.infra = InfrastructureGraph::build(std::move(devices), std::move(links),
                                                get_field<int>(j, "cloud_attachment"));

    for (const auto& ja : get_field<json>(j, "applications")) {
        Application app;
        app.id = get_field<int>(ja, "id");
        app.deadline_ms = get_field<double>(ja, "deadline");
        for (const auto& js : get_field<json>(ja, "services")) {
            Service s;
            s.id = get_field<int>(js, "id");
            s.app_id = get_field<int>(js, "app_id");
            s.consumption = get_field<double>(js, "consumption");
            s.is_entry_point = get_field<bool>(js, "is_entry_point");
            app.services.push_back(s);
        }
        for (const auto& jm : get_field<json>(ja, "messages")) {
            MessageSpec m;
            if (!jm.contains("source")) throw DataError("missing field 'source'");
            m.source = jm.at("source").is_null() ? kExternalSource : jm.at("source").get<int>();
            m.target = get_field<int>(jm, "target");
            m.size_bytes = get_field<std::int64_t>(jm, "size");
            m.instructions = get_field<std::int64_t>(jm, "instructions");
            app.messages.push_back(m);
        }
        scenario.apps.push_back(std::move(app));
    }

    for (const auto& jw : get_field<json>(j, "workloads")) {
        Workload w;
        w.id = get_field<int>(jw, "id");
        w.gateway = get_field<int>(jw, "gateway");
        w.app_id = get_field<int>(jw, "app_id");
        w.period_ms = get_field<double>(jw, "period");
        scenario.workloads.push_back(w);
    }

    const auto problems = validate_scenario(scenario);
    if (!problems.empty()) {
        std::string msg = path + ": invalid scenario";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }
    return scenario;
}

void save_placement(const PlacementFile& placement, const std::string& path) {
    json j;
    j["policy"] = placement.policy;
    j["seed"] = placement.seed;
    json entries = json::array();
    for (const auto& [service, device] : placement.matrix.entries()) {
        entries.push_back({{"service", service}, {"device", device}});
    }
    j["entries"] = entries;
    write_text_file(path, j.dump(2) + "\n");
}

PlacementFile load_placement(const std::string& path) {
    const json j = load_json_file(path);
    PlacementFile p;
    p.policy = get_field<std::string>(j, "policy");
    p.seed = get_field<std::uint64_t>(j, "seed");
    for (const auto& je : get_field<json>(j, "entries")) {
        p.matrix.add(get_field<int>(je, "service"), get_field<int>(je, "device"));
    }
    return p;
}

void save_params(const ExperimentParams& params, std::uint64_t seed, const std::string& path) {
    const auto range = [](const IntRange& r) {
        return json{{"min", r.min}, {"max", r.max}};
    };
    json j;
    j["seed"] = seed;
    j["n_devices"] = params.n_devices;
    j["gateway_fraction"] = params.gateway_fraction;
    j["ba_m"] = params.ba_m;
    j["n_apps"] = params.n_apps;
    j["link_propagation_ms"] = params.link_propagation_ms;
    j["link_bandwidth"] = params.link_bandwidth;
    j["device_resources"] = range(params.device_resources);
    j["device_speed"] = range(params.device_speed);
    j["app_deadline"] = range(params.app_deadline);
    j["services_per_app"] = range(params.services_per_app);
    j["service_consumption"] = range(params.service_consumption);
    j["message_instructions"] = range(params.message_instructions);
    j["message_size"] = range(params.message_size);
    j["workload_period"] = json{{"min", params.workload_period.min},
                                {"max", params.workload_period.max}};
    j["popularity"] = params.popularity;
    j["cloud_propagation_ms"] = params.cloud_propagation_ms;
    j["cloud_bandwidth"] = params.cloud_bandwidth;
    j["cloud_speed"] = params.cloud_speed;
    write_text_file(path, j.dump(2) + "\n");
}

void write_requests_csv(const MetricsStore& metrics, const std::vector<Application>& apps,
                        std::ostream& out) {
    std::map<int, double> deadline;
    for (const auto& app : apps) deadline[app.id] = app.deadline_ms;

    out << "workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit\n";
    for (const auto& r : metrics.requests) {
        out << r.workload << ',' << r.app << ',' << format_double(r.emit_ms) << ',';
        bool satisfied = false;
        if (r.done_ms) {
            out << format_double(*r.done_ms);
            auto it = deadline.find(r.app);
            satisfied = it != deadline.end() && *r.done_ms - r.emit_ms < it->second;
        } else {
            out << "NA";
        }
        out << ',' << (satisfied ? 1 : 0) << ',' << r.failed_count_at_emit << '\n';
    }
}

void write_availability_csv(const MetricsStore& metrics, std::ostream& out) {
    out << "failed_count,app,ratio\n";
    for (const auto& row : metrics.availability) {
        out << row.failed_count << ',' << row.app << ',' << format_double(row.ratio) << '\n';
    }
}

void write_failures_csv(const FailureSchedule& schedule, std::ostream& out) {
    out << "index,time_ms,device\n";
    for (std::size_t i = 0; i < schedule.events.size(); ++i) {
        out << i << ',' << format_double(schedule.events[i].time_ms) << ','
            << schedule.events[i].device << '\n';
    }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

int parse_int(const std::string& text) {
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw DataError("not an integer: '" + text + "'");
    }
    return value;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& header,
                                               std::size_t fields) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw DataError("bad CSV header; expected '" + header + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split_csv_line(line);
        if (row.size() != fields) throw DataError("bad CSV row: '" + line + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<RequestRow> read_requests_csv(std::istream& in) {
    std::vector<RequestRow> out;
    for (const auto& row :
         read_csv(in, "workload,app,emit_ms,done_ms,satisfied,failed_count_at_emit", 6)) {
        RequestRow r;
        r.workload = parse_int(row[0]);
        r.app = parse_int(row[1]);
        r.emit_ms = parse_double(row[2]);
        if (row[3] != "NA") {
            r.has_done = true;
            r.done_ms = parse_double(row[3]);
        }
        r.satisfied = parse_int(row[4]) != 0;
        r.failed_count_at_emit = parse_int(row[5]);
        out.push_back(r);
    }
    return out;
}

std::vector<AvailabilityRow> read_availability_csv(std::istream& in) {
    std::vector<AvailabilityRow> out;
    for (const auto& row : read_csv(in, "failed_count,app,ratio", 3)) {
        out.push_back({parse_int(row[0]), parse_int(row[1]), parse_double(row[2])});
    }
    return out;
}

FailureSchedule read_failures_csv(std::istream& in) {
    FailureSchedule out;
    for (const auto& row : read_csv(in, "index,time_ms,device", 3)) {
        out.events.push_back({parse_double(row[1]), parse_int(row[2])});
    }
    return out;
}

void write_edge_list(const InfrastructureGraph& infra, std::ostream& out) {
    for (const auto& l : infra.links()) {
        out << l.a << ' ' << l.b << ' ' << format_double(l.propagation_ms) << ' '
            << format_double(l.bandwidth) << '\n';
    }
}

std::vector<EdgeListEntry> read_edge_list(std::istream& in) {
    std::vector<EdgeListEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        EdgeListEntry e;
        std::string pr, bw;
        if (!(fields >> e.u >> e.v >> pr >> bw)) {
            throw DataError("bad edge list line: '" + line + "'");
        }
        e.propagation_ms = parse_double(pr);
        e.bandwidth = parse_double(bw);
        out.push_back(e);
    }
    return out;
}

void write_dendrogram(const Dendrogram& dendrogram, std::ostream& out) {
    if (dendrogram.communities.empty()) return;
    // depth-first from the root, children in stored order
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        const auto& c = dendrogram.communities[idx];
        for (int i = 0; i < c.depth; ++i) out << "  ";
        out << c.depth << ':';
        for (int id : c.members) out << ' ' << id;
        out << '\n';
        for (auto it = c.children.rbegin(); it != c.children.rend(); ++it) stack.push_back(*it);
    }
}

}  // namespace fogplace
