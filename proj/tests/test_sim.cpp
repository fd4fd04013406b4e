#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fogplace/graph.hpp"
#include "fogplace/io.hpp"
#include "fogplace/placement.hpp"
#include "fogplace/scenario.hpp"
#include "fogplace/sim.hpp"
#include "oracles.hpp"

using namespace fogplace;

namespace {

// gateway 0 - fog 1 - cloud 2
Scenario one_hop_scenario() {
    Scenario s;
    s.infra = InfrastructureGraph::build(
        {{0, DeviceKind::Gateway, 10.0, 100.0},
         {1, DeviceKind::Fog, 10.0, 100.0},
         {2, DeviceKind::Cloud, 0.0, 1000.0}},
        {{0, 1, 5.0, 75000.0}, {1, 2, 100.0, 75000.0}}, 1);
    Application app;
    app.id = 0;
    app.deadline_ms = 10000.0;
    app.services = {{0, 0, 1.0, true}};
    app.messages = {{kExternalSource, 0, 1500000, 40000}};
    s.apps = {app};
    s.workloads = {{0, 0, 0, 1000.0}};
    s.seed = 1;
    return s;
}

PlacementMatrix single_instance(const Scenario& s, int device) {
    // deliberately no cloud rows: fixtures that must lose service entirely
    PlacementMatrix p;
    for (const auto& app : s.apps) {
        for (const auto& svc : app.services) p.add(svc.id, device);
    }
    return p;
}

}  // namespace

TEST_CASE("failure schedule") {
    const auto s = one_hop_scenario();

    SUBCASE("single fog device fails at the midpoint") {
        // infra has two non-cloud devices; shrink to check the midpoint rule
        const auto infra = InfrastructureGraph::build(
            {{0, DeviceKind::Gateway, 10.0, 100.0}, {1, DeviceKind::Cloud, 0.0, 1000.0}},
            {{0, 1, 100.0, 75000.0}}, 0);
        const auto schedule = build_failure_schedule(infra, 100.0, 7);
        REQUIRE(schedule.events.size() == 1);
        CHECK(schedule.events[0].time_ms == doctest::Approx(50.0));
        CHECK(schedule.events[0].device == 0);
    }
    SUBCASE("all non-cloud devices covered exactly once, evenly spaced") {
        const auto scenario = generate_scenario(ExperimentParams{.n_devices = 100}, 3);
        const auto schedule = build_failure_schedule(scenario.infra, 10100.0, 3);
        REQUIRE(schedule.events.size() == 100);
        std::set<int> devices;
        for (std::size_t i = 0; i < schedule.events.size(); ++i) {
            devices.insert(schedule.events[i].device);
            CHECK(schedule.events[i].time_ms ==
                  doctest::Approx(10100.0 / 101.0 * static_cast<double>(i + 1)));
            CHECK(schedule.events[i].device != scenario.infra.cloud_id());
        }
        CHECK(devices.size() == 100);
    }
    SUBCASE("same seed, same order") {
        const auto a = build_failure_schedule(s.infra, 1000.0, 9);
        const auto b = build_failure_schedule(s.infra, 1000.0, 9);
        REQUIRE(a.events.size() == b.events.size());
        for (std::size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].device == b.events[i].device);
        }
    }
    SUBCASE("duration guard") {
        CHECK_THROWS_AS(build_failure_schedule(s.infra, 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("zero-failure single-service runs reproduce the closed form") {
    SUBCASE("service on the user's own gateway") {
        const auto s = one_hop_scenario();
        const auto p = single_instance(s, 0);
        const auto metrics = run_simulation(s, p, {}, 3000.0);
        REQUIRE(metrics.requests.size() == 3);  // t = 1000, 2000, 3000
        for (const auto& r : metrics.requests) {
            REQUIRE(r.done_ms);
            CHECK(*r.done_ms - r.emit_ms == doctest::Approx(400.0).epsilon(1e-12));
        }
    }
    SUBCASE("service one hop away adds the network delay") {
        const auto s = one_hop_scenario();
        const auto p = single_instance(s, 1);
        const auto metrics = run_simulation(s, p, {}, 3000.0);
        REQUIRE(metrics.requests.size() == 3);
        for (const auto& r : metrics.requests) {
            REQUIRE(r.done_ms);
            CHECK(*r.done_ms - r.emit_ms == doctest::Approx(425.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("losing the only host abandons every later request") {
    auto s = one_hop_scenario();
    const auto p = single_instance(s, 1);  // no cloud fallback in this fixture
    FailureSchedule schedule{{{10.0, 1}}};
    const auto metrics = run_simulation(s, p, schedule, 5000.0);
    REQUIRE(metrics.requests.size() == 5);
    for (const auto& r : metrics.requests) CHECK_FALSE(r.done_ms);
    // availability collapses in the post-failure snapshot
    REQUIRE(metrics.availability.size() == 2);
    CHECK(metrics.availability[0].ratio == 1.0);
    CHECK(metrics.availability[1].ratio == 0.0);
}

TEST_CASE("fifo queueing delays the second concurrent request") {
    auto s = one_hop_scenario();
    s.workloads = {{0, 0, 0, 1000.0}, {1, 0, 0, 1000.0}};  // identical emit times
    const auto p = single_instance(s, 0);
    const auto metrics = run_simulation(s, p, {}, 1000.0);
    REQUIRE(metrics.requests.size() == 2);
    // both emitted at t=1000 on one device: 400ms each, served in workload order
    CHECK(*metrics.requests[0].done_ms - metrics.requests[0].emit_ms ==
          doctest::Approx(400.0));
    CHECK(*metrics.requests[1].done_ms - metrics.requests[1].emit_ms ==
          doctest::Approx(800.0));
    CHECK(metrics.busy_ms.at(0) == doctest::Approx(800.0));
}

TEST_CASE("multi-service chain across devices matches the trace oracle") {
    Scenario s;
    s.infra = InfrastructureGraph::build(
        {{0, DeviceKind::Gateway, 10.0, 100.0},
         {1, DeviceKind::Fog, 10.0, 250.0},
         {2, DeviceKind::Fog, 10.0, 500.0},
         {3, DeviceKind::Cloud, 0.0, 1000.0}},
        {{0, 1, 5.0, 75000.0}, {1, 2, 7.0, 60000.0}, {2, 3, 100.0, 75000.0}}, 2);
    Application app;
    app.id = 0;
    app.deadline_ms = 100000.0;
    app.services = {{0, 0, 1.0, true}, {1, 0, 1.0, false}, {2, 0, 1.0, false}};
    app.messages = {{kExternalSource, 0, 2000000, 30000},
                    {0, 1, 1700000, 45000},
                    {1, 2, 2500000, 55000}};
    s.apps = {app};
    s.workloads = {{0, 0, 0, 5000.0}};

    const std::map<int, int> host{{0, 0}, {1, 1}, {2, 2}};
    PlacementMatrix p;
    for (const auto& [svc, dev] : host) p.add(svc, dev);

    const auto metrics = run_simulation(s, p, {}, 5000.0);
    REQUIRE(metrics.requests.size() == 1);
    REQUIRE(metrics.requests[0].done_ms);
    const double expected = oracle::trace_response_time(s.infra, app, host, 0);
    CHECK(*metrics.requests[0].done_ms - metrics.requests[0].emit_ms ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("availability snapshot") {
    const auto scenario = generate_scenario(ExperimentParams{.n_devices = 20, .n_apps = 3}, 5);
    const auto p = PlacementMatrix::cloud_only(scenario.apps, scenario.infra.cloud_id());

    SUBCASE("everything reachable while nothing failed") {
        const auto ratios = availability_snapshot(scenario.infra, all_alive(scenario.infra), p,
                                                  scenario.workloads, scenario.apps);
        for (const auto& [app, ratio] : ratios) {
            (void)app;
            CHECK(ratio == 1.0);
        }
    }
    SUBCASE("cutting the cloud attachment kills cloud-only availability") {
        auto alive = all_alive(scenario.infra);
        alive.erase(scenario.infra.cloud_attachment());
        const auto ratios =
            availability_snapshot(scenario.infra, alive, p, scenario.workloads, scenario.apps);
        for (const auto& [app, ratio] : ratios) {
            (void)app;
            CHECK(ratio == 0.0);
        }
    }
    SUBCASE("dead gateways count as unable") {
        auto alive = all_alive(scenario.infra);
        for (const auto& d : scenario.infra.devices()) {
            if (d.kind == DeviceKind::Gateway) alive.erase(d.id);
        }
        const auto ratios =
            availability_snapshot(scenario.infra, alive, p, scenario.workloads, scenario.apps);
        for (const auto& [app, ratio] : ratios) {
            (void)app;
            CHECK(ratio == 0.0);
        }
    }
}

TEST_CASE("deadline satisfaction scopes and strictness") {
    MetricsStore metrics;
    std::vector<Application> apps(1);
    apps[0].id = 0;
    apps[0].deadline_ms = 300.0;
    // 400ms responses against a 300ms deadline: all late
    metrics.requests = {{0, 0, 100.0, 500.0, 0}, {0, 0, 200.0, 600.0, 0}};
    CHECK(deadline_satisfaction(metrics, apps, {}) == 0.0);

    apps[0].deadline_ms = 50000.0;
    CHECK(deadline_satisfaction(metrics, apps, {}) == 1.0);

    // 3 of 4 satisfied, one abandoned
    metrics.requests = {{0, 0, 0.0, 100.0, 0},
                        {0, 0, 0.0, 100.0, 0},
                        {1, 0, 0.0, 100.0, 0},
                        {1, 0, 0.0, std::nullopt, 0}};
    CHECK(deadline_satisfaction(metrics, apps, {}) == 0.75);
    CHECK(deadline_satisfaction(metrics, apps, {.workload_id = 0}) == 1.0);
    CHECK(deadline_satisfaction(metrics, apps, {.workload_id = 1}) == 0.5);
    CHECK(deadline_satisfaction(metrics, apps, {.app_id = 0}) == 0.75);
    CHECK_THROWS_AS(deadline_satisfaction(metrics, apps, SatisfactionScope{.workload_id = 7}), DataError);

    // boundary: exactly-at-deadline counts as unsatisfied
    apps[0].deadline_ms = 100.0;
    metrics.requests = {{0, 0, 0.0, 100.0, 0}};
    CHECK(deadline_satisfaction(metrics, apps, {}) == 0.0);
}

TEST_CASE("full-failure run invariants on a generated scenario") {
    const auto scenario =
        generate_scenario(ExperimentParams{.n_devices = 25, .n_apps = 4}, 11);
    const auto dendrogram = girvan_newman(fog_graph(scenario.infra));
    const auto p =
        partition_place(scenario.infra, dendrogram, scenario.apps, scenario.workloads);
    const auto schedule = build_failure_schedule(scenario.infra, 6000.0, 11);
    const auto metrics = run_simulation(scenario, p, schedule, 6000.0);

    SUBCASE("snapshot count is failures plus one") {
        std::set<int> counts;
        for (const auto& row : metrics.availability) counts.insert(row.failed_count);
        CHECK(counts.size() == schedule.events.size() + 1);
        CHECK(counts.count(0) == 1);
    }
    SUBCASE("availability is non-increasing per app") {
        std::map<int, double> last;
        for (const auto& row : metrics.availability) {
            if (last.count(row.app)) CHECK(row.ratio <= last[row.app] + 1e-12);
            last[row.app] = row.ratio;
        }
    }
    SUBCASE("requests conserve: emitted = satisfied + late + incomplete") {
        std::map<int, double> deadline;
        for (const auto& app : scenario.apps) deadline[app.id] = app.deadline_ms;
        long long satisfied = 0, late = 0, incomplete = 0;
        for (const auto& r : metrics.requests) {
            if (!r.done_ms) {
                ++incomplete;
            } else if (*r.done_ms - r.emit_ms < deadline.at(r.app)) {
                ++satisfied;
            } else {
                ++late;
            }
        }
        CHECK(satisfied + late + incomplete == static_cast<long long>(metrics.requests.size()));
        CHECK(metrics.requests.size() > 0);
    }
    SUBCASE("identical runs produce identical metrics") {
        const auto again = run_simulation(scenario, p, schedule, 6000.0);
        CHECK(again == metrics);
        std::ostringstream a, b;
        write_requests_csv(metrics, scenario.apps, a);
        write_requests_csv(again, scenario.apps, b);
        CHECK(a.str() == b.str());
    }
    SUBCASE("failed_count_at_emit matches the schedule position") {
        for (const auto& r : metrics.requests) {
            int expected = 0;
            for (const auto& f : schedule.events) {
                if (f.time_ms <= r.emit_ms) ++expected;
            }
            CHECK(r.failed_count_at_emit == expected);
        }
    }
}
