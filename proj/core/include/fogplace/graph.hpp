#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fogplace/model.hpp"

namespace fogplace {

// Small undirected graph over integer node ids; used for community
// detection, centrality and the topology generators.
class UndirectedGraph {
public:
    void add_node(int id);
    void add_edge(int a, int b);  // endpoints are added as nodes; no self-loops/duplicates
    void remove_edge(int a, int b);

    bool has_node(int id) const { return adjacency_.count(id) != 0; }
    bool has_edge(int a, int b) const;
    const std::vector<int>& neighbors(int id) const;  // ascending

    std::vector<int> nodes() const;                    // ascending
    std::vector<std::pair<int, int>> edges() const;    // (a < b), ascending
    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool connected() const;
    std::vector<int> component_of(int id) const;  // sorted
    bool same_component(int a, int b) const;

private:
    std::map<int, std::vector<int>> adjacency_;
    std::size_t edge_count_ = 0;
};

// The infrastructure without the cloud device (community detection and
// gateway selection operate on the fog layer only).
UndirectedGraph fog_graph(const InfrastructureGraph& infra);

// Betweenness over unweighted hop-count shortest paths, summed over
// unordered node pairs.
std::map<std::pair<int, int>, double> edge_betweenness(const UndirectedGraph& g);
std::map<int, double> node_betweenness(const UndirectedGraph& g);

// Community hierarchy from iterative max-betweenness edge removal. Depth
// counts split events: children appear one level below the community they
// split from.
struct Dendrogram {
    struct Community {
        std::vector<int> members;  // sorted device ids
        int depth = 0;
        std::vector<std::size_t> children;  // indices into communities
    };
    std::vector<Community> communities;  // [0] is the root (all devices)
};

Dendrogram girvan_newman(const UndirectedGraph& g);

// All communities containing the device with at least two members, deepest
// first (ties: smaller community, then smaller first member). Returns
// indices into dendrogram.communities.
std::vector<std::size_t> communities_for_device(const Dendrogram& dendrogram, int device);

// Reflexive set of services reachable from root along request edges.
struct ClosureSet {
    int root = 0;
    std::set<int> members;
};

ClosureSet transitive_closure(const Application& app, int service);

struct Route {
    std::vector<int> path;  // device ids, src first
    double delay_ms = 0.0;  // sum of per-hop network delays
};

// Minimum-delay path over alive devices for a packet of the given size.
// Ties resolve to the lexicographically smallest device-id sequence.
// nullopt when no alive path exists (or an endpoint is dead).
std::optional<Route> min_delay_path(const InfrastructureGraph& infra,
                                    const std::set<int>& alive,
                                    int src, int dst, std::int64_t size_bytes);

// Dijkstra distances from src over alive devices; absent key = unreachable.
std::map<int, double> min_delays_from(const InfrastructureGraph& infra,
                                      const std::set<int>& alive,
                                      int src, std::int64_t size_bytes);

std::set<int> all_alive(const InfrastructureGraph& infra);

// Preferential-attachment topology: starts from a clique of m+1 nodes, then
// every new node attaches m edges to distinct existing nodes with
// degree-proportional probability. Deterministic per seed.
UndirectedGraph generate_barabasi_albert(int n, int m, std::uint64_t seed);

// Growing-network service graph: node 0 is the entry point; node k >= 1
// receives a directed edge from a uniformly chosen existing node.
struct DirectedTree {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;  // (parent, child), child ascending
};

DirectedTree generate_gn_application(int n_services, std::uint64_t seed);

// The floor(fraction*n) nodes with lowest node betweenness (ties: smaller
// id), never including `exclude` (the cloud attachment point).
std::vector<int> select_gateways(const UndirectedGraph& g, double fraction,
                                 std::optional<int> exclude = std::nullopt);

}  // namespace fogplace
