#include "fogplace/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "fogplace/rng.hpp"

namespace fogplace {

void UndirectedGraph::add_node(int id) { adjacency_[id]; }

void UndirectedGraph::add_edge(int a, int b) {
    if (a == b) throw DataError("graph: self-loop on node " + std::to_string(a));
    if (has_edge(a, b)) {
        throw DataError("graph: duplicate edge " + std::to_string(a) + "-" + std::to_string(b));
    }
    auto& na = adjacency_[a];
    auto& nb = adjacency_[b];
    na.insert(std::lower_bound(na.begin(), na.end(), b), b);
    nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
    ++edge_count_;
}

void UndirectedGraph::remove_edge(int a, int b) {
    if (!has_edge(a, b)) {
        throw DataError("graph: no edge " + std::to_string(a) + "-" + std::to_string(b));
    }
    auto& na = adjacency_[a];
    auto& nb = adjacency_[b];
    na.erase(std::lower_bound(na.begin(), na.end(), b));
    nb.erase(std::lower_bound(nb.begin(), nb.end(), a));
    --edge_count_;
}

bool UndirectedGraph::has_edge(int a, int b) const {
    auto it = adjacency_.find(a);
    if (it == adjacency_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), b);
}

const std::vector<int>& UndirectedGraph::neighbors(int id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) throw DataError("graph: unknown node " + std::to_string(id));
    return it->second;
}

std::vector<int> UndirectedGraph::nodes() const {
    std::vector<int> out;
    out.reserve(adjacency_.size());
    for (const auto& [id, nbrs] : adjacency_) {
        (void)nbrs;
        out.push_back(id);
    }
    return out;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (const auto& [u, nbrs] : adjacency_) {
        for (int v : nbrs) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

std::vector<int> UndirectedGraph::component_of(int id) const {
    if (!has_node(id)) throw DataError("graph: unknown node " + std::to_string(id));
    std::set<int> seen{id};
    std::deque<int> frontier{id};
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (int v : adjacency_.at(u)) {
            if (seen.insert(v).second) frontier.push_back(v);
        }
    }
    return {seen.begin(), seen.end()};
}

bool UndirectedGraph::same_component(int a, int b) const {
    const auto comp = component_of(a);
    return std::binary_search(comp.begin(), comp.end(), b);
}

bool UndirectedGraph::connected() const {
    if (adjacency_.empty()) return true;
    return component_of(adjacency_.begin()->first).size() == adjacency_.size();
}

UndirectedGraph fog_graph(const InfrastructureGraph& infra) {
    UndirectedGraph g;
    for (const auto& d : infra.devices()) {
        if (!d.is_cloud()) g.add_node(d.id);
    }
    for (const auto& l : infra.links()) {
        if (l.a == infra.cloud_id() || l.b == infra.cloud_id()) continue;
        g.add_edge(l.a, l.b);
    }
    return g;
}

namespace {

// Brandes accumulation shared by edge and node betweenness. Scores are
// halved at the end so that every unordered pair contributes once.
struct BrandesResult {
    std::map<std::pair<int, int>, double> edge_scores;
    std::map<int, double> node_scores;
};

BrandesResult brandes(const UndirectedGraph& g, bool want_edges, bool want_nodes) {
    const std::vector<int> ids = g.nodes();
    const std::size_t n = ids.size();
    std::map<int, int> index;
    for (std::size_t i = 0; i < n; ++i) index[ids[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int nb : g.neighbors(ids[i])) adj[i].push_back(index[nb]);
    }

    BrandesResult r;
    if (want_edges) {
        for (const auto& e : g.edges()) r.edge_scores[e] = 0.0;
    }
    if (want_nodes) {
        for (int id : ids) r.node_scores[id] = 0.0;
    }

    std::vector<double> sigma(n), delta(n);
    std::vector<int> dist(n);
    std::vector<std::vector<int>> preds(n);
    std::vector<int> order;
    order.reserve(n);

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        for (auto& p : preds) p.clear();
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        std::deque<int> queue{static_cast<int>(s)};
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (int w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const int w = *it;
            for (int v : preds[w]) {
                const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                delta[v] += c;
                if (want_edges) {
                    const int a = std::min(ids[v], ids[w]);
                    const int b = std::max(ids[v], ids[w]);
                    r.edge_scores[{a, b}] += c;
                }
            }
            if (want_nodes && w != static_cast<int>(s)) r.node_scores[ids[w]] += delta[w];
        }
    }

    for (auto& [e, v] : r.edge_scores) {
        (void)e;
        v /= 2.0;
    }
    for (auto& [id, v] : r.node_scores) {
        (void)id;
        v /= 2.0;
    }
    return r;
}

}  // namespace

std::map<std::pair<int, int>, double> edge_betweenness(const UndirectedGraph& g) {
    if (g.node_count() == 0) throw std::invalid_argument("edge_betweenness: empty graph");
    return brandes(g, true, false).edge_scores;
}

std::map<int, double> node_betweenness(const UndirectedGraph& g) {
    if (g.node_count() == 0) throw std::invalid_argument("node_betweenness: empty graph");
    return brandes(g, false, true).node_scores;
}

Dendrogram girvan_newman(const UndirectedGraph& input) {
    if (input.node_count() == 0) throw std::invalid_argument("girvan_newman: empty graph");
    if (!input.connected()) throw DataError("girvan_newman: graph must be connected");

    UndirectedGraph g = input;
    Dendrogram d;
    d.communities.push_back({g.nodes(), 0, {}});
    std::map<int, std::size_t> community_of;
    for (int id : g.nodes()) community_of[id] = 0;

    while (g.edge_count() > 0) {
        const auto scores = edge_betweenness(g);
        // max score; scores within a relative epsilon count as tied and the
        // lexicographically smallest edge wins (map order is ascending)
        double best = -1.0;
        std::pair<int, int> edge{};
        for (const auto& [e, s] : scores) {
            if (s > best + 1e-7 * std::max(1.0, std::abs(best))) {
                best = s;
                edge = e;
            }
        }
        g.remove_edge(edge.first, edge.second);

        if (!g.same_component(edge.first, edge.second)) {
            const std::size_t parent = community_of.at(edge.first);
            std::vector<int> first = g.component_of(edge.first);
            std::vector<int> second = g.component_of(edge.second);
            if (first.front() > second.front()) std::swap(first, second);
            const int depth = d.communities[parent].depth + 1;
            for (const auto* members : {&first, &second}) {
                const std::size_t idx = d.communities.size();
                for (int id : *members) community_of[id] = idx;
                d.communities[parent].children.push_back(idx);
                d.communities.push_back({*members, depth, {}});
            }
        }
    }
    return d;
}

std::vector<std::size_t> communities_for_device(const Dendrogram& dendrogram, int device) {
    if (dendrogram.communities.empty() ||
        !std::binary_search(dendrogram.communities[0].members.begin(),
                            dendrogram.communities[0].members.end(), device)) {
        throw DataError("unknown device " + std::to_string(device) + " in dendrogram");
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dendrogram.communities.size(); ++i) {
        const auto& c = dendrogram.communities[i];
        if (c.members.size() < 2) continue;
        if (std::binary_search(c.members.begin(), c.members.end(), device)) out.push_back(i);
    }
    std::sort(out.begin(), out.end(), [&](std::size_t x, std::size_t y) {
        const auto& cx = dendrogram.communities[x];
        const auto& cy = dendrogram.communities[y];
        if (cx.depth != cy.depth) return cx.depth > cy.depth;
        if (cx.members.size() != cy.members.size()) return cx.members.size() < cy.members.size();
        return cx.members.front() < cy.members.front();
    });
    return out;
}

ClosureSet transitive_closure(const Application& app, int service) {
    if (!app.find_service(service)) {
        throw DataError("application " + std::to_string(app.id) + " has no service " +
                        std::to_string(service));
    }
    std::map<int, std::vector<int>> edges;
    for (const auto& m : app.messages) {
        if (!m.is_external()) edges[m.source].push_back(m.target);
    }
    ClosureSet closure;
    closure.root = service;
    closure.members.insert(service);
    std::deque<int> frontier{service};
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        for (int v : edges[u]) {
            if (closure.members.insert(v).second) frontier.push_back(v);
        }
    }
    return closure;
}

std::set<int> all_alive(const InfrastructureGraph& infra) {
    std::set<int> alive;
    for (const auto& d : infra.devices()) alive.insert(d.id);
    return alive;
}

std::map<int, double> min_delays_from(const InfrastructureGraph& infra,
                                      const std::set<int>& alive,
                                      int src, std::int64_t size_bytes) {
    std::map<int, double> dist;
    if (!alive.count(src)) return dist;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (const auto& [v, li] : infra.adjacency(u)) {
            if (!alive.count(v)) continue;
            const double nd = d + network_delay(infra.links()[li], size_bytes);
            auto it = dist.find(v);
            if (it == dist.end() || nd < it->second) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

std::optional<Route> min_delay_path(const InfrastructureGraph& infra,
                                    const std::set<int>& alive,
                                    int src, int dst, std::int64_t size_bytes) {
    if (!alive.count(src) || !alive.count(dst)) return std::nullopt;
    if (src == dst) return Route{{src}, 0.0};

    const auto from_src = min_delays_from(infra, alive, src, size_bytes);
    auto it = from_src.find(dst);
    if (it == from_src.end()) return std::nullopt;
    const double total = it->second;
    const auto to_dst = min_delays_from(infra, alive, dst, size_bytes);
    const double eps = 1e-9 * std::max(1.0, total);

    // walk the shortest-path DAG picking the smallest next id each step;
    // the visited guard protects against zero-weight edges
    Route route;
    route.path.push_back(src);
    std::set<int> visited{src};
    int u = src;
    while (u != dst) {
        int next = -1;
        double hop = 0.0;
        for (const auto& [v, li] : infra.adjacency(u)) {
            if (!alive.count(v) || visited.count(v)) continue;
            auto dv = to_dst.find(v);
            if (dv == to_dst.end()) continue;
            const double w = network_delay(infra.links()[li], size_bytes);
            if (std::abs(from_src.at(u) + w + dv->second - total) <= eps) {
                next = v;  // adjacency is ascending, first match is smallest
                hop = w;
                break;
            }
        }
        if (next < 0) return std::nullopt;
        route.path.push_back(next);
        route.delay_ms += hop;
        visited.insert(next);
        u = next;
    }
    return route;
}

UndirectedGraph generate_barabasi_albert(int n, int m, std::uint64_t seed) {
    if (m < 1 || n <= m) {
        throw std::invalid_argument("generate_barabasi_albert: need n > m >= 1");
    }
    Rng rng(seed);
    UndirectedGraph g;
    // seed clique over nodes 0..m
    for (int i = 0; i <= m; ++i) g.add_node(i);
    std::vector<int> repeated;  // one entry per unit of degree
    for (int i = 0; i <= m; ++i) {
        for (int j = i + 1; j <= m; ++j) g.add_edge(i, j);
        for (int k = 0; k < m; ++k) repeated.push_back(i);
    }
    for (int node = m + 1; node < n; ++node) {
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < m) {
            const auto pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(repeated.size()) - 1));
            targets.insert(repeated[pick]);
        }
        for (int t : targets) {
            g.add_edge(node, t);
            repeated.push_back(t);
            repeated.push_back(node);
        }
    }
    return g;
}

DirectedTree generate_gn_application(int n_services, std::uint64_t seed) {
    if (n_services < 1) throw std::invalid_argument("generate_gn_application: need n >= 1");
    Rng rng(seed);
    DirectedTree tree;
    tree.node_count = n_services;
    for (int node = 1; node < n_services; ++node) {
        const int parent = static_cast<int>(rng.uniform_int(0, node - 1));
        tree.edges.emplace_back(parent, node);
    }
    return tree;
}

std::vector<int> select_gateways(const UndirectedGraph& g, double fraction,
                                 std::optional<int> exclude) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("select_gateways: fraction must be in (0, 1)");
    }
    const auto scores = node_betweenness(g);
    std::vector<std::pair<double, int>> order;
    order.reserve(scores.size());
    for (const auto& [id, s] : scores) {
        if (exclude && id == *exclude) continue;
        order.emplace_back(s, id);
    }
    std::sort(order.begin(), order.end());
    const auto count = static_cast<std::size_t>(fraction * static_cast<double>(g.node_count()));
    std::vector<int> out;
    for (std::size_t i = 0; i < order.size() && out.size() < count; ++i) {
        out.push_back(order[i].second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace fogplace
