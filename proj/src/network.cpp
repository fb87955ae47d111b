#include "xpa/network.hpp"

#include "xpa/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace xpa {

AdopterNetwork::AdopterNetwork(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges)
    : out_(n), in_(n)
{
    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw DomainError("AdopterNetwork: edge endpoint out of range");
        if (u == v)
            continue;
        out_[u].push_back(v);
        in_[v].push_back(u);
    }
    auto dedup = [](std::vector<std::size_t>& a) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    };
    for (std::size_t i = 0; i < n; ++i) {
        dedup(out_[i]);
        dedup(in_[i]);
        edges_ += out_[i].size();
    }
}

AdopterNetwork AdopterNetwork::from_users(const std::vector<std::string>& user_ids, const Corpus& corpus)
{
    std::unordered_map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < user_ids.size(); ++i)
        idx.emplace(user_ids[i], i);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < user_ids.size(); ++v) {
        const auto* rec = corpus.user(user_ids[v]);
        if (!rec)
            continue;
        for (const auto& f : rec->follower_ids)
            if (auto it = idx.find(f); it != idx.end())
                edges.emplace_back(it->second, v);
    }
    AdopterNetwork g(user_ids.size(), edges);
    g.labels_ = user_ids;
    return g;
}

bool AdopterNetwork::has_edge(std::size_t u, std::size_t v) const
{
    return std::binary_search(out_[u].begin(), out_[u].end(), v);
}

double gini(std::span<const double> values)
{
    if (values.empty())
        throw DomainError("gini: empty list");
    std::vector<double> x(values.begin(), values.end());
    for (double v : x)
        if (!(v >= 0) || !std::isfinite(v))
            throw DomainError("gini: values must be finite and nonnegative");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double sum = 0, weighted = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i];
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1) * x[i];
    }
    if (!(sum > 0))
        return 0.0;
    return weighted / (n * sum);
}

std::vector<int> bfs_distances(const AdopterNetwork& g, std::size_t source, bool reverse)
{
    std::vector<int> dist(g.size(), -1);
    std::deque<std::size_t> q{source};
    dist[source] = 0;
    while (!q.empty()) {
        const auto u = q.front();
        q.pop_front();
        for (auto w : reverse ? g.in(u) : g.out(u))
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

Centralities centralities(const AdopterNetwork& g)
{
    const auto n = g.size();
    if (n == 0)
        throw DomainError("centralities: empty network");
    const auto N = static_cast<Eigen::Index>(n);
    Centralities c{Vector::Zero(N), Vector::Zero(N), Vector::Zero(N)};
    if (n == 1)
        return c;
    for (std::size_t v = 0; v < n; ++v)
        c.indegree[static_cast<Eigen::Index>(v)] = static_cast<double>(g.in(v).size());

    for (std::size_t v = 0; v < n; ++v) {
        const auto d = bfs_distances(g, v, true);
        double total = 0;
        std::size_t reach = 0;
        for (std::size_t u = 0; u < n; ++u)
            if (u != v && d[u] > 0) {
                total += d[u];
                ++reach;
            }
        if (total > 0) {
            const double r = static_cast<double>(reach);
            c.closeness[static_cast<Eigen::Index>(v)] = (r / total) * (r / static_cast<double>(n - 1));
        }
    }

    // Brandes
    std::vector<double> sigma(n), delta(n);
    std::vector<int> dist(n);
    std::vector<std::vector<std::size_t>> pred(n);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        for (auto& p : pred)
            p.clear();
        stack.clear();
        sigma[s] = 1;
        dist[s] = 0;
        std::deque<std::size_t> q{s};
        while (!q.empty()) {
            const auto u = q.front();
            q.pop_front();
            stack.push_back(u);
            for (auto w : g.out(u)) {
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
                if (dist[w] == dist[u] + 1) {
                    sigma[w] += sigma[u];
                    pred[w].push_back(u);
                }
            }
        }
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            const auto w = *it;
            for (auto u : pred[w])
                delta[u] += sigma[u] / sigma[w] * (1 + delta[w]);
            if (w != s)
                c.betweenness[static_cast<Eigen::Index>(w)] += delta[w];
        }
    }
    if (n > 2)
        c.betweenness /= static_cast<double>((n - 1) * (n - 2));
    else
        c.betweenness.setZero();
    return c;
}

namespace {

double undirected_transitivity(const AdopterNetwork& g)
{
    const auto n = g.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t u = 0; u < n; ++u) {
        adj[u] = g.out(u);
        adj[u].insert(adj[u].end(), g.in(u).begin(), g.in(u).end());
        std::sort(adj[u].begin(), adj[u].end());
        adj[u].erase(std::unique(adj[u].begin(), adj[u].end()), adj[u].end());
    }
    double triangles = 0, triples = 0; // triangles counted once per center vertex pair
    for (std::size_t u = 0; u < n; ++u) {
        const double k = static_cast<double>(adj[u].size());
        triples += k * (k - 1) / 2;
        for (std::size_t a = 0; a < adj[u].size(); ++a)
            for (std::size_t b = a + 1; b < adj[u].size(); ++b)
                if (std::binary_search(adj[adj[u][a]].begin(), adj[adj[u][a]].end(), adj[u][b]))
                    triangles += 1;
    }
    return triples > 0 ? triangles / triples : 0.0;
}

} // namespace

NetworkSummary network_summary(const AdopterNetwork& g)
{
    const auto n = g.size();
    const auto c = centralities(g);
    NetworkSummary s;
    s.nodes = n;
    s.edges = g.edge_count();
    s.max_indegree = c.indegree.maxCoeff();
    auto as_span = [](const Vector& v) { return std::span<const double>(v.data(), static_cast<std::size_t>(v.size())); };
    s.gini_indegree = gini(as_span(c.indegree));
    s.gini_closeness = gini(as_span(c.closeness));
    s.gini_betweenness = gini(as_span(c.betweenness));
    if (n < 2)
        return s;
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    s.density = static_cast<double>(g.edge_count()) / pairs;
    double eff = 0;
    for (std::size_t u = 0; u < n; ++u) {
        const auto d = bfs_distances(g, u);
        for (std::size_t v = 0; v < n; ++v)
            if (v != u && d[v] > 0)
                eff += 1.0 / d[v];
    }
    s.global_efficiency = eff / pairs;
    s.transitivity = undirected_transitivity(g);
    return s;
}

} // namespace xpa
