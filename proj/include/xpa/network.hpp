#pragma once

#include "xpa/types.hpp"

#include <span>
#include <utility>

namespace xpa {

class Corpus;

// Directed follower graph over a fixed node set; edge u -> v means u follows v.
class AdopterNetwork
{
public:
    // Nodes 0..n-1. Self-loops and duplicate edges are dropped.
    AdopterNetwork(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges);

    // Edge u -> v iff u is in v's follower list. Users missing from the corpus
    // become nodes without known followers.
    static AdopterNetwork from_users(const std::vector<std::string>& user_ids, const Corpus& corpus);

    std::size_t size() const { return out_.size(); }
    std::size_t edge_count() const { return edges_; }
    const std::vector<std::size_t>& out(std::size_t u) const { return out_[u]; }
    const std::vector<std::size_t>& in(std::size_t v) const { return in_[v]; }
    bool has_edge(std::size_t u, std::size_t v) const;
    const std::vector<std::string>& labels() const { return labels_; }

private:
    std::vector<std::vector<std::size_t>> out_, in_; // sorted
    std::vector<std::string> labels_;
    std::size_t edges_ = 0;
};

// sum_ij |x_i - x_j| / (2 n^2 mean); 0 when all values are 0.
double gini(std::span<const double> values);

struct Centralities
{
    Vector indegree;
    Vector closeness;   // incoming distances, Wasserman-Faust scaling
    Vector betweenness; // normalized by (n-1)(n-2)
};

Centralities centralities(const AdopterNetwork& g);

// Breadth-first distances from `source` along out-edges (reverse=false) or
// in-edges; unreachable = -1.
std::vector<int> bfs_distances(const AdopterNetwork& g, std::size_t source, bool reverse = false);

struct NetworkSummary
{
    std::size_t nodes = 0;
    std::size_t edges = 0;
    MaybeMetric density;           // |E| / (n(n-1))
    double max_indegree = 0;
    MaybeMetric global_efficiency; // mean 1/d over ordered pairs, 0 if unreachable
    MaybeMetric transitivity;      // global clustering of the undirected graph
    double gini_indegree = 0;
    double gini_closeness = 0;
    double gini_betweenness = 0;
};

NetworkSummary network_summary(const AdopterNetwork& g);

} // namespace xpa
