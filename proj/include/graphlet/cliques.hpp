#pragma once

// Maximal-clique machinery: Bron-Kerbosch enumeration with pivoting and a
// degeneracy-ordered outer level, the descending threshold sweep that
// assembles the candidate basis, non-expandability checking, and exact
// peel-off recovery from a noise-free rate matrix.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

#include "graphlet/core.hpp"

namespace graphlet::cliques {

struct BinaryGraph {
  int n = 0;
  std::vector<std::vector<NodeId>> adj;  // sorted, duplicate-free

  explicit BinaryGraph(int nodes) : n(nodes), adj(nodes) {}

  void add_edge(NodeId u, NodeId v) {
    Edge e = make_edge(u, v);
    if (e.second >= n) throw Error("node index out of range");
    insert_sorted(adj[e.first], e.second);
    insert_sorted(adj[e.second], e.first);
  }

  bool has_edge(NodeId u, NodeId v) const {
    if (u == v) return false;
    return std::binary_search(adj[u].begin(), adj[u].end(), v);
  }

  const std::vector<NodeId>& neighbors(NodeId u) const { return adj[u]; }

 private:
  static void insert_sorted(std::vector<NodeId>& row, NodeId v) {
    auto it = std::lower_bound(row.begin(), row.end(), v);
    if (it == row.end() || *it != v) row.insert(it, v);
  }
};

template <typename W>
BinaryGraph threshold_graph(const PairMap<W>& y, W t) {
  BinaryGraph g(y.n());
  for (const auto& [e, w] : y.entries())
    if (w >= t) g.add_edge(e.first, e.second);
  return g;
}

namespace detail {

inline std::vector<NodeId> intersect(const std::vector<NodeId>& a,
                                     const std::vector<NodeId>& b) {
  std::vector<NodeId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline std::size_t intersect_count(const std::vector<NodeId>& a,
                                   const std::vector<NodeId>& b) {
  std::size_t c = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else { ++c; ++i; ++j; }
  }
  return c;
}

inline void erase_value(std::vector<NodeId>& v, NodeId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) v.erase(it);
}

inline void insert_value(std::vector<NodeId>& v, NodeId x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

// Smallest-last vertex elimination; peeling min-degree vertices bounds the
// pivot recursion at the outer level.
inline std::vector<NodeId> degeneracy_order(const BinaryGraph& g) {
  const int n = g.n;
  std::vector<int> deg(n);
  int maxdeg = 0;
  for (int v = 0; v < n; ++v) {
    deg[v] = static_cast<int>(g.adj[v].size());
    maxdeg = std::max(maxdeg, deg[v]);
  }
  std::vector<std::vector<NodeId>> bucket(maxdeg + 1);
  for (int v = 0; v < n; ++v) bucket[deg[v]].push_back(v);

  std::vector<bool> removed(n, false);
  std::vector<NodeId> order;
  order.reserve(n);
  int d = 0;
  while (static_cast<int>(order.size()) < n) {
    while (d <= maxdeg && bucket[d].empty()) ++d;
    if (d > maxdeg) break;
    NodeId v = bucket[d].back();
    bucket[d].pop_back();
    if (removed[v] || deg[v] != d) continue;  // stale bucket entry
    removed[v] = true;
    order.push_back(v);
    for (NodeId u : g.adj[v]) {
      if (removed[u]) continue;
      bucket[--deg[u]].push_back(u);
      d = std::min(d, deg[u]);
    }
  }
  return order;
}

inline void bron_kerbosch(const BinaryGraph& g, std::vector<NodeId>& r,
                          std::vector<NodeId> p, std::vector<NodeId> x,
                          std::vector<std::vector<NodeId>>& out) {
  if (p.empty() && x.empty()) {
    if (r.size() >= 2) {
      out.push_back(r);
      std::sort(out.back().begin(), out.back().end());
    }
    return;
  }
  // pivot drawn from P and X jointly, maximizing neighbors inside P
  NodeId pivot = -1;
  std::size_t best = 0;
  bool have = false;
  for (const auto* side : {&p, &x}) {
    for (NodeId u : *side) {
      std::size_t c = intersect_count(g.adj[u], p);
      if (!have || c > best) { pivot = u; best = c; have = true; }
    }
  }
  std::vector<NodeId> candidates;
  std::set_difference(p.begin(), p.end(), g.adj[pivot].begin(),
                      g.adj[pivot].end(), std::back_inserter(candidates));
  for (NodeId v : candidates) {
    r.push_back(v);
    bron_kerbosch(g, r, intersect(p, g.adj[v]), intersect(x, g.adj[v]), out);
    r.pop_back();
    erase_value(p, v);
    insert_value(x, v);
  }
}

struct CliqueHash {
  std::size_t operator()(const std::vector<NodeId>& c) const {
    std::size_t h = c.size();
    for (NodeId v : c)
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) +
           (h >> 2);
    return h;
  }
};

}  // namespace detail

// All maximal cliques of size >= 2, canonical sorted node lists, output in
// lexicographic order.
inline std::vector<std::vector<NodeId>> maximal_cliques(const BinaryGraph& g) {
  std::vector<std::vector<NodeId>> out;
  auto order = detail::degeneracy_order(g);
  std::vector<int> pos(g.n, 0);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);

  std::vector<NodeId> r;
  for (NodeId v : order) {
    std::vector<NodeId> p, x;
    for (NodeId u : g.adj[v])
      (pos[u] > pos[v] ? p : x).push_back(u);
    r.push_back(v);
    detail::bron_kerbosch(g, r, std::move(p), std::move(x), out);
    r.pop_back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct ThresholdSweepReport {
  std::vector<double> thresholds_visited;  // distinct positive weights, descending
  std::vector<int> cliques_per_threshold;
  int q = 0;
};

// Descending sweep over the attained positive weights; the candidate basis is
// the deduplicated union of maximal cliques of the thresholded graphs.
template <typename W>
std::pair<CliqueBasis, ThresholdSweepReport> candidate_basis(
    const PairMap<W>& y) {
  if (y.empty()) throw Error("empty network");

  std::vector<W> thresholds;
  for (const auto& [e, w] : y.entries()) thresholds.push_back(w);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<W>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  CliqueBasis basis;
  ThresholdSweepReport report;
  std::unordered_set<std::vector<NodeId>, detail::CliqueHash> seen;
  for (W t : thresholds) {
    auto found = maximal_cliques(threshold_graph(y, t));
    report.thresholds_visited.push_back(static_cast<double>(t));
    report.cliques_per_threshold.push_back(static_cast<int>(found.size()));
    for (auto& c : found)
      if (seen.insert(c).second) basis.add(std::move(c));
  }
  report.q = static_cast<int>(report.thresholds_visited.size());

  // canonical order for downstream determinism
  CliqueBasis ordered;
  auto all = basis.cliques();
  std::sort(all.begin(), all.end());
  for (auto& c : all) ordered.add(std::move(c));
  return {std::move(ordered), std::move(report)};
}

inline std::pair<CliqueBasis, ThresholdSweepReport> candidate_basis(
    const WeightedNetwork& y) {
  return candidate_basis(y.edges);
}

struct ExpandabilityCheck {
  bool non_expandable = false;
  std::optional<std::vector<NodeId>> witness;  // a maximal union-graph clique
                                               // missing from the basis
};

// A basis is non-expandable when every maximal clique of the union graph of
// its members is itself a member.
inline ExpandabilityCheck is_non_expandable(const CliqueBasis& basis) {
  if (basis.k() == 0) throw Error("empty basis");
  BinaryGraph u(basis.max_node() + 1);
  for (const auto& c : basis.cliques())
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        u.add_edge(c[a], c[b]);
  for (auto& m : maximal_cliques(u))
    if (!basis.contains(m)) return {false, std::move(m)};
  return {true, std::nullopt};
}

// For each member, the smallest edge belonging to it and to no other member.
inline std::vector<std::pair<int, Edge>> unique_edge_witnesses(
    const CliqueBasis& basis) {
  if (!is_non_expandable(basis).non_expandable)
    throw Error("basis is expandable");
  std::map<Edge, int> cover;
  for (const auto& c : basis.cliques())
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        ++cover[Edge{c[a], c[b]}];
  std::vector<std::pair<int, Edge>> out;
  for (int k = 0; k < basis.k(); ++k) {
    const auto& c = basis.clique(k);
    bool found = false;
    for (std::size_t a = 0; a < c.size() && !found; ++a)
      for (std::size_t b = a + 1; b < c.size() && !found; ++b)
        if (cover[Edge{c[a], c[b]}] == 1) {
          out.push_back({k, Edge{c[a], c[b]}});
          found = true;
        }
    if (!found) throw Error("no unique edge");
  }
  return out;
}

// Noise-free recovery: repeatedly peel the minimum positive entry off the
// largest support clique through its edge.  On a rate matrix generated by a
// non-expandable basis with positive coefficients this reproduces the
// generating model exactly (up to clique order).
inline GraphletModel exact_decompose(const RateMatrix& lambda) {
  std::map<Edge, double> resid = lambda.entries();

  double max_entry = 0.0;
  for (const auto& [e, w] : resid) max_entry = std::max(max_entry, w);
  const double tol = 1e-9 * max_entry;
  const std::size_t cap = resid.size() * 2 + 16;

  std::map<std::vector<NodeId>, double> recovered;
  std::size_t rounds = 0;
  while (!resid.empty()) {
    if (++rounds > cap) throw Error("iteration cap exceeded");

    auto min_it = resid.begin();
    for (auto it = resid.begin(); it != resid.end(); ++it)
      if (it->second < min_it->second) min_it = it;
    const double mu_c = min_it->second;
    const Edge edge = min_it->first;

    BinaryGraph support(lambda.n());
    for (const auto& [e, w] : resid) support.add_edge(e.first, e.second);

    // cliques through `edge` live inside {i,j} plus the common neighborhood
    auto common = detail::intersect(support.neighbors(edge.first),
                                    support.neighbors(edge.second));
    std::vector<NodeId> sub = {edge.first, edge.second};
    sub.insert(sub.end(), common.begin(), common.end());
    std::sort(sub.begin(), sub.end());

    BinaryGraph induced(static_cast<int>(sub.size()));
    for (std::size_t a = 0; a < sub.size(); ++a)
      for (std::size_t b = a + 1; b < sub.size(); ++b)
        if (support.has_edge(sub[a], sub[b]))
          induced.add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));

    std::vector<NodeId> best;
    for (const auto& local : maximal_cliques(induced)) {
      std::vector<NodeId> c;
      c.reserve(local.size());
      for (NodeId l : local) c.push_back(sub[l]);
      if (!std::binary_search(c.begin(), c.end(), edge.first) ||
          !std::binary_search(c.begin(), c.end(), edge.second))
        continue;
      if (c.size() > best.size() || (c.size() == best.size() && c < best))
        best = std::move(c);
    }
    if (best.empty()) throw Error("no support clique through minimum edge");

    for (std::size_t a = 0; a < best.size(); ++a)
      for (std::size_t b = a + 1; b < best.size(); ++b) {
        auto it = resid.find(Edge{best[a], best[b]});
        it->second -= mu_c;
        if (it->second < -tol) throw Error("negative residual");
        if (it->second <= tol) resid.erase(it);
      }
    recovered[best] += mu_c;
  }

  GraphletModel m;
  m.n = lambda.n();
  for (auto& [c, mu] : recovered) {
    m.basis.add(c);
    m.mu.push_back(mu);
  }
  return m;
}

}  // namespace graphlet::cliques
