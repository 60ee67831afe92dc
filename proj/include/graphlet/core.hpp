#pragma once

// Core types for weighted networks and clique-basis models: a network is a
// sparse symmetric integer matrix with zero diagonal, a model is a list of
// node cliques with one nonnegative coefficient each.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphlet {

// Domain and validation failure. The CLI maps this to exit code 2.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;  // normalized so first < second

inline Edge make_edge(NodeId u, NodeId v) {
  if (u == v)
    throw Error("self-loop at node " + std::to_string(u));
  return u < v ? Edge{u, v} : Edge{v, u};
}

// Sparse symmetric matrix over a fixed node range [0, n) with zero diagonal.
// One stored entry per unordered pair; absent pairs read as zero.  The
// ordered-pair conventions in the rest of the library double sums over
// entries() rather than storing both (i,j) and (j,i).
template <typename W>
class PairMap {
 public:
  PairMap() = default;
  explicit PairMap(int n) : n_(n) {
    if (n < 0) throw Error("negative node count");
  }

  int n() const { return n_; }
  std::size_t pair_count() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(NodeId u, NodeId v, W w) {
    check_node(u);
    check_node(v);
    if (!(w > W{0})) throw Error("nonpositive entry");
    entries_[make_edge(u, v)] += w;
  }

  W get(NodeId u, NodeId v) const {
    if (u == v) return W{0};
    auto it = entries_.find(make_edge(u, v));
    return it == entries_.end() ? W{0} : it->second;
  }

  bool contains(NodeId u, NodeId v) const {
    return u != v && entries_.count(make_edge(u, v)) > 0;
  }

  const std::map<Edge, W>& entries() const { return entries_; }

 private:
  void check_node(NodeId u) const {
    if (u < 0 || u >= n_)
      throw Error("node index " + std::to_string(u) + " out of range");
  }

  int n_ = 0;
  std::map<Edge, W> entries_;
};

using RateMatrix = PairMap<double>;

struct WeightedNetwork {
  std::vector<std::string> labels;      // one per node, defaults to "0","1",...
  PairMap<std::int64_t> edges;

  WeightedNetwork() = default;
  explicit WeightedNetwork(int n) : edges(n) {
    labels.reserve(n);
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  WeightedNetwork(std::vector<std::string> node_labels, int n)
      : labels(std::move(node_labels)), edges(n) {
    if (static_cast<int>(labels.size()) != n)
      throw Error("label count does not match node count");
  }

  int n() const { return edges.n(); }
  void add_edge(NodeId u, NodeId v, std::int64_t w) { edges.add(u, v, w); }
};

// Ordered list of node cliques.  Each clique is kept as a sorted ascending,
// duplicate-free node vector of size >= 2; the list itself holds no duplicate
// cliques.
class CliqueBasis {
 public:
  CliqueBasis() = default;

  void add(std::vector<NodeId> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.size() < 2) throw Error("clique has fewer than two nodes");
    if (nodes.front() < 0) throw Error("negative node index in clique");
    if (!seen_.insert(nodes).second) throw Error("duplicate clique");
    cliques_.push_back(std::move(nodes));
  }

  int k() const { return static_cast<int>(cliques_.size()); }
  const std::vector<NodeId>& clique(int i) const { return cliques_.at(i); }
  int clique_size(int i) const { return static_cast<int>(cliques_.at(i).size()); }
  const std::vector<std::vector<NodeId>>& cliques() const { return cliques_; }

  bool contains(const std::vector<NodeId>& sorted_nodes) const {
    return seen_.count(sorted_nodes) > 0;
  }

  NodeId max_node() const {
    NodeId m = -1;
    for (const auto& c : cliques_) m = std::max(m, c.back());
    return m;
  }

 private:
  std::vector<std::vector<NodeId>> cliques_;
  std::set<std::vector<NodeId>> seen_;
};

struct GraphletModel {
  int n = 0;                 // node universe size
  CliqueBasis basis;
  std::vector<double> mu;    // one nonnegative coefficient per clique
};

inline void validate_model(const GraphletModel& m) {
  if (static_cast<int>(m.mu.size()) != m.basis.k())
    throw Error("coefficient count does not match clique count");
  if (m.basis.max_node() >= m.n)
    throw Error("clique node exceeds node universe");
  for (double v : m.mu)
    if (!(v >= 0.0)) throw Error("negative or non-finite coefficient");
}

// Sum over ordered pairs: twice the stored unordered total.
template <typename W>
W total_weight(const PairMap<W>& y) {
  W s{0};
  for (const auto& [e, w] : y.entries()) s += w;
  return W{2} * s;
}

inline std::int64_t total_weight(const WeightedNetwork& y) {
  return total_weight(y.edges);
}

// Expands sum_k mu_k b_k b_k' with the diagonal removed.  Entries appear for
// exactly the pairs covered by a clique with a positive coefficient.
inline RateMatrix rate_matrix(const GraphletModel& m) {
  validate_model(m);
  RateMatrix r(m.n);
  for (int k = 0; k < m.basis.k(); ++k) {
    if (m.mu[k] <= 0.0) continue;
    const auto& c = m.basis.clique(k);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        r.add(c[a], c[b], m.mu[k]);
  }
  return r;
}

// tau norm: sum_k mu_k * a_k where a_k is the clique size.
inline double tau_norm(const GraphletModel& m) {
  validate_model(m);
  double s = 0.0;
  for (int k = 0; k < m.basis.k(); ++k)
    s += m.mu[k] * static_cast<double>(m.basis.clique_size(k));
  return s;
}

// k-th power of the adjacency matrix, diagonal zeroed after the final
// multiplication (intermediate products keep their diagonals).
inline WeightedNetwork network_power(const WeightedNetwork& y, int k,
                                     int max_k = 5) {
  if (k < 1 || k > max_k)
    throw Error("power " + std::to_string(k) + " outside 1.." +
                std::to_string(max_k));
  const int n = y.n();

  // symmetric adjacency rows of y, diagonal-free by construction
  std::vector<std::vector<std::pair<NodeId, std::int64_t>>> adj(n);
  for (const auto& [e, w] : y.edges.entries()) {
    adj[e.first].push_back({e.second, w});
    adj[e.second].push_back({e.first, w});
  }

  auto cur = adj;  // rows of y^p, including any diagonal entries
  std::vector<std::int64_t> acc(n, 0);
  std::vector<NodeId> touched;
  for (int p = 2; p <= k; ++p) {
    std::vector<std::vector<std::pair<NodeId, std::int64_t>>> next(n);
    for (int i = 0; i < n; ++i) {
      touched.clear();
      for (const auto& [l, w1] : cur[i]) {
        for (const auto& [j, w2] : adj[l]) {
          if (acc[j] == 0) touched.push_back(j);
          acc[j] += w1 * w2;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (NodeId j : touched) {
        if (acc[j] != 0) next[i].push_back({j, acc[j]});
        acc[j] = 0;
      }
    }
    cur = std::move(next);
  }

  WeightedNetwork out(y.labels, n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, w] : cur[i])
      if (i < j) out.add_edge(i, j, w);
  return out;
}

}  // namespace graphlet
