#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "graphlet/cliques.hpp"
#include "graphlet/core.hpp"
#include "support.hpp"

using namespace graphlet;
using cliques::BinaryGraph;
using testsupport::make_basis;
using testsupport::make_model;
using testsupport::random_nonexpandable;

namespace {

// Independent oracle: subset enumeration over bitmask adjacency rows.
// A set S is a maximal clique iff every member sees S minus itself and no
// outside vertex sees all of S.
std::vector<std::vector<NodeId>> brute_cliques(int n,
                                               const std::vector<std::uint32_t>& adj) {
  std::vector<std::vector<NodeId>> out;
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    if (std::popcount(s) < 2) continue;
    bool clique = true;
    for (int i = 0; i < n && clique; ++i)
      if (s & (1u << i))
        if ((adj[i] & s) != (s & ~(1u << i))) clique = false;
    if (!clique) continue;
    bool maximal = true;
    for (int v = 0; v < n && maximal; ++v)
      if (!(s & (1u << v)) && (adj[v] & s) == s) maximal = false;
    if (!maximal) continue;
    std::vector<NodeId> c;
    for (int i = 0; i < n; ++i)
      if (s & (1u << i)) c.push_back(i);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

BinaryGraph graph_from_masks(int n, const std::vector<std::uint32_t>& adj) {
  BinaryGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj[i] & (1u << j)) g.add_edge(i, j);
  return g;
}

BinaryGraph make_graph(int n, std::vector<Edge> edges) {
  BinaryGraph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

bool nested_members(const CliqueBasis& b) {
  for (int i = 0; i < b.k(); ++i)
    for (int j = 0; j < b.k(); ++j)
      if (i != j &&
          std::includes(b.clique(j).begin(), b.clique(j).end(),
                        b.clique(i).begin(), b.clique(i).end()))
        return true;
  return false;
}

}  // namespace

TEST_CASE("maximal cliques of a triangle", "[cliques]") {
  auto g = make_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(cliques::maximal_cliques(g) ==
        std::vector<std::vector<NodeId>>{{0, 1, 2}});
}

TEST_CASE("maximal cliques of a path are its edges", "[cliques]") {
  auto g = make_graph(3, {{0, 1}, {1, 2}});
  CHECK(cliques::maximal_cliques(g) ==
        std::vector<std::vector<NodeId>>{{0, 1}, {1, 2}});
}

TEST_CASE("maximal cliques of a 4-cycle", "[cliques]") {
  auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  CHECK(cliques::maximal_cliques(g) ==
        std::vector<std::vector<NodeId>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});
}

TEST_CASE("enumeration matches subset oracle exhaustively to n=7", "[cliques]") {
  for (int n = 2; n <= 7; ++n) {
    const int pairs = n * (n - 1) / 2;
    std::vector<std::pair<int, int>> bits;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) bits.push_back({i, j});
    for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
      std::vector<std::uint32_t> adj(n, 0);
      for (int b = 0; b < pairs; ++b)
        if (mask & (1u << b)) {
          adj[bits[b].first] |= 1u << bits[b].second;
          adj[bits[b].second] |= 1u << bits[b].first;
        }
      auto got = cliques::maximal_cliques(graph_from_masks(n, adj));
      auto want = brute_cliques(n, adj);
      if (got != want) {
        CAPTURE(n, mask);
        REQUIRE(got == want);
      }
    }
  }
  SUCCEED();
}

TEST_CASE("enumeration matches subset oracle on random graphs to n=12",
          "[cliques]") {
  std::mt19937_64 rng(7201);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 2 + static_cast<int>(rng() % 11);
    std::vector<std::uint32_t> adj(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 100 < 35) {
          adj[i] |= 1u << j;
          adj[j] |= 1u << i;
        }
    auto got = cliques::maximal_cliques(graph_from_masks(n, adj));
    auto want = brute_cliques(n, adj);
    if (got != want) {
      CAPTURE(n, rep);
      REQUIRE(got == want);
    }
  }
  SUCCEED();
}

TEST_CASE("threshold sweep separates overlaid cliques", "[cliques]") {
  auto m = make_model(4, {{0, 1, 2}, {2, 3}}, {1.0, 3.0});
  auto rates = rate_matrix(m);
  WeightedNetwork y(4);
  for (const auto& [e, w] : rates.entries())
    y.add_edge(e.first, e.second, static_cast<std::int64_t>(w));
  auto [basis, report] = cliques::candidate_basis(y);
  CHECK(report.thresholds_visited == std::vector<double>{3.0, 1.0});
  CHECK(report.q == 2);
  CHECK(report.cliques_per_threshold == std::vector<int>{1, 2});
  REQUIRE(basis.k() == 2);
  CHECK(basis.clique(0) == std::vector<NodeId>{0, 1, 2});
  CHECK(basis.clique(1) == std::vector<NodeId>{2, 3});
}

TEST_CASE("uniform triangle yields a single threshold and candidate",
          "[cliques]") {
  WeightedNetwork y(3);
  y.add_edge(0, 1, 2);
  y.add_edge(0, 2, 2);
  y.add_edge(1, 2, 2);
  auto [basis, report] = cliques::candidate_basis(y);
  CHECK(report.q == 1);
  CHECK(report.thresholds_visited == std::vector<double>{2.0});
  REQUIRE(basis.k() == 1);
  CHECK(basis.clique(0) == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("star decomposes into its edges", "[cliques]") {
  WeightedNetwork y(4);
  y.add_edge(0, 1, 1);
  y.add_edge(0, 2, 1);
  y.add_edge(0, 3, 1);
  auto [basis, report] = cliques::candidate_basis(y);
  CHECK(report.q == 1);
  REQUIRE(basis.k() == 3);
  CHECK(basis.clique(0) == std::vector<NodeId>{0, 1});
  CHECK(basis.clique(1) == std::vector<NodeId>{0, 2});
  CHECK(basis.clique(2) == std::vector<NodeId>{0, 3});
}

TEST_CASE("empty network is rejected by the sweep", "[cliques]") {
  WeightedNetwork y(3);
  CHECK_THROWS_AS(cliques::candidate_basis(y), Error);
}

TEST_CASE("every candidate is maximal in some thresholded graph", "[cliques]") {
  std::mt19937_64 rng(7202);
  for (int rep = 0; rep < 20; ++rep) {
    WeightedNetwork y(8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        if (rng() % 3 == 0) y.add_edge(i, j, 1 + static_cast<int>(rng() % 4));
    if (y.edges.empty()) continue;
    auto [basis, report] = cliques::candidate_basis(y);
    for (const auto& c : basis.cliques()) {
      bool found = false;
      for (double t : report.thresholds_visited) {
        auto mc = cliques::maximal_cliques(
            cliques::threshold_graph(y.edges, static_cast<std::int64_t>(t)));
        if (std::binary_search(mc.begin(), mc.end(), c)) { found = true; break; }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("candidate basis contains every generating clique", "[cliques]") {
  std::mt19937_64 rng(7203);
  for (int rep = 0; rep < 60; ++rep) {
    auto m = random_nonexpandable(rng, 9, 3);
    auto [basis, report] = cliques::candidate_basis(rate_matrix(m));
    CAPTURE(rep);
    for (const auto& c : m.basis.cliques()) CHECK(basis.contains(c));
  }
}

TEST_CASE("two overlapping triangles are non-expandable", "[cliques]") {
  auto chk = cliques::is_non_expandable(make_basis({{0, 1, 2}, {1, 2, 3}}));
  CHECK(chk.non_expandable);
  CHECK_FALSE(chk.witness.has_value());
}

TEST_CASE("edge-assembled triangle is expandable with witness", "[cliques]") {
  auto chk = cliques::is_non_expandable(make_basis({{0, 1}, {1, 2}, {0, 2}}));
  CHECK_FALSE(chk.non_expandable);
  REQUIRE(chk.witness.has_value());
  CHECK(*chk.witness == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("single clique is non-expandable", "[cliques]") {
  CHECK(cliques::is_non_expandable(make_basis({{0, 1, 2, 3}})).non_expandable);
}

TEST_CASE("unique edges found for disjointly anchored cliques", "[cliques]") {
  auto w = cliques::unique_edge_witnesses(make_basis({{0, 1, 2}, {2, 3}}));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == std::pair<int, Edge>{0, {0, 1}});
  CHECK(w[1] == std::pair<int, Edge>{1, {2, 3}});
}

TEST_CASE("single clique witnesses its smallest edge", "[cliques]") {
  auto w = cliques::unique_edge_witnesses(make_basis({{0, 1, 2}}));
  REQUIRE(w.size() == 1);
  CHECK(w[0] == std::pair<int, Edge>{0, {0, 1}});
}

TEST_CASE("overlapping triangles witness their off-shared edges", "[cliques]") {
  auto w = cliques::unique_edge_witnesses(make_basis({{0, 1, 2}, {1, 2, 3}}));
  REQUIRE(w.size() == 2);
  CHECK(w[0] == std::pair<int, Edge>{0, {0, 1}});
  CHECK(w[1] == std::pair<int, Edge>{1, {1, 3}});
}

TEST_CASE("expandable basis is rejected for witness extraction", "[cliques]") {
  CHECK_THROWS_WITH(
      cliques::unique_edge_witnesses(make_basis({{0, 1}, {1, 2}, {0, 2}})),
      "basis is expandable");
}

TEST_CASE("nested members defeat unique-edge extraction", "[cliques]") {
  // {0,1} sits inside {0,1,2}: the pair passes the non-expandability check
  // but the inner clique owns no edge of its own
  auto b = make_basis({{0, 1}, {0, 1, 2}});
  CHECK(cliques::is_non_expandable(b).non_expandable);
  CHECK_THROWS_WITH(cliques::unique_edge_witnesses(b), "no unique edge");
}

TEST_CASE("non-nested non-expandable bases have full witness sets",
          "[cliques]") {
  std::mt19937_64 rng(7204);
  int checked = 0;
  for (int rep = 0; rep < 120 && checked < 40; ++rep) {
    auto m = random_nonexpandable(rng, 9, 3);
    if (nested_members(m.basis)) continue;
    auto w = cliques::unique_edge_witnesses(m.basis);
    CHECK(static_cast<int>(w.size()) == m.basis.k());
    for (const auto& [k, e] : w) {
      int covers = 0;
      for (const auto& c : m.basis.cliques())
        if (std::binary_search(c.begin(), c.end(), e.first) &&
            std::binary_search(c.begin(), c.end(), e.second))
          ++covers;
      CHECK(covers == 1);
    }
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("peeling recovers overlaid cliques exactly", "[cliques]") {
  auto truth = make_model(4, {{0, 1, 2}, {2, 3}}, {1.0, 3.0});
  auto got = cliques::exact_decompose(rate_matrix(truth));
  REQUIRE(got.basis.k() == 2);
  CHECK(got.basis.clique(0) == std::vector<NodeId>{0, 1, 2});
  CHECK(got.basis.clique(1) == std::vector<NodeId>{2, 3});
  CHECK(got.mu[0] == Catch::Approx(1.0));
  CHECK(got.mu[1] == Catch::Approx(3.0));
}

TEST_CASE("peeling a uniform triangle takes one round", "[cliques]") {
  auto truth = make_model(3, {{0, 1, 2}}, {2.0});
  auto got = cliques::exact_decompose(rate_matrix(truth));
  REQUIRE(got.basis.k() == 1);
  CHECK(got.basis.clique(0) == std::vector<NodeId>{0, 1, 2});
  CHECK(got.mu[0] == Catch::Approx(2.0));
}

TEST_CASE("peeling an edge-assembled triangle returns the assembled form",
          "[cliques]") {
  // out-of-contract input: the expandable generator and the returned model
  // share the same rate matrix
  auto truth = make_model(3, {{0, 1}, {1, 2}, {0, 2}}, {1.0, 1.0, 1.0});
  auto got = cliques::exact_decompose(rate_matrix(truth));
  REQUIRE(got.basis.k() == 1);
  CHECK(got.basis.clique(0) == std::vector<NodeId>{0, 1, 2});
  CHECK(got.mu[0] == Catch::Approx(1.0));
}

TEST_CASE("peeling inverts rate expansion on non-expandable models",
          "[cliques]") {
  std::mt19937_64 rng(7205);
  for (int rep = 0; rep < 60; ++rep) {
    auto m = random_nonexpandable(rng, 9, 3);
    auto got = cliques::exact_decompose(rate_matrix(m));
    REQUIRE(got.basis.k() == m.basis.k());
    // recovered order is lexicographic; match members by set
    for (int k = 0; k < m.basis.k(); ++k) {
      bool matched = false;
      for (int j = 0; j < got.basis.k(); ++j)
        if (got.basis.clique(j) == m.basis.clique(k)) {
          CHECK(got.mu[j] == Catch::Approx(m.mu[k]).epsilon(1e-9));
          matched = true;
        }
      CHECK(matched);
    }
  }
}

TEST_CASE("peeling handles nested generating cliques", "[cliques]") {
  auto truth = make_model(3, {{0, 1}, {0, 1, 2}}, {1.0, 2.0});
  auto got = cliques::exact_decompose(rate_matrix(truth));
  REQUIRE(got.basis.k() == 2);
  CHECK(got.basis.clique(0) == std::vector<NodeId>{0, 1});
  CHECK(got.mu[0] == Catch::Approx(1.0));
  CHECK(got.basis.clique(1) == std::vector<NodeId>{0, 1, 2});
  CHECK(got.mu[1] == Catch::Approx(2.0));
}
