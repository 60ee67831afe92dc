#pragma once

// Helpers shared across test translation units.  Generators here are kept
// deliberately independent of the synth module so they can serve as oracles
// for it.

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "graphlet/cliques.hpp"
#include "graphlet/core.hpp"

namespace testsupport {

inline graphlet::CliqueBasis make_basis(
    std::vector<std::vector<graphlet::NodeId>> cliques) {
  graphlet::CliqueBasis b;
  for (auto& c : cliques) b.add(std::move(c));
  return b;
}

inline graphlet::GraphletModel make_model(
    int n, std::vector<std::vector<graphlet::NodeId>> cliques,
    std::vector<double> mu) {
  graphlet::GraphletModel m;
  m.n = n;
  m.basis = make_basis(std::move(cliques));
  m.mu = std::move(mu);
  return m;
}

// Rejection-sampled non-expandable model with distinct positive coefficients.
// integer_mu draws the coefficients as a shuffled prefix of 1..k+3 so exact
// integer peeling and recovery tests have clean targets.
inline graphlet::GraphletModel random_nonexpandable(std::mt19937_64& rng,
                                                    int n, int kmax,
                                                    bool integer_mu = false) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    int k = 2 + static_cast<int>(rng() % kmax);
    graphlet::CliqueBasis b;
    bool ok = true;
    for (int t = 0; t < k && ok; ++t) {
      std::vector<graphlet::NodeId> c;
      for (int tries = 0; tries < 200; ++tries) {
        c.clear();
        for (graphlet::NodeId v = 0; v < n; ++v)
          if (rng() % n < 3) c.push_back(v);
        if (c.size() >= 2 && !b.contains(c)) break;
        c.clear();
      }
      if (c.empty()) ok = false;
      else b.add(c);
    }
    if (!ok || !graphlet::cliques::is_non_expandable(b).non_expandable)
      continue;
    graphlet::GraphletModel m;
    m.n = n;
    m.basis = b;
    if (integer_mu) {
      std::vector<double> pool(b.k() + 3);
      std::iota(pool.begin(), pool.end(), 1.0);
      std::shuffle(pool.begin(), pool.end(), rng);
      m.mu.assign(pool.begin(), pool.begin() + b.k());
    } else {
      for (int i = 0; i < b.k(); ++i)
        m.mu.push_back(1.0 + i + (rng() % 97) / 97.0);  // distinct by spacing
    }
    return m;
  }
  throw std::runtime_error("could not sample a non-expandable model");
}

// Draws Y ~ Poisson(rate) per unordered pair, dropping zeros.
inline graphlet::WeightedNetwork poisson_network(
    std::mt19937_64& rng, const graphlet::GraphletModel& m) {
  auto rates = graphlet::rate_matrix(m);
  graphlet::WeightedNetwork y(m.n);
  for (const auto& [e, lambda] : rates.entries()) {
    std::poisson_distribution<long long> dist(lambda);
    long long w = dist(rng);
    if (w > 0) y.add_edge(e.first, e.second, w);
  }
  return y;
}

}  // namespace testsupport
