#pragma once

// Synthetic instance generation: random graphlet models (Poisson basis count,
// Bernoulli indicator columns, Gamma coefficients) and Poisson-weighted
// network draws from a model's rate matrix.

#include <cstdint>
#include <random>
#include <vector>

#include "graphlet/cliques.hpp"
#include "graphlet/core.hpp"

namespace graphlet::synth {

struct SynthConfig {
  int n = 50;
  double lambda_k = 30.0;       // Poisson rate for the basis count
  double gamma_shape = 1.0;
  double gamma_scale = 10.0;    // shape/scale parameterization, mean = a*b
  double bernoulli_p = 0.04;    // per-node column membership probability
  std::uint64_t seed = 0;
  bool require_nonexpandable = false;
  int max_rejects = 1000;
  int fixed_k = 0;              // when positive, use this basis count as-is
};

inline void validate_config(const SynthConfig& c) {
  if (c.n < 2) throw Error("n must be at least 2");
  if (!(c.lambda_k > 0)) throw Error("lambda_k must be positive");
  if (!(c.gamma_shape > 0 && c.gamma_scale > 0))
    throw Error("gamma parameters must be positive");
  if (!(c.bernoulli_p > 0 && c.bernoulli_p < 1))
    throw Error("bernoulli_p outside (0,1)");
  if (c.max_rejects < 1) throw Error("max_rejects must be at least 1");
  if (c.fixed_k < 0) throw Error("fixed_k must be nonnegative");
}

namespace detail {

// one indicator column with at least two members
inline std::vector<NodeId> draw_column(std::mt19937_64& rng,
                                       const SynthConfig& c) {
  std::bernoulli_distribution bit(c.bernoulli_p);
  std::vector<NodeId> col;
  do {
    col.clear();
    for (NodeId v = 0; v < c.n; ++v)
      if (bit(rng)) col.push_back(v);
  } while (col.size() < 2);
  return col;
}

}  // namespace detail

// Draws K (zero-truncated Poisson unless pinned), then K indicator columns
// and Gamma coefficients.  A column duplicating an earlier one is redrawn a
// bounded number of times and dropped if it keeps colliding, so degenerate
// configurations still terminate.  Whole bases are rejected until
// non-expandable when requested.
inline GraphletModel sample_model(const SynthConfig& config) {
  validate_config(config);
  std::mt19937_64 rng(config.seed);
  std::poisson_distribution<int> count(config.lambda_k);
  std::gamma_distribution<double> coeff(config.gamma_shape,
                                        config.gamma_scale);

  for (int reject = 0; reject <= config.max_rejects; ++reject) {
    int k = config.fixed_k;
    if (k == 0)
      do {
        k = count(rng);
      } while (k == 0);

    CliqueBasis basis;
    for (int t = 0; t < k; ++t) {
      std::vector<NodeId> col;
      for (int attempt = 0; attempt < 100; ++attempt) {
        col = detail::draw_column(rng, config);
        if (!basis.contains(col)) break;
        col.clear();
      }
      if (!col.empty()) basis.add(std::move(col));
    }
    if (basis.k() == 0) continue;
    if (config.require_nonexpandable &&
        !cliques::is_non_expandable(basis).non_expandable)
      continue;

    GraphletModel m;
    m.n = config.n;
    m.basis = std::move(basis);
    for (int i = 0; i < m.basis.k(); ++i) m.mu.push_back(coeff(rng));
    return m;
  }
  throw Error("rejection cap exceeded");
}

// Independent Poisson draw per positive-rate pair; zeros are simply not
// stored.  The zero-truncated variant redraws until positive, conditioning
// every covered pair on being observed.
inline WeightedNetwork sample_network(const GraphletModel& model,
                                      std::uint64_t seed,
                                      bool zero_truncated = false) {
  validate_model(model);
  for (double v : model.mu)
    if (!(v > 0.0)) throw Error("model not reduced");

  std::mt19937_64 rng(seed);
  auto rates = rate_matrix(model);
  WeightedNetwork y(model.n);
  for (const auto& [e, lambda] : rates.entries()) {
    std::poisson_distribution<long long> dist(lambda);
    long long w = dist(rng);
    if (zero_truncated)
      while (w < 1) w = dist(rng);
    if (w >= 1) y.add_edge(e.first, e.second, w);
  }
  return y;
}

}  // namespace graphlet::synth
