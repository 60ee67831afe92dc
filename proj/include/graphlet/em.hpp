#pragma once

// Richardson-Lucy / EM estimation of clique coefficients under the Poisson
// superposition model, followed by mass-based pruning and tau-mass
// truncation.  Responsibilities are folded into the M-step on the fly; no
// per-clique matrix is ever materialized.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/core.hpp"

namespace graphlet::em {

struct EmConfig {
  double epsilon = 1e-8;        // relative L2 change of mu declaring a fixed point
  int max_iters = 10000;
  double prune_fraction = 1e-6; // mass fraction below which a clique is dropped
  bool refit_after_prune = true;
};

inline void validate_config(const EmConfig& c) {
  if (!(c.epsilon > 0)) throw Error("epsilon must be positive");
  if (c.max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(c.prune_fraction >= 0 && c.prune_fraction < 1))
    throw Error("prune_fraction outside [0,1)");
}

struct EmState {
  std::vector<double> mu;
  std::vector<double> t_k;      // a_k (a_k - 1), ordered-pair count per clique
  int iteration = 0;
  std::vector<long double> loglik_trace;
};

struct EmResult {
  GraphletModel model;          // over the full basis, zeros retained
  bool converged = false;
  int iterations = 0;
  double final_loglik = 0.0;
};

using StepObserver = std::function<void(const EmState&)>;

namespace detail {

// compensated long-double accumulator; the monotonicity contract on the
// likelihood trace is tighter than plain double summation noise
struct Kahan {
  long double sum = 0.0L, carry = 0.0L;
  void add(long double x) {
    long double y = x - carry;
    long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

// Flattened observation/basis join: per covered pair, the observed weight and
// the cliques covering it.  Built once per fit; steps stream over it.
class EmProblem {
 public:
  template <typename W>
  EmProblem(const PairMap<W>& y, const CliqueBasis& basis)
      : k_(basis.k()) {
    std::map<Edge, int> index;
    std::vector<std::vector<int>> covers;
    for (int k = 0; k < k_; ++k) {
      const auto& c = basis.clique(k);
      double a = static_cast<double>(c.size());
      tk_.push_back(a * (a - 1.0));
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) {
          Edge e{c[i], c[j]};
          auto [it, fresh] = index.insert({e, static_cast<int>(covers.size())});
          if (fresh) covers.push_back({});
          covers[it->second].push_back(k);
        }
    }
    weights_.assign(covers.size(), 0.0);
    for (const auto& [e, w] : y.entries()) {
      total_ += 2.0 * static_cast<double>(w);
      auto it = index.find(e);
      if (it == index.end())
        throw Error("uncovered positive edge (" + std::to_string(e.first) +
                    "," + std::to_string(e.second) + ")");
      weights_[it->second] = static_cast<double>(w);
    }
    cover_off_.push_back(0);
    for (const auto& c : covers) {
      cover_.insert(cover_.end(), c.begin(), c.end());
      cover_off_.push_back(static_cast<int>(cover_.size()));
    }
  }

  int k() const { return k_; }
  const std::vector<double>& t_k() const { return tk_; }
  double total_weight() const { return total_; }

  EmState initial_state() const {
    EmState s;
    s.t_k = tk_;
    double tk_sum = std::accumulate(tk_.begin(), tk_.end(), 0.0);
    s.mu.assign(k_, tk_sum > 0 ? total_ / tk_sum : 0.0);
    return s;
  }

  // one E+M sweep: each positive pair spreads its (ordered, hence doubled)
  // weight over the covering cliques proportionally to their coefficients
  void step(EmState& s) const {
    std::vector<long double> factor(k_, 0.0L);
    for (std::size_t p = 0; p < weights_.size(); ++p) {
      if (weights_[p] == 0.0) continue;
      long double denom = 0.0L;
      for (int c = cover_off_[p]; c < cover_off_[p + 1]; ++c)
        denom += s.mu[cover_[c]];
      if (denom <= 0.0L) throw Error("zero denominator at covered edge");
      long double contrib = 2.0L * weights_[p] / denom;
      for (int c = cover_off_[p]; c < cover_off_[p + 1]; ++c)
        factor[cover_[c]] += contrib;
    }
    for (int k = 0; k < k_; ++k) {
      double next = static_cast<double>(s.mu[k] * factor[k] / tk_[k]);
      // a coefficient that has decayed below the smallest normal double is
      // dead mass under any prune cutoff; left subnormal it drags every later
      // step through hardware denormal penalties on candidate-heavy fits
      s.mu[k] = next < std::numeric_limits<double>::min() ? 0.0 : next;
    }
    s.loglik_trace.push_back(log_likelihood(s.mu));
    ++s.iteration;
  }

  // unnormalized Poisson objective over pairs with positive model rate,
  // ordered-pair convention: 2 * sum (w log lambda - lambda)
  long double log_likelihood(const std::vector<double>& mu) const {
    detail::Kahan acc;
    for (std::size_t p = 0; p < weights_.size(); ++p) {
      long double lambda = 0.0L;
      for (int c = cover_off_[p]; c < cover_off_[p + 1]; ++c)
        lambda += mu[cover_[c]];
      if (lambda <= 0.0L) {
        if (weights_[p] > 0.0) throw Error("uncovered positive edge");
        continue;
      }
      long double term = -lambda;
      if (weights_[p] > 0.0)
        term += static_cast<long double>(weights_[p]) * logl(lambda);
      acc.add(2.0L * term);
    }
    return acc.sum;
  }

 private:
  int k_ = 0;
  std::vector<double> tk_;
  double total_ = 0.0;
  std::vector<double> weights_;   // per covered pair
  std::vector<int> cover_off_;    // CSR offsets into cover_
  std::vector<int> cover_;        // covering clique ids
};

template <typename W>
EmState em_step(const PairMap<W>& y, const CliqueBasis& basis, EmState state) {
  EmProblem(y, basis).step(state);
  return state;
}

template <typename W>
double log_likelihood(const PairMap<W>& y, const GraphletModel& m) {
  validate_model(m);
  CliqueBasis live;
  std::vector<double> mu;
  for (int k = 0; k < m.basis.k(); ++k)
    if (m.mu[k] > 0.0) {
      live.add(m.basis.clique(k));
      mu.push_back(m.mu[k]);
    }
  return static_cast<double>(EmProblem(y, live).log_likelihood(mu));
}

inline double log_likelihood(const WeightedNetwork& y, const GraphletModel& m) {
  return log_likelihood(y.edges, m);
}

template <typename W>
EmResult fit(const PairMap<W>& y, const CliqueBasis& basis,
             const EmConfig& config = {}, const StepObserver& observer = {}) {
  validate_config(config);
  if (y.empty()) throw Error("no positive edges");
  EmProblem prob(y, basis);
  EmState s = prob.initial_state();

  bool converged = false;
  std::vector<double> prev;
  while (s.iteration < config.max_iters) {
    prev = s.mu;
    prob.step(s);
    if (observer) observer(s);
    long double dd = 0.0L, nn = 0.0L;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      long double d = static_cast<long double>(s.mu[i]) - prev[i];
      dd += d * d;
      nn += static_cast<long double>(prev[i]) * prev[i];
    }
    long double floor = std::numeric_limits<double>::min();
    if (sqrtl(dd) <= config.epsilon * std::max(sqrtl(nn), floor)) {
      converged = true;
      break;
    }
  }

  EmResult r;
  r.model.n = y.n();
  r.model.basis = basis;
  r.model.mu = s.mu;
  r.converged = converged;
  r.iterations = s.iteration;
  r.final_loglik =
      s.loglik_trace.empty() ? 0.0 : static_cast<double>(s.loglik_trace.back());
  return r;
}

inline EmResult fit(const WeightedNetwork& y, const CliqueBasis& basis,
                    const EmConfig& config = {},
                    const StepObserver& observer = {}) {
  return fit(y.edges, basis, config, observer);
}

// Drops cliques whose fitted mass mu_k * t_k falls below prune_fraction of
// the total observed weight (and exact zeros), then optionally refits on the
// survivors.  A below-cutoff clique still stays when it is the last cover of
// a positive edge; dropping it would leave that edge inexplicable and the
// refit undefined.  The surviving count is the basis-size estimate.
template <typename W>
GraphletModel prune(const PairMap<W>& y, const EmResult& result,
                    const EmConfig& config = {},
                    const StepObserver& observer = {}) {
  validate_config(config);
  const double cutoff =
      config.prune_fraction * static_cast<double>(total_weight(y));

  const auto& basis = result.model.basis;
  auto mass_of = [&](int k) {
    double a = static_cast<double>(basis.clique_size(k));
    return result.model.mu[k] * a * (a - 1.0);
  };
  std::vector<char> keep(basis.k(), 0);
  for (int k = 0; k < basis.k(); ++k)
    keep[k] = result.model.mu[k] > 0.0 && mass_of(k) >= cutoff;

  std::set<Edge> covered;
  auto cover_with = [&](int k) {
    const auto& c = basis.clique(k);
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b)
        covered.insert({c[a], c[b]});
  };
  for (int k = 0; k < basis.k(); ++k)
    if (keep[k]) cover_with(k);
  for (const auto& [e, w] : y.entries()) {
    if (covered.count(e) > 0) continue;
    int best = -1;
    for (int k = 0; k < basis.k(); ++k) {
      if (keep[k] || result.model.mu[k] <= 0.0) continue;
      const auto& c = basis.clique(k);
      if (!std::binary_search(c.begin(), c.end(), e.first) ||
          !std::binary_search(c.begin(), c.end(), e.second))
        continue;
      if (best < 0 || mass_of(k) > mass_of(best)) best = k;
    }
    if (best >= 0) {
      keep[best] = 1;
      cover_with(best);
    }
  }

  CliqueBasis kept;
  std::vector<double> mu;
  for (int k = 0; k < basis.k(); ++k) {
    if (!keep[k]) continue;
    kept.add(basis.clique(k));
    mu.push_back(result.model.mu[k]);
  }
  if (kept.k() == 0) throw Error("all coefficients pruned");

  GraphletModel out;
  out.n = result.model.n;
  if (config.refit_after_prune) {
    EmResult refit = fit(y, kept, config, observer);
    out.basis = std::move(kept);
    out.mu = refit.model.mu;
  } else {
    out.basis = std::move(kept);
    out.mu = std::move(mu);
  }
  return out;
}

inline GraphletModel prune(const WeightedNetwork& y, const EmResult& result,
                           const EmConfig& config = {},
                           const StepObserver& observer = {}) {
  return prune(y.edges, result, config, observer);
}

struct ApproximateModel {
  GraphletModel model;        // retained cliques, highest tau-mass first
  std::vector<int> excluded;  // parent-model indices of dropped cliques
  int k_tilde = 0;
  double achieved_accuracy = 0.0;
};

namespace detail {

// rank by tau-mass mu_k a_k descending; ties prefer the larger clique, then
// the lexicographically smaller one
inline std::vector<int> mass_ranking(const GraphletModel& m) {
  std::vector<int> idx(m.basis.k());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    double mi = m.mu[i] * m.basis.clique_size(i);
    double mj = m.mu[j] * m.basis.clique_size(j);
    if (mi != mj) return mi > mj;
    if (m.basis.clique_size(i) != m.basis.clique_size(j))
      return m.basis.clique_size(i) > m.basis.clique_size(j);
    return m.basis.clique(i) < m.basis.clique(j);
  });
  return idx;
}

inline ApproximateModel take_prefix(const GraphletModel& m,
                                    const std::vector<int>& rank,
                                    const std::vector<double>& prefix,
                                    int k_tilde) {
  ApproximateModel out;
  out.model.n = m.n;
  out.k_tilde = k_tilde;
  for (int r = 0; r < k_tilde; ++r) {
    out.model.basis.add(m.basis.clique(rank[r]));
    out.model.mu.push_back(m.mu[rank[r]]);
  }
  for (int r = k_tilde; r < m.basis.k(); ++r)
    out.excluded.push_back(rank[r]);
  std::sort(out.excluded.begin(), out.excluded.end());
  out.achieved_accuracy = k_tilde == 0 ? 0.0 : prefix[k_tilde] / prefix.back();
  return out;
}

inline std::vector<double> mass_prefix(const GraphletModel& m,
                                       const std::vector<int>& rank) {
  std::vector<double> prefix(m.basis.k() + 1, 0.0);
  for (int r = 0; r < m.basis.k(); ++r)
    prefix[r + 1] =
        prefix[r] + m.mu[rank[r]] * m.basis.clique_size(rank[r]);
  return prefix;
}

inline void require_reduced(const GraphletModel& m) {
  validate_model(m);
  if (m.basis.k() == 0) throw Error("empty model");
  for (double v : m.mu)
    if (!(v > 0.0)) throw Error("model not reduced");
}

}  // namespace detail

inline ApproximateModel truncate_to_count(const GraphletModel& m, int k_tilde) {
  detail::require_reduced(m);
  if (k_tilde < 0 || k_tilde > m.basis.k())
    throw Error("k_tilde out of range");
  auto rank = detail::mass_ranking(m);
  auto prefix = detail::mass_prefix(m, rank);
  return detail::take_prefix(m, rank, prefix, k_tilde);
}

inline ApproximateModel truncate_to_accuracy(const GraphletModel& m,
                                             double target) {
  detail::require_reduced(m);
  if (!(target >= 0.0 && target <= 1.0)) throw Error("target out of range");
  auto rank = detail::mass_ranking(m);
  auto prefix = detail::mass_prefix(m, rank);
  int k_tilde = 0;
  while (k_tilde < m.basis.k() &&
         prefix[k_tilde] / prefix.back() < target)
    ++k_tilde;
  return detail::take_prefix(m, rank, prefix, k_tilde);
}

}  // namespace graphlet::em
