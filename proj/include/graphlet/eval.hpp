#pragma once

// Reconstruction and recovery metrics: entrywise L1 and support agreement of
// a reconstruction against observations, tau-mass truncation error, and
// basis/coefficient recovery errors under optimal column matching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "graphlet/core.hpp"
#include "graphlet/em.hpp"

namespace graphlet::eval {

struct EvalReport {
  double l1_error = 0.0;
  double tau_error = 0.0;
  double support_error = 0.0;
  long long basis_error_raw = 0;
  double basis_error_normalized = 0.0;
  double mu_error = 0.0;
  int k_error = 0;
};

// entrywise L1 distance over ordered pairs, normalized by total observed
// weight
template <typename W1, typename W2>
double l1_error(const PairMap<W1>& y, const PairMap<W2>& y_hat) {
  double total = total_weight(y);
  if (total <= 0.0) throw Error("total weight zero");
  double num = 0.0;
  for (const auto& [e, w] : y.entries()) {
    double h = y_hat.contains(e.first, e.second)
                   ? static_cast<double>(y_hat.get(e.first, e.second))
                   : 0.0;
    num += std::fabs(static_cast<double>(w) - h);
  }
  for (const auto& [e, h] : y_hat.entries())
    if (!y.contains(e.first, e.second)) num += static_cast<double>(h);
  return 2.0 * num / total;
}

inline double l1_error(const WeightedNetwork& y, const RateMatrix& y_hat) {
  return l1_error(y.edges, y_hat);
}

inline double tau_error(const GraphletModel& full,
                        const em::ApproximateModel& approx) {
  (void)full;
  return 1.0 - approx.achieved_accuracy;
}

// positivity disagreement over the union of positive supports; two empty
// networks agree by convention
template <typename W1, typename W2>
double support_error(const PairMap<W1>& y, const PairMap<W2>& y_hat) {
  long long uni = 0, diff = 0;
  for (const auto& [e, w] : y.entries()) {
    ++uni;
    if (!y_hat.contains(e.first, e.second)) ++diff;
  }
  for (const auto& [e, h] : y_hat.entries())
    if (!y.contains(e.first, e.second)) {
      ++uni;
      ++diff;
    }
  return uni == 0 ? 0.0 : static_cast<double>(diff) / static_cast<double>(uni);
}

inline double support_error(const WeightedNetwork& y, const RateMatrix& y_hat) {
  return support_error(y.edges, y_hat);
}

namespace detail {

// exact min-cost perfect assignment on a square integer matrix, the
// augmenting-path form with row/column potentials
inline std::vector<int> min_cost_assignment(
    const std::vector<std::vector<long long>>& cost) {
  int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      long long delta = inf;
      for (int j = 1; j <= n; ++j)
        if (!used[j]) {
          long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
          if (minv[j] < delta) {
            delta = minv[j];
            j1 = j;
          }
        }
      for (int j = 0; j <= n; ++j)
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] != 0) assign[match[j] - 1] = j - 1;
  return assign;
}

inline long long hamming(const std::vector<NodeId>& a,
                         const std::vector<NodeId>& b) {
  std::vector<NodeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  return static_cast<long long>(a.size() + b.size() - 2 * common.size());
}

}  // namespace detail

struct BasisMatch {
  // padded truth column -> padded estimate column; indices at or beyond the
  // respective basis size stand for zero columns
  std::vector<int> assignment;
  long long basis_error_raw = 0;
  double basis_error_normalized = 0.0;
};

// optimal column matching of two binary bases under Hamming cost, the
// smaller side padded with zero columns
inline BasisMatch match_bases(int n, const CliqueBasis& b_true,
                              const CliqueBasis& b_hat) {
  if (b_true.k() > 0 && b_true.max_node() >= n)
    throw Error("node outside universe");
  if (b_hat.k() > 0 && b_hat.max_node() >= n)
    throw Error("node outside universe");
  int p = std::max(b_true.k(), b_hat.k());
  if (p == 0) return {};

  auto col_size = [](const CliqueBasis& b, int i) -> long long {
    return i < b.k() ? static_cast<long long>(b.clique_size(i)) : 0;
  };
  std::vector<std::vector<long long>> cost(p, std::vector<long long>(p, 0));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i < b_true.k() && j < b_hat.k())
        cost[i][j] = detail::hamming(b_true.clique(i), b_hat.clique(j));
      else
        cost[i][j] = col_size(b_true, i) + col_size(b_hat, j);
    }

  BasisMatch out;
  out.assignment = detail::min_cost_assignment(cost);
  for (int i = 0; i < p; ++i) out.basis_error_raw += cost[i][out.assignment[i]];
  out.basis_error_normalized =
      static_cast<double>(out.basis_error_raw) / (static_cast<double>(n) * p);
  return out;
}

// normalized L2 coefficient distance under a column assignment; unmatched
// columns pair against zero
inline double mu_error(const std::vector<double>& mu_true,
                       const std::vector<double>& mu_hat,
                       const std::vector<int>& assignment) {
  int p = static_cast<int>(assignment.size());
  if (static_cast<int>(mu_true.size()) > p ||
      static_cast<int>(mu_hat.size()) > p)
    throw Error("assignment shorter than coefficient vector");
  long double num = 0.0L, den = 0.0L;
  for (int i = 0; i < p; ++i) {
    long double t =
        i < static_cast<int>(mu_true.size()) ? mu_true[i] : 0.0L;
    int j = assignment[i];
    long double h = j < static_cast<int>(mu_hat.size()) ? mu_hat[j] : 0.0L;
    num += (t - h) * (t - h);
    den += t * t;
  }
  if (den == 0.0L) throw Error("zero mu norm");
  return static_cast<double>(sqrtl(num / den));
}

inline int k_error(int k_true, int k_hat) { return std::abs(k_hat - k_true); }

inline std::string tsv_header() {
  return "l1_error\ttau_error\tsupport_error\tbasis_error_raw\t"
         "basis_error_normalized\tmu_error\tk_error";
}

inline std::string tsv_row(const EvalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%.9g\t%.9g\t%.9g\t%lld\t%.9g\t%.9g\t%d",
                r.l1_error, r.tau_error, r.support_error, r.basis_error_raw,
                r.basis_error_normalized, r.mu_error, r.k_error);
  return buf;
}

}  // namespace graphlet::eval
