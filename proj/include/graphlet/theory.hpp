#pragma once

// Closed-form calculators: binary entropy, the candidate-count and
// redundancy upper bounds, and the expected accuracy of keeping the top
// k_tilde of k Gamma(alpha,1) clique masses.  The accuracy curve is exact
// for integer shape (Erlang order statistics evaluated in rational
// arithmetic); a Monte-Carlo estimator covers arbitrary shape and doubles as
// an independent oracle for the closed form.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "graphlet/core.hpp"

namespace graphlet::theory {

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("p outside [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

// Q * (2^(K H(p)) + K)
inline double candidate_count_bound(int k, double p, double q) {
  if (k < 1) throw Error("k must be at least 1");
  if (q < 1.0) throw Error("q must be at least 1");
  return q * (std::exp2(static_cast<double>(k) * binary_entropy(p)) + k);
}

// Q * (1 + N^(c H(p)) / (c log2 N))
inline double redundancy_bound(double n, double p, double c, double q) {
  if (!(n >= 2.0)) throw Error("n must be at least 2");
  if (!(c > 0.0)) throw Error("c must be positive");
  double log2n = std::log2(n);
  return q * (1.0 + std::pow(n, c * binary_entropy(p)) / (c * log2n));
}

namespace detail {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Integer factorial(int m) {
  Integer f = 1;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

inline Integer binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  Integer b = 1;
  for (int i = 0; i < k; ++i) {
    b *= (n - i);
    b /= (i + 1);
  }
  return b;
}

// Exact means of descending order statistics of k iid Gamma(alpha,1) with
// integer alpha.  The survival function is e^(-x) times the truncated
// exponential polynomial T(x); powers of T give the min of q, and
// inclusion-exclusion over maxima gives any rank.
class ErlangOrderStats {
 public:
  ErlangOrderStats(int alpha, int k) : alpha_(alpha), k_(k) {
    if (alpha < 1) throw Error("non-integer alpha");
    if (k < 1) throw Error("k must be at least 1");

    // coefficients of T(x)^q, extended one factor at a time; i_[q] is the
    // expected minimum of q variables
    std::vector<Rational> factor(alpha_);
    for (int i = 0; i < alpha_; ++i)
      factor[i] = Rational(1, factorial(i));
    std::vector<Rational> poly{1};
    i_.assign(k_ + 1, 0);
    for (int q = 1; q <= k_; ++q) {
      std::vector<Rational> next(poly.size() + alpha_ - 1, 0);
      for (std::size_t m = 0; m < poly.size(); ++m)
        for (int i = 0; i < alpha_; ++i)
          next[m + i] += poly[m] * factor[i];
      poly = std::move(next);
      Rational qi = 0;
      Rational qpow = q;  // q^(m+1)
      for (std::size_t m = 0; m < poly.size(); ++m) {
        qi += poly[m] * Rational(factorial(static_cast<int>(m))) / qpow;
        qpow *= q;
      }
      i_[q] = qi;
    }

    m_.assign(k_ + 1, 0);
    for (int l = 1; l <= k_; ++l) {
      Rational acc = 0;
      for (int q = 1; q <= l; ++q) {
        Rational term = Rational(binom(l, q)) * i_[q];
        acc += (q % 2 == 1) ? term : -term;
      }
      m_[l] = acc;
    }
  }

  // expected j-th largest of k
  Rational rank_mean(int j) const {
    Rational acc = 0;
    for (int q = 0; q <= j - 1; ++q) {
      int l = k_ - j + q + 1;
      Rational term =
          Rational(binom(k_ - j + q, q) * binom(k_, l)) * m_[l];
      acc += (q % 2 == 0) ? term : -term;
    }
    return acc;
  }

  // sum of the top k_tilde rank means over the total mean alpha*k
  Rational top_share(int k_tilde) const {
    Rational acc = 0;
    for (int j = 1; j <= k_tilde; ++j) acc += rank_mean(j);
    return acc / (Rational(alpha_) * k_);
  }

 private:
  int alpha_;
  int k_;
  std::vector<Rational> i_;  // expected min of q, index q
  std::vector<Rational> m_;  // expected max of l, index l
};

inline int require_integer_alpha(double alpha) {
  if (!(alpha >= 1.0) || alpha != std::floor(alpha))
    throw Error("non-integer alpha");
  return static_cast<int>(alpha);
}

}  // namespace detail

// expected tau-mass share of the k_tilde largest of k Gamma(alpha,1)
// coefficients, exact for integer alpha
inline double expected_accuracy(int k_tilde, int k, double alpha) {
  int a = detail::require_integer_alpha(alpha);
  if (k < 1) throw Error("k must be at least 1");
  if (k_tilde < 0 || k_tilde > k) throw Error("k_tilde out of range");
  if (k_tilde == 0) return 0.0;
  detail::ErlangOrderStats stats(a, k);
  double v = stats.top_share(k_tilde).convert_to<double>();
  return std::min(1.0, std::max(0.0, v));
}

struct McEstimate {
  double estimate = 0.0;       // ratio of expectations, matches closed form
  double std_error = 0.0;
  double mean_of_ratios = 0.0; // per-replicate ratio average, for reference
  double mean_of_ratios_se = 0.0;
};

// Monte-Carlo oracle: per replicate draw k masses, sort descending, track the
// top-k_tilde sum against the total.
inline McEstimate expected_accuracy_mc(int k_tilde, int k, double alpha,
                                       long long samples,
                                       std::uint64_t seed) {
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  if (k < 1) throw Error("k must be at least 1");
  if (k_tilde < 0 || k_tilde > k) throw Error("k_tilde out of range");
  if (samples < 10000) throw Error("samples must be at least 10000");

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> draw(k);
  long double sum_t = 0.0L, sum_s = 0.0L;
  long double sum_tt = 0.0L, sum_ts = 0.0L, sum_ss = 0.0L;
  long double sum_r = 0.0L, sum_rr = 0.0L;
  for (long long rep = 0; rep < samples; ++rep) {
    for (int i = 0; i < k; ++i) draw[i] = gamma(rng);
    std::sort(draw.begin(), draw.end(), std::greater<>());
    long double t = 0.0L;
    for (int i = 0; i < k_tilde; ++i) t += draw[i];
    long double s = t;
    for (int i = k_tilde; i < k; ++i) s += draw[i];
    long double r = t / s;
    sum_t += t;
    sum_s += s;
    sum_tt += t * t;
    sum_ts += t * s;
    sum_ss += s * s;
    sum_r += r;
    sum_rr += r * r;
  }

  long double nsamp = static_cast<long double>(samples);
  McEstimate out;
  long double ratio = sum_t / sum_s;
  out.estimate = static_cast<double>(ratio);
  // delta-method standard error of the ratio estimator
  long double resid2 =
      sum_tt - 2.0L * ratio * sum_ts + ratio * ratio * sum_ss;
  if (resid2 < 0.0L) resid2 = 0.0L;
  long double mean_s = sum_s / nsamp;
  out.std_error = static_cast<double>(
      sqrtl(resid2 / (nsamp - 1.0L)) / (sqrtl(nsamp) * mean_s));
  long double mean_r = sum_r / nsamp;
  out.mean_of_ratios = static_cast<double>(mean_r);
  long double var_r = (sum_rr - nsamp * mean_r * mean_r) / (nsamp - 1.0L);
  if (var_r < 0.0L) var_r = 0.0L;
  out.mean_of_ratios_se = static_cast<double>(sqrtl(var_r / nsamp));
  return out;
}

struct AccuracyCurve {
  int k = 0;
  double alpha = 0.0;
  std::vector<std::pair<int, double>> points;  // (k_tilde, tau0), 0..k
};

enum class CurveMethod { closed_form, monte_carlo };

struct McCurvePoint {
  int k_tilde = 0;
  double tau0 = 0.0;
  double std_error = 0.0;
};

// full Monte-Carlo curve in one sampling pass, with a delta-method standard
// error per point
inline std::vector<McCurvePoint> accuracy_curve_mc(int k, double alpha,
                                                   long long samples,
                                                   std::uint64_t seed) {
  if (k < 1) throw Error("k must be at least 1");
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  if (samples < 10000) throw Error("samples must be at least 10000");

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> draw(k);
  std::vector<long double> sum_t(k + 1, 0.0L), sum_tt(k + 1, 0.0L),
      sum_ts(k + 1, 0.0L);
  long double sum_s = 0.0L, sum_ss = 0.0L;
  std::vector<long double> prefix(k + 1, 0.0L);
  for (long long rep = 0; rep < samples; ++rep) {
    for (int i = 0; i < k; ++i) draw[i] = gamma(rng);
    std::sort(draw.begin(), draw.end(), std::greater<>());
    for (int j = 1; j <= k; ++j) prefix[j] = prefix[j - 1] + draw[j - 1];
    long double s = prefix[k];
    sum_s += s;
    sum_ss += s * s;
    for (int j = 1; j <= k; ++j) {
      sum_t[j] += prefix[j];
      sum_tt[j] += prefix[j] * prefix[j];
      sum_ts[j] += prefix[j] * s;
    }
  }

  long double nsamp = static_cast<long double>(samples);
  long double mean_s = sum_s / nsamp;
  std::vector<McCurvePoint> points;
  points.push_back({0, 0.0, 0.0});
  for (int j = 1; j <= k; ++j) {
    long double ratio = sum_t[j] / sum_s;
    long double resid2 =
        sum_tt[j] - 2.0L * ratio * sum_ts[j] + ratio * ratio * sum_ss;
    if (resid2 < 0.0L) resid2 = 0.0L;
    McCurvePoint p;
    p.k_tilde = j;
    p.tau0 = static_cast<double>(ratio);
    p.std_error = static_cast<double>(sqrtl(resid2 / (nsamp - 1.0L)) /
                                      (sqrtl(nsamp) * mean_s));
    points.push_back(p);
  }
  return points;
}

inline AccuracyCurve accuracy_curve(int k, double alpha, CurveMethod method,
                                    long long samples = 200000,
                                    std::uint64_t seed = 1) {
  if (k < 1) throw Error("k must be at least 1");
  AccuracyCurve curve;
  curve.k = k;
  curve.alpha = alpha;
  curve.points.push_back({0, 0.0});

  if (method == CurveMethod::closed_form) {
    int a = detail::require_integer_alpha(alpha);
    detail::ErlangOrderStats stats(a, k);
    detail::Rational total = detail::Rational(a) * k;
    detail::Rational acc = 0;
    for (int j = 1; j <= k; ++j) {
      acc += stats.rank_mean(j);
      double v = (acc / total).convert_to<double>();
      curve.points.push_back({j, std::min(1.0, std::max(0.0, v))});
    }
    return curve;
  }

  for (const auto& p : accuracy_curve_mc(k, alpha, samples, seed))
    if (p.k_tilde > 0) curve.points.push_back({p.k_tilde, p.tau0});
  return curve;
}

inline std::string to_tsv(const AccuracyCurve& curve) {
  std::string out = "# k_tilde\ttau0\n";
  char buf[64];
  for (const auto& [j, v] : curve.points) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\n", j, v);
    out += buf;
  }
  return out;
}

}  // namespace graphlet::theory
