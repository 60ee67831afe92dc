#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "graphlet/cliques.hpp"
#include "graphlet/core.hpp"
#include "graphlet/synth.hpp"
#include "support.hpp"

using namespace graphlet;
using synth::SynthConfig;
using testsupport::make_model;

TEST_CASE("generator config validation", "[synth]") {
  SynthConfig c;
  c.n = 1;
  CHECK_THROWS_WITH(synth::validate_config(c), "n must be at least 2");
  c = {};
  c.lambda_k = 0.0;
  CHECK_THROWS_WITH(synth::validate_config(c), "lambda_k must be positive");
  c = {};
  c.gamma_scale = -1.0;
  CHECK_THROWS_WITH(synth::validate_config(c),
                    "gamma parameters must be positive");
  c = {};
  c.bernoulli_p = 1.0;
  CHECK_THROWS_WITH(synth::validate_config(c), "bernoulli_p outside (0,1)");
  c = {};
  c.max_rejects = 0;
  CHECK_THROWS_WITH(synth::validate_config(c), "max_rejects must be at least 1");
}

TEST_CASE("model sampling is deterministic in the seed", "[synth]") {
  SynthConfig c;
  c.n = 20;
  c.lambda_k = 5.0;
  c.bernoulli_p = 0.15;
  c.seed = 93;
  auto a = synth::sample_model(c);
  auto b = synth::sample_model(c);
  REQUIRE(a.basis.k() == b.basis.k());
  for (int k = 0; k < a.basis.k(); ++k) {
    CHECK(a.basis.clique(k) == b.basis.clique(k));
    CHECK(a.mu[k] == b.mu[k]);  // bitwise
  }
  c.seed = 94;
  auto other = synth::sample_model(c);
  CHECK((other.basis.k() != a.basis.k() || other.mu != a.mu));
}

TEST_CASE("membership probability forced to one collapses to one clique",
          "[synth]") {
  SynthConfig c;
  c.n = 6;
  c.lambda_k = 8.0;
  c.bernoulli_p = 1.0 - 1e-12;
  c.seed = 7;
  auto m = synth::sample_model(c);
  REQUIRE(m.basis.k() == 1);
  CHECK(m.basis.clique(0) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("basis count matches the Poisson rate across seeds", "[synth]") {
  SynthConfig c;  // defaults are the reference setup: 50/30/1/10/0.04
  double k_sum = 0.0, mu_sum = 0.0, mu_count = 0.0;
  for (int s = 0; s < 100; ++s) {
    c.seed = 1000 + s;
    auto m = synth::sample_model(c);
    k_sum += m.basis.k();
    for (double v : m.mu) mu_sum += v;
    mu_count += static_cast<double>(m.mu.size());
  }
  double mean_k = k_sum / 100.0;
  CHECK(std::fabs(mean_k - 30.0) <= 3.0 * std::sqrt(30.0 / 100.0));
  // Gamma(1, 10) coefficients have mean 10 and sd 10
  double mean_mu = mu_sum / mu_count;
  CHECK(std::fabs(mean_mu - 10.0) <= 3.0 * 10.0 / std::sqrt(mu_count));
}

TEST_CASE("pinned basis count bypasses the Poisson draw", "[synth]") {
  SynthConfig c;
  c.n = 40;
  c.fixed_k = 7;
  c.bernoulli_p = 0.1;
  c.seed = 11;
  CHECK(synth::sample_model(c).basis.k() == 7);
}

TEST_CASE("rejection sampling returns a non-expandable basis", "[synth]") {
  SynthConfig c;
  c.n = 12;
  c.lambda_k = 3.0;
  c.bernoulli_p = 0.25;
  c.require_nonexpandable = true;
  c.max_rejects = 5000;
  for (std::uint64_t s = 0; s < 5; ++s) {
    c.seed = 400 + s;
    auto m = synth::sample_model(c);
    CHECK(cliques::is_non_expandable(m.basis).non_expandable);
  }
}

TEST_CASE("rejection cap surfaces as an error", "[synth]") {
  SynthConfig c;
  c.n = 30;
  c.fixed_k = 12;
  c.bernoulli_p = 0.5;  // dense overlapping columns, practically never valid
  c.require_nonexpandable = true;
  c.max_rejects = 3;
  c.seed = 5;
  CHECK_THROWS_WITH(synth::sample_model(c), "rejection cap exceeded");
}

TEST_CASE("network sampling is deterministic and supported on the rates",
          "[synth]") {
  auto m = make_model(8, {{0, 1, 2, 3}, {3, 4, 5}, {6, 7}}, {8.0, 5.0, 2.0});
  auto y1 = synth::sample_network(m, 77);
  auto y2 = synth::sample_network(m, 77);
  REQUIRE(y1.edges.pair_count() == y2.edges.pair_count());
  auto rates = rate_matrix(m);
  for (const auto& [e, w] : y1.edges.entries()) {
    CHECK(y2.edges.get(e.first, e.second) == w);
    CHECK(rates.contains(e.first, e.second));
  }
}

TEST_CASE("empty basis gives an empty network", "[synth]") {
  GraphletModel m;
  m.n = 5;
  CHECK(synth::sample_network(m, 3).edges.empty());
}

TEST_CASE("unreduced models are rejected by the sampler", "[synth]") {
  auto m = make_model(3, {{0, 1}, {1, 2}}, {1.0, 0.0});
  CHECK_THROWS_WITH(synth::sample_network(m, 1), "model not reduced");
}

TEST_CASE("heavy single clique saturates and concentrates", "[synth]") {
  auto m = make_model(3, {{0, 1, 2}}, {1000.0});
  auto y = synth::sample_network(m, 123);
  REQUIRE(y.edges.pair_count() == 3);
  double mean = static_cast<double>(total_weight(y)) / 6.0;
  CHECK(std::fabs(mean - 1000.0) <= 3.0 * std::sqrt(1000.0 / 3.0));
}

TEST_CASE("edge weights average to their rates across seeds", "[synth]") {
  auto m = make_model(6, {{0, 1, 2}, {2, 3, 4, 5}}, {4.0, 9.0});
  auto rates = rate_matrix(m);
  const int reps = 400;
  std::map<Edge, double> sums;
  for (int s = 0; s < reps; ++s) {
    auto y = synth::sample_network(m, 9000 + s);
    for (const auto& [e, w] : y.edges.entries())
      sums[e] += static_cast<double>(w);
  }
  for (const auto& [e, lambda] : rates.entries()) {
    double mean = sums[e] / reps;
    CHECK(std::fabs(mean - lambda) <= 3.0 * std::sqrt(lambda / reps));
  }
}

TEST_CASE("zero-truncated draws cover every positive-rate pair", "[synth]") {
  auto m = make_model(10, {{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, {0.05});
  auto plain = synth::sample_network(m, 21);
  auto trunc = synth::sample_network(m, 21, true);
  CHECK(plain.edges.pair_count() < 45);  // lambda 0.05, most pairs drop
  CHECK(trunc.edges.pair_count() == 45);
  for (const auto& [e, w] : trunc.edges.entries()) CHECK(w >= 1);
}
