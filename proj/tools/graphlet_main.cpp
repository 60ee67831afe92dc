// Command-line surface for the graphlet decomposition library.
//
// Subcommands: decompose, synth, eval, accuracy-curve, bounds.
// Exit codes: 0 success, 1 usage error, 2 data or validation error,
// 3 EM ran out of iterations (result still written, flagged in meta).

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graphlet/cliques.hpp"
#include "graphlet/core.hpp"
#include "graphlet/em.hpp"
#include "graphlet/eval.hpp"
#include "graphlet/io.hpp"
#include "graphlet/synth.hpp"
#include "graphlet/theory.hpp"

namespace {

using namespace graphlet;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct DecomposeArgs {
  std::string input;
  std::string output;
  double epsilon = 1e-8;
  int max_iters = 10000;
  double prune_fraction = 1e-6;
  std::optional<double> target_accuracy;
  int power = 1;
  bool exact = false;
};

int cmd_decompose(const DecomposeArgs& a) {
  em::EmConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.max_iters = a.max_iters;
  cfg.prune_fraction = a.prune_fraction;
  em::validate_config(cfg);
  if (a.target_accuracy && !(*a.target_accuracy >= 0.0 &&
                             *a.target_accuracy <= 1.0))
    throw Error("target accuracy outside [0,1]");

  // load observations; the exact pathway permits decimal weights
  RateMatrix rates;
  std::vector<std::string> labels;
  std::size_t edge_count = 0;
  if (a.exact) {
    if (a.power != 1) throw Error("power requires integer weights");
    auto parsed = io::read_rate_list(a.input);
    rates = std::move(parsed.rates);
    labels = std::move(parsed.labels);
    edge_count = rates.pair_count();
  } else {
    auto y = io::read_edge_list(a.input);
    if (a.power != 1) y = network_power(y, a.power);
    labels = y.labels;
    edge_count = y.edges.pair_count();
    rates = RateMatrix(y.n());
    for (const auto& [e, w] : y.edges.entries())
      rates.add(e.first, e.second, static_cast<double>(w));
  }

  auto t0 = Clock::now();
  auto [candidates, sweep] = cliques::candidate_basis(rates);
  double candidate_seconds = seconds_since(t0);

  auto t1 = Clock::now();
  auto result = em::fit(rates, candidates, cfg);
  auto reduced = em::prune(rates, result, cfg);
  double em_seconds = seconds_since(t1);

  io::ModelDocument doc;
  doc.model = reduced;
  doc.labels = labels;
  doc.meta["version"] = io::kToolVersion;
  doc.meta["command"] = "decompose";
  doc.meta["config"] = {{"epsilon", cfg.epsilon},
                        {"max_iters", cfg.max_iters},
                        {"prune_fraction", cfg.prune_fraction},
                        {"power", a.power},
                        {"exact", a.exact}};
  doc.meta["converged"] = result.converged;
  doc.meta["iterations"] = result.iterations;
  doc.meta["candidate_count"] = candidates.k();
  doc.meta["candidate_seconds"] = candidate_seconds;
  doc.meta["em_seconds"] = em_seconds;

  std::string truncation_line;
  if (a.target_accuracy) {
    auto approx = em::truncate_to_accuracy(reduced, *a.target_accuracy);
    doc.meta["truncation"] = {{"target", *a.target_accuracy},
                              {"k_tilde", approx.k_tilde},
                              {"achieved_accuracy", approx.achieved_accuracy}};
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "k_tilde=%d achieved_accuracy=%.6f ratio=%.6f\n",
                  approx.k_tilde, approx.achieved_accuracy,
                  static_cast<double>(approx.k_tilde) /
                      static_cast<double>(reduced.basis.k()));
    truncation_line = buf;
  }

  io::write_model(a.output, doc);

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "nodes=%d edges=%zu candidates=%d k_hat=%d iterations=%d "
                "candidate_seconds=%.3f em_seconds=%.3f\n",
                rates.n(), edge_count, candidates.k(), reduced.basis.k(),
                result.iterations, candidate_seconds, em_seconds);
  std::cout << buf << truncation_line;
  return result.converged ? 0 : 3;
}

struct SynthArgs {
  int nodes = 50;
  double lambda_k = 30.0;
  double alpha = 1.0;
  double beta = 10.0;
  double p = 0.04;
  std::uint64_t seed = 0;
  bool nonexpandable = false;
  int max_rejects = 1000;
  int fixed_k = 0;
  bool integer_mu = false;
  bool exact = false;
  bool truncated = false;
  std::string out_model;
  std::string out_network;
};

int cmd_synth(const SynthArgs& a) {
  synth::SynthConfig cfg;
  cfg.n = a.nodes;
  cfg.lambda_k = a.lambda_k;
  cfg.gamma_shape = a.alpha;
  cfg.gamma_scale = a.beta;
  cfg.bernoulli_p = a.p;
  cfg.seed = a.seed;
  cfg.require_nonexpandable = a.nonexpandable;
  cfg.max_rejects = a.max_rejects;
  cfg.fixed_k = a.fixed_k;

  auto model = synth::sample_model(cfg);
  if (a.integer_mu)
    for (double& v : model.mu) v = std::max(1.0, std::ceil(v));

  io::ModelDocument doc;
  doc.model = model;
  for (int i = 0; i < model.n; ++i) doc.labels.push_back(std::to_string(i));
  doc.meta["version"] = io::kToolVersion;
  doc.meta["command"] = "synth";
  doc.meta["config"] = {{"nodes", cfg.n},
                        {"lambda_k", cfg.lambda_k},
                        {"alpha", cfg.gamma_shape},
                        {"beta", cfg.gamma_scale},
                        {"p", cfg.bernoulli_p},
                        {"seed", cfg.seed},
                        {"nonexpandable", cfg.require_nonexpandable},
                        {"max_rejects", cfg.max_rejects},
                        {"fixed_k", cfg.fixed_k},
                        {"integer_mu", a.integer_mu},
                        {"exact", a.exact},
                        {"truncated", a.truncated}};
  io::write_model(a.out_model, doc);

  if (a.exact) {
    io::write_rate_list(a.out_network, rate_matrix(model), doc.labels);
  } else {
    // decorrelate the network draw from the model draw
    std::uint64_t net_seed = a.seed ^ 0x9e3779b97f4a7c15ULL;
    auto y = synth::sample_network(model, net_seed, a.truncated);
    io::write_edge_list(a.out_network, y);
  }

  std::cout << "k=" << model.basis.k() << " nodes=" << model.n << "\n";
  return 0;
}

struct EvalArgs {
  std::string truth;
  std::string estimate;
  std::string network;
  bool exact = false;
  bool header = false;
};

int cmd_eval(const EvalArgs& a) {
  auto truth = io::read_model(a.truth);
  auto est = io::read_model(a.estimate);
  if (truth.labels != est.labels) throw Error("node universe mismatch");

  eval::EvalReport r;
  r.k_error = eval::k_error(truth.model.basis.k(), est.model.basis.k());
  auto match = eval::match_bases(truth.model.n, truth.model.basis,
                                 est.model.basis);
  r.basis_error_raw = match.basis_error_raw;
  r.basis_error_normalized = match.basis_error_normalized;
  r.mu_error = eval::mu_error(truth.model.mu, est.model.mu, match.assignment);

  double tau_truth = tau_norm(truth.model);
  if (!(tau_truth > 0.0)) throw Error("zero tau norm in truth model");
  r.tau_error = std::fabs(tau_truth - tau_norm(est.model)) / tau_truth;

  if (a.network.empty()) {
    r.l1_error = std::numeric_limits<double>::quiet_NaN();
    r.support_error = std::numeric_limits<double>::quiet_NaN();
  } else {
    auto y_hat = rate_matrix(est.model);
    if (a.exact) {
      auto parsed = io::read_rate_list(a.network);
      r.l1_error = eval::l1_error(parsed.rates, y_hat);
      r.support_error = eval::support_error(parsed.rates, y_hat);
    } else {
      auto y = io::read_edge_list(a.network);
      r.l1_error = eval::l1_error(y, y_hat);
      r.support_error = eval::support_error(y.edges, y_hat);
    }
  }

  if (a.header) std::cout << "# " << eval::tsv_header() << "\n";
  std::cout << eval::tsv_row(r) << "\n";
  return 0;
}

struct CurveArgs {
  int k = 30;
  double alpha = 1.0;
  std::string method = "closed_form";
  long long samples = 200000;
  std::uint64_t seed = 1;
};

int cmd_accuracy_curve(const CurveArgs& a) {
  if (a.method == "closed_form") {
    try {
      auto curve =
          theory::accuracy_curve(a.k, a.alpha, theory::CurveMethod::closed_form);
      std::cout << theory::to_tsv(curve);
    } catch (const Error& e) {
      if (std::string(e.what()) == "non-integer alpha")
        throw Error("non-integer alpha; use --method monte_carlo");
      throw;
    }
    return 0;
  }
  auto points = theory::accuracy_curve_mc(a.k, a.alpha, a.samples, a.seed);
  std::cout << "# k_tilde\ttau0\tstd_error\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%d\t%.9g\t%.9g\n", p.k_tilde, p.tau0,
                  p.std_error);
    std::cout << buf;
  }
  return 0;
}

struct BoundsArgs {
  int k = 1;
  double p = 0.0;
  double q = 1.0;
  std::optional<double> n;
  std::optional<double> c;
};

int cmd_bounds(const BoundsArgs& a) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "candidate_count_bound\t%.9g\n",
                theory::candidate_count_bound(a.k, a.p, a.q));
  std::cout << buf;
  if (a.n && a.c) {
    std::snprintf(buf, sizeof(buf), "redundancy_bound\t%.9g\n",
                  theory::redundancy_bound(*a.n, a.p, *a.c, a.q));
    std::cout << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphlet decomposition toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads,
                 "worker cap; results are identical at any setting");

  DecomposeArgs dec;
  auto* sub_dec = app.add_subcommand(
      "decompose", "estimate a clique basis and coefficients from an edge list");
  sub_dec->add_option("--input", dec.input, "edge list to decompose")
      ->required();
  sub_dec->add_option("--output", dec.output, "model file to write")
      ->required();
  sub_dec->add_option("--epsilon", dec.epsilon, "EM convergence threshold");
  sub_dec->add_option("--max-iters", dec.max_iters, "EM iteration cap");
  sub_dec->add_option("--prune", dec.prune_fraction,
                      "mass fraction below which cliques are dropped");
  sub_dec->add_option("--target-accuracy", dec.target_accuracy,
                      "tau-mass fraction to retain after truncation");
  sub_dec->add_option("--power", dec.power,
                      "decompose this power of the network instead");
  sub_dec->add_flag("--exact", dec.exact,
                    "input is a rate matrix; decimal weights allowed");

  SynthArgs syn;
  auto* sub_syn = app.add_subcommand(
      "synth", "sample a random model and a network drawn from it");
  sub_syn->add_option("--nodes", syn.nodes, "node count");
  sub_syn->add_option("--lambda-k", syn.lambda_k, "Poisson rate for K");
  sub_syn->add_option("--alpha", syn.alpha, "Gamma shape for coefficients");
  sub_syn->add_option("--beta", syn.beta, "Gamma scale for coefficients");
  sub_syn->add_option("--p", syn.p, "clique membership probability");
  sub_syn->add_option("--seed", syn.seed, "generator seed");
  sub_syn->add_flag("--nonexpandable", syn.nonexpandable,
                    "rejection-sample until the basis is non-expandable");
  sub_syn->add_option("--max-rejects", syn.max_rejects,
                      "rejection attempts before giving up");
  sub_syn->add_option("--fixed-k", syn.fixed_k,
                      "pin the basis count instead of sampling it");
  sub_syn->add_flag("--integer-mu", syn.integer_mu,
                    "round coefficients up to integers");
  sub_syn->add_flag("--exact", syn.exact,
                    "write the noise-free rate matrix instead of a draw");
  sub_syn->add_flag("--truncated", syn.truncated,
                    "condition every covered pair on being observed");
  sub_syn->add_option("--out-model", syn.out_model, "ground-truth model path")
      ->required();
  sub_syn->add_option("--out-network", syn.out_network, "edge list path")
      ->required();

  EvalArgs ev;
  auto* sub_ev =
      app.add_subcommand("eval", "score an estimated model against the truth");
  sub_ev->add_option("--truth", ev.truth, "ground-truth model file")
      ->required();
  sub_ev->add_option("--estimate", ev.estimate, "estimated model file")
      ->required();
  sub_ev->add_option("--network", ev.network,
                     "observations for reconstruction metrics");
  sub_ev->add_flag("--exact", ev.exact, "network file has decimal weights");
  sub_ev->add_flag("--header", ev.header, "print the column header");

  CurveArgs cur;
  auto* sub_cur = app.add_subcommand(
      "accuracy-curve", "expected accuracy against retained basis count");
  sub_cur->add_option("--k", cur.k, "basis count")->required();
  sub_cur->add_option("--alpha", cur.alpha, "Gamma shape")->required();
  sub_cur->add_option("--method", cur.method, "closed_form or monte_carlo")
      ->check(CLI::IsMember({"closed_form", "monte_carlo"}));
  sub_cur->add_option("--samples", cur.samples, "Monte-Carlo replicates");
  sub_cur->add_option("--seed", cur.seed, "Monte-Carlo seed");

  BoundsArgs bnd;
  auto* sub_bnd = app.add_subcommand(
      "bounds", "candidate-count and redundancy upper bounds");
  sub_bnd->add_option("--k", bnd.k, "true basis count")->required();
  sub_bnd->add_option("--p", bnd.p, "membership probability")->required();
  sub_bnd->add_option("--q", bnd.q, "distinct positive weight count");
  auto* opt_n = sub_bnd->add_option("--n", bnd.n, "node count");
  auto* opt_c = sub_bnd->add_option("--c", bnd.c, "basis growth constant");
  opt_n->needs(opt_c);
  opt_c->needs(opt_n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (threads < 1) throw Error("threads must be at least 1");
    if (sub_dec->parsed()) return cmd_decompose(dec);
    if (sub_syn->parsed()) return cmd_synth(syn);
    if (sub_ev->parsed()) return cmd_eval(ev);
    if (sub_cur->parsed()) return cmd_accuracy_curve(cur);
    return cmd_bounds(bnd);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
