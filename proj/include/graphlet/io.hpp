#pragma once

// File formats: tab-separated edge lists for observations and rate matrices,
// and the JSON model document.  Edge lists written by this library start
// with a "# nodes <N>" comment so isolated nodes survive a round trip; files
// without that header get their universe from the labels that appear, in
// first-appearance order.

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "graphlet/core.hpp"

namespace graphlet::io {

inline constexpr const char* kToolVersion = "1.0.0";

namespace detail {

struct RawList {
  std::optional<int> n;  // from the nodes header, when present
  // u, v, w tokens plus the 1-based source line
  std::vector<std::tuple<std::string, std::string, std::string, int>> rows;
};

inline RawList load_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  RawList raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;  // blank
    if (first[0] == '#') {
      std::string key, value;
      std::istringstream rest(line.substr(1));
      if (rest >> key >> value && key == "nodes" && !raw.n) {
        try {
          raw.n = std::stoi(value);
        } catch (...) {
          throw Error("malformed nodes header at line " +
                      std::to_string(lineno));
        }
      }
      continue;
    }
    std::string v, w, extra;
    if (!(fields >> v >> w) || (fields >> extra))
      throw Error("malformed line " + std::to_string(lineno));
    raw.rows.emplace_back(first, v, w, lineno);
  }
  return raw;
}

inline bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline int node_index(const std::string& label, int line,
                      const std::optional<int>& n,
                      std::unordered_map<std::string, int>& seen,
                      std::vector<std::string>& labels) {
  if (n) {
    if (!all_digits(label))
      throw Error("node index expected at line " + std::to_string(line));
    long idx = std::stol(label);
    if (idx < 0 || idx >= *n)
      throw Error("node index out of range at line " + std::to_string(line));
    return static_cast<int>(idx);
  }
  auto [it, fresh] = seen.insert({label, static_cast<int>(labels.size())});
  if (fresh) labels.push_back(label);
  return it->second;
}

inline double parse_positive_decimal(const std::string& w, int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(w, &used);
  } catch (...) {
    throw Error("weight not positive at line " + std::to_string(line));
  }
  if (used != w.size() || !(value > 0.0) || !std::isfinite(value))
    throw Error("weight not positive at line " + std::to_string(line));
  return value;
}

}  // namespace detail

// observations: strictly positive integer weights
inline WeightedNetwork read_edge_list(const std::string& path) {
  auto raw = detail::load_list(path);
  std::unordered_map<std::string, int> seen;
  std::vector<std::string> labels;
  std::vector<std::tuple<int, int, long long>> edges;
  for (const auto& [u, v, w, line] : raw.rows) {
    if (u == v) throw Error("self-loop at line " + std::to_string(line));
    int i = detail::node_index(u, line, raw.n, seen, labels);
    int j = detail::node_index(v, line, raw.n, seen, labels);
    if (i == j) throw Error("self-loop at line " + std::to_string(line));
    if (!detail::all_digits(w))
      throw Error("weight not a positive integer at line " +
                  std::to_string(line));
    long long weight = std::stoll(w);
    if (weight < 1)
      throw Error("weight not a positive integer at line " +
                  std::to_string(line));
    edges.emplace_back(i, j, weight);
  }
  WeightedNetwork y(raw.n ? *raw.n : static_cast<int>(labels.size()));
  if (!raw.n) y.labels = labels;
  for (const auto& [i, j, w] : edges) y.add_edge(i, j, w);
  return y;
}

struct ParsedRates {
  RateMatrix rates{0};
  std::vector<std::string> labels;
};

// rate matrices for exact-recovery work: positive decimal weights allowed
inline ParsedRates read_rate_list(const std::string& path) {
  auto raw = detail::load_list(path);
  std::unordered_map<std::string, int> seen;
  std::vector<std::string> labels;
  std::vector<std::tuple<int, int, double>> entries;
  for (const auto& [u, v, w, line] : raw.rows) {
    if (u == v) throw Error("self-loop at line " + std::to_string(line));
    int i = detail::node_index(u, line, raw.n, seen, labels);
    int j = detail::node_index(v, line, raw.n, seen, labels);
    if (i == j) throw Error("self-loop at line " + std::to_string(line));
    entries.emplace_back(i, j, detail::parse_positive_decimal(w, line));
  }
  ParsedRates out;
  int n = raw.n ? *raw.n : static_cast<int>(labels.size());
  out.rates = RateMatrix(n);
  if (raw.n) {
    out.labels.reserve(n);
    for (int i = 0; i < n; ++i) out.labels.push_back(std::to_string(i));
  } else {
    out.labels = labels;
  }
  for (const auto& [i, j, w] : entries) out.rates.add(i, j, w);
  return out;
}

namespace detail {

inline bool default_labels(const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != std::to_string(i)) return false;
  return true;
}

inline std::string format_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

}  // namespace detail

inline void write_edge_list(const std::string& path,
                            const WeightedNetwork& y) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file: " + path);
  bool plain = detail::default_labels(y.labels);
  if (plain) out << "# nodes\t" << y.edges.n() << "\n";
  for (const auto& [e, w] : y.edges.entries()) {
    const std::string& u = plain ? std::to_string(e.first) : y.labels[e.first];
    const std::string& v =
        plain ? std::to_string(e.second) : y.labels[e.second];
    out << u << "\t" << v << "\t" << w << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

inline void write_rate_list(const std::string& path, const RateMatrix& rates,
                            const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file: " + path);
  bool plain = detail::default_labels(labels) &&
               static_cast<int>(labels.size()) == rates.n();
  if (plain) out << "# nodes\t" << rates.n() << "\n";
  for (const auto& [e, w] : rates.entries()) {
    const std::string& u = plain ? std::to_string(e.first) : labels[e.first];
    const std::string& v =
        plain ? std::to_string(e.second) : labels[e.second];
    out << u << "\t" << v << "\t" << detail::format_weight(w) << "\n";
  }
  if (!out) throw Error("write failed: " + path);
}

struct ModelDocument {
  GraphletModel model;
  std::vector<std::string> labels;
  nlohmann::json meta = nlohmann::json::object();
};

inline void write_model(const std::string& path, const ModelDocument& doc) {
  nlohmann::json j;
  j["nodes"] = doc.labels;
  auto cliques = nlohmann::json::array();
  for (int k = 0; k < doc.model.basis.k(); ++k)
    cliques.push_back(doc.model.basis.clique(k));
  j["cliques"] = std::move(cliques);
  j["mu"] = doc.model.mu;
  j["meta"] = doc.meta;
  std::ofstream out(path);
  if (!out) throw Error("cannot open file: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path);
}

inline ModelDocument read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model file: ") + e.what());
  }
  ModelDocument doc;
  try {
    doc.labels = j.at("nodes").get<std::vector<std::string>>();
    doc.model.n = static_cast<int>(doc.labels.size());
    for (const auto& c : j.at("cliques")) {
      auto nodes = c.get<std::vector<int>>();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] < 0 || nodes[i] >= doc.model.n)
          throw Error("model file: clique node out of range");
        if (i > 0 && nodes[i] <= nodes[i - 1])
          throw Error("model file: clique not sorted ascending");
      }
      doc.model.basis.add(nodes);
    }
    doc.model.mu = j.at("mu").get<std::vector<double>>();
    if (j.contains("meta")) doc.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model file: ") + e.what());
  } catch (const Error& e) {
    throw Error(std::string(e.what()).rfind("model file:", 0) == 0
                    ? e.what()
                    : std::string("model file: ") + e.what());
  }
  try {
    validate_model(doc.model);
  } catch (const Error& e) {
    throw Error(std::string("model file: ") + e.what());
  }
  return doc;
}

}  // namespace graphlet::io
