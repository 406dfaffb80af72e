#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "secalloc/detail/parallel.hpp"
#include "secalloc/detail/rng.hpp"
#include "secalloc/errors.hpp"

namespace secalloc {

// Undirected connected sensing network.  Vertices are 0-based inside the
// library; 1-based indices appear only in JSON documents and CLI flags.
// Edge weights are admitted but every parser and generator emits 1.0.
struct Network {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted
  std::vector<double> weights;             // parallel to edges, all > 0
  std::vector<double> theta;               // self-loop gains, all > 0
  std::vector<double> delta;               // alarm thresholds, all > 0
  std::vector<std::vector<int>> adj;       // neighbor lists

  static Network create(int n, std::vector<std::pair<int, int>> edges,
                        std::vector<double> theta, std::vector<double> delta,
                        std::vector<double> weights = {});
};

struct MonitorSet {
  std::vector<int> vertices;  // strictly increasing, 0-based
  int budget = 0;

  static MonitorSet make(const Network& net, std::vector<int> vertices,
                         int budget);
  bool contains(int v) const {
    return std::binary_search(vertices.begin(), vertices.end(), v);
  }
  int size() const { return static_cast<int>(vertices.size()); }
};

struct DominatingCollection {
  std::vector<MonitorSet> sets;  // sorted lexicographically by vertex list
  int budget = 0;
};

namespace detail {

inline bool connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
  }
  return reached == n;
}

}  // namespace detail

inline Network Network::create(int n, std::vector<std::pair<int, int>> edges,
                               std::vector<double> theta,
                               std::vector<double> delta,
                               std::vector<double> weights) {
  if (n <= 0) throw GraphError("vertex count must be positive");
  if (weights.empty()) weights.assign(edges.size(), 1.0);
  if (weights.size() != edges.size())
    throw GraphError("weight list does not match edge list");
  if (static_cast<int>(theta.size()) != n)
    throw GraphError("gain vector length does not match vertex count");
  if (static_cast<int>(delta.size()) != n)
    throw GraphError("threshold vector length does not match vertex count");
  for (double g : theta)
    if (!(g > 0.0)) throw GraphError("self-loop gains must be positive");
  for (double d : delta)
    if (!(d > 0.0)) throw GraphError("alarm thresholds must be positive");
  for (double w : weights)
    if (!(w > 0.0)) throw GraphError("edge weights must be positive");

  Network net;
  net.n = n;
  net.theta = std::move(theta);
  net.delta = std::move(delta);

  std::set<std::pair<int, int>> seen;
  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) order[k] = k;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    auto [i, j] = edges[k];
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw GraphError("edge endpoint out of range");
    if (i == j) throw GraphError("self-edges are not allowed");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second) throw GraphError("duplicate edge");
    edges[k] = {i, j};
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return edges[a] < edges[b];
  });
  net.edges.reserve(edges.size());
  net.weights.reserve(edges.size());
  for (std::size_t k : order) {
    net.edges.push_back(edges[k]);
    net.weights.push_back(weights[k]);
  }

  net.adj.assign(n, {});
  for (const auto& [i, j] : net.edges) {
    net.adj[i].push_back(j);
    net.adj[j].push_back(i);
  }
  for (auto& nb : net.adj) std::sort(nb.begin(), nb.end());

  if (!detail::connected(n, net.adj)) throw GraphError("graph is disconnected");
  return net;
}

inline MonitorSet MonitorSet::make(const Network& net, std::vector<int> vertices,
                                   int budget) {
  if (vertices.empty()) throw GraphError("monitor set must be nonempty");
  std::sort(vertices.begin(), vertices.end());
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (vertices[k] < 0 || vertices[k] >= net.n)
      throw GraphError("monitor vertex out of range");
    if (k > 0 && vertices[k] == vertices[k - 1])
      throw GraphError("duplicate monitor vertex");
  }
  if (budget < static_cast<int>(vertices.size()))
    throw GraphError("monitor set exceeds its budget");
  return MonitorSet{std::move(vertices), budget};
}

// --- parsing ---------------------------------------------------------------

// Accepts either a filesystem path or raw JSON text (detected by a leading
// '{').  Document schema (1-based vertices):
//   {"n": N, "edges": [[i, j], ...], "theta": [..] | x, "delta": [..] | x}
// theta defaults to 0.5 per vertex, delta to 1.0.
inline Network parse_network(const std::string& source) {
  std::string text;
  std::size_t k = 0;
  while (k < source.size() && std::isspace(static_cast<unsigned char>(source[k])))
    ++k;
  if (k < source.size() && source[k] == '{') {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in) throw SchemaError("cannot open network file: " + source);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("network document is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object()) throw SchemaError("network document must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw SchemaError("missing or non-integer field: n");
  const long long n_ll = doc["n"].get<long long>();
  if (n_ll <= 0) throw SchemaError("field n must be a positive integer");
  if (n_ll > 4096) throw SchemaError("field n is implausibly large");
  const int n = static_cast<int>(n_ll);

  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw SchemaError("missing or non-array field: edges");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw SchemaError("each edge must be a pair of integers");
    // 1-based on disk.
    edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
  }

  auto vec_field = [&](const char* name, double fallback) {
    std::vector<double> v(n, fallback);
    if (!doc.contains(name)) return v;
    const auto& f = doc[name];
    if (f.is_number()) {
      std::fill(v.begin(), v.end(), f.get<double>());
    } else if (f.is_array()) {
      if (static_cast<int>(f.size()) != n)
        throw SchemaError(std::string(name) + " length must equal n");
      for (int i = 0; i < n; ++i) {
        if (!f[i].is_number())
          throw SchemaError(std::string(name) + " entries must be numbers");
        v[i] = f[i].get<double>();
      }
    } else {
      throw SchemaError(std::string(name) + " must be a number or an array");
    }
    return v;
  };
  std::vector<double> theta = vec_field("theta", 0.5);
  std::vector<double> delta = vec_field("delta", 1.0);

  return Network::create(n, std::move(edges), std::move(theta),
                         std::move(delta));
}

// --- basic operators -------------------------------------------------------

inline Eigen::MatrixXd adjacency(const Network& net) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(net.n, net.n);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto& [i, j] = net.edges[k];
    A(i, j) = net.weights[k];
    A(j, i) = net.weights[k];
  }
  return A;
}

inline Eigen::MatrixXd laplacian(const Network& net) {
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(net.n, net.n);
  for (std::size_t k = 0; k < net.edges.size(); ++k) {
    const auto& [i, j] = net.edges[k];
    const double w = net.weights[k];
    L(i, j) -= w;
    L(j, i) -= w;
    L(i, i) += w;
    L(j, j) += w;
  }
  return L;
}

// Hop distance by breadth-first search.
inline int distance(const Network& net, int u, int v) {
  if (u < 0 || u >= net.n || v < 0 || v >= net.n)
    throw GraphError("distance query out of range");
  if (u == v) return 0;
  std::vector<int> dist(net.n, -1);
  std::queue<int> q;
  dist[u] = 0;
  q.push(u);
  while (!q.empty()) {
    const int w = q.front();
    q.pop();
    for (int x : net.adj[w]) {
      if (dist[x] >= 0) continue;
      dist[x] = dist[w] + 1;
      if (x == v) return dist[x];
      q.push(x);
    }
  }
  return -1;  // unreachable; cannot happen on a connected network
}

inline std::vector<std::vector<int>> all_pairs_distance(const Network& net) {
  std::vector<std::vector<int>> d(net.n, std::vector<int>(net.n, -1));
  for (int s = 0; s < net.n; ++s) {
    std::queue<int> q;
    d[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int w = q.front();
      q.pop();
      for (int x : net.adj[w])
        if (d[s][x] < 0) {
          d[s][x] = d[s][w] + 1;
          q.push(x);
        }
    }
  }
  return d;
}

// Closed-neighborhood coverage test: every vertex must see a monitor in its
// closed neighborhood, i.e. every entry of (A + I) * sum_m e_m is positive.
// Evaluated row by row with an early exit on the first uncovered vertex.
inline bool is_dominating(const Network& net, const std::vector<int>& vertices) {
  std::vector<char> in_set(net.n, 0);
  for (int v : vertices) {
    if (v < 0 || v >= net.n) throw GraphError("monitor vertex out of range");
    in_set[v] = 1;
  }
  for (int i = 0; i < net.n; ++i) {
    if (in_set[i]) continue;
    bool covered = false;
    for (int j : net.adj[i])
      if (in_set[j]) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

inline bool is_dominating(const Network& net, const MonitorSet& m) {
  return is_dominating(net, m.vertices);
}

// Number of nonempty subsets of size at most n_s, i.e. sum_{k=1..n_s} C(n,k).
inline std::uint64_t subset_count(int n, int n_s) {
  if (n < 1 || n > 64 || n_s < 1 || n_s > n)
    throw std::invalid_argument("subset_count arguments out of range");
  unsigned __int128 total = 0;
  unsigned __int128 binom = 1;
  for (int k = 1; k <= n_s; ++k) {
    binom = binom * static_cast<unsigned>(n - k + 1) / static_cast<unsigned>(k);
    total += binom;
  }
  if (total > static_cast<unsigned __int128>(UINT64_MAX))
    throw std::overflow_error("subset_count overflow");
  return static_cast<std::uint64_t>(total);
}

namespace detail {

// Size-ascending, lexicographic-within-size combination walk.
template <typename Fn>
void for_each_subset(int n, int max_size, Fn&& fn) {
  std::vector<int> idx;
  for (int k = 1; k <= std::min(max_size, n); ++k) {
    idx.resize(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      fn(idx);
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

}  // namespace detail

// Connected Erdos-Renyi sample: each pair drawn independently with
// probability q, resampled until connected (bounded retries).  Fully
// determined by (n, q, seed).
inline Network generate_erdos_renyi(int n, double q, std::uint64_t seed,
                                    double theta_default = 0.5,
                                    double delta_default = 1.0) {
  if (n < 1) throw GraphError("vertex count must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw GraphError("edge probability out of range");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (detail::uniform01(rng) < q) edges.emplace_back(i, j);
    std::vector<std::vector<int>> adj(n);
    for (const auto& [i, j] : edges) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    if (!detail::connected(n, adj)) continue;
    return Network::create(n, std::move(edges),
                           std::vector<double>(n, theta_default),
                           std::vector<double>(n, delta_default));
  }
  throw GenerationError("no connected sample within the retry budget");
}

// Every dominating set of size <= n_s, reported in lexicographic order of
// the vertex lists so the result is independent of the worker count.
inline DominatingCollection enumerate_dominating_sets(const Network& net,
                                                      int n_s, int workers = 1) {
  if (n_s < 1) throw GraphError("monitor budget must be positive");
  const int cap = std::min(n_s, net.n);

  std::vector<std::vector<int>> candidates;
  detail::for_each_subset(net.n, cap,
                          [&](const std::vector<int>& s) { candidates.push_back(s); });

  std::vector<char> keep(candidates.size(), 0);
  detail::parallel_for(candidates.size(), workers, [&](std::size_t k) {
    keep[k] = is_dominating(net, candidates[k]) ? 1 : 0;
  });

  DominatingCollection out;
  out.budget = n_s;
  for (std::size_t k = 0; k < candidates.size(); ++k)
    if (keep[k])
      out.sets.push_back(MonitorSet{candidates[k], n_s});
  std::sort(out.sets.begin(), out.sets.end(),
            [](const MonitorSet& a, const MonitorSet& b) {
              return a.vertices < b.vertices;
            });
  if (out.sets.empty())
    throw EmptyCollection("no dominating set within the monitor budget");
  return out;
}

}  // namespace secalloc
