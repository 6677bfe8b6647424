#include "qsn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "qsn/error.hpp"

namespace qsn {

Graph::Graph(int n) : Graph(n, {}) {}

Graph::Graph(int n, std::vector<Link> links) : n_(n), adjacency_(std::size_t(std::max(n, 0))) {
  if (n < 0) throw InvalidArgument("graph size must be non-negative");
  for (auto& l : links) {
    if (l.a > l.b) std::swap(l.a, l.b);
    if (l.a < 0 || l.b >= n)
      throw InvalidArgument("link (" + std::to_string(l.a) + "," + std::to_string(l.b) +
                            ") out of range for n=" + std::to_string(n));
    if (l.a == l.b) throw InvalidArgument("self-loop at node " + std::to_string(l.a));
  }
  std::sort(links.begin(), links.end());
  if (auto dup = std::adjacent_find(links.begin(), links.end()); dup != links.end())
    throw InvalidArgument("duplicate link (" + std::to_string(dup->a) + "," +
                          std::to_string(dup->b) + ")");
  links_ = std::move(links);
  for (const auto& l : links_) {
    adjacency_[l.a].push_back(l.b);
    adjacency_[l.b].push_back(l.a);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool Graph::has_link(Node a, Node b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

bool Graph::connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::vector<Node> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const Node v = stack.back();
    stack.pop_back();
    for (Node w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n_;
}

double Graph::coordination() const {
  return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(links_.size()) / n_;
}

Graph Graph::complete(int n) {
  std::vector<Link> links;
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j) links.push_back({i, j});
  return Graph(n, std::move(links));
}

Graph Graph::path(int n) {
  std::vector<Link> links;
  for (Node i = 0; i + 1 < n; ++i) links.push_back({i, i + 1});
  return Graph(n, std::move(links));
}

Graph Graph::ring(int n) {
  std::vector<Link> links;
  for (Node i = 0; i < n && n > 2; ++i) links.push_back({i, (i + 1) % n});
  return Graph(n, std::move(links));
}

std::string to_string(GraphModel model) {
  switch (model) {
    case GraphModel::erdos_renyi: return "er";
    case GraphModel::watts_strogatz: return "ws";
    case GraphModel::barabasi_albert: return "ba";
  }
  return "?";
}

GraphModel parse_graph_model(const std::string& name) {
  if (name == "er") return GraphModel::erdos_renyi;
  if (name == "ws") return GraphModel::watts_strogatz;
  if (name == "ba") return GraphModel::barabasi_albert;
  throw InvalidArgument("unknown graph model '" + name + "' (expected er, ws or ba)");
}

void GraphModelSpec::validate() const {
  if (n < 1) throw InvalidArgument("n must be at least 1");
  switch (model) {
    case GraphModel::erdos_renyi:
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("ER p must lie in [0, 1]");
      break;
    case GraphModel::watts_strogatz:
      if (k % 2 != 0) throw InvalidArgument("WS K must be even");
      if (k <= 0 || k >= n) throw InvalidArgument("WS K must satisfy 0 < K < n");
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("WS p must lie in [0, 1]");
      break;
    case GraphModel::barabasi_albert:
      if (m < 1 || m >= n) throw InvalidArgument("BA m must satisfy 1 <= m < n");
      break;
  }
}

double GraphModelSpec::nominal_coordination() const {
  switch (model) {
    case GraphModel::erdos_renyi: return (n - 1) * p;
    case GraphModel::watts_strogatz: return k;
    case GraphModel::barabasi_albert: return 2.0 * m * (n - m) / n;
  }
  return 0.0;
}

Graph gen_erdos_renyi(int n, double p, Stream& rng) {
  GraphModelSpec{GraphModel::erdos_renyi, n, p}.validate();
  std::vector<Link> links;
  for (Node i = 0; i < n; ++i)
    for (Node j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) links.push_back({i, j});
  return Graph(n, std::move(links));
}

Graph gen_watts_strogatz(int n, int k, double p, Stream& rng) {
  GraphModelSpec spec{GraphModel::watts_strogatz, n, p, k};
  spec.validate();

  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  // Original ring links in lap order; entry d*n + i holds the current
  // far endpoint of the link leaving i at ring offset d+1.
  std::vector<Node> target(std::size_t(n) * (k / 2));
  for (int d = 0; d < k / 2; ++d) {
    for (Node i = 0; i < n; ++i) {
      const Node j = (i + d + 1) % n;
      target[std::size_t(d) * n + i] = j;
      adj[i][j] = adj[j][i] = 1;
    }
  }

  std::vector<Node> candidates;
  candidates.reserve(n);
  for (int d = 0; d < k / 2; ++d) {
    for (Node i = 0; i < n; ++i) {
      if (!rng.bernoulli(p)) continue;
      candidates.clear();
      for (Node c = 0; c < n; ++c)
        if (c != i && !adj[i][c]) candidates.push_back(c);
      if (candidates.empty()) continue;
      const Node fresh = candidates[rng.below(candidates.size())];
      Node& old = target[std::size_t(d) * n + i];
      adj[i][old] = adj[old][i] = 0;
      adj[i][fresh] = adj[fresh][i] = 1;
      old = fresh;
    }
  }

  std::vector<Link> links;
  links.reserve(target.size());
  for (int d = 0; d < k / 2; ++d)
    for (Node i = 0; i < n; ++i) links.push_back({i, target[std::size_t(d) * n + i]});
  return Graph(n, std::move(links));
}

Graph gen_barabasi_albert(int n, int m, Stream& rng) {
  GraphModelSpec{GraphModel::barabasi_albert, n, 0.0, 0, m}.validate();
  std::vector<int> degree(n, 0);
  std::vector<Link> links;
  links.reserve(std::size_t(m) * (n - m));
  std::vector<char> chosen(n, 0);
  std::vector<Node> picks;

  for (Node arriving = m; arriving < n; ++arriving) {
    std::fill(chosen.begin(), chosen.begin() + arriving, 0);
    picks.clear();
    for (int draw = 0; draw < m; ++draw) {
      double total = 0.0;
      int remaining = 0;
      for (Node v = 0; v < arriving; ++v) {
        if (chosen[v]) continue;
        total += degree[v];
        ++remaining;
      }
      Node pick = -1;
      if (total > 0.0) {
        double r = rng.uniform() * total;
        for (Node v = 0; v < arriving; ++v) {
          if (chosen[v] || degree[v] == 0) continue;
          pick = v;
          r -= degree[v];
          if (r < 0.0) break;
        }
      } else {
        auto slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(remaining)));
        for (Node v = 0; v < arriving; ++v) {
          if (chosen[v]) continue;
          if (slot-- == 0) {
            pick = v;
            break;
          }
        }
      }
      chosen[pick] = 1;
      picks.push_back(pick);
    }
    // degrees are frozen during one arrival's draws
    for (Node v : picks) {
      ++degree[v];
      ++degree[arriving];
      links.push_back({v, arriving});
    }
  }
  return Graph(n, std::move(links));
}

GeneratedGraph generate(const GraphModelSpec& spec, Stream& rng) {
  spec.validate();
  GeneratedGraph out;
  for (;;) {
    switch (spec.model) {
      case GraphModel::erdos_renyi: out.graph = gen_erdos_renyi(spec.n, spec.p, rng); break;
      case GraphModel::watts_strogatz:
        out.graph = gen_watts_strogatz(spec.n, spec.k, spec.p, rng);
        break;
      case GraphModel::barabasi_albert: out.graph = gen_barabasi_albert(spec.n, spec.m, rng); break;
    }
    if (!spec.require_connected || out.graph.connected()) return out;
    if (++out.rejections >= kMaxConnectivityRejections)
      throw InvalidArgument("could not draw a connected " + spec.name() + " graph after " +
                            std::to_string(out.rejections) + " attempts");
  }
}

UnweightedMeasures unweighted_measures(const Graph& g) {
  const int n = g.size();
  UnweightedMeasures out;
  out.n = n;
  out.degree.resize(n);
  out.clustering.assign(n, 0.0);
  out.distance.assign(std::size_t(n) * n, kInfinity);

  for (Node i = 0; i < n; ++i) {
    const auto& nb = g.neighbors(i);
    const int k = static_cast<int>(nb.size());
    out.degree[i] = k;
    if (k < 2) continue;
    int closed = 0;
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        if (g.has_link(nb[a], nb[b])) ++closed;
    out.clustering[i] = static_cast<double>(closed) / (0.5 * k * (k - 1));
  }

  std::vector<int> hops(n);
  std::queue<Node> frontier;
  for (Node s = 0; s < n; ++s) {
    std::fill(hops.begin(), hops.end(), -1);
    hops[s] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      const Node v = frontier.front();
      frontier.pop();
      for (Node w : g.neighbors(v)) {
        if (hops[w] < 0) {
          hops[w] = hops[v] + 1;
          frontier.push(w);
        }
      }
    }
    for (Node t = 0; t < n; ++t)
      if (hops[t] >= 0) out.distance[std::size_t(s) * n + t] = hops[t];
  }
  return out;
}

std::string to_string(RemovalStrategy s) {
  return s == RemovalStrategy::random ? "random" : "targeted";
}

Graph remove_nodes(const Graph& g, double fraction, RemovalStrategy strategy, Stream& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidArgument("removal fraction must lie in [0, 1]");
  const int n = g.size();
  const int count = static_cast<int>(std::lround(fraction * n));

  std::vector<Node> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (strategy == RemovalStrategy::random) {
    for (int i = 0; i < count; ++i) {
      const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(order[i], order[j]);
    }
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](Node a, Node b) { return g.degree(a) > g.degree(b); });
  }

  std::vector<char> removed(n, 0);
  for (int i = 0; i < count; ++i) removed[order[i]] = 1;
  std::vector<Node> relabel(n, -1);
  int next = 0;
  for (Node v = 0; v < n; ++v)
    if (!removed[v]) relabel[v] = next++;

  std::vector<Link> links;
  for (const auto& l : g.links())
    if (!removed[l.a] && !removed[l.b]) links.push_back({relabel[l.a], relabel[l.b]});
  return Graph(next, std::move(links));
}

}  // namespace qsn
