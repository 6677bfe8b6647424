#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "qsn/rng.hpp"

namespace qsn {

using Node = int;

/// Unordered node pair stored with a < b.
struct Link {
  Node a = 0;
  Node b = 0;
  auto operator<=>(const Link&) const = default;
};

/// Undirected simple graph on nodes 0..n-1. Immutable once constructed.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  /// Links may be given in either orientation; duplicates and self-loops
  /// are rejected with InvalidArgument.
  Graph(int n, std::vector<Link> links);

  int size() const { return n_; }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Node>& neighbors(Node i) const { return adjacency_[i]; }
  int degree(Node i) const { return static_cast<int>(adjacency_[i].size()); }
  bool has_link(Node a, Node b) const;
  bool connected() const;
  /// Average degree Z = 2|links| / n.
  double coordination() const;

  static Graph complete(int n);
  static Graph path(int n);
  static Graph ring(int n);

  friend bool operator==(const Graph& x, const Graph& y) {
    return x.n_ == y.n_ && x.links_ == y.links_;
  }

 private:
  int n_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<Node>> adjacency_;
};

enum class GraphModel { erdos_renyi, watts_strogatz, barabasi_albert };

std::string to_string(GraphModel model);
GraphModel parse_graph_model(const std::string& name);

struct GraphModelSpec {
  GraphModel model = GraphModel::erdos_renyi;
  int n = 20;
  double p = 0.26;  // ER link probability or WS rewiring probability
  int k = 4;        // WS ring degree
  int m = 3;        // BA attachments per arriving node
  bool require_connected = false;

  /// Throws InvalidArgument when the parameters are outside the model domain.
  void validate() const;
  /// Ensemble-nominal coordination: (n-1)p, K, or 2m(n-m)/n.
  double nominal_coordination() const;
  std::string name() const { return to_string(model); }
};

struct GeneratedGraph {
  Graph graph;
  int rejections = 0;
};

/// Maximum number of regenerations before a connectivity requirement is
/// declared unattainable.
inline constexpr int kMaxConnectivityRejections = 100000;

Graph gen_erdos_renyi(int n, double p, Stream& rng);
Graph gen_watts_strogatz(int n, int k, double p, Stream& rng);
Graph gen_barabasi_albert(int n, int m, Stream& rng);

/// Draws one graph from `spec`, regenerating disconnected samples when
/// `spec.require_connected` is set.
GeneratedGraph generate(const GraphModelSpec& spec, Stream& rng);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct UnweightedMeasures {
  int n = 0;
  std::vector<int> degree;
  std::vector<double> clustering;
  std::vector<double> distance;  // n*n row-major, +inf when unreachable

  double dist(Node i, Node j) const { return distance[std::size_t(i) * n + j]; }
};

UnweightedMeasures unweighted_measures(const Graph& g);

enum class RemovalStrategy { random, targeted };

std::string to_string(RemovalStrategy s);

/// Removes round(fraction * n) nodes and relabels the survivors in their
/// original order. Targeted removal takes the highest initial degrees
/// first, ties by ascending index.
Graph remove_nodes(const Graph& g, double fraction, RemovalStrategy strategy,
                   Stream& rng);

/// Plain-text form: `n=<count>` then one `i j` line per link.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace qsn
