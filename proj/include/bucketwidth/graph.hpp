#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bucketwidth {

/// Internal vertex id, 0-based. External formats are 1-based.
using Vertex = int;

/// Vertex subset as a bitmask; every solver in this library is exponential,
/// so graphs are capped at 64 vertices.
using VertexSet = std::uint64_t;

inline constexpr int kMaxVertices = 64;

constexpr VertexSet bit(Vertex v) { return VertexSet{1} << v; }
constexpr bool contains(VertexSet s, Vertex v) { return (s >> v) & 1U; }
constexpr int set_size(VertexSet s) { return __builtin_popcountll(s); }
constexpr VertexSet full_set(int n) { return n >= 64 ? ~VertexSet{0} : (bit(n) - 1); }

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

/// Undirected simple graph. Neighbor lists are kept sorted.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  /// Edges are 0-based pairs. Duplicates are merged; self-loops and
  /// out-of-range endpoints throw std::invalid_argument.
  static Graph from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges);

  void add_edge(Vertex u, Vertex v);

  int size() const { return static_cast<int>(adjacency_.size()); }
  int edge_count() const { return edge_count_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_[v]; }
  VertexSet neighbor_mask(Vertex v) const { return masks_[v]; }
  bool adjacent(Vertex u, Vertex v) const { return contains(masks_[u], v); }
  int degree(Vertex v) const { return static_cast<int>(adjacency_[v].size()); }

  /// Edge list with u < v, lexicographically sorted.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  /// Subgraph induced by `vertices`; vertex i of the result is vertices[i].
  Graph induced(std::span<const Vertex> vertices) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.adjacency_ == b.adjacency_; }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<VertexSet> masks_;
  int edge_count_ = 0;
};

/// All-pairs hop distances. Unreachable pairs hold `unreachable()`, which is
/// larger than every real distance.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(const Graph& g);

  int size() const { return n_; }
  int at(Vertex u, Vertex v) const { return dist_[static_cast<std::size_t>(u) * n_ + v]; }
  int unreachable() const { return n_; }
  bool reachable(Vertex u, Vertex v) const { return at(u, v) < n_; }

 private:
  int n_ = 0;
  std::vector<int> dist_;
};

DistanceMatrix all_pairs_distances(const Graph& g);

bool is_connected(const Graph& g);

/// Components in order of their lowest vertex; each component sorted.
std::vector<std::vector<Vertex>> connected_components(const Graph& g);

struct RootedSpanningTree {
  Vertex root = 0;
  std::vector<Vertex> parent;                 // -1 for the root
  std::vector<Vertex> order;                  // root first, parents before children
  std::vector<std::vector<Vertex>> children;

  int tree_degree(Vertex v) const {
    return static_cast<int>(children[v].size()) + (parent[v] >= 0 ? 1 : 0);
  }
};

/// Spanning tree of a connected graph built by BFS from vertex 0 and re-rooted
/// at its lowest-index leaf, so the root has tree-degree 1 whenever n >= 2.
/// Throws ContractViolation on disconnected input.
RootedSpanningTree rooted_spanning_tree(const Graph& g);

/// One rooted spanning tree per connected component (vertex ids stay global;
/// `parent` and `children` cover all of g, `order` only the component).
std::vector<RootedSpanningTree> rooted_spanning_forest(const Graph& g);

enum class GraphFormat { edge_list, dimacs };

/// "n m" header followed by m lines "u v" (1-based). Blank lines and lines
/// starting with '#' are skipped.
Graph parse_edge_list(std::string_view text);

/// "p edge n m" header, "e u v" edge lines, "c" comments.
Graph parse_dimacs(std::string_view text);

Graph parse_graph(std::string_view text, GraphFormat format = GraphFormat::edge_list);
Graph read_graph_file(const std::string& path, GraphFormat format = GraphFormat::edge_list);

std::string to_edge_list(const Graph& g);

/// Small fixtures used by tests, the CLI corpus and benchmarks.
namespace fixtures {
Graph path(int n);
Graph cycle(int n);
Graph complete(int n);
Graph star(int leaves);
}  // namespace fixtures

}  // namespace bucketwidth
