#include "bucketwidth/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bucketwidth {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

Graph::Graph(int n) {
  if (n < 0 || n > kMaxVertices) {
    throw std::invalid_argument("vertex count must be in [0, " + std::to_string(kMaxVertices) + "]");
  }
  adjacency_.resize(n);
  masks_.assign(n, 0);
}

Graph Graph::from_edges(int n, std::span<const std::pair<Vertex, Vertex>> edges) {
  Graph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::add_edge(Vertex u, Vertex v) {
  if (u < 0 || v < 0 || u >= size() || v >= size()) throw std::invalid_argument("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loop");
  if (adjacent(u, v)) return;
  auto insert_sorted = [](std::vector<Vertex>& list, Vertex x) {
    list.insert(std::lower_bound(list.begin(), list.end(), x), x);
  };
  insert_sorted(adjacency_[u], v);
  insert_sorted(adjacency_[v], u);
  masks_[u] |= bit(v);
  masks_[v] |= bit(u);
  ++edge_count_;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < size(); ++u) {
    for (Vertex v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::induced(std::span<const Vertex> vertices) const {
  Graph sub(static_cast<int>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      if (adjacent(vertices[i], vertices[j])) sub.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  return sub;
}

DistanceMatrix::DistanceMatrix(const Graph& g) : n_(g.size()), dist_(static_cast<std::size_t>(n_) * n_, n_) {
  std::vector<Vertex> queue(n_);
  for (Vertex s = 0; s < n_; ++s) {
    int* row = dist_.data() + static_cast<std::size_t>(s) * n_;
    row[s] = 0;
    int head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      Vertex u = queue[head++];
      for (Vertex w : g.neighbors(u)) {
        if (row[w] == n_) {
          row[w] = row[u] + 1;
          queue[tail++] = w;
        }
      }
    }
  }
}

DistanceMatrix all_pairs_distances(const Graph& g) { return DistanceMatrix(g); }

std::vector<std::vector<Vertex>> connected_components(const Graph& g) {
  std::vector<std::vector<Vertex>> components;
  std::vector<bool> seen(g.size(), false);
  for (Vertex s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    std::vector<Vertex> comp{s};
    seen[s] = true;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (Vertex w : g.neighbors(comp[i])) {
        if (!seen[w]) {
          seen[w] = true;
          comp.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

namespace {

// BFS tree of the component containing `start`, re-rooted at its lowest-index leaf.
void build_component_tree(const Graph& g, Vertex start, RootedSpanningTree& out, std::vector<bool>& seen) {
  std::vector<Vertex> bfs{start};
  std::vector<std::vector<Vertex>> tree_adj(g.size());
  seen[start] = true;
  for (std::size_t i = 0; i < bfs.size(); ++i) {
    Vertex u = bfs[i];
    for (Vertex w : g.neighbors(u)) {
      if (!seen[w]) {
        seen[w] = true;
        bfs.push_back(w);
        tree_adj[u].push_back(w);
        tree_adj[w].push_back(u);
      }
    }
  }
  Vertex root = *std::min_element(bfs.begin(), bfs.end());
  if (bfs.size() >= 2) {
    root = g.size();
    for (Vertex v : bfs) {
      if (tree_adj[v].size() == 1) root = std::min(root, v);
    }
  }
  out.root = root;
  out.order.clear();
  out.order.push_back(root);
  out.parent[root] = -1;
  for (std::size_t i = 0; i < out.order.size(); ++i) {
    Vertex u = out.order[i];
    std::sort(tree_adj[u].begin(), tree_adj[u].end());
    for (Vertex w : tree_adj[u]) {
      if (w == out.parent[u]) continue;
      out.parent[w] = u;
      out.children[u].push_back(w);
      out.order.push_back(w);
    }
  }
}

}  // namespace

RootedSpanningTree rooted_spanning_tree(const Graph& g) {
  if (g.size() == 0) throw ContractViolation("spanning tree of an empty graph");
  if (!is_connected(g)) throw ContractViolation("spanning tree requested for a disconnected graph");
  RootedSpanningTree tree;
  tree.parent.assign(g.size(), -1);
  tree.children.assign(g.size(), {});
  std::vector<bool> seen(g.size(), false);
  build_component_tree(g, 0, tree, seen);
  return tree;
}

std::vector<RootedSpanningTree> rooted_spanning_forest(const Graph& g) {
  std::vector<RootedSpanningTree> forest;
  std::vector<bool> seen(g.size(), false);
  for (Vertex s = 0; s < g.size(); ++s) {
    if (seen[s]) continue;
    RootedSpanningTree tree;
    tree.parent.assign(g.size(), -1);
    tree.children.assign(g.size(), {});
    build_component_tree(g, s, tree, seen);
    forest.push_back(std::move(tree));
  }
  return forest;
}

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

long parse_int(std::string_view word, int line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(word) + "'");
  }
  return value;
}

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  }
};

Graph make_graph(long n, int line) {
  if (n < 1 || n > kMaxVertices) {
    throw ParseError(line, "vertex count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxVertices) + "]");
  }
  return Graph(static_cast<int>(n));
}

void add_parsed_edge(Graph& g, long u, long v, int line) {
  for (long x : {u, v}) {
    if (x < 1 || x > g.size()) throw ParseError(line, "vertex " + std::to_string(x) + " out of range");
  }
  if (u == v) throw ParseError(line, "self-loop at vertex " + std::to_string(u));
  g.add_edge(static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1));
}

}  // namespace

Graph parse_edge_list(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  std::optional<Graph> g;
  long expected = 0, seen = 0;
  while (reader.next(line)) {
    auto words = split_words(line);
    if (words.empty() || words[0].front() == '#') continue;
    if (words.size() != 2) throw ParseError(reader.line_no, "expected two integers");
    long a = parse_int(words[0], reader.line_no);
    long b = parse_int(words[1], reader.line_no);
    if (!g) {
      g = make_graph(a, reader.line_no);
      if (b < 0) throw ParseError(reader.line_no, "negative edge count");
      expected = b;
      continue;
    }
    if (seen == expected) throw ParseError(reader.line_no, "more edge lines than the header declares");
    add_parsed_edge(*g, a, b, reader.line_no);
    ++seen;
  }
  if (!g) throw ParseError(reader.line_no, "missing 'n m' header");
  if (seen != expected) {
    throw ParseError(reader.line_no, "expected " + std::to_string(expected) + " edges, found " + std::to_string(seen));
  }
  return *std::move(g);
}

Graph parse_dimacs(std::string_view text) {
  LineReader reader{text};
  std::string_view line;
  std::optional<Graph> g;
  while (reader.next(line)) {
    auto words = split_words(line);
    if (words.empty() || words[0] == "c") continue;
    if (words[0] == "p") {
      if (g) throw ParseError(reader.line_no, "duplicate problem line");
      if (words.size() != 4 || (words[1] != "edge" && words[1] != "col")) {
        throw ParseError(reader.line_no, "expected 'p edge n m'");
      }
      g = make_graph(parse_int(words[2], reader.line_no), reader.line_no);
      continue;
    }
    if (words[0] == "e") {
      if (!g) throw ParseError(reader.line_no, "edge before problem line");
      if (words.size() != 3) throw ParseError(reader.line_no, "expected 'e u v'");
      add_parsed_edge(*g, parse_int(words[1], reader.line_no), parse_int(words[2], reader.line_no), reader.line_no);
      continue;
    }
    throw ParseError(reader.line_no, "unknown line type '" + std::string(words[0]) + "'");
  }
  if (!g) throw ParseError(reader.line_no, "missing problem line");
  return *std::move(g);
}

Graph parse_graph(std::string_view text, GraphFormat format) {
  return format == GraphFormat::dimacs ? parse_dimacs(text) : parse_edge_list(text);
}

Graph read_graph_file(const std::string& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str(), format);
}

std::string to_edge_list(const Graph& g) {
  std::string out = std::to_string(g.size()) + " " + std::to_string(g.edge_count()) + "\n";
  for (auto [u, v] : g.edges()) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

namespace fixtures {

Graph path(int n) {
  Graph g(n);
  for (Vertex v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

Graph cycle(int n) {
  Graph g = path(n);
  if (n >= 3) g.add_edge(n - 1, 0);
  return g;
}

Graph complete(int n) {
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

Graph star(int leaves) {
  Graph g(leaves + 1);
  for (Vertex v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

}  // namespace fixtures

}  // namespace bucketwidth
