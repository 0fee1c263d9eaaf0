#include "bucketwidth/distortion.hpp"

#include <algorithm>
#include <numeric>

namespace bucketwidth {

std::string Ratio::str() const {
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  if (den / g == 1) return std::to_string(num / g);
  return std::to_string(num / g) + "/" + std::to_string(den / g);
}

Embedding pushing_positions(const Graph& g, std::span<const Vertex> order) {
  const int n = g.size();
  if (static_cast<int>(order.size()) != n) throw ContractViolation("order must list every vertex once");
  VertexSet seen = 0;
  for (Vertex v : order) {
    if (v < 0 || v >= n || contains(seen, v)) throw ContractViolation("order must list every vertex once");
    seen |= bit(v);
  }
  DistanceMatrix dist(g);
  Embedding pi{std::vector<int>(n, 0)};
  for (int i = 1; i < n; ++i) {
    if (!dist.reachable(order[i - 1], order[i])) throw ContractViolation("pushing order on a disconnected graph");
    pi.position[order[i]] = pi.position[order[i - 1]] + dist.at(order[i - 1], order[i]);
  }
  return pi;
}

EmbeddingMetrics embedding_metrics(const Graph& g, const Embedding& pi) {
  const int n = g.size();
  if (static_cast<int>(pi.position.size()) != n) throw ContractViolation("embedding size differs from the graph");
  if (!is_connected(g)) throw ContractViolation("metrics need a connected graph");
  if (n <= 1) return {{1, 1}, {1, 1}, {1, 1}};
  DistanceMatrix dist(g);
  std::optional<Ratio> lo, hi;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      Ratio x{std::abs(static_cast<std::int64_t>(pi.position[u]) - pi.position[v]), dist.at(u, v)};
      if (x.num == 0) throw ContractViolation("embedding is not injective");
      if (!lo || x < *lo) lo = x;
      if (!hi || x > *hi) hi = x;
    }
  }
  Ratio quotient{hi->num * lo->den, hi->den * lo->num};
  return {*lo, *hi, quotient};
}

bool is_pushing(const DistanceMatrix& dist, const Embedding& pi, VertexSet vertices) {
  std::vector<Vertex> sorted;
  for (VertexSet rest = vertices; rest; rest &= rest - 1) sorted.push_back(__builtin_ctzll(rest));
  std::sort(sorted.begin(), sorted.end(), [&](Vertex a, Vertex b) { return pi.position[a] < pi.position[b]; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (pi.position[sorted[i]] - pi.position[sorted[i - 1]] != dist.at(sorted[i - 1], sorted[i])) return false;
  }
  return true;
}

DistortionLayout::DistortionLayout(int d, int r) : d_(d), r_(r) {
  if (d < 1 || r < 0) throw ContractViolation("layout needs d >= 1 and r >= 0");
  const int count = position_count();
  color_order_.resize(count);
  std::iota(color_order_.begin(), color_order_.end(), 1);
  std::sort(color_order_.begin(), color_order_.end(), [&](int a, int b) {
    return std::pair(color(a), segment(a)) < std::pair(color(b), segment(b));
  });
  rank_.assign(count + 1, 0);
  for (int i = 0; i < count; ++i) rank_[color_order_[i]] = i + 1;
}

int DistortionLayout::segment(int pos) const {
  const int w = d_ + 1;
  int q = pos - 1;
  return (q >= 0 ? q / w : -((-q + w - 1) / w)) + 1;
}

int DistortionLayout::color_rank(int pos) const {
  if (pos < 1 || pos > position_count()) return 0;
  return rank_[pos];
}

bool satisfies_distortion_segments(const Graph& g, const DistortionLayout& layout, const Embedding& pi) {
  if (static_cast<int>(pi.position.size()) != g.size()) throw ContractViolation("embedding size differs from the graph");
  for (auto [u, v] : g.edges()) {
    int pu = pi.position[u], pv = pi.position[v];
    if (pu > pv) std::swap(pu, pv);
    int su = layout.segment(pu), sv = layout.segment(pv);
    if (sv - su > 1) return false;
    if (sv == su + 1 && layout.color(pu) <= layout.color(pv)) return false;
  }
  return true;
}

void DistortionStats::merge(const DistortionStats& other) {
  guesses += other.guesses;
  expansions += other.expansions;
  table_size = std::max(table_size, other.table_size);
  peak_resident = std::max(peak_resident, other.peak_resident);
  mid_candidates += other.mid_candidates;
  path_checks += other.path_checks;
  split_guesses += other.split_guesses;
  subproblems += other.subproblems;
}

}  // namespace bucketwidth
