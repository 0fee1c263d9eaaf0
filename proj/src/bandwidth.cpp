#include "bucketwidth/bandwidth.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "bucketwidth/oracle.hpp"

namespace bucketwidth {

bool is_bijective(const Ordering& pi, int n) {
  if (static_cast<int>(pi.position.size()) != n) return false;
  std::vector<bool> used(n + 1, false);
  for (int p : pi.position) {
    if (p < 1 || p > n || used[p]) return false;
    used[p] = true;
  }
  return true;
}

int bandwidth_of(const Graph& g, const Ordering& pi) {
  if (!is_bijective(pi, g.size())) throw ContractViolation("ordering is not a bijection onto 1..n");
  int best = 0;
  for (auto [u, v] : g.edges()) best = std::max(best, std::abs(pi.position[u] - pi.position[v]));
  return best;
}

PositionLayout::PositionLayout(int n, int bound) : n_(n), bound_(bound) {
  if (n < 0 || bound < 0) throw ContractViolation("layout needs n >= 0 and bound >= 0");
  color_order_.resize(n);
  for (int i = 0; i < n; ++i) color_order_[i] = i + 1;
  std::sort(color_order_.begin(), color_order_.end(), [&](int a, int b) {
    return std::pair(color(a), segment(a)) < std::pair(color(b), segment(b));
  });
}

std::vector<int> PositionLayout::prefix_segment_counts(int k) const {
  std::vector<int> counts(segment_count() + 1, 0);
  for (int i = 0; i < k; ++i) ++counts[segment_at(i)];
  return counts;
}

bool is_b_ordering_via_segments(const Graph& g, const PositionLayout& layout, const Ordering& pi) {
  if (!is_bijective(pi, g.size())) throw ContractViolation("ordering is not a bijection onto 1..n");
  for (auto [u, v] : g.edges()) {
    int pu = pi.position[u], pv = pi.position[v];
    if (pu > pv) std::swap(pu, pv);
    int su = layout.segment(pu), sv = layout.segment(pv);
    if (sv - su > 1) return false;
    if (sv == su + 1 && layout.color(pu) <= layout.color(pv)) return false;
  }
  return true;
}

namespace {

// Value multiset of `s` restricted to `subset`, compared against the first
// |subset| color-order positions.
bool matches_prefix_multiset(const PositionLayout& layout, const BandwidthState& s, VertexSet subset) {
  const int k = set_size(subset);
  if (k > layout.size()) return false;
  std::vector<int> need = layout.prefix_segment_counts(k);
  for (VertexSet rest = subset; rest; rest &= rest - 1) {
    int x = s.at(__builtin_ctzll(rest));
    if (x < 1 || x >= static_cast<int>(need.size()) || need[x] == 0) return false;
    --need[x];
  }
  return true;
}

BandwidthState restrict_to(const BandwidthState& s, VertexSet subset) {
  BandwidthState out = PartialBucketFunction::empty(static_cast<int>(s.values.size()));
  for (VertexSet rest = subset; rest; rest &= rest - 1) {
    Vertex v = __builtin_ctzll(rest);
    out.assign(v, s.at(v));
  }
  return out;
}

}  // namespace

bool is_state(const Graph& g, const PositionLayout& layout, const BandwidthState& s) {
  if (static_cast<int>(s.values.size()) != g.size() || layout.size() != g.size()) return false;
  if (s.domain & ~full_set(g.size())) return false;
  return matches_prefix_multiset(layout, s, s.domain) && is_partial_bucket_function(g, s);
}

std::vector<std::pair<Vertex, BandwidthState>> state_successors(const Graph& g, const PositionLayout& layout,
                                                                 const BandwidthState& s) {
  std::vector<std::pair<Vertex, BandwidthState>> out;
  const int k = s.size();
  if (k >= g.size()) return out;
  const int value = layout.segment_at(k);
  for (Vertex v = 0; v < g.size(); ++v) {
    if (s.has(v)) continue;
    bool blocked = false;
    for (Vertex u : g.neighbors(v)) {
      if (s.has(u) && s.at(u) < value) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    BandwidthState next = s;
    next.assign(v, value);
    if (is_partial_bucket_function(g, next)) out.emplace_back(v, std::move(next));
  }
  return out;
}

Ordering ordering_from_sequence(const PositionLayout& layout, std::span<const Vertex> added) {
  if (static_cast<int>(added.size()) != layout.size()) throw ContractViolation("sequence must cover every vertex");
  Ordering pi{std::vector<int>(layout.size(), 0)};
  for (std::size_t k = 0; k < added.size(); ++k) pi.position[added[k]] = layout.color_order()[k];
  return pi;
}

void SearchStats::merge_peak(const SearchStats& other) {
  expansions += other.expansions;
  table_size = std::max(table_size, other.table_size);
  peak_resident = std::max(peak_resident, other.peak_resident);
  mid_candidates += other.mid_candidates;
  path_checks += other.path_checks;
}

namespace {

// Table of every state reachable from (empty, empty), grown one layer (one
// more vertex) at a time. Each entry keeps its parent and the added vertex.
class LayeredTable {
 public:
  LayeredTable(const Graph& g, const PositionLayout& layout) : g_(g), layout_(layout) {}

  std::optional<std::vector<Vertex>> run() {
    const int n = g_.size();
    add(std::string(n, '\0'), -1, -1);
    std::size_t begin = 0;
    for (int layer = 0; layer < n; ++layer) {
      const std::size_t end = entries_.size();
      if (begin == end) return std::nullopt;
      for (std::size_t i = begin; i < end; ++i) {
        ++stats.expansions;
        for (auto& [v, next] : state_successors(g_, layout_, decode(*entries_[i].key))) {
          add(encode(next), static_cast<int>(i), v);
        }
      }
      begin = end;
    }
    if (begin == entries_.size()) return std::nullopt;
    std::vector<Vertex> added;
    for (int i = static_cast<int>(begin); entries_[i].parent >= 0; i = entries_[i].parent) added.push_back(entries_[i].vertex);
    std::reverse(added.begin(), added.end());
    return added;
  }

  SearchStats stats;

 private:
  struct Entry {
    const std::string* key;
    int parent;
    Vertex vertex;
  };

  void add(std::string key, int parent, Vertex v) {
    auto [it, fresh] = index_.insert(std::move(key));
    if (!fresh) return;
    entries_.push_back({&*it, parent, v});
    stats.table_size = entries_.size();
    stats.peak_resident = entries_.size();
  }

  std::string encode(const BandwidthState& s) const {
    std::string k(g_.size(), '\0');
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (s.has(v)) k[v] = static_cast<char>(s.at(v));
    }
    return k;
  }

  BandwidthState decode(const std::string& key) const {
    BandwidthState s = PartialBucketFunction::empty(g_.size());
    for (Vertex v = 0; v < g_.size(); ++v) {
      if (key[v] != 0) s.assign(v, static_cast<unsigned char>(key[v]));
    }
    return s;
  }

  const Graph& g_;
  const PositionLayout& layout_;
  std::unordered_set<std::string> index_;
  std::vector<Entry> entries_;
};

std::optional<Ordering> edgeless_only(const Graph& g) {
  if (g.edge_count() != 0) return std::nullopt;
  Ordering pi{std::vector<int>(g.size())};
  for (Vertex v = 0; v < g.size(); ++v) pi.position[v] = v + 1;
  return pi;
}

}  // namespace

std::optional<Ordering> solve_expspace(const Graph& g, int bound, SearchStats* stats) {
  if (bound < 0) throw ContractViolation("bound must be nonnegative");
  if (bound == 0 || g.size() == 0) return edgeless_only(g);
  PositionLayout layout(g.size(), bound);
  LayeredTable table(g, layout);
  auto added = table.run();
  if (stats) *stats = table.stats;
  if (!added) return std::nullopt;
  return ordering_from_sequence(layout, *added);
}

namespace {

class PathCheck {
 public:
  PathCheck(const Graph& g, const PositionLayout& layout, const BandwidthState& target, SearchStats& stats)
      : g_(g), layout_(layout), target_(target), stats_(stats) {}

  // Chain of states from target|from_set to target|to_set; appends the added vertices.
  bool run(VertexSet from_set, VertexSet to_set, std::vector<Vertex>& out, int depth) {
    ++stats_.path_checks;
    stats_.peak_resident = std::max<std::uint64_t>(stats_.peak_resident, 2 * depth + 2);
    const VertexSet gap = to_set & ~from_set;
    const int m = set_size(gap);
    if (m == 0) return true;
    if (m == 1) {
      if (!is_successor(g_, restrict_to(target_, from_set), restrict_to(target_, to_set))) return false;
      out.push_back(__builtin_ctzll(gap));
      return true;
    }

    const int a = set_size(from_set);
    const int mid = (a + set_size(to_set)) / 2;
    const int pick = mid - a;
    std::vector<Vertex> free;
    for (VertexSet rest = gap; rest; rest &= rest - 1) free.push_back(__builtin_ctzll(rest));

    // Subsets of `free` of size `pick`, in lexicographic order of index tuples.
    std::vector<int> idx(pick);
    for (int i = 0; i < pick; ++i) idx[i] = i;
    while (true) {
      VertexSet middle = from_set;
      for (int i : idx) middle |= bit(free[i]);
      if (matches_prefix_multiset(layout_, target_, middle) &&
          is_partial_bucket_function(g_, restrict_to(target_, middle))) {
        const std::size_t mark = out.size();
        if (run(from_set, middle, out, depth + 1) && run(middle, to_set, out, depth + 1)) return true;
        out.resize(mark);
      }
      int i = pick - 1;
      while (i >= 0 && idx[i] == m - pick + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
    }
    return false;
  }

 private:
  const Graph& g_;
  const PositionLayout& layout_;
  const BandwidthState& target_;
  SearchStats& stats_;
};

}  // namespace

std::optional<std::vector<Vertex>> path_between_states(const Graph& g, const PositionLayout& layout,
                                                       const BandwidthState& from, const BandwidthState& to,
                                                       SearchStats* stats) {
  if ((from.domain & ~to.domain) != 0) throw ContractViolation("source domain is not contained in the target");
  for (VertexSet rest = from.domain; rest; rest &= rest - 1) {
    Vertex v = __builtin_ctzll(rest);
    if (from.at(v) != to.at(v)) throw ContractViolation("source and target disagree on a shared vertex");
  }
  if (!is_state(g, layout, from) || !is_state(g, layout, to)) throw ContractViolation("both endpoints must be states");

  SearchStats local;
  PathCheck check(g, layout, to, local);
  std::vector<Vertex> out;
  bool ok = check.run(from.domain, to.domain, out, 0);
  if (stats) stats->merge_peak(local);
  if (!ok) return std::nullopt;
  return out;
}

std::optional<Ordering> solve_bandwidth(const Graph& g, int bound, BandwidthAlgorithm algo,
                                        const PolyspaceOptions& options, SearchStats* stats) {
  switch (algo) {
    case BandwidthAlgorithm::bruteforce: {
      if (bound < 0) throw ContractViolation("bound must be nonnegative");
      auto [best, pi] = bandwidth_bruteforce(g);
      if (best > bound) return std::nullopt;
      return pi;
    }
    case BandwidthAlgorithm::expspace:
      return solve_expspace(g, bound, stats);
    case BandwidthAlgorithm::polyspace:
      return solve_polyspace(g, bound, options, stats);
  }
  throw ContractViolation("unknown algorithm");
}

BandwidthResult minimize_bandwidth(const Graph& g, BandwidthAlgorithm algo, const PolyspaceOptions& options) {
  if (g.size() == 0) throw ContractViolation("empty graph");
  BandwidthResult result;
  if (algo == BandwidthAlgorithm::bruteforce) {
    auto [best, pi] = bandwidth_bruteforce(g);
    result.bandwidth = best;
    result.ordering = std::move(pi);
    return result;
  }
  int lo = 0, hi = g.size() - 1;
  std::optional<Ordering> best;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    SearchStats stats;
    auto found = solve_bandwidth(g, mid, algo, options, &stats);
    result.stats.merge_peak(stats);
    if (found) {
      hi = mid;
      best = std::move(found);
    } else {
      lo = mid + 1;
    }
  }
  if (!best || bandwidth_of(g, *best) > lo) {
    SearchStats stats;
    best = solve_bandwidth(g, lo, algo, options, &stats);
    result.stats.merge_peak(stats);
  }
  if (!best) throw ContractViolation("no ordering found at bound n-1");
  result.bandwidth = lo;
  result.ordering = std::move(*best);
  return result;
}

}  // namespace bucketwidth
