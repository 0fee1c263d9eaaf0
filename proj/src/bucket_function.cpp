#include "bucketwidth/bucket_function.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>

namespace bucketwidth {

double CountingConstants::delta() { return std::sqrt(0.6 * alpha * alpha + 0.4 * beta * beta); }

bool is_bucket_extension(const Graph& g, const PartialBucketFunction& pbf, const BucketExtension& ext) {
  if (static_cast<int>(ext.size()) != g.size()) return false;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (pbf.has(v) && ext[v] != pbf.at(v)) return false;
  }
  for (auto [u, v] : g.edges()) {
    if (std::abs(ext[u] - ext[v]) > 1) return false;
    if (pbf.has(u) && !pbf.has(v) && ext[u] < ext[v]) return false;
    if (pbf.has(v) && !pbf.has(u) && ext[v] < ext[u]) return false;
  }
  return true;
}

std::optional<BucketExtension> complete_extension(const Graph& g, const PartialBucketFunction& pbf,
                                                  const PartialBucketFunction& pins,
                                                  std::optional<ValueRange> range) {
  const int n = g.size();
  const VertexSet in_a = pbf.domain;
  const VertexSet in_b = pbf.domain | pins.domain;

  // f' on B, taken from pbf on A and from pins elsewhere.
  std::array<int, kMaxVertices> pinned{};
  int min_pin = INT_MAX, max_pin = INT_MIN;
  for (Vertex v = 0; v < n; ++v) {
    if (!contains(in_b, v)) continue;
    if (pbf.has(v) && pins.has(v) && pbf.at(v) != pins.at(v)) {
      throw ContractViolation("pinned value disagrees with the partial function at vertex " + std::to_string(v + 1));
    }
    pinned[v] = pbf.has(v) ? pbf.at(v) : pins.at(v);
    min_pin = std::min(min_pin, pinned[v]);
    max_pin = std::max(max_pin, pinned[v]);
    if (range && !range->contains(pinned[v])) return std::nullopt;
  }

  // Edges with both ends pinned are not touched by the propagation below.
  for (Vertex u = 0; u < n; ++u) {
    if (!contains(in_b, u)) continue;
    for (Vertex v : g.neighbors(u)) {
      if (v < u || !contains(in_b, v)) continue;
      if (std::abs(pinned[u] - pinned[v]) > 1) return std::nullopt;
      if (contains(in_a, u) && !contains(in_a, v) && pinned[u] < pinned[v]) return std::nullopt;
      if (contains(in_a, v) && !contains(in_a, u) && pinned[v] < pinned[u]) return std::nullopt;
    }
  }

  ValueRange window = range.value_or(in_b == 0 ? ValueRange{-n, n} : ValueRange{min_pin - n, max_pin + n});

  // Every candidate set stays an interval: it starts as one and is only ever
  // intersected with intervals or dilated by one.
  std::array<int, kMaxVertices> lo{}, hi{};
  for (Vertex v = 0; v < n; ++v) {
    if (contains(in_b, v)) {
      lo[v] = hi[v] = pinned[v];
    } else {
      lo[v] = window.lo;
      hi[v] = window.hi;
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (Vertex v = 0; v < n; ++v) {
      if (contains(in_b, v)) continue;
      int l = lo[v], h = hi[v];
      for (Vertex u : g.neighbors(v)) {
        if (contains(in_a, u)) {
          l = std::max(l, pinned[u] - 1);
          h = std::min(h, pinned[u]);
        } else {
          l = std::max(l, lo[u] - 1);
          h = std::min(h, hi[u] + 1);
        }
      }
      if (l > h) return std::nullopt;
      if (l != lo[v] || h != hi[v]) {
        lo[v] = l;
        hi[v] = h;
        changed = true;
      }
    }
  }

  BucketExtension ext(n);
  for (Vertex v = 0; v < n; ++v) ext[v] = lo[v];
  return ext;
}

std::optional<BucketExtension> complete_extension(const Graph& g, const PartialBucketFunction& pbf,
                                                  std::optional<ValueRange> range) {
  return complete_extension(g, pbf, PartialBucketFunction::empty(g.size()), range);
}

bool is_partial_bucket_function(const Graph& g, const PartialBucketFunction& pbf) {
  return complete_extension(g, pbf).has_value();
}

bool is_successor(const Graph& g, const PartialBucketFunction& prev, const PartialBucketFunction& next) {
  VertexSet added = next.domain & ~prev.domain;
  if ((prev.domain & ~next.domain) != 0 || set_size(added) != 1) return false;
  Vertex v = __builtin_ctzll(added);
  for (Vertex u = 0; u < g.size(); ++u) {
    if (prev.has(u) && prev.at(u) != next.at(u)) return false;
  }
  for (Vertex u : g.neighbors(v)) {
    if (prev.has(u) && prev.at(u) < next.at(v)) return false;
  }
  return is_partial_bucket_function(g, prev) && is_partial_bucket_function(g, next);
}

namespace {

class ExtensionEnumerator {
 public:
  ExtensionEnumerator(const Graph& g, const PartialBucketFunction& pbf, std::optional<ValueRange> range,
                      const ExtensionVisitor& visit)
      : g_(g), pbf_(pbf), range_(range), visit_(visit) {}

  bool run(PartialBucketFunction pins) {
    if (!complete_extension(g_, pbf_, pins, range_)) return true;
    return extend(pins);
  }

 private:
  bool extend(PartialBucketFunction& pins) {
    const VertexSet assigned = pbf_.domain | pins.domain;
    const VertexSet all = full_set(g_.size());
    if (assigned == all) {
      BucketExtension ext(g_.size());
      for (Vertex v = 0; v < g_.size(); ++v) ext[v] = pbf_.has(v) ? pbf_.at(v) : pins.at(v);
      return visit_(ext);
    }

    // Lowest free vertex next to an assigned one; candidates are its
    // lowest assigned neighbor's value plus -1, 0 or +1.
    Vertex next = -1;
    int base = 0;
    for (Vertex v = 0; v < g_.size() && next < 0; ++v) {
      if (contains(assigned, v)) continue;
      VertexSet assigned_nbrs = g_.neighbor_mask(v) & assigned;
      if (assigned_nbrs == 0) continue;
      Vertex w = __builtin_ctzll(assigned_nbrs);
      next = v;
      base = pbf_.has(w) ? pbf_.at(w) : pins.at(w);
    }

    std::vector<int> candidates;
    if (next >= 0) {
      candidates = {base - 1, base, base + 1};
    } else {
      // A component with nothing assigned yet.
      next = __builtin_ctzll(all & ~assigned);
      if (!range_) throw ContractViolation("a component without assigned vertices needs a value range or a seed");
      for (int x = range_->lo; x <= range_->hi; ++x) candidates.push_back(x);
    }

    for (int x : candidates) {
      pins.assign(next, x);
      if (complete_extension(g_, pbf_, pins, range_)) {
        if (!extend(pins)) {
          pins.erase(next);
          return false;
        }
      }
      pins.erase(next);
    }
    return true;
  }

  const Graph& g_;
  const PartialBucketFunction& pbf_;
  std::optional<ValueRange> range_;
  const ExtensionVisitor& visit_;
};

}  // namespace

bool for_each_bucket_extension(const Graph& g, const PartialBucketFunction& pbf, std::optional<ValueRange> range,
                               std::optional<Seed> seed, const ExtensionVisitor& visit) {
  PartialBucketFunction pins = PartialBucketFunction::empty(g.size());
  if (seed) {
    if (seed->vertex < 0 || seed->vertex >= g.size()) throw ContractViolation("seed vertex out of range");
    if (pbf.has(seed->vertex) && pbf.at(seed->vertex) != seed->value) {
      throw ContractViolation("seed disagrees with the partial function");
    }
    pins.assign(seed->vertex, seed->value);
  }
  ExtensionEnumerator enumerator(g, pbf, range, visit);
  return enumerator.run(std::move(pins));
}

std::vector<BucketExtension> bucket_extensions(const Graph& g, const PartialBucketFunction& pbf,
                                               std::optional<ValueRange> range, std::optional<Seed> seed) {
  std::vector<BucketExtension> out;
  for_each_bucket_extension(g, pbf, range, seed, [&](const BucketExtension& ext) {
    out.push_back(ext);
    return true;
  });
  return out;
}

std::uint64_t count_triples_bruteforce(const Graph& g, int N) {
  const int n = g.size();
  if (n > 12) throw ContractViolation("count_triples_bruteforce refuses graphs with more than 12 vertices");
  if (N < 1) return 0;
  const auto edges = g.edges();
  std::vector<int> ext(n, 1);
  std::uint64_t count = 0;
  while (true) {
    bool smooth = std::all_of(edges.begin(), edges.end(), [&](auto e) { return std::abs(ext[e.first] - ext[e.second]) <= 1; });
    if (smooth) {
      for (VertexSet a = 0; a <= full_set(n); ++a) {
        bool ok = true;
        for (auto [u, v] : edges) {
          if (contains(a, u) && !contains(a, v) && ext[u] < ext[v]) ok = false;
          if (contains(a, v) && !contains(a, u) && ext[v] < ext[u]) ok = false;
          if (!ok) break;
        }
        if (ok) ++count;
        if (a == full_set(n)) break;
      }
    }
    int i = 0;
    while (i < n && ext[i] == N) ext[i++] = 1;
    if (i == n) break;
    ++ext[i];
  }
  return count;
}

}  // namespace bucketwidth
