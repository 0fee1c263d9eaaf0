#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bucketwidth/graph.hpp"
#include "bucketwidth/parallel.hpp"

namespace bucketwidth {

/// Inclusive bounds on the values a bucket extension may take.
struct ValueRange {
  int lo = 0;
  int hi = 0;
  bool contains(int x) const { return lo <= x && x <= hi; }
};

/// A pair (A, f): `domain` is A and `values[v]` is f(v) for v in A.
/// Entries outside the domain are kept at zero so that equality and ordering
/// only see the function itself.
struct PartialBucketFunction {
  VertexSet domain = 0;
  std::vector<int> values;

  static PartialBucketFunction empty(int n) { return {0, std::vector<int>(n, 0)}; }

  int size() const { return set_size(domain); }
  bool has(Vertex v) const { return contains(domain, v); }
  int at(Vertex v) const { return values[v]; }

  void assign(Vertex v, int value) {
    domain |= bit(v);
    values[v] = value;
  }
  void erase(Vertex v) {
    domain &= ~bit(v);
    values[v] = 0;
  }

  friend auto operator<=>(const PartialBucketFunction&, const PartialBucketFunction&) = default;
};

/// Total map V -> Z extending some partial bucket function.
using BucketExtension = std::vector<int>;

/// Checks, edge by edge, that `ext` agrees with `pbf` on A, moves by at most one
/// along every edge, and never rises from a vertex in A to a neighbor outside A.
bool is_bucket_extension(const Graph& g, const PartialBucketFunction& pbf, const BucketExtension& ext);

/// Fixpoint search for a bucket extension of `pbf` that also agrees with
/// `pins` (the set B with values f'). Returns the extension taking the
/// smallest feasible value at every free vertex, or nullopt when none exists
/// (including when `range` excludes a pinned value).
///
/// Without a range the window is [min pin - n, max pin + n], which contains
/// every extension of a connected graph. Throws ContractViolation when `pins`
/// disagrees with `pbf` on a shared vertex.
std::optional<BucketExtension> complete_extension(const Graph& g, const PartialBucketFunction& pbf,
                                                  const PartialBucketFunction& pins,
                                                  std::optional<ValueRange> range = std::nullopt);

std::optional<BucketExtension> complete_extension(const Graph& g, const PartialBucketFunction& pbf,
                                                  std::optional<ValueRange> range = std::nullopt);

bool is_partial_bucket_function(const Graph& g, const PartialBucketFunction& pbf);

/// True iff `next` = `prev` plus one vertex v, and no neighbor u of v inside
/// prev's domain has prev(u) < next(v). Both arguments must be partial bucket
/// functions; `next` is checked with is_partial_bucket_function as well.
bool is_successor(const Graph& g, const PartialBucketFunction& prev, const PartialBucketFunction& next);

struct Seed {
  Vertex vertex = 0;
  int value = 0;
};
using ExtensionVisitor = std::function<bool(const BucketExtension&)>;

/// Streams every bucket extension of `pbf` exactly once, with values inside
/// `range` when given. Components of g that contain no vertex of A need either
/// a range (their first vertex branches over it) or a `seed` pin.
/// The visitor returns false to stop; the function returns false if stopped.
bool for_each_bucket_extension(const Graph& g, const PartialBucketFunction& pbf, std::optional<ValueRange> range,
                               std::optional<Seed> seed, const ExtensionVisitor& visit);

std::vector<BucketExtension> bucket_extensions(const Graph& g, const PartialBucketFunction& pbf,
                                               std::optional<ValueRange> range, std::optional<Seed> seed = std::nullopt);

/// Restricts which partial bucket functions the generator emits. The
/// constraints are applied while generating, so filtered-out branches are
/// never expanded.
struct PbfFilter {
  std::optional<int> domain_size;
  /// value_counts[x] = required number of domain vertices with f = x.
  /// Empty means unrestricted.
  std::vector<int> value_counts;
};

using PbfVisitor = std::function<bool(const PartialBucketFunction&, const BucketExtension& witness)>;

/// Generates every partial bucket function with a bucket extension into
/// {1..N}, each paired with one such extension. Works through prototypes on a
/// rooted spanning forest, so the same function may be emitted more than once.
/// Space use is the recursion stack only.
bool for_each_partial_bucket_function(const Graph& g, int N, const PbfVisitor& visit, const PbfFilter& filter = {});

/// A prototype: `domain` is A, `anchors` is the fixed set B, and `values` is f
/// on A u B (zero elsewhere).
struct Prototype {
  VertexSet domain = 0;
  VertexSet anchors = 0;
  std::vector<int> values;

  friend auto operator<=>(const Prototype&, const Prototype&) = default;
};

/// All prototypes of `tree_graph` (a tree rooted as in `tree`) with anchor set
/// `anchors` (must contain the root), f(root) = root_value and the root's
/// membership in A fixed to root_in_domain.
bool for_each_prototype(const Graph& tree_graph, const RootedSpanningTree& tree, VertexSet anchors, int root_value,
                        bool root_in_domain, const std::function<bool(const Prototype&)>& visit);

struct PrototypeCount {
  std::uint64_t total = 0;
  /// Prototypes whose tracked vertex lies outside A.
  std::uint64_t tracked_outside = 0;
};

PrototypeCount count_prototypes(const RootedSpanningTree& tree, VertexSet anchors, int root_value, bool root_in_domain,
                                std::optional<Vertex> tracked = std::nullopt,
                                ExecPolicy policy = ExecPolicy::serial);

/// Path prototype families over v0..v_len: B = {v0} (T, T') or {v0, v_len}
/// (S, S'), with v0 in A (T, S) or not (T', S').
PrototypeCount count_path_prototypes(int len, bool both_ends, bool root_in_domain,
                                     ExecPolicy policy = ExecPolicy::serial);

/// Exact number of triples (A, f, f-bar) with f-bar(V) in {1..N}, by
/// exhausting f-bar and A. Refuses n > 12.
std::uint64_t count_triples_bruteforce(const Graph& g, int N);

/// Constants of the prototype counting argument.
struct CountingConstants {
  static constexpr double alpha = 4.26;
  static constexpr double beta = 3.0;
  static constexpr double gamma = 5.02;
  static constexpr double c = 4.383;
  static double delta();
};

}  // namespace bucketwidth
