#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/graph.hpp"
#include "bucketwidth/parallel.hpp"

namespace bucketwidth {

/// Bijection V -> {1..n}; position[v] is the 1-based slot of vertex v.
struct Ordering {
  std::vector<int> position;

  friend bool operator==(const Ordering&, const Ordering&) = default;
};

bool is_bijective(const Ordering& pi, int n);

/// Longest edge of the ordering, 0 for edgeless graphs. Throws
/// ContractViolation when `pi` is not a bijection onto {1..n}.
int bandwidth_of(const Graph& g, const Ordering& pi);

/// Positions 1..n cut into segments of width bound+1. Inside a segment the
/// offset is the color; the color order sorts positions by (color, segment).
class PositionLayout {
 public:
  PositionLayout(int n, int bound);

  int size() const { return n_; }
  int bound() const { return bound_; }
  int segment(int pos) const { return (pos - 1) / (bound_ + 1) + 1; }
  int color(int pos) const { return (pos - 1) % (bound_ + 1) + 1; }
  int segment_count() const { return n_ == 0 ? 0 : segment(n_); }

  /// color_order()[k] is the (k+1)-th position in color order.
  const std::vector<int>& color_order() const { return color_order_; }

  /// Segment of the (k+1)-th position in color order.
  int segment_at(int k) const { return segment(color_order_[k]); }

  /// counts[s] = number of the first k color-order positions in segment s;
  /// indexed 0..segment_count().
  std::vector<int> prefix_segment_counts(int k) const;

 private:
  int n_;
  int bound_;
  std::vector<int> color_order_;
};

/// Segment/color criterion: every edge spans at most one segment boundary,
/// and when it does the left endpoint has the larger color.
bool is_b_ordering_via_segments(const Graph& g, const PositionLayout& layout, const Ordering& pi);

/// A partial bucket function whose value multiset equals the segments of the
/// first |A| positions in color order.
using BandwidthState = PartialBucketFunction;

bool is_state(const Graph& g, const PositionLayout& layout, const BandwidthState& s);

/// All one-vertex successors, in ascending order of the added vertex.
std::vector<std::pair<Vertex, BandwidthState>> state_successors(const Graph& g, const PositionLayout& layout,
                                                                 const BandwidthState& s);

/// Places the k-th vertex of `added` at the k-th position in color order.
Ordering ordering_from_sequence(const PositionLayout& layout, std::span<const Vertex> added);

struct SearchStats {
  std::uint64_t expansions = 0;      // states whose successors were generated
  std::uint64_t table_size = 0;      // memoized states (exponential-space search)
  std::uint64_t peak_resident = 0;   // most states held at once
  std::uint64_t mid_candidates = 0;  // middle states tried (polynomial-space search)
  std::uint64_t path_checks = 0;     // calls into the divide-and-conquer path check

  void merge_peak(const SearchStats& other);
};

/// Builds the table of all states reachable from (empty, empty), one vertex
/// count at a time, and reads an ordering off any state covering V.
std::optional<Ordering> solve_expspace(const Graph& g, int bound, SearchStats* stats = nullptr);

/// Divide-and-conquer check for a chain of successor states from `from` to
/// `to`; returns the vertices in the order they are added. Both arguments must
/// be states with from contained in to. Uses polynomial space.
std::optional<std::vector<Vertex>> path_between_states(const Graph& g, const PositionLayout& layout,
                                                       const BandwidthState& from, const BandwidthState& to,
                                                       SearchStats* stats = nullptr);

struct PolyspaceOptions {
  double alpha = 0.5475;
  /// Enumerate middle states with values up to n rather than up to the
  /// number of segments.
  bool loose_value_bound = false;
  /// Skip middle states already tried. Costs memory proportional to their number.
  bool dedup_mid_states = false;
  ExecPolicy policy = ExecPolicy::serial;
};

/// Guesses a middle state of size floor(alpha * n) and a full final state,
/// and joins them with path_between_states. Polynomial space.
std::optional<Ordering> solve_polyspace(const Graph& g, int bound, const PolyspaceOptions& options = {},
                                        SearchStats* stats = nullptr);

enum class BandwidthAlgorithm { bruteforce, expspace, polyspace };

struct BandwidthResult {
  int bandwidth = 0;
  Ordering ordering;
  SearchStats stats;
};

/// Smallest feasible bound found by binary search over {0..n-1}.
BandwidthResult minimize_bandwidth(const Graph& g, BandwidthAlgorithm algo, const PolyspaceOptions& options = {});

/// Decision version dispatching on the algorithm.
std::optional<Ordering> solve_bandwidth(const Graph& g, int bound, BandwidthAlgorithm algo,
                                        const PolyspaceOptions& options = {}, SearchStats* stats = nullptr);

}  // namespace bucketwidth
