#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/graph.hpp"
#include "bucketwidth/parallel.hpp"

namespace bucketwidth {

/// Integer line positions indexed by vertex. Solvers for a sub-instance only
/// fill the entries of the instance's vertex set.
struct Embedding {
  std::vector<int> position;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Exact nonnegative rational num/den with den > 0.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  /// Smallest integer >= num/den.
  std::int64_t ceil() const { return (num + den - 1) / den; }

  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }
  friend std::strong_ordering operator<=>(const Ratio& a, const Ratio& b) { return a.num * b.den <=> b.num * a.den; }
};

struct EmbeddingMetrics {
  Ratio contraction;
  Ratio expansion;
  Ratio distortion;
};

/// Places order[0] at 0 and each next vertex at exact graph distance from the
/// previous one. `order` must be a permutation of V and g connected.
Embedding pushing_positions(const Graph& g, std::span<const Vertex> order);

/// Min and max of |pi(u) - pi(v)| / d(u, v) over all pairs, and their quotient.
/// Throws ContractViolation on disconnected graphs or non-injective embeddings.
/// A single vertex has all three equal to 1.
EmbeddingMetrics embedding_metrics(const Graph& g, const Embedding& pi);

/// Consecutive vertices (by position) of `vertices` sit at exact graph distance.
bool is_pushing(const DistanceMatrix& dist, const Embedding& pi, VertexSet vertices);

/// Segments of width d+1 over the integers: segment j is
/// {(j-1)(d+1)+1, ..., j(d+1)}, so segment 0 is {-d, ..., 0}. The color order
/// covers positions 1..r(d+1).
class DistortionLayout {
 public:
  DistortionLayout(int d, int r);

  int d() const { return d_; }
  int r() const { return r_; }
  int position_count() const { return r_ * (d_ + 1); }
  int segment(int pos) const;
  int color(int pos) const { return pos - (segment(pos) - 1) * (d_ + 1); }
  int first_position(int seg) const { return (seg - 1) * (d_ + 1) + 1; }
  int last_position(int seg) const { return seg * (d_ + 1); }

  const std::vector<int>& color_order() const { return color_order_; }
  /// 1-based rank of `pos` in the color order; 0 outside 1..r(d+1).
  int color_rank(int pos) const;

 private:
  int d_;
  int r_;
  std::vector<int> color_order_;
  std::vector<int> rank_;
};

/// Every edge spans at most one segment boundary, and when it does the left
/// endpoint has the larger color.
bool satisfies_distortion_segments(const Graph& g, const DistortionLayout& layout, const Embedding& pi);

/// Embed X into segments 1..r (no segment left empty) so that Z keeps its
/// pinned positions in segment 0 or segment r+1. Distances are those of the
/// whole graph.
struct ExtendedInstance {
  const Graph* graph = nullptr;
  const DistanceMatrix* dist = nullptr;
  VertexSet vertices = 0;  // X
  VertexSet pinned_set = 0;  // Z
  std::vector<int> pinned;   // pinned[z] for z in Z; size n
  int r = 0;

  int free_count() const { return set_size(vertices & ~pinned_set); }
};

/// First vertex and its position for each segment 1..r, stored at index seg-1.
struct SegmentGuess {
  std::vector<Vertex> first;
  std::vector<int> position;
};

/// (p, (A, f), (H, h)) over the instance's free vertices, in local indices.
/// last[j] is the vertex of H in segment j (-1 if none), at position last_pos[j].
struct DistortionState {
  int p = 0;
  PartialBucketFunction pbf;
  std::vector<Vertex> last;
  std::vector<int> last_pos;

  friend auto operator<=>(const DistortionState&, const DistortionState&) = default;
};

/// Search machinery for one extended instance and one bound d. Free vertices
/// X\Z get local indices 0..n^-1 in ascending global order.
class ExtendedProblem {
 public:
  ExtendedProblem(const ExtendedInstance& instance, int d);

  const ExtendedInstance& instance() const { return instance_; }
  const DistortionLayout& layout() const { return layout_; }
  int d() const { return layout_.d(); }
  int r() const { return layout_.r(); }
  const Graph& local_graph() const { return local_; }
  int free_count() const { return local_.size(); }
  Vertex global(Vertex local) const { return globals_[local]; }
  int dist(Vertex a_local, Vertex b_local) const;

  /// Pinned vertices are pairwise consistent and pushing within each side;
  /// with r = 0 the two sides must also meet.
  bool boundary_consistent() const;

  /// Streams the admissible guesses in order of segments, then vertices, then
  /// positions. Returns false if the visitor stopped.
  bool for_each_guess(const std::function<bool(const SegmentGuess&)>& visit) const;

  DistortionState initial_state() const;

  /// Placements in ascending vertex order, then the skip successor if allowed.
  std::vector<DistortionState> successors(const SegmentGuess& guess, const DistortionState& s) const;

  /// Whether `next` is a successor of `s` (one step of the counter).
  bool is_successor(const SegmentGuess& guess, const DistortionState& s, const DistortionState& next) const;

  bool is_final(const SegmentGuess& guess, const DistortionState& s) const;

  /// Embedding of X: pinned vertices at their pins, local vertex v at placed[v].
  Embedding assemble(const std::vector<int>& placed) const;

  /// Distance constraints of a new vertex at `pos` against every pinned vertex.
  bool respects_pins(Vertex local, int pos) const;

  /// Pinned vertex with the largest position <= 0, and with the smallest
  /// position in segment r+1.
  std::optional<Vertex> left_anchor() const { return left_anchor_; }
  std::optional<Vertex> right_anchor() const { return right_anchor_; }

 private:
  bool skip_allowed(const SegmentGuess& guess, int pos) const;
  std::optional<DistortionState> place(const SegmentGuess& guess, const DistortionState& s, Vertex v) const;

  const ExtendedInstance& instance_;
  DistortionLayout layout_;
  std::vector<Vertex> globals_;
  std::vector<Vertex> pinned_list_;
  Graph local_;
  std::optional<Vertex> left_anchor_;
  std::optional<Vertex> right_anchor_;
};

struct DistortionStats {
  std::uint64_t guesses = 0;          // segment guesses tried
  std::uint64_t expansions = 0;       // states expanded
  std::uint64_t table_size = 0;       // largest memo table (exponential-space search)
  std::uint64_t peak_resident = 0;    // most states held at once
  std::uint64_t mid_candidates = 0;   // middle states tried (polynomial-space search)
  std::uint64_t path_checks = 0;
  std::uint64_t split_guesses = 0;    // decomposition guesses
  std::uint64_t subproblems = 0;      // extended instances solved directly

  void merge(const DistortionStats& other);
};

enum class DistortionAlgorithm { bruteforce, expspace, polyspace };

struct DistortionOptions {
  DistortionAlgorithm algo = DistortionAlgorithm::expspace;
  /// Instances with more segments than this are split; nullopt means n.
  std::optional<int> r_threshold;
  double alpha = 0.5475;
  ExecPolicy policy = ExecPolicy::serial;
};

std::optional<Embedding> solve_extended_expspace(const ExtendedInstance& instance, int d,
                                                 DistortionStats* stats = nullptr,
                                                 ExecPolicy policy = ExecPolicy::serial);

std::optional<Embedding> solve_extended_polyspace(const ExtendedInstance& instance, int d, double alpha = 0.5475,
                                                  DistortionStats* stats = nullptr,
                                                  ExecPolicy policy = ExecPolicy::serial);

/// Direct solve when r <= threshold, otherwise split at a pair of adjacent
/// segments and recurse on both sides.
std::optional<Embedding> solve_extended(const ExtendedInstance& instance, int d, const DistortionOptions& options,
                                        int r_threshold, DistortionStats* stats = nullptr);

/// Embedding of the whole graph with distortion at most d, trying r = 1..n
/// segments. Disconnected graphs have none.
std::optional<Embedding> solve_distortion(const Graph& g, int d, const DistortionOptions& options = {},
                                          DistortionStats* stats = nullptr);

struct DistortionResult {
  int distortion = 1;
  Embedding embedding;
  DistortionStats stats;
};

/// Least integer d in [1, 2n-1] that is feasible. Throws ContractViolation on
/// disconnected or empty graphs.
DistortionResult minimize_distortion(const Graph& g, const DistortionOptions& options = {});

}  // namespace bucketwidth
