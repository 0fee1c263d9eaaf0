#include <algorithm>

#include "bucketwidth/distortion.hpp"
#include "bucketwidth/oracle.hpp"

namespace bucketwidth {

namespace {

struct Split {
  int k = 0;
  std::vector<Vertex> sequence;  // global ids, left to right
  std::vector<int> positions;
};

class Decomposer {
 public:
  Decomposer(const ExtendedInstance& instance, int d, const DistortionOptions& options, int r_threshold,
             DistortionStats& stats)
      : instance_(instance), d_(d), options_(options), threshold_(r_threshold), stats_(stats),
        problem_(instance, d), layout_(problem_.layout()) {}

  std::optional<Embedding> run() {
    if (!problem_.boundary_consistent()) return std::nullopt;
    const int r = instance_.r;
    const int n_hat = problem_.free_count();
    if (r > n_hat) return std::nullopt;
    const int k_lo = std::max(1, (r + 3) / 4);
    const int k_hi = std::min(r - 1, 3 * r / 4);
    if (k_lo > k_hi) return std::nullopt;
    // Every segment is nonempty and each one lies in at most two of the
    // k_hi - k_lo + 1 candidate pairs, so some pair holds at most this many.
    const int cap = 2 * n_hat / (k_hi - k_lo + 1);
    if (cap < 2) return std::nullopt;

    for (int k = k_lo; k <= k_hi; ++k) {
      for (int q = layout_.first_position(k); q <= layout_.last_position(k); ++q) {
        Split split;
        split.k = k;
        if (auto found = extend(split, q, cap, 0)) return found;
      }
    }
    return std::nullopt;
  }

 private:
  // Grows the sequence of vertices occupying segments k and k+1 by one vertex.
  std::optional<Embedding> extend(Split& split, int first_pos, int cap, VertexSet used) {
    const DistanceMatrix& dist = *instance_.dist;
    const int limit = layout_.last_position(split.k + 1);
    for (Vertex local = 0; local < problem_.free_count(); ++local) {
      if (contains(used, local)) continue;
      const Vertex v = problem_.global(local);
      int pos = first_pos;
      if (!split.sequence.empty()) pos = split.positions.back() + dist.at(split.sequence.back(), v);
      if (pos > limit) continue;
      if (!problem_.respects_pins(local, pos)) continue;
      bool ok = true;
      for (std::size_t i = 0; i < split.sequence.size() && ok; ++i) {
        const int dv = dist.at(split.sequence[i], v);
        const int gap = pos - split.positions[i];
        ok = dv <= gap && gap <= d_ * dv;
      }
      if (!ok) continue;

      split.sequence.push_back(v);
      split.positions.push_back(pos);
      if (pos >= layout_.first_position(split.k + 1)) {
        ++stats_.split_guesses;
        if (auto found = solve_split(split)) return found;
      }
      if (static_cast<int>(split.sequence.size()) < cap) {
        if (auto found = extend(split, first_pos, cap, used | bit(local))) return found;
      }
      split.sequence.pop_back();
      split.positions.pop_back();
    }
    return std::nullopt;
  }

  std::optional<Embedding> solve_split(const Split& split) {
    const Graph& g = *instance_.graph;
    const int k = split.k;
    const int boundary = layout_.last_position(k);
    VertexSet y_left = 0, y_right = 0;
    std::vector<int> pins = instance_.pinned;
    for (std::size_t i = 0; i < split.sequence.size(); ++i) {
      Vertex v = split.sequence[i];
      (split.positions[i] <= boundary ? y_left : y_right) |= bit(v);
      pins[v] = split.positions[i];
    }
    VertexSet z_left = 0, z_right = 0;
    for (VertexSet rest = instance_.pinned_set; rest; rest &= rest - 1) {
      Vertex z = __builtin_ctzll(rest);
      (instance_.pinned[z] <= 0 ? z_left : z_right) |= bit(z);
    }

    const VertexSet remaining = instance_.vertices & ~instance_.pinned_set & ~(y_left | y_right);
    const VertexSet left_touch = y_left | z_left;
    const VertexSet right_touch = y_right | z_right;
    VertexSet left_side = 0, right_side = 0, unseen = remaining;
    while (unseen) {
      VertexSet comp = bit(__builtin_ctzll(unseen)), frontier = comp;
      VertexSet nbrs = 0;
      while (frontier) {
        Vertex u = __builtin_ctzll(frontier);
        frontier &= frontier - 1;
        nbrs |= g.neighbor_mask(u);
        VertexSet grow = g.neighbor_mask(u) & remaining & ~comp;
        comp |= grow;
        frontier |= grow;
      }
      unseen &= ~comp;
      const bool to_left = nbrs & left_touch, to_right = nbrs & right_touch;
      if (to_left == to_right) return std::nullopt;
      (to_left ? left_side : right_side) |= comp;
    }

    ExtendedInstance left{instance_.graph, instance_.dist, z_left | y_left | left_side, z_left | y_left, pins, k - 1};
    auto left_result = solve_extended(left, d_, options_, threshold_, &stats_);
    if (!left_result) return std::nullopt;

    const int shift = (k + 1) * (d_ + 1);
    std::vector<int> right_pins(g.size(), 0);
    for (VertexSet rest = y_right | z_right; rest; rest &= rest - 1) {
      Vertex v = __builtin_ctzll(rest);
      right_pins[v] = pins[v] - shift;
    }
    ExtendedInstance right{instance_.graph, instance_.dist, y_right | z_right | right_side, y_right | z_right,
                           right_pins, instance_.r - k - 1};
    auto right_result = solve_extended(right, d_, options_, threshold_, &stats_);
    if (!right_result) return std::nullopt;

    Embedding pi{std::vector<int>(g.size(), 0)};
    for (VertexSet rest = instance_.vertices; rest; rest &= rest - 1) {
      Vertex v = __builtin_ctzll(rest);
      if (contains(left.vertices, v)) {
        pi.position[v] = left_result->position[v];
      } else {
        pi.position[v] = right_result->position[v] + shift;
      }
    }
    return pi;
  }

  const ExtendedInstance& instance_;
  int d_;
  const DistortionOptions& options_;
  int threshold_;
  DistortionStats& stats_;
  ExtendedProblem problem_;
  const DistortionLayout& layout_;
};

}  // namespace

std::optional<Embedding> solve_extended(const ExtendedInstance& instance, int d, const DistortionOptions& options,
                                        int r_threshold, DistortionStats* stats) {
  DistortionStats local;
  std::optional<Embedding> result;
  if (instance.r <= std::max(1, r_threshold)) {
    switch (options.algo) {
      case DistortionAlgorithm::polyspace:
        result = solve_extended_polyspace(instance, d, options.alpha, &local, options.policy);
        break;
      case DistortionAlgorithm::expspace:
        result = solve_extended_expspace(instance, d, &local, options.policy);
        break;
      case DistortionAlgorithm::bruteforce:
        throw ContractViolation("extended instances have no brute-force solver");
    }
  } else {
    result = Decomposer(instance, d, options, r_threshold, local).run();
  }
  if (stats) stats->merge(local);
  return result;
}

std::optional<Embedding> solve_distortion(const Graph& g, int d, const DistortionOptions& options,
                                          DistortionStats* stats) {
  if (d < 1) throw ContractViolation("distortion bound must be positive");
  const int n = g.size();
  if (n == 0) throw ContractViolation("empty graph");
  if (!is_connected(g)) return std::nullopt;
  if (n == 1) return Embedding{{1}};

  if (options.algo == DistortionAlgorithm::bruteforce) {
    auto [best, pi] = *distortion_bruteforce(g);
    if (best > d) return std::nullopt;
    return pi;
  }

  const DistanceMatrix dist(g);
  const int threshold = options.r_threshold.value_or(n);
  for (int r = 1; r <= n; ++r) {
    ExtendedInstance instance{&g, &dist, full_set(n), 0, std::vector<int>(n, 0), r};
    if (auto pi = solve_extended(instance, d, options, threshold, stats)) return pi;
  }
  return std::nullopt;
}

DistortionResult minimize_distortion(const Graph& g, const DistortionOptions& options) {
  const int n = g.size();
  if (n == 0) throw ContractViolation("empty graph");
  if (!is_connected(g)) throw ContractViolation("a disconnected graph has no line embedding");
  DistortionResult result;
  if (options.algo == DistortionAlgorithm::bruteforce) {
    auto [best, pi] = *distortion_bruteforce(g);
    result.distortion = best;
    result.embedding = std::move(pi);
    return result;
  }
  int lo = 1, hi = std::max(1, 2 * n - 1);
  std::optional<Embedding> best;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (auto found = solve_distortion(g, mid, options, &result.stats)) {
      hi = mid;
      best = std::move(found);
    } else {
      lo = mid + 1;
    }
  }
  if (!best) best = solve_distortion(g, lo, options, &result.stats);
  if (!best) throw ContractViolation("no embedding found at distortion 2n-1");
  result.distortion = lo;
  result.embedding = std::move(*best);
  return result;
}

}  // namespace bucketwidth
