#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <unordered_set>

#include "bucketwidth/distortion.hpp"

namespace bucketwidth {

ExtendedProblem::ExtendedProblem(const ExtendedInstance& instance, int d)
    : instance_(instance), layout_(d, instance.r) {
  if (!instance.graph || !instance.dist) throw ContractViolation("instance needs a graph and its distances");
  const int n = instance.graph->size();
  if (instance.vertices & ~full_set(n)) throw ContractViolation("instance vertex set exceeds the graph");
  if (instance.pinned_set & ~instance.vertices) throw ContractViolation("pinned vertices must belong to the instance");
  if (static_cast<int>(instance.pinned.size()) != n) throw ContractViolation("pinned positions must be indexed by vertex");

  const int right_lo = layout_.position_count() + 1;
  const int right_hi = (instance.r + 1) * (d + 1);
  for (VertexSet rest = instance.pinned_set; rest; rest &= rest - 1) {
    Vertex z = __builtin_ctzll(rest);
    int pos = instance.pinned[z];
    bool left = -d <= pos && pos <= 0;
    bool right = right_lo <= pos && pos <= right_hi;
    if (!left && !right) throw ContractViolation("pinned position outside the two flanking segments");
    pinned_list_.push_back(z);
    if (left && (!left_anchor_ || pos > instance.pinned[*left_anchor_])) left_anchor_ = z;
    if (right && (!right_anchor_ || pos < instance.pinned[*right_anchor_])) right_anchor_ = z;
  }
  for (VertexSet rest = instance.vertices & ~instance.pinned_set; rest; rest &= rest - 1) {
    globals_.push_back(__builtin_ctzll(rest));
  }
  local_ = instance.graph->induced(globals_);
}

int ExtendedProblem::dist(Vertex a_local, Vertex b_local) const {
  return instance_.dist->at(globals_[a_local], globals_[b_local]);
}

bool ExtendedProblem::respects_pins(Vertex local, int pos) const {
  const Vertex v = globals_[local];
  for (Vertex z : pinned_list_) {
    if (!instance_.dist->reachable(z, v)) return false;
    const int dz = instance_.dist->at(z, v);
    const int gap = std::abs(instance_.pinned[z] - pos);
    if (gap < dz || gap > d() * dz) return false;
  }
  return true;
}

bool ExtendedProblem::boundary_consistent() const {
  const DistanceMatrix& dm = *instance_.dist;
  const auto& pin = instance_.pinned;
  for (std::size_t i = 0; i < pinned_list_.size(); ++i) {
    for (std::size_t j = i + 1; j < pinned_list_.size(); ++j) {
      Vertex a = pinned_list_[i], b = pinned_list_[j];
      if (!dm.reachable(a, b)) return false;
      const int gap = std::abs(pin[a] - pin[b]);
      if (gap < dm.at(a, b) || gap > d() * dm.at(a, b)) return false;
    }
  }
  std::vector<Vertex> left, right;
  for (Vertex z : pinned_list_) (pin[z] <= 0 ? left : right).push_back(z);
  auto by_pos = [&](Vertex a, Vertex b) { return pin[a] < pin[b]; };
  for (auto* side : {&left, &right}) {
    std::sort(side->begin(), side->end(), by_pos);
    for (std::size_t i = 1; i < side->size(); ++i) {
      if (pin[(*side)[i]] - pin[(*side)[i - 1]] != dm.at((*side)[i - 1], (*side)[i])) return false;
    }
  }
  if (r() == 0 && left_anchor_ && right_anchor_) {
    if (pin[*right_anchor_] - pin[*left_anchor_] != dm.at(*left_anchor_, *right_anchor_)) return false;
  }
  return true;
}

bool ExtendedProblem::for_each_guess(const std::function<bool(const SegmentGuess&)>& visit) const {
  const int n_hat = free_count();
  if (r() == 0 || r() > n_hat) return true;
  SegmentGuess guess;
  guess.first.assign(r(), -1);
  guess.position.assign(r(), 0);
  VertexSet used = 0;

  std::function<bool(int)> rec = [&](int seg) -> bool {
    if (seg > r()) return visit(guess);
    for (Vertex v = 0; v < n_hat; ++v) {
      if (contains(used, v)) continue;
      for (int pos = layout_.first_position(seg); pos <= layout_.last_position(seg); ++pos) {
        if (!respects_pins(v, pos)) continue;
        bool ok = true;
        for (int j = 1; j < seg && ok; ++j) {
          const int dj = dist(guess.first[j - 1], v);
          const int gap = pos - guess.position[j - 1];
          ok = dj <= gap && gap <= d() * dj;
        }
        if (!ok) continue;
        if (seg == 1 && left_anchor_) {
          const Vertex z = *left_anchor_;
          if (pos - instance_.pinned[z] != instance_.dist->at(z, globals_[v])) continue;
        }
        guess.first[seg - 1] = v;
        guess.position[seg - 1] = pos;
        used |= bit(v);
        bool keep_going = rec(seg + 1);
        used &= ~bit(v);
        if (!keep_going) return false;
      }
    }
    return true;
  };
  return rec(1);
}

DistortionState ExtendedProblem::initial_state() const {
  DistortionState s;
  s.pbf = PartialBucketFunction::empty(free_count());
  s.last.assign(r() + 1, -1);
  s.last_pos.assign(r() + 1, 0);
  return s;
}

bool ExtendedProblem::skip_allowed(const SegmentGuess& guess, int pos) const {
  return guess.position[layout_.segment(pos) - 1] != pos;
}

std::optional<DistortionState> ExtendedProblem::place(const SegmentGuess& guess, const DistortionState& s,
                                                      Vertex v) const {
  const int pos = layout_.color_order()[s.p];
  const int seg = layout_.segment(pos);
  const int first_pos = guess.position[seg - 1];
  if (s.pbf.has(v)) return std::nullopt;
  // The guessed vertex opens its segment at exactly its guessed position.
  if (pos < first_pos) return std::nullopt;
  if (pos == first_pos && v != guess.first[seg - 1]) return std::nullopt;
  if (pos > first_pos && std::find(guess.first.begin(), guess.first.end(), v) != guess.first.end()) return std::nullopt;

  for (Vertex u : local_.neighbors(v)) {
    if (s.pbf.has(u) && s.pbf.at(u) < seg) return std::nullopt;
  }
  if (s.last[seg] >= 0 && dist(v, s.last[seg]) != pos - s.last_pos[seg]) return std::nullopt;
  if (!respects_pins(v, pos)) return std::nullopt;

  DistortionState next = s;
  next.p = s.p + 1;
  next.pbf.assign(v, seg);
  if (!is_partial_bucket_function(local_, next.pbf)) return std::nullopt;
  next.last[seg] = v;
  next.last_pos[seg] = pos;
  return next;
}

std::vector<DistortionState> ExtendedProblem::successors(const SegmentGuess& guess, const DistortionState& s) const {
  std::vector<DistortionState> out;
  if (s.p >= layout_.position_count()) return out;
  const int pos = layout_.color_order()[s.p];
  const int seg = layout_.segment(pos);
  const int first_pos = guess.position[seg - 1];
  if (pos == first_pos) {
    if (auto next = place(guess, s, guess.first[seg - 1])) out.push_back(std::move(*next));
  } else if (pos > first_pos) {
    for (Vertex v = 0; v < free_count(); ++v) {
      if (auto next = place(guess, s, v)) out.push_back(std::move(*next));
    }
  }
  if (skip_allowed(guess, pos)) {
    DistortionState next = s;
    next.p = s.p + 1;
    out.push_back(std::move(next));
  }
  return out;
}

bool ExtendedProblem::is_successor(const SegmentGuess& guess, const DistortionState& s,
                                   const DistortionState& next) const {
  if (s.p >= layout_.position_count() || next.p != s.p + 1) return false;
  const int pos = layout_.color_order()[s.p];
  if (next.pbf == s.pbf) {
    return skip_allowed(guess, pos) && next.last == s.last && next.last_pos == s.last_pos;
  }
  const VertexSet added = next.pbf.domain & ~s.pbf.domain;
  if ((s.pbf.domain & ~next.pbf.domain) != 0 || set_size(added) != 1) return false;
  auto placed = place(guess, s, __builtin_ctzll(added));
  return placed && *placed == next;
}

bool ExtendedProblem::is_final(const SegmentGuess& guess, const DistortionState& s) const {
  if (s.p != layout_.position_count() || s.pbf.domain != full_set(free_count())) return false;
  for (int j = 1; j <= r(); ++j) {
    if (s.last[j] < 0) return false;
    if (j < r() && dist(s.last[j], guess.first[j]) != guess.position[j] - s.last_pos[j]) return false;
  }
  if (right_anchor_) {
    const Vertex z = *right_anchor_;
    if (instance_.dist->at(globals_[s.last[r()]], z) != instance_.pinned[z] - s.last_pos[r()]) return false;
  }
  return true;
}

Embedding ExtendedProblem::assemble(const std::vector<int>& placed) const {
  Embedding pi{std::vector<int>(instance_.graph->size(), 0)};
  for (Vertex z : pinned_list_) pi.position[z] = instance_.pinned[z];
  for (std::size_t v = 0; v < globals_.size(); ++v) pi.position[globals_[v]] = placed[v];
  return pi;
}

namespace {

using Placement = std::optional<std::vector<int>>;  // position per local vertex

// Runs `solve` on every guess, in guess order, and keeps the first success.
// The parallel path evaluates guesses concurrently and still picks the
// lowest-index success.
template <typename Solve>
Placement run_guesses(const ExtendedProblem& problem, ExecPolicy policy, DistortionStats& stats, Solve solve) {
  Placement found;
  if (policy == ExecPolicy::serial || worker_count() == 1) {
    problem.for_each_guess([&](const SegmentGuess& guess) {
      ++stats.guesses;
      DistortionStats local;
      found = solve(guess, local);
      stats.merge(local);
      return !found;
    });
    return found;
  }

  std::vector<SegmentGuess> guesses;
  problem.for_each_guess([&](const SegmentGuess& guess) {
    guesses.push_back(guess);
    return true;
  });
  const long count = static_cast<long>(guesses.size());
  std::vector<Placement> results(count);
  std::vector<DistortionStats> local(count);
  std::atomic<long> first_hit{count};
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    if (i > first_hit.load()) continue;
    results[i] = solve(guesses[i], local[i]);
    if (results[i]) {
      long cur = first_hit.load();
      while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
      }
    }
  }
  const long hit = first_hit.load();
  for (long i = 0; i < count && i <= hit; ++i) {
    ++stats.guesses;
    stats.merge(local[i]);
  }
  if (hit < count) found = std::move(results[hit]);
  return found;
}

std::optional<Embedding> solve_without_segments(const ExtendedProblem& problem) {
  if (problem.free_count() != 0 || !problem.boundary_consistent()) return std::nullopt;
  return problem.assemble({});
}

// Exponential-space search for one guess: DFS over states with a visited table.
class MemoDfs {
 public:
  MemoDfs(const ExtendedProblem& problem, const SegmentGuess& guess, DistortionStats& stats)
      : problem_(problem), guess_(guess), stats_(stats), placed_(problem.free_count(), 0) {}

  Placement run() {
    DistortionState start = problem_.initial_state();
    if (dfs(start)) return placed_;
    return std::nullopt;
  }

 private:
  bool dfs(const DistortionState& s) {
    if (s.p == problem_.layout().position_count()) return problem_.is_final(guess_, s);
    if (!visited_.insert(key(s)).second) return false;
    ++stats_.expansions;
    stats_.table_size = std::max<std::uint64_t>(stats_.table_size, visited_.size());
    stats_.peak_resident = std::max<std::uint64_t>(stats_.peak_resident, visited_.size());
    for (const DistortionState& next : problem_.successors(guess_, s)) {
      VertexSet added = next.pbf.domain & ~s.pbf.domain;
      Vertex v = added ? __builtin_ctzll(added) : -1;
      if (v >= 0) placed_[v] = problem_.layout().color_order()[s.p];
      if (dfs(next)) return true;
      if (v >= 0) placed_[v] = 0;
    }
    return false;
  }

  std::u32string key(const DistortionState& s) const {
    std::u32string k;
    k.reserve(1 + s.pbf.values.size() + 2 * s.last.size());
    k.push_back(static_cast<char32_t>(s.p));
    for (Vertex v = 0; v < problem_.free_count(); ++v) k.push_back(s.pbf.has(v) ? s.pbf.at(v) : 0);
    for (std::size_t j = 1; j < s.last.size(); ++j) {
      k.push_back(static_cast<char32_t>(s.last[j] + 1));
      k.push_back(static_cast<char32_t>(s.last_pos[j]));
    }
    return k;
  }

  const ExtendedProblem& problem_;
  const SegmentGuess& guess_;
  DistortionStats& stats_;
  std::vector<int> placed_;
  std::unordered_set<std::u32string> visited_;
};

}  // namespace

std::optional<Embedding> solve_extended_expspace(const ExtendedInstance& instance, int d, DistortionStats* stats,
                                                 ExecPolicy policy) {
  ExtendedProblem problem(instance, d);
  DistortionStats total;
  total.subproblems = 1;
  std::optional<Embedding> result;
  if (instance.r == 0) {
    result = solve_without_segments(problem);
  } else if (problem.boundary_consistent()) {
    Placement placed = run_guesses(problem, policy, total, [&](const SegmentGuess& guess, DistortionStats& local) {
      return MemoDfs(problem, guess, local).run();
    });
    if (placed) result = problem.assemble(*placed);
  }
  if (stats) stats->merge(total);
  return result;
}

namespace {

// Polynomial-space search for one guess. States are only materialised along
// the current recursion path of the divide-and-conquer path check.
class SplitSearch {
 public:
  SplitSearch(const ExtendedProblem& problem, const SegmentGuess& guess, double alpha, DistortionStats& stats)
      : problem_(problem), guess_(guess), alpha_(alpha), stats_(stats), layout_(problem.layout()) {
    for (int j = 1; j <= problem.r(); ++j) guess_rank_.push_back(layout_.color_rank(guess.position[j - 1]));
  }

  Placement run() {
    const int n_hat = problem_.free_count();
    const int mid_size = std::clamp(static_cast<int>(std::floor(alpha_ * n_hat)), 0, n_hat);
    const DistortionState start = problem_.initial_state();
    Placement found;

    auto try_mid = [&](const DistortionState& mid) {
      ++stats_.mid_candidates;
      std::vector<int> placed(n_hat, 0);
      if (!path(start, mid, placed, 1)) return true;
      for_each_final(mid, [&](const DistortionState& fin) {
        std::vector<int> rest = placed;
        if (!path(mid, fin, rest, 1)) return true;
        found = std::move(rest);
        return false;
      });
      return !found;
    };

    if (mid_size == 0) {
      try_mid(start);
      return found;
    }
    PbfFilter filter;
    filter.domain_size = mid_size;
    for_each_partial_bucket_function(
        problem_.local_graph(), problem_.r(),
        [&](const PartialBucketFunction& pbf, const BucketExtension&) {
          if (!guess_values_ok(pbf)) return true;
          return for_each_h(start, pbf, nullptr, [&](DistortionState& mid) { return try_mid(mid); });
        },
        filter);
    return found;
  }

 private:
  bool guess_values_ok(const PartialBucketFunction& pbf) const {
    for (int j = 1; j <= problem_.r(); ++j) {
      Vertex v = guess_.first[j - 1];
      if (pbf.has(v) && pbf.at(v) != j) return false;
    }
    return true;
  }

  bool is_guessed(Vertex v) const { return std::find(guess_.first.begin(), guess_.first.end(), v) != guess_.first.end(); }

  // Enumerates (H, h) for a state with function `target` that follows `from`
  // and, when `upper` is given, precedes it. The counter of the produced state
  // is the color rank of the last vertex placed after `from`.
  template <typename Visit>
  bool for_each_h(const DistortionState& from, const PartialBucketFunction& target, const DistortionState* upper,
                  Visit visit) {
    const int r = problem_.r();
    DistortionState s;
    s.pbf = target;
    s.last.assign(r + 1, -1);
    s.last_pos.assign(r + 1, 0);
    std::vector<std::vector<Vertex>> fresh(r + 1);
    std::vector<bool> occupied(r + 1, false);
    for (Vertex v = 0; v < problem_.free_count(); ++v) {
      if (!target.has(v)) continue;
      occupied[target.at(v)] = true;
      if (!from.pbf.has(v)) fresh[target.at(v)].push_back(v);
    }

    std::function<bool(int, int)> rec = [&](int seg, int max_rank) -> bool {
      if (seg > r) {
        if (max_rank <= from.p) return true;
        if (upper && max_rank >= upper->p) return true;
        // Guessed first vertices are placed exactly when the counter reaches them.
        for (int j = 1; j <= r; ++j) {
          const bool in = target.has(guess_.first[j - 1]);
          if (in != (guess_rank_[j - 1] <= max_rank)) return true;
        }
        s.p = max_rank;
        return visit(s);
      }
      if (!occupied[seg]) return rec(seg + 1, max_rank);
      if (fresh[seg].empty()) {
        const Vertex w = from.last[seg];
        if (upper && upper->last[seg] != w && target.has(upper->last[seg])) return true;
        if (upper && upper->last[seg] == w && upper->last_pos[seg] != from.last_pos[seg]) return true;
        s.last[seg] = w;
        s.last_pos[seg] = from.last_pos[seg];
        return rec(seg + 1, max_rank);
      }
      const Vertex v_first = guess_.first[seg - 1];
      const int p_first = guess_.position[seg - 1];
      for (Vertex w : fresh[seg]) {
        if (w != v_first && !target.has(v_first)) continue;
        for (int pos = layout_.first_position(seg); pos <= layout_.last_position(seg); ++pos) {
          const int rank = layout_.color_rank(pos);
          if (rank <= from.p) continue;
          if (from.last[seg] >= 0 && pos <= from.last_pos[seg]) continue;
          if (w == v_first ? pos != p_first : pos <= p_first) continue;
          if (upper) {
            if (upper->last[seg] == w) {
              if (upper->last_pos[seg] != pos) continue;
            } else if (target.has(upper->last[seg]) || pos >= upper->last_pos[seg]) {
              continue;
            }
          }
          if (!problem_.respects_pins(w, pos)) continue;
          s.last[seg] = w;
          s.last_pos[seg] = pos;
          if (!rec(seg + 1, std::max(max_rank, rank))) return false;
        }
      }
      s.last[seg] = -1;
      s.last_pos[seg] = 0;
      return true;
    };
    return rec(1, from.p);
  }

  // Full final states extending `mid`.
  template <typename Visit>
  void for_each_final(const DistortionState& mid, Visit visit) {
    const int r = problem_.r();
    const int n_hat = problem_.free_count();
    const int end = layout_.position_count();
    for_each_bucket_extension(problem_.local_graph(), mid.pbf, ValueRange{1, r}, std::nullopt,
                              [&](const BucketExtension& ext) {
                                for (int j = 1; j <= r; ++j) {
                                  if (ext[guess_.first[j - 1]] != j) return true;
                                }
                                DistortionState fin;
                                fin.p = end;
                                fin.pbf = PartialBucketFunction{full_set(n_hat), ext};
                                fin.last.assign(r + 1, -1);
                                fin.last_pos.assign(r + 1, 0);
                                return final_h(mid, fin, 1, visit);
                              });
  }

  template <typename Visit>
  bool final_h(const DistortionState& mid, DistortionState& fin, int seg, Visit& visit) {
    const int r = problem_.r();
    if (seg > r) {
      if (!problem_.is_final(guess_, fin)) return true;
      return visit(fin);
    }
    const Vertex v_first = guess_.first[seg - 1];
    const int p_first = guess_.position[seg - 1];
    for (Vertex w = 0; w < problem_.free_count(); ++w) {
      if (fin.pbf.at(w) != seg) continue;
      if (mid.pbf.has(w) && mid.last[seg] != w) continue;
      int lo = layout_.first_position(seg), hi = layout_.last_position(seg);
      if (seg < r) {
        lo = hi = guess_.position[seg] - problem_.dist(w, guess_.first[seg]);
      } else if (auto z = problem_.right_anchor()) {
        lo = hi = problem_.instance().pinned[*z] - problem_.instance().dist->at(problem_.global(w), *z);
      }
      for (int pos = std::max(lo, layout_.first_position(seg)); pos <= std::min(hi, layout_.last_position(seg));
           ++pos) {
        if (w == v_first ? pos != p_first : pos <= p_first) continue;
        if (mid.last[seg] == w) {
          if (mid.last_pos[seg] != pos) continue;
        } else if (mid.last[seg] >= 0 && pos <= mid.last_pos[seg]) {
          continue;
        }
        if (!mid.pbf.has(w) && layout_.color_rank(pos) <= mid.p) continue;
        if (!problem_.respects_pins(w, pos)) continue;
        fin.last[seg] = w;
        fin.last_pos[seg] = pos;
        if (!final_h(mid, fin, seg + 1, visit)) return false;
      }
    }
    fin.last[seg] = -1;
    fin.last_pos[seg] = 0;
    return true;
  }

  bool skips_ok(int from_p, int to_p) const {
    for (int i = from_p; i < to_p; ++i) {
      const int pos = layout_.color_order()[i];
      if (guess_.position[layout_.segment(pos) - 1] == pos) return false;
    }
    return true;
  }

  // Is there a chain of successor states from `a` to `b`? Fills in the
  // positions of the vertices added along the way.
  bool path(const DistortionState& a, const DistortionState& b, std::vector<int>& placed, int depth) {
    ++stats_.path_checks;
    stats_.peak_resident = std::max<std::uint64_t>(stats_.peak_resident, 2 * depth + 2);
    if (a.p > b.p || (a.pbf.domain & ~b.pbf.domain)) return false;
    const VertexSet gap = b.pbf.domain & ~a.pbf.domain;
    const int m = set_size(gap);
    if (m == 0) return a.last == b.last && a.last_pos == b.last_pos && skips_ok(a.p, b.p);
    if (m == 1) {
      const Vertex v = __builtin_ctzll(gap);
      const int seg = b.pbf.at(v);
      if (b.last[seg] != v) return false;
      const int k = layout_.color_rank(b.last_pos[seg]);
      if (k <= a.p || k > b.p) return false;
      if (!skips_ok(a.p, k - 1) || !skips_ok(k, b.p)) return false;
      DistortionState before = a;
      before.p = k - 1;
      DistortionState after = b;
      after.p = k;
      if (!problem_.is_successor(guess_, before, after)) return false;
      placed[v] = b.last_pos[seg];
      return true;
    }

    std::vector<Vertex> free;
    for (VertexSet rest = gap; rest; rest &= rest - 1) free.push_back(__builtin_ctzll(rest));
    const int pick = m / 2;
    std::vector<int> idx(pick);
    for (int i = 0; i < pick; ++i) idx[i] = i;
    while (true) {
      PartialBucketFunction middle = a.pbf;
      for (int i : idx) middle.assign(free[i], b.pbf.at(free[i]));
      if (is_partial_bucket_function(problem_.local_graph(), middle)) {
        bool found = !for_each_h(a, middle, &b, [&](DistortionState& mid) {
          std::vector<int> trial = placed;
          const DistortionState mid_copy = mid;
          if (path(a, mid_copy, trial, depth + 1) && path(mid_copy, b, trial, depth + 1)) {
            placed = std::move(trial);
            return false;
          }
          return true;
        });
        if (found) return true;
      }
      int i = pick - 1;
      while (i >= 0 && idx[i] == m - pick + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < pick; ++j) idx[j] = idx[j - 1] + 1;
    }
    return false;
  }

  const ExtendedProblem& problem_;
  const SegmentGuess& guess_;
  double alpha_;
  DistortionStats& stats_;
  const DistortionLayout& layout_;
  std::vector<int> guess_rank_;
};

}  // namespace

std::optional<Embedding> solve_extended_polyspace(const ExtendedInstance& instance, int d, double alpha,
                                                  DistortionStats* stats, ExecPolicy policy) {
  if (alpha < 0 || alpha > 1) throw ContractViolation("alpha must lie in [0, 1]");
  ExtendedProblem problem(instance, d);
  DistortionStats total;
  total.subproblems = 1;
  std::optional<Embedding> result;
  if (instance.r == 0) {
    result = solve_without_segments(problem);
  } else if (problem.boundary_consistent()) {
    Placement placed = run_guesses(problem, policy, total, [&](const SegmentGuess& guess, DistortionStats& local) {
      return SplitSearch(problem, guess, alpha, local).run();
    });
    if (placed) result = problem.assemble(*placed);
  }
  if (stats) stats->merge(total);
  return result;
}

}  // namespace bucketwidth
