#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>

#include "bucketwidth/bandwidth.hpp"

namespace bucketwidth {

namespace {

using Witness = std::optional<std::vector<Vertex>>;

class MidStateSolver {
 public:
  MidStateSolver(const Graph& g, const PositionLayout& layout) : g_(g), layout_(layout) {}

  // Full witness sequence through `mid`, or nullopt.
  Witness solve(const BandwidthState& mid, SearchStats& stats) const {
    const int n = g_.size();
    auto first = path_between_states(g_, layout_, PartialBucketFunction::empty(n), mid, &stats);
    if (!first) return std::nullopt;
    Witness result;
    for_each_bucket_extension(g_, mid, ValueRange{1, layout_.segment_count()}, std::nullopt,
                              [&](const BucketExtension& ext) {
                                BandwidthState final_state{full_set(n), ext};
                                if (!is_state(g_, layout_, final_state)) return true;
                                auto second = path_between_states(g_, layout_, mid, final_state, &stats);
                                if (!second) return true;
                                std::vector<Vertex> seq = *first;
                                seq.insert(seq.end(), second->begin(), second->end());
                                result = std::move(seq);
                                return false;
                              });
    return result;
  }

 private:
  const Graph& g_;
  const PositionLayout& layout_;
};

}  // namespace

std::optional<Ordering> solve_polyspace(const Graph& g, int bound, const PolyspaceOptions& options,
                                        SearchStats* stats) {
  if (bound < 0) throw ContractViolation("bound must be nonnegative");
  const int n = g.size();
  if (bound == 0 || n == 0) {
    if (g.edge_count() != 0) return std::nullopt;
    Ordering pi{std::vector<int>(n)};
    for (Vertex v = 0; v < n; ++v) pi.position[v] = v + 1;
    return pi;
  }
  if (options.alpha < 0 || options.alpha > 1) throw ContractViolation("alpha must lie in [0, 1]");

  const PositionLayout layout(n, bound);
  const MidStateSolver solver(g, layout);
  const int k = std::clamp(static_cast<int>(std::floor(options.alpha * n)), 0, n);
  const bool parallel = options.policy == ExecPolicy::parallel && worker_count() > 1;
  const std::size_t batch_limit = parallel ? static_cast<std::size_t>(4 * worker_count()) : 1;

  SearchStats total;
  Witness found;
  std::vector<BandwidthState> batch;
  std::set<BandwidthState> seen;

  auto flush = [&]() {
    const long count = static_cast<long>(batch.size());
    std::vector<Witness> results(count);
    std::vector<SearchStats> local(count);
    std::atomic<long> first_hit{count};
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long i = 0; i < count; ++i) {
      if (i > first_hit.load()) continue;
      results[i] = solver.solve(batch[i], local[i]);
      if (results[i]) {
        long cur = first_hit.load();
        while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
        }
      }
    }
    for (long i = 0; i < count; ++i) {
      local[i].mid_candidates = 1;
      total.merge_peak(local[i]);
    }
    total.peak_resident = std::max<std::uint64_t>(total.peak_resident, batch.size() + 1);
    if (first_hit.load() < count) found = std::move(results[first_hit.load()]);
    batch.clear();
    return !found;
  };

  auto offer = [&](const BandwidthState& mid) {
    if (options.dedup_mid_states && !seen.insert(mid).second) return true;
    batch.push_back(mid);
    if (batch.size() < batch_limit) return true;
    return flush();
  };

  if (k == 0) {
    offer(PartialBucketFunction::empty(n));
  } else {
    PbfFilter filter;
    filter.domain_size = k;
    filter.value_counts = layout.prefix_segment_counts(k);
    const int value_bound = options.loose_value_bound ? n : layout.segment_count();
    for_each_partial_bucket_function(
        g, value_bound, [&](const PartialBucketFunction& mid, const BucketExtension&) { return offer(mid); }, filter);
  }
  if (!found && !batch.empty()) flush();

  total.table_size = seen.size();
  if (stats) *stats = total;
  if (!found) return std::nullopt;
  return ordering_from_sequence(layout, *found);
}

}  // namespace bucketwidth
