#include "bucketwidth/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <numeric>

namespace bucketwidth {

int size_guard(int default_limit) {
  const char* env = std::getenv("BUCKETWIDTH_SIZE_GUARD");
  if (!env) return default_limit;
  int value = 0;
  auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
  if (ec != std::errc{} || *ptr != '\0' || value <= 0) return default_limit;
  return value;
}

void check_size_guard(const std::string& what, int n, int default_limit) {
  const int limit = size_guard(default_limit);
  if (n > limit) {
    throw SizeGuardExceeded(what + " refuses size " + std::to_string(n) + " (limit " + std::to_string(limit) +
                            "; set BUCKETWIDTH_SIZE_GUARD to override)");
  }
}

namespace {

// Runs `scan(first)` for every value of the leading permutation entry and
// keeps the best result; ties go to the smaller leading entry, which matches
// a single lexicographic scan.
template <typename Result, typename Scan>
Result best_over_prefixes(int n, ExecPolicy policy, Scan scan) {
  std::vector<Result> parts(n);
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::parallel)
  for (int first = 0; first < n; ++first) parts[first] = scan(first);
  Result best = parts[0];
  for (int i = 1; i < n; ++i) {
    if (parts[i].first < best.first) best = parts[i];
  }
  return best;
}

}  // namespace

std::pair<int, Ordering> bandwidth_bruteforce(const Graph& g, ExecPolicy policy) {
  const int n = g.size();
  check_size_guard("bandwidth_bruteforce", n, 9);
  if (n == 0) return {0, Ordering{}};
  const auto edges = g.edges();
  using Result = std::pair<int, Ordering>;
  return best_over_prefixes<Result>(n, policy, [&](int first) {
    // position[0] = first + 1, the rest runs over all arrangements in lexicographic order.
    std::vector<int> pos(n);
    pos[0] = first + 1;
    for (int i = 1, x = 1; i < n; ++i, ++x) {
      if (x == first + 1) ++x;
      pos[i] = x;
    }
    Result best{n, Ordering{pos}};
    do {
      int width = 0;
      for (auto [u, v] : edges) {
        width = std::max(width, std::abs(pos[u] - pos[v]));
        if (width >= best.first) break;
      }
      if (width < best.first) best = {width, Ordering{pos}};
    } while (std::next_permutation(pos.begin() + 1, pos.end()));
    return best;
  });
}

std::optional<std::pair<int, Embedding>> distortion_bruteforce(const Graph& g, ExecPolicy policy) {
  const int n = g.size();
  check_size_guard("distortion_bruteforce", n, 9);
  if (n == 0 || !is_connected(g)) return std::nullopt;
  if (n == 1) return std::pair{1, Embedding{{1}}};
  const DistanceMatrix dist(g);
  using Result = std::pair<std::int64_t, Embedding>;
  auto best = best_over_prefixes<Result>(n, policy, [&](int first) {
    std::vector<Vertex> order(n);
    order[0] = first;
    for (int i = 1, x = 0; i < n; ++i, ++x) {
      if (x == first) ++x;
      order[i] = x;
    }
    Result best{-1, Embedding{}};
    std::vector<int> pos(n);
    do {
      pos[order[0]] = 1;
      for (int i = 1; i < n; ++i) pos[order[i]] = pos[order[i - 1]] + dist.at(order[i - 1], order[i]);
      // Largest |pi(u) - pi(v)| / d(u, v) over all pairs, rounded up.
      std::int64_t num = 0, den = 1;
      for (Vertex u = 0; u < n; ++u) {
        for (Vertex v = u + 1; v < n; ++v) {
          std::int64_t a = std::abs(pos[u] - pos[v]), b = dist.at(u, v);
          if (a * den > num * b) {
            num = a;
            den = b;
          }
        }
      }
      std::int64_t expansion = (num + den - 1) / den;
      if (best.first < 0 || expansion < best.first) best = {expansion, Embedding{pos}};
    } while (std::next_permutation(order.begin() + 1, order.end()));
    return best;
  });
  return std::pair{static_cast<int>(best.first), std::move(best.second)};
}

std::set<PartialBucketFunction> pbf_bruteforce(const Graph& g, int N) {
  const int n = g.size();
  check_size_guard("pbf_bruteforce", n, 6);
  check_size_guard("pbf_bruteforce value bound", N, 4);
  std::set<PartialBucketFunction> out;
  if (N < 1) return out;
  const auto edges = g.edges();
  std::vector<int> ext(n, 1);
  while (true) {
    bool smooth = std::all_of(edges.begin(), edges.end(),
                              [&](auto e) { return std::abs(ext[e.first] - ext[e.second]) <= 1; });
    if (smooth) {
      for (VertexSet a = 0;; ++a) {
        bool ok = true;
        for (auto [u, v] : edges) {
          if ((contains(a, u) && !contains(a, v) && ext[u] < ext[v]) ||
              (contains(a, v) && !contains(a, u) && ext[v] < ext[u])) {
            ok = false;
            break;
          }
        }
        if (ok) {
          PartialBucketFunction pbf = PartialBucketFunction::empty(n);
          for (Vertex v = 0; v < n; ++v) {
            if (contains(a, v)) pbf.assign(v, ext[v]);
          }
          out.insert(std::move(pbf));
        }
        if (a == full_set(n)) break;
      }
    }
    int i = 0;
    while (i < n && ext[i] == N) ext[i++] = 1;
    if (i == n) break;
    ++ext[i];
  }
  return out;
}

}  // namespace bucketwidth
