#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "bucketwidth/bandwidth.hpp"
#include "bucketwidth/oracle.hpp"
#include "doctest.h"
#include "support/corpus.hpp"

using namespace bucketwidth;

namespace {

Ordering identity(int n) {
  Ordering pi{std::vector<int>(n)};
  std::iota(pi.position.begin(), pi.position.end(), 1);
  return pi;
}

BandwidthState state_of(int n, std::initializer_list<std::pair<Vertex, int>> entries) {
  BandwidthState s = PartialBucketFunction::empty(n);
  for (auto [v, x] : entries) s.assign(v, x);
  return s;
}

BandwidthState restrict_to(const BandwidthState& s, VertexSet subset) {
  BandwidthState out = PartialBucketFunction::empty(static_cast<int>(s.values.size()));
  for (Vertex v = 0; v < static_cast<int>(s.values.size()); ++v) {
    if (contains(subset, v) && s.has(v)) out.assign(v, s.at(v));
  }
  return out;
}

// Every state reachable from the empty one.
std::set<BandwidthState> reachable_states(const Graph& g, const PositionLayout& layout) {
  std::set<BandwidthState> seen{PartialBucketFunction::empty(g.size())};
  std::queue<BandwidthState> queue;
  queue.push(PartialBucketFunction::empty(g.size()));
  while (!queue.empty()) {
    BandwidthState s = queue.front();
    queue.pop();
    for (auto& [v, next] : state_successors(g, layout, s)) {
      if (seen.insert(next).second) queue.push(next);
    }
  }
  return seen;
}

// Chain of successors from `from` to `to` through restrictions of `to`.
bool chain_exists(const Graph& g, const PositionLayout& layout, const BandwidthState& from, const BandwidthState& to) {
  std::set<BandwidthState> seen{from};
  std::queue<BandwidthState> queue;
  queue.push(from);
  while (!queue.empty()) {
    BandwidthState s = queue.front();
    queue.pop();
    if (s == to) return true;
    for (auto& [v, next] : state_successors(g, layout, s)) {
      if (!to.has(v) || to.at(v) != next.at(v)) continue;
      if (seen.insert(next).second) queue.push(next);
    }
  }
  return false;
}

void check_chain(const Graph& g, const PositionLayout& layout, const BandwidthState& from, const BandwidthState& to,
                 const std::vector<Vertex>& added) {
  BandwidthState cur = from;
  for (Vertex v : added) {
    BandwidthState next = cur;
    REQUIRE(to.has(v));
    next.assign(v, to.at(v));
    REQUIRE(is_state(g, layout, next));
    REQUIRE(is_successor(g, cur, next));
    cur = next;
  }
  CHECK(cur == to);
}

}  // namespace

TEST_CASE("bandwidth_of examples") {
  CHECK(bandwidth_of(fixtures::path(3), identity(3)) == 1);
  CHECK(bandwidth_of(fixtures::complete(4), Ordering{{2, 4, 1, 3}}) == 3);
  CHECK(bandwidth_of(fixtures::cycle(4), identity(4)) == 3);
  CHECK(bandwidth_of(Graph(3), identity(3)) == 0);
  CHECK_THROWS_AS(bandwidth_of(fixtures::path(3), Ordering{{1, 1, 2}}), ContractViolation);
  CHECK_THROWS_AS(bandwidth_of(fixtures::path(3), Ordering{{1, 2}}), ContractViolation);
}

TEST_CASE("position layout") {
  for (int n = 1; n <= 12; ++n) {
    for (int b = 0; b < n; ++b) {
      PositionLayout layout(n, b);
      std::set<std::pair<int, int>> keys;
      for (int i = 1; i <= n; ++i) keys.insert({layout.color(i), layout.segment(i)});
      CHECK(static_cast<int>(keys.size()) == n);
      std::vector<int> order = layout.color_order();
      std::sort(order.begin(), order.end());
      CHECK(order == identity(n).position);
      for (int k = 1; k < n; ++k) {
        int a = layout.color_order()[k - 1], c = layout.color_order()[k];
        CHECK(std::pair(layout.color(a), layout.segment(a)) < std::pair(layout.color(c), layout.segment(c)));
      }
    }
  }
  PositionLayout p3(3, 1);
  CHECK(p3.color_order() == std::vector<int>{1, 3, 2});
  CHECK(p3.segment(3) == 2);
}

TEST_CASE("segment criterion examples") {
  CHECK(is_b_ordering_via_segments(fixtures::path(3), PositionLayout(3, 1), identity(3)));
  std::vector<int> perm{1, 2, 3, 4};
  do {
    CHECK_FALSE(is_b_ordering_via_segments(fixtures::cycle(4), PositionLayout(4, 1), Ordering{perm}));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("segment criterion matches bandwidth on every ordering") {
  for (const Graph& g : testing::connected_graphs_up_to(6)) {
    const int n = g.size();
    std::vector<int> perm = identity(n).position;
    do {
      Ordering pi{perm};
      const int bw = bandwidth_of(g, pi);
      for (int b = 0; b < n; ++b) {
        REQUIRE(is_b_ordering_via_segments(g, PositionLayout(n, b), pi) == (bw <= b));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("state successors") {
  Graph p3 = fixtures::path(3);
  PositionLayout layout(3, 1);
  auto first = state_successors(p3, layout, PartialBucketFunction::empty(3));
  REQUIRE(first.size() == 3);
  for (Vertex v = 0; v < 3; ++v) {
    CHECK(first[v].first == v);
    CHECK(first[v].second == state_of(3, {{v, 1}}));
  }
  CHECK(state_successors(p3, layout, state_of(3, {{0, 1}, {1, 1}, {2, 2}})).empty());

  Graph k2 = fixtures::path(2);
  auto next = state_successors(k2, PositionLayout(2, 1), state_of(2, {{0, 1}}));
  REQUIRE(next.size() == 1);
  CHECK(next[0].second == state_of(2, {{0, 1}, {1, 1}}));
}

TEST_CASE("successors are exactly the one-vertex states passing the successor check") {
  for (const Graph& g : testing::connected_graphs_up_to(5)) {
    const int n = g.size();
    for (int b = 1; b < n; ++b) {
      PositionLayout layout(n, b);
      for (const BandwidthState& s : reachable_states(g, layout)) {
        CHECK(is_state(g, layout, s));
        std::set<BandwidthState> got;
        for (auto& [v, next] : state_successors(g, layout, s)) got.insert(next);
        std::set<BandwidthState> expected;
        if (s.size() < n) {
          for (Vertex v = 0; v < n; ++v) {
            if (s.has(v)) continue;
            BandwidthState next = s;
            next.assign(v, layout.segment_at(s.size()));
            if (is_state(g, layout, next) && is_successor(g, s, next)) expected.insert(next);
          }
        }
        CHECK(got == expected);
      }
    }
  }
}

TEST_CASE("expspace examples") {
  auto p3 = solve_expspace(fixtures::path(3), 1);
  REQUIRE(p3);
  CHECK(bandwidth_of(fixtures::path(3), *p3) <= 1);
  CHECK_FALSE(solve_expspace(fixtures::complete(3), 1));
  CHECK_FALSE(solve_expspace(fixtures::cycle(5), 1));
  auto c5 = solve_expspace(fixtures::cycle(5), 2);
  REQUIRE(c5);
  CHECK(bandwidth_of(fixtures::cycle(5), *c5) <= 2);
  CHECK(solve_expspace(Graph(3), 0));
  CHECK_FALSE(solve_expspace(fixtures::path(2), 0));
}

TEST_CASE("the state table never holds a state twice") {
  for (const Graph& g : testing::connected_graphs(6)) {
    for (int b = 1; b < 6; ++b) {
      SearchStats stats;
      solve_expspace(g, b, &stats);
      PositionLayout layout(6, b);
      CHECK(stats.expansions <= stats.table_size);
      CHECK(stats.table_size <= reachable_states(g, layout).size());
    }
  }
}

TEST_CASE("path between states examples") {
  Graph k2 = fixtures::path(2);
  PositionLayout layout(2, 1);
  auto empty = PartialBucketFunction::empty(2);
  auto none = path_between_states(k2, layout, empty, empty);
  REQUIRE(none);
  CHECK(none->empty());
  auto full = state_of(2, {{0, 1}, {1, 1}});
  auto both = path_between_states(k2, layout, empty, full);
  REQUIRE(both);
  CHECK(both->size() == 2);
  check_chain(k2, layout, empty, full, *both);

  // P3 with b = 1: the first two color-order slots lie in segments 1 and 2.
  Graph p3 = fixtures::path(3);
  PositionLayout l3(3, 1);
  auto from = state_of(3, {{0, 1}, {2, 1}});
  auto to = state_of(3, {{0, 1}, {1, 2}, {2, 1}});
  CHECK(is_state(p3, l3, to));
  CHECK_FALSE(is_state(p3, l3, from));
  CHECK_THROWS_AS(path_between_states(p3, l3, from, to), ContractViolation);
  CHECK_THROWS_AS(path_between_states(p3, l3, state_of(3, {{0, 1}}), state_of(3, {{1, 1}})), ContractViolation);

  // One vertex apart, but the new vertex sits above an earlier neighbor.
  auto one = state_of(3, {{0, 1}});
  auto two = state_of(3, {{0, 1}, {1, 2}});
  REQUIRE(is_state(p3, l3, one));
  REQUIRE(is_state(p3, l3, two));
  CHECK_FALSE(is_successor(p3, one, two));
  CHECK_FALSE(path_between_states(p3, l3, one, two));
}

TEST_CASE("path check agrees with search over the state graph") {
  std::mt19937_64 rng(17);
  for (const Graph& g : testing::connected_graphs_up_to(6)) {
    const int n = g.size();
    for (int b = 1; b < n; ++b) {
      PositionLayout layout(n, b);
      std::vector<BandwidthState> states;
      for (const auto& s : reachable_states(g, layout)) states.push_back(s);
      // Targets: reachable states; sources: every sub-state of the target.
      for (int trial = 0; trial < 6; ++trial) {
        const BandwidthState& to = states[rng() % states.size()];
        for (VertexSet sub = to.domain;; sub = (sub - 1) & to.domain) {
          BandwidthState from = restrict_to(to, sub);
          if (is_state(g, layout, from)) {
            auto got = path_between_states(g, layout, from, to);
            REQUIRE(got.has_value() == chain_exists(g, layout, from, to));
            if (got) check_chain(g, layout, from, to, *got);
          }
          if (sub == 0) break;
        }
      }
    }
  }
}

TEST_CASE("polyspace examples") {
  auto p4 = solve_polyspace(fixtures::path(4), 1);
  REQUIRE(p4);
  CHECK(bandwidth_of(fixtures::path(4), *p4) == 1);
  CHECK_FALSE(solve_polyspace(fixtures::complete(4), 2));
  CHECK(solve_polyspace(fixtures::complete(4), 3));
  CHECK_FALSE(solve_polyspace(fixtures::star(3), 1));
  CHECK(solve_polyspace(fixtures::star(3), 2));
}

TEST_CASE("minimization examples") {
  for (auto algo : {BandwidthAlgorithm::expspace, BandwidthAlgorithm::polyspace, BandwidthAlgorithm::bruteforce}) {
    CHECK(minimize_bandwidth(fixtures::path(5), algo).bandwidth == 1);
    CHECK(minimize_bandwidth(fixtures::cycle(6), algo).bandwidth == 2);
    CHECK(minimize_bandwidth(fixtures::complete(5), algo).bandwidth == 4);
    CHECK(minimize_bandwidth(Graph(1), algo).bandwidth == 0);
  }
}

TEST_CASE("solvers agree with the oracle for every bound") {
  for (const Graph& g : testing::connected_graphs_up_to(6)) {
    const int n = g.size();
    const int truth = bandwidth_bruteforce(g).first;
    for (int b = 0; b < n; ++b) {
      auto e = solve_expspace(g, b);
      auto p = solve_polyspace(g, b);
      REQUIRE(e.has_value() == (truth <= b));
      REQUIRE(p.has_value() == (truth <= b));
      if (e) CHECK(bandwidth_of(g, *e) <= b);
      if (p) CHECK(bandwidth_of(g, *p) <= b);
    }
  }
}

TEST_CASE("polyspace variants agree") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = testing::random_connected_graph(7, 0.35, rng);
    const int truth = bandwidth_bruteforce(g).first;
    for (int b : {truth - 1, truth}) {
      if (b < 0) continue;
      PolyspaceOptions loose;
      loose.loose_value_bound = true;
      PolyspaceOptions dedup;
      dedup.dedup_mid_states = true;
      PolyspaceOptions parallel;
      parallel.policy = ExecPolicy::parallel;
      PolyspaceOptions half;
      half.alpha = 0.5;
      for (const auto& options : {loose, dedup, parallel, half}) {
        auto found = solve_polyspace(g, b, options);
        CHECK(found.has_value() == (b >= truth));
        if (found) CHECK(bandwidth_of(g, *found) <= b);
      }
    }
  }
}

TEST_CASE("parallel polyspace returns the serial certificate") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = testing::random_connected_graph(7, 0.4, rng);
    const int b = bandwidth_bruteforce(g).first;
    PolyspaceOptions parallel;
    parallel.policy = ExecPolicy::parallel;
    CHECK(solve_polyspace(g, b) == solve_polyspace(g, b, parallel));
  }
}
