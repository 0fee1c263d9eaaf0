#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "bucketwidth/oracle.hpp"
#include "doctest.h"
#include "support/brute.hpp"
#include "support/corpus.hpp"

using namespace bucketwidth;

TEST_CASE("bandwidth oracle examples") {
  CHECK(bandwidth_bruteforce(fixtures::path(4)).first == 1);
  CHECK(bandwidth_bruteforce(fixtures::star(4)).first == 2);
  CHECK(bandwidth_bruteforce(fixtures::cycle(6)).first == 2);
  auto [b, pi] = bandwidth_bruteforce(fixtures::path(4));
  CHECK(pi.position == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("bandwidth oracle certificate is the first optimum") {
  for (const Graph& g : testing::connected_graphs_up_to(5)) {
    auto [best, pi] = bandwidth_bruteforce(g);
    CHECK(bandwidth_of(g, pi) == best);
    std::vector<int> perm(g.size());
    std::iota(perm.begin(), perm.end(), 1);
    do {
      if (bandwidth_of(g, Ordering{perm}) == best) break;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(perm == pi.position);
  }
}

TEST_CASE("distortion oracle examples") {
  CHECK(distortion_bruteforce(fixtures::path(5))->first == 1);
  CHECK(distortion_bruteforce(fixtures::cycle(4))->first == 3);
  CHECK(distortion_bruteforce(fixtures::star(3))->first == 3);
  Graph split(3);
  split.add_edge(0, 1);
  CHECK_FALSE(distortion_bruteforce(split));
}

TEST_CASE("distortion oracle certificates") {
  for (const Graph& g : testing::connected_graphs_up_to(6)) {
    auto [best, pi] = *distortion_bruteforce(g);
    auto m = embedding_metrics(g, pi);
    CHECK(m.distortion.ceil() == best);
    if (g.size() >= 2) CHECK(m.contraction == Ratio{1, 1});
    CHECK(*std::min_element(pi.position.begin(), pi.position.end()) == 1);
  }
}

TEST_CASE("parallel oracles match the serial ones") {
  for (const Graph& g : testing::connected_graphs(6)) {
    CHECK(bandwidth_bruteforce(g, ExecPolicy::serial) == bandwidth_bruteforce(g, ExecPolicy::parallel));
    CHECK(distortion_bruteforce(g, ExecPolicy::serial) == distortion_bruteforce(g, ExecPolicy::parallel));
  }
}

TEST_CASE("pbf oracle examples") {
  CHECK(pbf_bruteforce(Graph(1), 2).size() == 3);
  CHECK(pbf_bruteforce(fixtures::path(2), 1).size() == 4);
  auto k2 = pbf_bruteforce(fixtures::path(2), 2);
  std::set<PartialBucketFunction> expected;
  testing::for_each_assignment(2, 1, 2, [&](const PartialBucketFunction& p) {
    if (testing::brute_has_extension(fixtures::path(2), p, 1, 2)) expected.insert(p);
  });
  CHECK(k2 == expected);
  CHECK(k2.size() == 9);
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(bandwidth_bruteforce(fixtures::path(10)), SizeGuardExceeded);
  CHECK_THROWS_AS(distortion_bruteforce(fixtures::path(10)), SizeGuardExceeded);
  CHECK_THROWS_AS(pbf_bruteforce(fixtures::path(7), 2), SizeGuardExceeded);
  CHECK_THROWS_AS(pbf_bruteforce(fixtures::path(3), 5), SizeGuardExceeded);
  setenv("BUCKETWIDTH_SIZE_GUARD", "3", 1);
  CHECK(size_guard(9) == 3);
  CHECK_THROWS_AS(bandwidth_bruteforce(fixtures::path(4)), SizeGuardExceeded);
  unsetenv("BUCKETWIDTH_SIZE_GUARD");
  CHECK(size_guard(9) == 9);
}
