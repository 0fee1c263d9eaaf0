#pragma once

#include <functional>
#include <vector>

#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/graph.hpp"

namespace bucketwidth::testing {

/// Every total map V -> {lo..hi} satisfying the three extension conditions
/// for `pbf`, checked edge by edge while assigning vertices in index order.
std::vector<BucketExtension> brute_extensions(const Graph& g, const PartialBucketFunction& pbf, int lo, int hi);

/// Whether some extension with values in {lo..hi} exists.
bool brute_has_extension(const Graph& g, const PartialBucketFunction& pbf, int lo, int hi);

/// Calls `visit` for every (A, f) with f(A) in {lo..hi}.
void for_each_assignment(int n, int lo, int hi, const std::function<void(const PartialBucketFunction&)>& visit);

}  // namespace bucketwidth::testing
