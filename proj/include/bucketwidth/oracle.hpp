#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "bucketwidth/bandwidth.hpp"
#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/distortion.hpp"
#include "bucketwidth/graph.hpp"
#include "bucketwidth/parallel.hpp"

namespace bucketwidth {

/// Thrown when an exhaustive routine is asked to run above its size limit.
class SizeGuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `default_limit`, unless BUCKETWIDTH_SIZE_GUARD holds a positive integer.
int size_guard(int default_limit);

/// Throws SizeGuardExceeded when n > size_guard(default_limit).
void check_size_guard(const std::string& what, int n, int default_limit);

/// Minimum bandwidth over all n! orderings; the certificate is the first
/// optimal ordering in lexicographic order of position vectors. n <= 9.
std::pair<int, Ordering> bandwidth_bruteforce(const Graph& g, ExecPolicy policy = ExecPolicy::serial);

/// Minimum expansion over the pushing embeddings of all n! vertex orders,
/// shifted so the leftmost vertex sits at 1. Ties go to the lexicographically
/// first order. nullopt for disconnected graphs. n <= 9.
std::optional<std::pair<int, Embedding>> distortion_bruteforce(const Graph& g, ExecPolicy policy = ExecPolicy::serial);

/// Every (A, f) with f(A) in {1..N} that has a bucket extension into {1..N}.
/// n <= 6, N <= 4.
std::set<PartialBucketFunction> pbf_bruteforce(const Graph& g, int N);

}  // namespace bucketwidth
