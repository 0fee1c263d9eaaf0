// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "bucketwidth/bandwidth.hpp"
#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/distortion.hpp"
#include "bucketwidth/oracle.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "support/brute.hpp"
#include "support/corpus.hpp"

using namespace bucketwidth;

namespace {

// Tolerances and limits, all pinned here.
constexpr double kCountTolerance = 0.0;        // exact prototype counts
constexpr double kTimeLimitCounts = 1.0;       // seconds, criterion 1
constexpr double kTimeLimitBounds = 60.0;      // seconds, criterion 2
constexpr double kTimeLimitBandwidth = 600.0;  // seconds, criterion 4
constexpr double kTimeLimitDistortion = 600.0; // seconds, criterion 5
constexpr double kOutsideFraction = 0.4;
constexpr int kBoundPathMax = 12;
constexpr int kPolyspaceSample = 100;
constexpr int kFuzzRuns = 1000;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Timer {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome exact_counts() {
  struct Expect {
    const char* name;
    int len;
    bool both_ends;
    bool in_a;
    std::uint64_t count;
  };
  const Expect table[] = {{"T(1)", 1, false, true, 4},   {"T(2)", 2, false, true, 16},  {"T'(1)", 1, false, false, 3},
                          {"T'(2)", 2, false, false, 13}, {"S(1)", 1, true, true, 5},    {"S(2)", 2, true, true, 22},
                          {"S(3)", 3, true, true, 92},    {"S'(1)", 1, true, false, 5},  {"S'(2)", 2, true, false, 19}};
  Outcome out;
  Timer timer;
  std::string mismatches;
  for (const Expect& e : table) {
    std::uint64_t got = count_path_prototypes(e.len, e.both_ends, e.in_a).total;
    if (std::abs(static_cast<double>(got) - static_cast<double>(e.count)) > kCountTolerance) {
      out.pass = false;
      mismatches += fmt(" %s=%llu(want %llu)", e.name, static_cast<unsigned long long>(got),
                        static_cast<unsigned long long>(e.count));
    }
  }
  const double t = timer.seconds();
  if (t >= kTimeLimitCounts) out.pass = false;
  out.detail = fmt("9 counts%s, %.3f s", mismatches.empty() ? " exact" : mismatches.c_str(), t);
  return out;
}

Outcome count_bounds() {
  const double c = CountingConstants::c;
  Outcome out;
  Timer timer;
  double worst_ratio = 0, least_fraction = 1;
  for (int n = 1; n <= kBoundPathMax; ++n) {
    const double scale = std::pow(c, n - 1);
    auto t = count_path_prototypes(n, false, true, ExecPolicy::parallel);
    auto t2 = count_path_prototypes(n, false, false, ExecPolicy::parallel);
    auto s = count_path_prototypes(n, true, true, ExecPolicy::parallel);
    auto s2 = count_path_prototypes(n, true, false, ExecPolicy::parallel);
    const double ratios[] = {t.total / (CountingConstants::alpha * scale), t2.total / (CountingConstants::beta * scale),
                             s.total / (CountingConstants::gamma * scale), s2.total / (CountingConstants::gamma * scale)};
    for (double r : ratios) {
      worst_ratio = std::max(worst_ratio, r);
      if (r > 1.0) out.pass = false;
    }
    for (const auto& fam : {s, s2}) {
      const double fraction = static_cast<double>(fam.tracked_outside) / static_cast<double>(fam.total);
      least_fraction = std::min(least_fraction, fraction);
      if (fraction < kOutsideFraction) out.pass = false;
    }
  }
  const double t = timer.seconds();
  if (t >= kTimeLimitBounds) out.pass = false;
  out.detail = fmt("paths 1..%d, max count/bound %.4f, min end-outside fraction %.4f, %.2f s", kBoundPathMax,
                   worst_ratio, least_fraction, t);
  return out;
}

// Triples counted a second way: every smooth map into {1..N}, times the number
// of vertex sets closed under "u in A and f(u) < f(v) on an edge forces v in A".
std::uint64_t triples_by_closure(const Graph& g, int N) {
  const int n = g.size();
  std::uint64_t total = 0;
  auto edges = g.edges();
  for (const auto& f : testing::brute_extensions(g, PartialBucketFunction::empty(n), 1, N)) {
    std::vector<VertexSet> forced(n, 0);
    for (auto [u, v] : edges) {
      if (f[u] < f[v]) forced[u] |= bit(v);
      if (f[v] < f[u]) forced[v] |= bit(u);
    }
    for (VertexSet a = 0; a < bit(n); ++a) {
      bool closed = true;
      for (VertexSet rest = a; rest && closed; rest &= rest - 1) closed = (forced[__builtin_ctzll(rest)] & ~a) == 0;
      total += closed;
    }
  }
  return total;
}

Outcome triple_bound() {
  Outcome out;
  Timer timer;
  int checked = 0, over = 0, disagree = 0;
  double worst = 0;
  for (const Graph& g : testing::connected_graphs_up_to(7)) {
    for (int N = 1; N <= 3; ++N) {
      const std::uint64_t got = count_triples_bruteforce(g, N);
      const double bound = 2.0 * N * std::pow(5.0, g.size() - 1);
      worst = std::max(worst, got / bound);
      if (static_cast<double>(got) > bound) ++over;
      if (got != triples_by_closure(g, N)) ++disagree;
      ++checked;
    }
  }
  out.pass = over == 0 && disagree == 0;
  out.detail = fmt("%d (graph, N) pairs, %d over bound, %d disagreements, max count/bound %.4f, %.1f s", checked, over,
                   disagree, worst, timer.seconds());
  return out;
}

Outcome bandwidth_equivalence() {
  Outcome out;
  Timer timer;
  const std::vector<Graph> corpus = testing::connected_graphs_up_to(7);
  int mismatches = 0, poly_mismatches = 0, bad_certs = 0;
  std::vector<std::size_t> sample(corpus.size());
  std::iota(sample.begin(), sample.end(), 0);
  std::mt19937_64 rng(kSeed);
  std::shuffle(sample.begin(), sample.end(), rng);
  sample.resize(kPolyspaceSample);
  std::vector<bool> in_sample(corpus.size(), false);
  for (std::size_t i : sample) in_sample[i] = true;

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Graph& g = corpus[i];
    const int truth = bandwidth_bruteforce(g).first;
    BandwidthResult e = minimize_bandwidth(g, BandwidthAlgorithm::expspace);
    if (e.bandwidth != truth) ++mismatches;
    if (bandwidth_of(g, e.ordering) > e.bandwidth) ++bad_certs;
    if (in_sample[i]) {
      BandwidthResult p = minimize_bandwidth(g, BandwidthAlgorithm::polyspace);
      if (p.bandwidth != truth) ++poly_mismatches;
      if (bandwidth_of(g, p.ordering) > p.bandwidth) ++bad_certs;
    }
  }
  const double t = timer.seconds();
  out.pass = mismatches == 0 && poly_mismatches == 0 && bad_certs == 0 && t < kTimeLimitBandwidth;
  out.detail = fmt("%zu graphs expspace (%d mismatches), %d-graph polyspace sample (%d mismatches), %.1f s",
                   corpus.size(), mismatches, kPolyspaceSample, poly_mismatches, t);
  return out;
}

Outcome distortion_equivalence() {
  Outcome out;
  Timer timer;
  const std::vector<Graph> corpus = testing::connected_graphs_up_to(6);
  int mismatches[3] = {0, 0, 0};
  int bad_certs = 0;
  DistortionOptions modes[3];
  modes[1].algo = DistortionAlgorithm::polyspace;
  modes[2].r_threshold = 0;
  for (const Graph& g : corpus) {
    const int truth = distortion_bruteforce(g)->first;
    for (int m = 0; m < 3; ++m) {
      DistortionResult r = minimize_distortion(g, modes[m]);
      if (r.distortion != truth) ++mismatches[m];
      if (embedding_metrics(g, r.embedding).distortion.ceil() > r.distortion) ++bad_certs;
    }
  }
  const double t = timer.seconds();
  out.pass = mismatches[0] + mismatches[1] + mismatches[2] == 0 && bad_certs == 0 && t < kTimeLimitDistortion;
  out.detail = fmt("%zu graphs; mismatches expspace %d, polyspace %d, split at r_threshold 0 %d; %.1f s",
                   corpus.size(), mismatches[0], mismatches[1], mismatches[2], t);
  return out;
}

Outcome segment_equivalences() {
  Outcome out;
  Timer timer;
  long orderings = 0, pushing = 0, violations = 0;
  for (int n = 1; n <= 5; ++n) {
    for (const Graph& g : testing::all_labelled_graphs(n)) {
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 1);
      do {
        Ordering pi{perm};
        const int bw = bandwidth_of(g, pi);
        for (int b = 0; b < n; ++b) {
          ++orderings;
          if (is_b_ordering_via_segments(g, PositionLayout(n, b), pi) != (bw <= b)) ++violations;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));

      if (n < 2 || !is_connected(g)) continue;
      std::vector<Vertex> order(n);
      std::iota(order.begin(), order.end(), 0);
      do {
        Embedding pi = pushing_positions(g, order);
        for (int& p : pi.position) p += 1;
        const int span = *std::max_element(pi.position.begin(), pi.position.end());
        const Ratio expansion = embedding_metrics(g, pi).expansion;
        for (int d = 1; d <= 2 * n; ++d) {
          ++pushing;
          const int r = (span + d) / (d + 1);
          if (satisfies_distortion_segments(g, DistortionLayout(d, r), pi) != (expansion <= Ratio{d, 1})) ++violations;
        }
      } while (std::next_permutation(order.begin(), order.end()));
    }
  }
  out.pass = violations == 0;
  out.detail = fmt("%ld (ordering, b) and %ld (pushing order, d) checks on all labelled graphs n<=5, %ld violations, "
                   "%.1f s",
                   orderings, pushing, violations, timer.seconds());
  return out;
}

Outcome enumerator_fidelity() {
  Outcome out;
  Timer timer;
  long pbf_sets = 0, pbf_mismatch = 0, ext_checks = 0, ext_mismatch = 0, duplicates = 0;
  for (const Graph& g : testing::connected_graphs_up_to(6)) {
    for (int N = 1; N <= 3; ++N) {
      std::set<PartialBucketFunction> got;
      for_each_partial_bucket_function(g, N, [&](const PartialBucketFunction& p, const BucketExtension&) {
        got.insert(p);
        return true;
      });
      const std::set<PartialBucketFunction> truth = pbf_bruteforce(g, N);
      ++pbf_sets;
      if (got != truth) ++pbf_mismatch;

      for (const PartialBucketFunction& p : truth) {
        auto emitted = bucket_extensions(g, p, ValueRange{1, N});
        std::set<BucketExtension> unique(emitted.begin(), emitted.end());
        if (unique.size() != emitted.size()) ++duplicates;
        auto expected = testing::brute_extensions(g, p, 1, N);
        if (unique != std::set<BucketExtension>(expected.begin(), expected.end())) ++ext_mismatch;
        ++ext_checks;
      }
    }
  }
  out.pass = pbf_mismatch == 0 && ext_mismatch == 0 && duplicates == 0;
  out.detail = fmt("%ld pbf sets (%ld mismatches), %ld extension streams (%ld mismatches, %ld with duplicates), %.1f s",
                   pbf_sets, pbf_mismatch, ext_checks, ext_mismatch, duplicates, timer.seconds());
  return out;
}

Outcome certificate_soundness() {
  Outcome out;
  Timer timer;
  std::mt19937_64 rng(kSeed + 8);
  int certificates = 0, failures = 0;
  for (int run = 0; run < kFuzzRuns; ++run) {
    const int kind = static_cast<int>(rng() % 6);
    const bool distortion = kind >= 3;
    const int n = std::uniform_int_distribution<int>(2, distortion ? 6 : 8)(rng);
    const double p = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    Graph g = testing::random_connected_graph(n, p, rng);
    if (!distortion) {
      const BandwidthAlgorithm algo = kind == 0 ? BandwidthAlgorithm::expspace
                                    : kind == 1 ? BandwidthAlgorithm::polyspace
                                                : BandwidthAlgorithm::bruteforce;
      if (rng() % 2) {
        BandwidthResult r = minimize_bandwidth(g, algo);
        ++certificates;
        if (bandwidth_of(g, r.ordering) > r.bandwidth) ++failures;
      } else {
        const int b = static_cast<int>(rng() % n);
        if (auto pi = solve_bandwidth(g, b, algo)) {
          ++certificates;
          if (bandwidth_of(g, *pi) > b) ++failures;
        }
      }
    } else {
      DistortionOptions options;
      if (kind == 4) options.algo = DistortionAlgorithm::polyspace;
      if (kind == 5) options.r_threshold = static_cast<int>(rng() % 3);
      if (rng() % 2) {
        DistortionResult r = minimize_distortion(g, options);
        ++certificates;
        if (embedding_metrics(g, r.embedding).distortion.ceil() > r.distortion) ++failures;
      } else {
        const int d = 1 + static_cast<int>(rng() % (2 * n - 1));
        if (auto pi = solve_distortion(g, d, options)) {
          ++certificates;
          if (embedding_metrics(g, *pi).distortion > Ratio{d, 1}) ++failures;
        }
      }
    }
  }
  out.pass = failures == 0;
  out.detail = fmt("%d runs, %d certificates re-evaluated, %d over their bound, %.1f s", kFuzzRuns, certificates,
                   failures, timer.seconds());
  return out;
}

// Polynomial envelope for the resident state count of the polynomial-space
// solver: n^2 states.
std::uint64_t envelope(int n) { return static_cast<std::uint64_t>(n) * n; }

Outcome space_contrast() {
  Outcome out;
  Timer timer;
  std::ostringstream json_out, err;
  const int code = cli::run({"bench", "--paths", "12..16", "--algo", "both"}, json_out, err);
  if (code != 0) return {false, "bench exited with " + std::to_string(code)};
  const nlohmann::json report = nlohmann::json::parse(json_out.str());
  std::string exp_series, poly_series;
  std::uint64_t last_table = 0;
  for (const auto& row : report["rows"]) {
    const int n = row["n"];
    if (row["algorithm"] == "expspace") {
      const std::uint64_t table = row["peak_table"];
      if (table <= last_table) out.pass = false;
      last_table = table;
      exp_series += " " + std::to_string(table);
    } else {
      const std::uint64_t resident = row["peak_resident"];
      if (resident > envelope(n)) out.pass = false;
      poly_series += " " + std::to_string(resident);
    }
  }
  if (report["summary"]["optima_agree"] != true) out.pass = false;
  out.detail = fmt("expspace peak table:%s; polyspace resident:%s (envelope n^2); %.1f s", exp_series.c_str(),
                   poly_series.c_str(), timer.seconds());
  return out;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"exact path prototype counts", exact_counts},
      {"path prototype bounds", count_bounds},
      {"triple count bound", triple_bound},
      {"bandwidth oracle equivalence", bandwidth_equivalence},
      {"distortion oracle equivalence", distortion_equivalence},
      {"segment criteria equivalences", segment_equivalences},
      {"enumerator fidelity", enumerator_fidelity},
      {"certificate soundness", certificate_soundness},
      {"space regime contrast", space_contrast},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
    ++index;
  }
  return failed;
}
