#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "bucketwidth/bandwidth.hpp"
#include "bucketwidth/bucket_function.hpp"
#include "bucketwidth/distortion.hpp"
#include "bucketwidth/graph.hpp"
#include "bucketwidth/oracle.hpp"
#include "json.hpp"

namespace bucketwidth::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct GraphArgs {
  std::string path;
  std::string format = "edge";

  Graph load() const {
    return read_graph_file(path, format == "dimacs" ? GraphFormat::dimacs : GraphFormat::edge_list);
  }
};

void add_graph_args(CLI::App* cmd, GraphArgs& g, bool positional) {
  if (positional) {
    cmd->add_option("graph", g.path, "graph file")->required();
  } else {
    cmd->add_option("--graph", g.path, "graph file")->required();
  }
  cmd->add_option("--format", g.format, "input format")->check(CLI::IsMember({"edge", "dimacs"}));
}

void set_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

json ordering_json(const Ordering& pi) { return json(pi.position); }

json embedding_json(const Embedding& pi) {
  json out = json::object();
  for (std::size_t v = 0; v < pi.position.size(); ++v) out[std::to_string(v + 1)] = pi.position[v];
  return out;
}

BandwidthAlgorithm bandwidth_algo(const std::string& name) {
  if (name == "bruteforce") return BandwidthAlgorithm::bruteforce;
  if (name == "polyspace") return BandwidthAlgorithm::polyspace;
  return BandwidthAlgorithm::expspace;
}

DistortionAlgorithm distortion_algo(const std::string& name) {
  if (name == "bruteforce") return DistortionAlgorithm::bruteforce;
  if (name == "polyspace") return DistortionAlgorithm::polyspace;
  return DistortionAlgorithm::expspace;
}

std::uint64_t peak_states(const SearchStats& s) { return std::max(s.table_size, s.peak_resident); }
std::uint64_t peak_states(const DistortionStats& s) { return std::max(s.table_size, s.peak_resident); }

struct BandwidthOutcome {
  bool feasible = false;
  int value = 0;
  Ordering ordering;
  SearchStats stats;
};

// Bandwidth splits over connected components: the optimum is the largest
// component optimum and the orderings are laid out one after another.
BandwidthOutcome solve_bandwidth_components(const Graph& g, std::optional<int> bound, BandwidthAlgorithm algo,
                                            const PolyspaceOptions& options) {
  BandwidthOutcome out;
  out.feasible = true;
  out.ordering.position.assign(g.size(), 0);
  int offset = 0;
  for (const auto& comp : connected_components(g)) {
    Graph sub = g.induced(comp);
    Ordering part;
    if (bound) {
      SearchStats stats;
      auto found = solve_bandwidth(sub, *bound, algo, options, &stats);
      out.stats.merge_peak(stats);
      if (!found) {
        out.feasible = false;
        return out;
      }
      part = std::move(*found);
    } else {
      BandwidthResult r = minimize_bandwidth(sub, algo, options);
      out.stats.merge_peak(r.stats);
      out.value = std::max(out.value, r.bandwidth);
      part = std::move(r.ordering);
    }
    for (std::size_t i = 0; i < comp.size(); ++i) out.ordering.position[comp[i]] = offset + part.position[i];
    offset += static_cast<int>(comp.size());
  }
  if (bound) out.value = *bound;
  return out;
}

struct SolveArgs {
  GraphArgs graph;
  std::optional<int> bound;
  bool minimize = false;
  std::string algo = "expspace";
  bool verify = false;
  int jobs = 1;
};

void add_solve_args(CLI::App* cmd, SolveArgs& a) {
  add_graph_args(cmd, a.graph, true);
  auto* group = cmd->add_option_group("mode");
  group->add_option("--bound", a.bound, "decide feasibility for this bound");
  group->add_flag("--minimize", a.minimize, "find the optimum");
  group->require_option(1);
  cmd->add_option("--algo", a.algo, "solver")->check(CLI::IsMember({"bruteforce", "expspace", "polyspace"}));
  cmd->add_flag("--verify", a.verify, "cross-check against the brute-force oracle");
  cmd->add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
}

int cmd_bandwidth(const SolveArgs& a, bool loose, bool dedup, std::ostream& out, std::ostream& err) {
  const Graph g = a.graph.load();
  set_jobs(a.jobs);
  PolyspaceOptions options;
  options.loose_value_bound = loose;
  options.dedup_mid_states = dedup;
  options.policy = a.jobs > 1 ? ExecPolicy::parallel : ExecPolicy::serial;
  if (a.bound && *a.bound < 0) throw CLI::ValidationError("--bound", "must be nonnegative");

  const auto start = Clock::now();
  BandwidthOutcome r = solve_bandwidth_components(g, a.bound, bandwidth_algo(a.algo), options);
  const double ms = elapsed_ms(start);

  json report = {{"problem", "bandwidth"}, {"algorithm", a.algo}, {"input", a.graph.path},
                 {"feasible", r.feasible}, {"wall_time_ms", ms}, {"peak_states", peak_states(r.stats)}};
  if (a.bound) report["bound"] = *a.bound;
  if (r.feasible) {
    report["bandwidth"] = a.bound ? bandwidth_of(g, r.ordering) : r.value;
    report["ordering"] = ordering_json(r.ordering);
  }
  int code = r.feasible ? solved : infeasible;
  if (a.verify) {
    const int truth = bandwidth_bruteforce(g).first;
    bool ok = a.bound ? (truth <= *a.bound) == r.feasible : truth == r.value;
    if (r.feasible) ok = ok && bandwidth_of(g, r.ordering) <= r.value;
    report["verified"] = ok;
    if (!ok) code = verify_mismatch;
  }
  out << report.dump() << "\n";
  err << "bandwidth " << (r.feasible ? "feasible" : "infeasible");
  if (r.feasible) err << ", value " << report["bandwidth"].get<int>();
  err << " (" << a.algo << ", " << std::fixed << std::setprecision(2) << ms << " ms)\n";
  return code;
}

int cmd_distortion(const SolveArgs& a, std::optional<int> r_threshold, std::ostream& out, std::ostream& err) {
  const Graph g = a.graph.load();
  set_jobs(a.jobs);
  DistortionOptions options;
  options.algo = distortion_algo(a.algo);
  options.r_threshold = r_threshold;
  options.policy = a.jobs > 1 ? ExecPolicy::parallel : ExecPolicy::serial;
  if (a.bound && *a.bound < 1) throw CLI::ValidationError("--bound", "must be positive");

  const auto start = Clock::now();
  bool feasible = false;
  int value = 0;
  Embedding pi;
  DistortionStats stats;
  if (g.size() > 0 && is_connected(g)) {
    if (a.bound) {
      if (auto found = solve_distortion(g, *a.bound, options, &stats)) {
        feasible = true;
        pi = std::move(*found);
        value = static_cast<int>(embedding_metrics(g, pi).distortion.ceil());
      }
    } else {
      DistortionResult res = minimize_distortion(g, options);
      feasible = true;
      value = res.distortion;
      pi = std::move(res.embedding);
      stats = res.stats;
    }
  }
  const double ms = elapsed_ms(start);

  json report = {{"problem", "distortion"}, {"algorithm", a.algo}, {"input", a.graph.path},
                 {"feasible", feasible}, {"wall_time_ms", ms}, {"peak_states", peak_states(stats)}};
  if (a.bound) report["bound"] = *a.bound;
  if (r_threshold) report["r_threshold"] = *r_threshold;
  if (feasible) {
    report["distortion"] = value;
    report["embedding"] = embedding_json(pi);
  }
  int code = feasible ? solved : infeasible;
  if (a.verify) {
    auto truth = distortion_bruteforce(g);
    bool ok;
    if (!truth) {
      ok = !feasible;
    } else if (a.bound) {
      ok = (truth->first <= *a.bound) == feasible;
    } else {
      ok = truth->first == value;
    }
    if (feasible) ok = ok && embedding_metrics(g, pi).distortion.ceil() <= (a.bound ? *a.bound : value);
    report["verified"] = ok;
    if (!ok) code = verify_mismatch;
  }
  out << report.dump() << "\n";
  err << "distortion " << (feasible ? "feasible" : "infeasible");
  if (feasible) err << ", value " << value;
  err << " (" << a.algo << ", " << std::fixed << std::setprecision(2) << ms << " ms)\n";
  return code;
}

json pbf_json(const PartialBucketFunction& pbf) {
  json values = json::object();
  for (std::size_t v = 0; v < pbf.values.size(); ++v) {
    if (pbf.has(static_cast<Vertex>(v))) values[std::to_string(v + 1)] = pbf.values[v];
  }
  return {{"domain_size", pbf.size()}, {"values", values}};
}

// "v=x" with a 1-based vertex.
std::pair<Vertex, int> parse_assignment(const std::string& text, int n) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError("assignment", "expected v=x, got " + text);
  int v = std::stoi(text.substr(0, eq));
  int x = std::stoi(text.substr(eq + 1));
  if (v < 1 || v > n) throw CLI::ValidationError("assignment", "vertex " + std::to_string(v) + " out of range");
  return {v - 1, x};
}

struct PrototypeArgs {
  int length = 1;
  bool both_ends = false;
  bool in_a = false;
  int root_value = 0;
  int jobs = 1;
};

void add_prototype_args(CLI::App* cmd, PrototypeArgs& p) {
  cmd->add_option("--path", p.length, "path length (edges)")->required()->check(CLI::Range(1, kMaxVertices - 1));
  cmd->add_flag("--both-ends", p.both_ends, "anchor both path ends");
  cmd->add_flag("--in-A", p.in_a, "root belongs to the domain");
  cmd->add_option("--root-value", p.root_value, "value at the root");
}

std::string family_name(const PrototypeArgs& p) {
  return std::string(p.both_ends ? "S" : "T") + (p.in_a ? "" : "'");
}

std::pair<int, int> parse_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    int x = std::stoi(text);
    return {x, x};
  }
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

struct BenchArgs {
  std::string corpus;
  std::string paths;
  std::string problem = "bandwidth";
  std::string algo = "both";
  int jobs = 1;
};

struct BenchRow {
  std::string instance;
  int n = 0;
  std::string algo;
  int value = 0;
  double ms = 0;
  std::uint64_t table = 0;
  std::uint64_t resident = 0;
  std::uint64_t expansions = 0;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, Graph>> instances;
  if (!a.corpus.empty()) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(a.corpus)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) instances.emplace_back(f.filename().string(), read_graph_file(f.string()));
  }
  if (!a.paths.empty()) {
    auto [lo, hi] = parse_range(a.paths);
    for (int n = lo; n <= hi; ++n) instances.emplace_back("path" + std::to_string(n), fixtures::path(n));
  }
  std::vector<std::string> algos;
  if (a.algo == "both") {
    algos = {"expspace", "polyspace"};
  } else {
    algos = {a.algo};
  }

  std::vector<BenchRow> rows(instances.size() * algos.size());
  std::vector<std::string> errors(rows.size());
  const long count = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, a.jobs)) if (a.jobs > 1)
  for (long i = 0; i < count; ++i) {
    const auto& [name, g] = instances[i / algos.size()];
    BenchRow& row = rows[i];
    row.instance = name;
    row.n = g.size();
    row.algo = algos[i % algos.size()];
    const auto start = Clock::now();
    try {
      if (a.problem == "bandwidth") {
        BandwidthOutcome r = solve_bandwidth_components(g, std::nullopt, bandwidth_algo(row.algo), {});
        row.value = r.value;
        row.table = r.stats.table_size;
        row.resident = r.stats.peak_resident;
        row.expansions = r.stats.expansions;
      } else {
        DistortionOptions options;
        options.algo = distortion_algo(row.algo);
        DistortionResult r = minimize_distortion(g, options);
        row.value = r.distortion;
        row.table = r.stats.table_size;
        row.resident = r.stats.peak_resident;
        row.expansions = r.stats.expansions;
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    row.ms = elapsed_ms(start);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  json report = {{"problem", a.problem}, {"rows", json::array()}};
  bool agree = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BenchRow& r = rows[i];
    report["rows"].push_back({{"instance", r.instance}, {"n", r.n}, {"algorithm", r.algo}, {"value", r.value},
                              {"wall_time_ms", r.ms}, {"peak_table", r.table}, {"peak_resident", r.resident},
                              {"expansions", r.expansions}});
    if (i % algos.size() != 0 && r.value != rows[i - i % algos.size()].value) agree = false;
  }
  report["summary"] = {{"instances", instances.size()}, {"optima_agree", agree}};
  out << report.dump() << "\n";

  err << std::left << std::setw(16) << "instance" << std::setw(5) << "n" << std::setw(11) << "algo" << std::setw(7)
      << "value" << std::setw(12) << "ms" << std::setw(12) << "peak_table" << "peak_resident\n";
  for (const BenchRow& r : rows) {
    err << std::left << std::setw(16) << r.instance << std::setw(5) << r.n << std::setw(11) << r.algo << std::setw(7)
        << r.value << std::setw(12) << std::fixed << std::setprecision(2) << r.ms << std::setw(12) << r.table
        << r.resident << "\n";
  }
  return solved;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact bandwidth and line-distortion solvers", "bucketwidth"};
  app.require_subcommand(1);

  SolveArgs bw, dist;
  bool loose = false, dedup = false;
  auto* bandwidth = app.add_subcommand("bandwidth", "minimum bandwidth ordering");
  add_solve_args(bandwidth, bw);
  bandwidth->add_flag("--loose-n", loose, "enumerate middle states with values up to n");
  bandwidth->add_flag("--dedup", dedup, "skip repeated middle states");

  std::optional<int> r_threshold;
  auto* distortion = app.add_subcommand("distortion", "minimum distortion embedding into the line");
  add_solve_args(distortion, dist);
  distortion->add_option("--r-threshold", r_threshold, "split instances with more segments than this");

  auto* enumerate = app.add_subcommand("enumerate", "stream enumerated objects as JSON lines");
  enumerate->require_subcommand(1);
  GraphArgs ext_graph, pbf_graph;
  std::vector<std::string> assignments;
  std::optional<int> lo, hi;
  std::string seed;
  auto* extensions = enumerate->add_subcommand("extensions", "bucket extensions of a partial bucket function");
  add_graph_args(extensions, ext_graph, false);
  extensions->add_option("--assign", assignments, "v=x entries of the partial function");
  extensions->add_option("--lo", lo, "smallest allowed value");
  extensions->add_option("--hi", hi, "largest allowed value");
  extensions->add_option("--seed", seed, "v=x pin for a component without assigned vertices");
  int enum_n = 1;
  bool distinct = false;
  auto* pbfs = enumerate->add_subcommand("pbf", "partial bucket functions with values in 1..N");
  add_graph_args(pbfs, pbf_graph, false);
  pbfs->add_option("--N", enum_n, "value bound")->required()->check(CLI::PositiveNumber);
  pbfs->add_flag("--distinct", distinct, "drop repeated functions");
  PrototypeArgs enum_proto;
  auto* prototypes = enumerate->add_subcommand("prototypes", "prototypes of a path");
  add_prototype_args(prototypes, enum_proto);

  auto* count = app.add_subcommand("count", "exact counts");
  count->require_subcommand(1);
  PrototypeArgs count_proto;
  auto* count_prototypes_cmd = count->add_subcommand("prototypes", "prototypes of a path");
  add_prototype_args(count_prototypes_cmd, count_proto);
  count_prototypes_cmd->add_option("--jobs", count_proto.jobs, "worker threads")->check(CLI::PositiveNumber);
  GraphArgs triple_graph, count_pbf_graph;
  int triple_n = 1, count_pbf_n = 1;
  bool count_verify = false;
  auto* triples = count->add_subcommand("triples", "triples (A, f, extension) by exhaustion");
  add_graph_args(triples, triple_graph, false);
  triples->add_option("--N", triple_n, "value bound")->required()->check(CLI::PositiveNumber);
  auto* count_pbf = count->add_subcommand("pbf", "distinct partial bucket functions");
  add_graph_args(count_pbf, count_pbf_graph, false);
  count_pbf->add_option("--N", count_pbf_n, "value bound")->required()->check(CLI::PositiveNumber);
  count_pbf->add_flag("--verify", count_verify, "compare with the brute-force set");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "compare the exponential- and polynomial-space solvers");
  bench->add_option("--corpus", bench_args.corpus, "directory of graph files")->check(CLI::ExistingDirectory);
  bench->add_option("--paths", bench_args.paths, "path fixtures, e.g. 12..16");
  bench->add_option("--problem", bench_args.problem)->check(CLI::IsMember({"bandwidth", "distortion"}));
  bench->add_option("--algo", bench_args.algo)->check(CLI::IsMember({"expspace", "polyspace", "both", "bruteforce"}));
  bench->add_option("--jobs", bench_args.jobs, "instances run in parallel")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, err, err);
    return code == 0 ? solved : usage;
  }

  try {
    if (*bandwidth) return cmd_bandwidth(bw, loose, dedup, out, err);
    if (*distortion) return cmd_distortion(dist, r_threshold, out, err);
    if (*extensions) {
      const Graph g = ext_graph.load();
      PartialBucketFunction pbf = PartialBucketFunction::empty(g.size());
      for (const auto& s : assignments) {
        auto [v, x] = parse_assignment(s, g.size());
        pbf.assign(v, x);
      }
      std::optional<ValueRange> range;
      if (lo || hi) {
        if (!lo || !hi) throw CLI::ValidationError("--lo/--hi", "give both or neither");
        range = ValueRange{*lo, *hi};
      }
      std::optional<Seed> pin;
      if (!seed.empty()) {
        auto [v, x] = parse_assignment(seed, g.size());
        pin = Seed{v, x};
      }
      std::uint64_t emitted = 0;
      for_each_bucket_extension(g, pbf, range, pin, [&](const BucketExtension& ext) {
        out << json{{"values", ext}}.dump() << "\n";
        ++emitted;
        return true;
      });
      err << emitted << " extensions\n";
      return solved;
    }
    if (*pbfs) {
      const Graph g = pbf_graph.load();
      std::set<PartialBucketFunction> seen;
      std::uint64_t emitted = 0;
      for_each_partial_bucket_function(g, enum_n, [&](const PartialBucketFunction& pbf, const BucketExtension& w) {
        if (distinct && !seen.insert(pbf).second) return true;
        json line = pbf_json(pbf);
        line["witness"] = w;
        out << line.dump() << "\n";
        ++emitted;
        return true;
      });
      err << emitted << " partial bucket functions\n";
      return solved;
    }
    if (*prototypes) {
      Graph path = fixtures::path(enum_proto.length + 1);
      RootedSpanningTree tree = rooted_spanning_tree(path);
      VertexSet anchors = bit(0) | (enum_proto.both_ends ? bit(enum_proto.length) : 0);
      std::uint64_t emitted = 0;
      for_each_prototype(path, tree, anchors, enum_proto.root_value, enum_proto.in_a, [&](const Prototype& p) {
        json values = json::object();
        for (Vertex v = 0; v < path.size(); ++v) {
          if (contains(p.domain | p.anchors, v)) values["v" + std::to_string(v)] = p.values[v];
        }
        json domain = json::array();
        for (Vertex v = 0; v < path.size(); ++v) {
          if (contains(p.domain, v)) domain.push_back("v" + std::to_string(v));
        }
        out << json{{"domain", domain}, {"values", values}}.dump() << "\n";
        ++emitted;
        return true;
      });
      err << emitted << " prototypes\n";
      return solved;
    }
    if (*count_prototypes_cmd) {
      set_jobs(count_proto.jobs);
      auto policy = count_proto.jobs > 1 ? ExecPolicy::parallel : ExecPolicy::serial;
      const auto start = Clock::now();
      PrototypeCount c = count_path_prototypes(count_proto.length, count_proto.both_ends, count_proto.in_a, policy);
      out << json{{"family", family_name(count_proto)},
                  {"length", count_proto.length},
                  {"count", c.total},
                  {"tracked_outside", c.tracked_outside},
                  {"wall_time_ms", elapsed_ms(start)}}
                 .dump()
          << "\n";
      err << family_name(count_proto) << "(" << count_proto.length << ") = " << c.total << "\n";
      return solved;
    }
    if (*triples) {
      const Graph g = triple_graph.load();
      check_size_guard("count_triples_bruteforce", g.size(), 12);
      std::uint64_t c = count_triples_bruteforce(g, triple_n);
      double bound = 2.0 * triple_n * std::pow(5.0, std::max(0, g.size() - 1));
      out << json{{"count", c}, {"bound", bound}}.dump() << "\n";
      err << c << " triples (bound " << bound << ")\n";
      return solved;
    }
    if (*count_pbf) {
      const Graph g = count_pbf_graph.load();
      std::set<PartialBucketFunction> seen;
      std::uint64_t emitted = 0;
      for_each_partial_bucket_function(g, count_pbf_n, [&](const PartialBucketFunction& pbf, const BucketExtension&) {
        ++emitted;
        seen.insert(pbf);
        return true;
      });
      json report = {{"count", seen.size()}, {"emitted", emitted}};
      int code = solved;
      if (count_verify) {
        bool ok = seen == pbf_bruteforce(g, count_pbf_n);
        report["verified"] = ok;
        if (!ok) code = verify_mismatch;
      }
      out << report.dump() << "\n";
      err << seen.size() << " distinct partial bucket functions (" << emitted << " emitted)\n";
      return code;
    }
    if (*bench) return cmd_bench(bench_args, out, err);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}

}  // namespace bucketwidth::cli
