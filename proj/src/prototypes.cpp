#include <algorithm>
#include <array>

#include "bucketwidth/bucket_function.hpp"

namespace bucketwidth {

namespace {

// Root-to-leaves generator of prototypes. Each vertex in A u B takes a value
// relative to its nearest ancestor in A u B; the excluded offsets are exactly
// those no bucket extension along the connecting tree path can realise.
struct WalkState {
  VertexSet domain = 0;
  VertexSet valued = 0;  // A u B as decided so far
  std::array<int, kMaxVertices> values{};
  std::array<Vertex, kMaxVertices> anchor{};
  std::array<int, kMaxVertices> anchor_dist{};
  std::array<int, kMaxVertices + 2> value_counts{};  // only used by filtered walks
  int domain_count = 0;
};

struct RootOption {
  int value;
  bool in_domain;
};

struct WalkPlan {
  std::vector<Vertex> order;   // concatenated preorders
  std::vector<Vertex> parent;  // -1 at roots
  VertexSet anchors = 0;
  std::vector<RootOption> root_options;
  std::optional<ValueRange> range;
  std::optional<int> domain_size;
  std::vector<int> value_counts;  // empty = unrestricted
};

template <typename Leaf>
class PrototypeWalker {
 public:
  PrototypeWalker(const WalkPlan& plan, Leaf& leaf) : plan_(plan), leaf_(leaf) {}

  bool walk(WalkState& s, std::size_t idx) {
    if (idx == plan_.order.size()) {
      if (plan_.domain_size && s.domain_count != *plan_.domain_size) return true;
      if (!plan_.value_counts.empty()) {
        for (std::size_t x = 0; x < plan_.value_counts.size(); ++x) {
          if (s.value_counts[x] != plan_.value_counts[x]) return true;
        }
      }
      return leaf_(s);
    }
    if (plan_.domain_size) {
      int remaining = static_cast<int>(plan_.order.size() - idx);
      if (s.domain_count > *plan_.domain_size || s.domain_count + remaining < *plan_.domain_size) return true;
    }

    const Vertex v = plan_.order[idx];
    const Vertex p = plan_.parent[v];
    if (p < 0) {
      for (const RootOption& opt : plan_.root_options) {
        if (!place(s, idx, v, opt.in_domain, opt.value)) return false;
      }
      return true;
    }

    Vertex a;
    int dist;
    if (contains(s.valued, p)) {
      a = p;
      dist = 1;
    } else {
      a = s.anchor[p];
      dist = s.anchor_dist[p] + 1;
    }
    const bool a_in = contains(s.domain, a);
    const int base = s.values[a];

    for (bool v_in : {true, false}) {
      if (!v_in && !contains(plan_.anchors, v)) {
        s.anchor[v] = a;
        s.anchor_dist[v] = dist;
        if (!walk(s, idx + 1)) return false;
        continue;
      }
      for (int x = base - dist; x <= base + dist; ++x) {
        if (v_in && a_in && dist > 1 && (x == base - dist || x == base + dist)) continue;
        if (v_in && !a_in && x == base - dist) continue;
        if (!v_in && a_in && x == base + dist) continue;
        if (!place(s, idx, v, v_in, x)) return false;
      }
    }
    return true;
  }

 private:
  bool place(WalkState& s, std::size_t idx, Vertex v, bool in_domain, int value) {
    if (plan_.range && !plan_.range->contains(value)) return true;
    const bool counted = in_domain && !plan_.value_counts.empty();
    if (counted) {
      if (value < 0 || value >= static_cast<int>(plan_.value_counts.size())) return true;
      if (s.value_counts[value] == plan_.value_counts[value]) return true;
      ++s.value_counts[value];
    }
    s.valued |= bit(v);
    s.values[v] = value;
    s.anchor[v] = v;
    s.anchor_dist[v] = 0;
    if (in_domain) {
      s.domain |= bit(v);
      ++s.domain_count;
    }
    bool keep_going = walk(s, idx + 1);
    if (in_domain) {
      s.domain &= ~bit(v);
      --s.domain_count;
    }
    s.valued &= ~bit(v);
    s.values[v] = 0;
    if (counted) --s.value_counts[value];
    return keep_going;
  }

  const WalkPlan& plan_;
  Leaf& leaf_;
};

WalkPlan tree_plan(const RootedSpanningTree& tree, VertexSet anchors, int root_value, bool root_in_domain) {
  if (!contains(anchors, tree.root)) throw ContractViolation("the anchor set must contain the root");
  WalkPlan plan;
  plan.order = tree.order;
  plan.parent = tree.parent;
  plan.anchors = anchors;
  plan.root_options = {{root_value, root_in_domain}};
  return plan;
}

}  // namespace

bool for_each_prototype(const Graph& tree_graph, const RootedSpanningTree& tree, VertexSet anchors, int root_value,
                        bool root_in_domain, const std::function<bool(const Prototype&)>& visit) {
  WalkPlan plan = tree_plan(tree, anchors, root_value, root_in_domain);
  auto leaf = [&](const WalkState& s) {
    Prototype proto{s.domain, anchors, std::vector<int>(tree_graph.size(), 0)};
    for (Vertex v = 0; v < tree_graph.size(); ++v) {
      if (contains(s.valued, v)) proto.values[v] = s.values[v];
    }
    return visit(proto);
  };
  PrototypeWalker walker(plan, leaf);
  WalkState s;
  return walker.walk(s, 0);
}

PrototypeCount count_prototypes(const RootedSpanningTree& tree, VertexSet anchors, int root_value, bool root_in_domain,
                                std::optional<Vertex> tracked, ExecPolicy policy) {
  const WalkPlan plan = tree_plan(tree, anchors, root_value, root_in_domain);
  const VertexSet tracked_mask = tracked ? bit(*tracked) : 0;

  auto count_from = [&](WalkState s, std::size_t start) {
    PrototypeCount count;
    auto leaf = [&](const WalkState& st) {
      ++count.total;
      if (tracked_mask && !(st.domain & tracked_mask)) ++count.tracked_outside;
      return true;
    };
    PrototypeWalker walker(plan, leaf);
    walker.walk(s, start);
    return count;
  };

  if (policy == ExecPolicy::serial || plan.order.size() < 4) return count_from(WalkState{}, 0);

  // Split at a shallow depth: every partial walk state there becomes a task.
  const std::size_t depth = std::min<std::size_t>(plan.order.size() - 1, 4);
  WalkPlan prefix_plan = plan;
  prefix_plan.order.resize(depth);
  std::vector<WalkState> prefixes;
  auto collect = [&](const WalkState& s) {
    prefixes.push_back(s);
    return true;
  };
  PrototypeWalker prefix_walker(prefix_plan, collect);
  WalkState start;
  prefix_walker.walk(start, 0);

  std::uint64_t total = 0, outside = 0;
  const auto tasks = static_cast<long>(prefixes.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : total, outside)
  for (long i = 0; i < tasks; ++i) {
    PrototypeCount c = count_from(prefixes[i], depth);
    total += c.total;
    outside += c.tracked_outside;
  }
  return {total, outside};
}

PrototypeCount count_path_prototypes(int len, bool both_ends, bool root_in_domain, ExecPolicy policy) {
  if (len < 1 || len + 1 > kMaxVertices) throw ContractViolation("path length out of range");
  Graph path = fixtures::path(len + 1);
  RootedSpanningTree tree = rooted_spanning_tree(path);
  VertexSet anchors = bit(0) | (both_ends ? bit(len) : 0);
  return count_prototypes(tree, anchors, 0, root_in_domain, Vertex{len}, policy);
}

bool for_each_partial_bucket_function(const Graph& g, int N, const PbfVisitor& visit, const PbfFilter& filter) {
  const int n = g.size();
  if (n == 0 || N < 1) return true;
  const auto forest = rooted_spanning_forest(g);

  WalkPlan plan;
  plan.parent.assign(n, -1);
  for (const RootedSpanningTree& tree : forest) {
    plan.order.insert(plan.order.end(), tree.order.begin(), tree.order.end());
    plan.anchors |= bit(tree.root);
    for (Vertex v : tree.order) {
      plan.parent[v] = tree.parent[v];
      if (tree.tree_degree(v) >= 3) plan.anchors |= bit(v);
    }
  }
  for (int x = 1; x <= N; ++x) {
    plan.root_options.push_back({x, true});
    plan.root_options.push_back({x, false});
  }
  plan.range = ValueRange{1, N};
  plan.domain_size = filter.domain_size;
  plan.value_counts = filter.value_counts;
  if (plan.value_counts.size() > kMaxVertices + 2) throw ContractViolation("value filter too wide");

  PartialBucketFunction pbf = PartialBucketFunction::empty(n);
  PartialBucketFunction pins = PartialBucketFunction::empty(n);
  auto leaf = [&](const WalkState& s) {
    for (Vertex v = 0; v < n; ++v) {
      pbf.values[v] = contains(s.domain, v) ? s.values[v] : 0;
      pins.values[v] = contains(s.valued, v) ? s.values[v] : 0;
    }
    pbf.domain = s.domain;
    pins.domain = s.valued;
    // The tree prototype must also be one in g itself.
    auto witness = complete_extension(g, pbf, pins, ValueRange{1, N});
    if (!witness) return true;
    return visit(pbf, *witness);
  };
  PrototypeWalker walker(plan, leaf);
  WalkState s;
  return walker.walk(s, 0);
}

}  // namespace bucketwidth
