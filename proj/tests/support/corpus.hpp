#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bucketwidth/graph.hpp"

namespace bucketwidth::testing {

/// Connected graphs on exactly n vertices, one per isomorphism class, in a
/// fixed order. Built by attaching a new vertex to every graph on n-1 vertices
/// and keeping canonical forms. n <= 7.
const std::vector<Graph>& connected_graphs(int n);

/// All classes for 1..max_n concatenated.
std::vector<Graph> connected_graphs_up_to(int max_n);

/// G(n, p) conditioned on being connected (resampled until it is).
Graph random_connected_graph(int n, double p, std::mt19937_64& rng);

/// Uniform random labelled tree (random parent among earlier vertices, then
/// relabelled).
Graph random_tree(int n, std::mt19937_64& rng);

/// Every graph on n vertices (labelled), n <= 5.
std::vector<Graph> all_labelled_graphs(int n);

}  // namespace bucketwidth::testing
