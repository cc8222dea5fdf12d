#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "reconlab/graph.hpp"
#include "reconlab/rng.hpp"

namespace reconlab {

/** Sparse Poisson multigraph on n vertices: every unordered pair {i,j}, i != j,
 *  carries Poisson(2*gamma/n) parallel edges and every vertex carries
 *  Poisson(gamma/n) self-loops, all independent.
 *
 *  Sampled by Poissonization: the total edge count is Poisson(gamma*n) and
 *  each edge is an independent uniformly random ordered pair from [n]^2,
 *  which reproduces the per-slot law exactly (pair probability 2/n^2, loop
 *  probability 1/n^2). All weight ids are 0. */
Multigraph sample_poisson_multigraph(std::uint32_t n, double gamma, Rng& rng);

/** Uniform perfect matching of the n*(k+1) half-edges: every vertex gets
 *  degree exactly k+1, loops counting twice (the configuration model).
 *  Requires n*(k+1) even. */
Multigraph sample_regular_multigraph(std::uint32_t n, std::uint32_t k, Rng& rng);

/// The half-edge matching behind sample_regular_multigraph, exposed so its
/// uniformity over the (n(k+1)-1)!! matchings can be tested directly.
/// Half-edge h belongs to vertex h / (k+1); pairs are canonically ordered.
std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_half_edge_matching(
    std::uint32_t n, std::uint32_t k, Rng& rng);

/** Galton-Watson tree with iid Poisson(2*gamma) offspring, truncated at the
 *  given depth: nodes at depth == `depth` get no children. All weight ids 0. */
Tree sample_galton_watson_tree(double gamma, std::uint32_t depth, Rng& rng);

/** Deterministic truncated tree matching (k+1)-regular local geometry: the
 *  root has k+1 children, every deeper internal node has k children. */
Tree regular_tree(std::uint32_t k, std::uint32_t depth);

/** Deterministic truncated tree of pure branching k: the root and every
 *  internal node have exactly k children (the subtree shape hanging off one
 *  edge of the regular tree). */
Tree branching_tree(std::uint32_t k, std::uint32_t depth);

/// Assign each edge an independent fair-coin weight id in {0,1}, then
/// re-canonicalize. Used to build spin-glass instances.
void assign_fair_coin_weight_ids(Multigraph& g, Rng& rng);

}  // namespace reconlab
