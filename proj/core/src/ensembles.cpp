#include "reconlab/ensembles.hpp"

#include <stdexcept>

namespace reconlab {

Multigraph sample_poisson_multigraph(std::uint32_t n, double gamma, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_poisson_multigraph: n must be >= 1");
    if (gamma < 0) throw std::invalid_argument("sample_poisson_multigraph: gamma must be >= 0");
    Multigraph g;
    g.n = n;
    std::uint64_t m = poisson(rng, gamma * static_cast<double>(n));
    g.edges.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        auto u = static_cast<std::uint32_t>(uniform_below(rng, n));
        auto v = static_cast<std::uint32_t>(uniform_below(rng, n));
        g.edges.push_back({u, v, 0});
    }
    canonicalize(g);
    return g;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> sample_half_edge_matching(
    std::uint32_t n, std::uint32_t k, Rng& rng) {
    std::uint64_t half_edges = static_cast<std::uint64_t>(n) * (k + 1);
    if (half_edges % 2 != 0)
        throw std::invalid_argument("sample_regular_multigraph: n*(k+1) must be even");
    std::vector<std::uint32_t> h(half_edges);
    for (std::uint64_t i = 0; i < half_edges; ++i) h[i] = static_cast<std::uint32_t>(i);
    // Fisher-Yates; pairing consecutive entries of a uniform permutation gives
    // a uniform perfect matching.
    for (std::uint64_t i = half_edges; i > 1; --i) {
        std::uint64_t j = uniform_below(rng, i);
        std::swap(h[i - 1], h[j]);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> matching;
    matching.reserve(half_edges / 2);
    for (std::uint64_t i = 0; i < half_edges; i += 2) {
        std::uint32_t a = h[i], b = h[i + 1];
        if (a > b) std::swap(a, b);
        matching.emplace_back(a, b);
    }
    return matching;
}

Multigraph sample_regular_multigraph(std::uint32_t n, std::uint32_t k, Rng& rng) {
    auto matching = sample_half_edge_matching(n, k, rng);
    Multigraph g;
    g.n = n;
    g.edges.reserve(matching.size());
    for (const auto& [a, b] : matching) {
        g.edges.push_back({a / (k + 1), b / (k + 1), 0});
    }
    canonicalize(g);
    return g;
}

Tree sample_galton_watson_tree(double gamma, std::uint32_t depth, Rng& rng) {
    if (gamma < 0) throw std::invalid_argument("sample_galton_watson_tree: gamma must be >= 0");
    Tree t;
    t.root = 0;
    t.nodes.push_back({-1, 0, 0});
    // breadth-first generation keeps node ids in depth order
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].depth >= depth) continue;
        std::uint64_t offspring = poisson(rng, 2.0 * gamma);
        for (std::uint64_t c = 0; c < offspring; ++c) {
            t.nodes.push_back({static_cast<std::int32_t>(i), t.nodes[i].depth + 1, 0});
        }
    }
    return t;
}

namespace {

Tree grow_uniform_tree(std::uint32_t root_children, std::uint32_t internal_children,
                       std::uint32_t depth) {
    Tree t;
    t.root = 0;
    t.nodes.push_back({-1, 0, 0});
    for (std::uint32_t i = 0; i < t.nodes.size(); ++i) {
        if (t.nodes[i].depth >= depth) continue;
        std::uint32_t c = (i == 0) ? root_children : internal_children;
        for (std::uint32_t j = 0; j < c; ++j) {
            t.nodes.push_back({static_cast<std::int32_t>(i), t.nodes[i].depth + 1, 0});
        }
    }
    return t;
}

}  // namespace

Tree regular_tree(std::uint32_t k, std::uint32_t depth) {
    if (k < 1) throw std::invalid_argument("regular_tree: k must be >= 1");
    return grow_uniform_tree(k + 1, k, depth);
}

Tree branching_tree(std::uint32_t k, std::uint32_t depth) {
    if (k < 1) throw std::invalid_argument("branching_tree: k must be >= 1");
    return grow_uniform_tree(k, k, depth);
}

void assign_fair_coin_weight_ids(Multigraph& g, Rng& rng) {
    for (auto& e : g.edges) e.weight_id = bernoulli(rng, 0.5) ? 1 : 0;
    canonicalize(g);
}

}  // namespace reconlab
