#include <benchmark/benchmark.h>

#include <cstdint>

#include "reconlab/ensembles.hpp"
#include "reconlab/exact.hpp"
#include "reconlab/graph.hpp"
#include "reconlab/mcmc.hpp"
#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"
#include "reconlab/treecalc.hpp"

namespace {

using namespace reconlab;

GraphicalModel regular_ferromagnet(std::uint32_t n, double theta, std::uint64_t seed) {
    auto rng = make_rng(seed);
    return ising_model(sample_regular_multigraph(n, 2, rng), theta, 0.0);
}

void BM_GlauberSweep(benchmark::State& state) {
    auto gm = regular_ferromagnet(static_cast<std::uint32_t>(state.range(0)), 0.7, 11);
    auto adj = adjacency(gm.graph);
    ChainState chain(Configuration(gm.graph.n, 0), 12);
    for (auto _ : state) {
        for (std::uint32_t i = 0; i < gm.graph.n; ++i) heat_bath_update(gm, adj, chain, i);
        benchmark::DoNotOptimize(chain.config.data());
    }
    state.SetItemsProcessed(state.iterations() * gm.graph.n);
}
BENCHMARK(BM_GlauberSweep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_BallDecompose(benchmark::State& state) {
    auto rng = make_rng(13);
    auto g = sample_poisson_multigraph(static_cast<std::uint32_t>(state.range(0)), 1.2, rng);
    for (auto _ : state) {
        auto ball = ball_decompose(g, 0, 3);
        benchmark::DoNotOptimize(ball.ball_vertices.data());
    }
}
BENCHMARK(BM_BallDecompose)->Arg(1000)->Arg(10000);

void BM_UpwardPosterior(benchmark::State& state) {
    auto tree = regular_tree(2, static_cast<std::uint32_t>(state.range(0)));
    auto tm = ising_tree_model(0.7, 0.0);
    auto rng = make_rng(14);
    auto x = broadcast_sample(tree, tm, rng);
    BoundaryEvidence ev;
    for (std::uint32_t node : nodes_at_depth(tree, tree.depth())) ev.observe(node, x[node]);
    for (auto _ : state) {
        auto post = upward_root_posterior(tree, tm, ev);
        benchmark::DoNotOptimize(post.p.data());
    }
}
BENCHMARK(BM_UpwardPosterior)->Arg(6)->Arg(10);

void BM_ExactPartition(benchmark::State& state) {
    auto gm = regular_ferromagnet(static_cast<std::uint32_t>(state.range(0)), 0.6, 15);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_log_partition(gm));
    }
}
BENCHMARK(BM_ExactPartition)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
