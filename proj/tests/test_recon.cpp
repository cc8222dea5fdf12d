#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "reconlab/ensembles.hpp"
#include "reconlab/exact.hpp"
#include "reconlab/model.hpp"
#include "reconlab/recon.hpp"
#include "reconlab/rng.hpp"

using namespace reconlab;

namespace {

Multigraph triangle_with_tail() {
    // triangle 0-1-2 plus a path 2-3-4
    Multigraph g;
    g.n = 5;
    g.edges = {{0, 1, 0}, {0, 2, 0}, {1, 2, 0}, {2, 3, 0}, {3, 4, 0}};
    return g;
}

}  // namespace

TEST_CASE("state symmetry holds exactly for the three experiment families") {
    auto g = triangle_with_tail();
    CHECK(state_symmetric_marginals(ising_model(g, 0.6, 0.0)));
    CHECK(!state_symmetric_marginals(ising_model(g, 0.6, 0.2)));
    Rng rng = make_rng(3);
    CHECK(state_symmetric_marginals(spin_glass_model(g, 0.3, rng)));
    CHECK(state_symmetric_marginals(coloring_model(g, 4, 0.25)));
    GraphicalModel odd;
    odd.graph = g;
    odd.tables = {WeightTable(2, {2.0, 1.0, 1.0, 3.0})};  // unequal diagonal
    odd.alphabet_size = 2;
    CHECK(!state_symmetric_marginals(odd));
}

TEST_CASE("radius zero freezes the root itself: bias is a point-mass distance") {
    auto gm = ising_model(triangle_with_tail(), 0.6, 0.0);
    auto est = graph_reconstruction_bias(gm, 0, 0, 64, 11);
    CHECK(est.trials == 64);
    CHECK(est.bias_mean == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(est.bias_stderr == doctest::Approx(0.0));
    auto col = coloring_model(triangle_with_tail(), 3, 0.3);
    auto est3 = graph_reconstruction_bias(col, 0, 0, 64, 11);
    CHECK(est3.bias_mean == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("monte carlo bias converges to the enumerated statistic") {
    Rng rng = make_rng(47);
    auto g = sample_poisson_multigraph(8, 1.4, rng);
    SUBCASE("ferromagnet") {
        auto gm = ising_model(g, 0.7, 0.0);
        double exact = exact_joint_product_tv(gm, 0, 1);
        ReconOptions opts;
        opts.jobs = 4;
        auto est = graph_reconstruction_bias(gm, 0, 1, 40000, 1234, opts);
        CHECK(std::abs(est.bias_mean - exact) < 4 * est.bias_stderr + 1e-9);
    }
    SUBCASE("glass") {
        auto gm = spin_glass_model(g, 0.2, rng);
        double exact = exact_joint_product_tv(gm, 0, 2);
        ReconOptions opts;
        opts.jobs = 4;
        auto est = graph_reconstruction_bias(gm, 0, 2, 40000, 4321, opts);
        CHECK(std::abs(est.bias_mean - exact) < 4 * est.bias_stderr + 1e-9);
    }
    SUBCASE("coloring") {
        auto gm = coloring_model(g, 3, 0.4);
        double exact = exact_joint_product_tv(gm, 0, 1);
        ReconOptions opts;
        opts.jobs = 4;
        auto est = graph_reconstruction_bias(gm, 0, 1, 40000, 777, opts);
        CHECK(std::abs(est.bias_mean - exact) < 4 * est.bias_stderr + 1e-9);
    }
}

TEST_CASE("bias estimates are bit-stable across job counts") {
    Rng rng = make_rng(58);
    auto g = sample_poisson_multigraph(9, 1.2, rng);
    auto gm = ising_model(g, 0.55, 0.0);
    ReconOptions serial, threaded;
    serial.jobs = 1;
    threaded.jobs = 8;
    auto a = graph_reconstruction_bias(gm, 0, 2, 500, 91, serial);
    auto b = graph_reconstruction_bias(gm, 0, 2, 500, 91, threaded);
    CHECK(a.bias_mean == b.bias_mean);
    CHECK(a.bias_stderr == b.bias_stderr);
    CHECK(a.trials == b.trials);
    CHECK(a.tree_like_fraction == b.tree_like_fraction);
}

TEST_CASE("ensemble estimates count aborted balls instead of weakening them") {
    auto em = ExperimentModel::coloring_poisson(3, 1.5, 0.4);
    ReconOptions opts;
    opts.max_ball_vertices = 0;  // every interior is too large
    CHECK_THROWS_AS(ensemble_reconstruction_bias(em, 12, 1, 16, 7, opts), std::runtime_error);

    ReconOptions open;
    open.jobs = 4;
    auto est = ensemble_reconstruction_bias(em, 12, 1, 200, 7, open);
    CHECK(est.trials + est.aborted + est.zero_mass_flags == 200);
    CHECK(est.tree_like_fraction >= 0.0);
    CHECK(est.tree_like_fraction <= 1.0);
    auto rerun = ensemble_reconstruction_bias(em, 12, 1, 200, 7, open);
    CHECK(est.bias_mean == rerun.bias_mean);
    CHECK(est.bias_stderr == rerun.bias_stderr);
}

TEST_CASE("input contract on the fixed-instance estimator") {
    auto gm = ising_model(triangle_with_tail(), 0.5, 0.0);
    CHECK_THROWS_AS(graph_reconstruction_bias(gm, 9, 1, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(graph_reconstruction_bias(gm, 0, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("threshold scan emits a graph row and a tree companion per cell") {
    ReconOptions opts;
    opts.jobs = 4;
    auto rows = ferro_threshold_scan(2, {0.3}, 8, {1, 2}, 16, 3, opts);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].ensemble == "regular");
    CHECK(rows[0].n == 8);
    CHECK(rows[0].t == 1);
    CHECK(rows[1].ensemble == "regular_tree");
    CHECK(rows[1].n == 0);
    CHECK(rows[1].tree_like_fraction == 1.0);
    CHECK(rows[2].t == 2);
    CHECK(rows[3].t == 2);
    for (const auto& r : rows) {
        CHECK(r.model == "ising");
        CHECK(r.k_or_gamma == 2.0);
        CHECK(r.theta_or_eps == 0.3);
        CHECK(r.seed == 3);
    }
    CHECK(ScanRow::csv_header() ==
          "model,ensemble,N,k_or_gamma,theta_or_eps,t,trials,bias_mean,bias_stderr,"
          "tree_like_fraction,seed");
}

TEST_CASE("magnetization proxy separates free spins from strong coupling") {
    auto free = magnetization_proxy(2, 0.0, 100, 10, 100, 21, 0.2, 4);
    CHECK(free.exceed_fraction == 0.0);
    CHECK(free.mean_abs_magnetization < 0.05);
    auto strong = magnetization_proxy(2, 0.9, 100, 10, 200, 22, 0.2, 4);
    CHECK(strong.exceed_fraction >= 0.9);
    CHECK(strong.mean_abs_magnetization > 0.5);
    CHECK(MagnetizationProxyRow::csv_header() ==
          "k,theta,N,runs,threshold,exceed_fraction,mean_abs_magnetization,split_disagreement,"
          "seed");
}

TEST_CASE("criticality flags compare 2 gamma theta^2 against 1") {
    GammaFlagRow sub;
    sub.gamma = 0.5;
    sub.two_gamma_theta_sq = 0.125;
    sub.supercritical = false;
    CHECK(sub.csv() == "0.5,0.125,0");
    CHECK(GammaFlagRow::csv_header() == "gamma,two_gamma_theta_sq,supercritical");
}

TEST_CASE("the glass scan stacks flags, overlap rows, and bias rows per density") {
    ReconOptions opts;
    opts.jobs = 4;
    opts.glauber_sweeps = 50;
    auto out = spin_glass_threshold_scan({0.4, 1.0}, 0.35, {8}, 16, 5, 1, opts);
    REQUIRE(out.flags.size() == 2);
    CHECK(out.flags[0].gamma == 0.4);
    CHECK(out.flags[0].two_gamma_theta_sq == doctest::Approx(2 * 0.4 * 0.09));
    CHECK(!out.flags[0].supercritical);
    CHECK(!out.flags[1].supercritical);
    REQUIRE(out.sphericity.size() == 4);  // 2 densities x 1 size x 2 states
    CHECK(out.sphericity[0].model == "spinglass");
    REQUIRE(out.recon.size() == 2);
    CHECK(out.recon[0].ensemble == "poisson");
    CHECK(out.recon[0].theta_or_eps == 0.35);
}
