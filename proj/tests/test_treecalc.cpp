#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "reconlab/ensembles.hpp"
#include "reconlab/exact.hpp"
#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"
#include "reconlab/stats.hpp"
#include "reconlab/treecalc.hpp"

using namespace reconlab;

TEST_CASE("broadcast sampling reproduces the exact tree Gibbs law") {
    auto t = regular_tree(2, 2);  // 10 nodes
    auto tm = ising_tree_model(0.6, 0.2);
    auto gm = as_graphical_model(t, tm);
    ExactSampler oracle(gm);
    auto root_ref = oracle.marginal(t.root);

    Rng rng = make_rng(140);
    const std::size_t draws = 100000;
    std::vector<double> root_plus(draws), pair_agree(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        auto x = broadcast_sample(t, tm, rng);
        root_plus[d] = x[t.root] == 0 ? 1.0 : 0.0;
        pair_agree[d] = x[1] == x[4] ? 1.0 : 0.0;  // a depth-1 node and its first child
    }
    MeanStderr mr = mean_stderr(root_plus);
    CHECK(std::abs(mr.mean - root_ref[0]) < 5 * mr.stderr_);
    auto pair_ref = exact_marginal(gm, {1, 4});
    MeanStderr mp = mean_stderr(pair_agree);
    CHECK(std::abs(mp.mean - (pair_ref[0 + 2 * 0] + pair_ref[1 + 2 * 1])) < 5 * mp.stderr_);
}

TEST_CASE("upward pass equals enumerated conditionals on random trees") {
    Rng rng = make_rng(555);
    int done = 0;
    while (done < 20) {
        auto t = sample_galton_watson_tree(0.8, 3, rng);
        if (t.size() > 12) continue;
        auto leaves = nodes_at_depth(t, 3);
        TreeModel tm;
        switch (done % 3) {
            case 0: tm = ising_tree_model(0.55, 0.1); break;
            case 1: tm = spin_glass_tree_model(0.2); break;
            default: tm = coloring_tree_model(3, 0.3); break;
        }
        if (done % 3 == 1) {
            // glass trees need per-edge coin flips on the parent edges
            for (auto& nd : t.nodes) nd.weight_id = static_cast<std::uint32_t>(uniform_below(rng, 2));
            t.nodes[t.root].weight_id = 0;
        }
        auto gm = as_graphical_model(t, tm);
        BoundaryEvidence ev;
        std::vector<std::pair<std::uint32_t, std::uint8_t>> frozen;
        for (auto leaf : leaves) {
            auto s = static_cast<std::uint8_t>(uniform_below(rng, tm.alphabet_size));
            ev.observe(leaf, s);
            frozen.emplace_back(leaf, s);
        }
        auto dp = upward_root_posterior(t, tm, ev);
        auto ref = exact_conditional_root(gm, t.root, frozen);
        REQUIRE(dp.size() == ref.size());
        for (std::size_t s = 0; s < dp.size(); ++s)
            REQUIRE(dp[s] == doctest::Approx(ref[s]).scale(1).epsilon(1e-10));
        ++done;
    }
}

TEST_CASE("field evidence on a single child tilts the root by theta * h0") {
    Tree t;
    t.nodes.resize(2);
    t.nodes[0] = {-1, 0, 0};
    t.nodes[1] = {0, 1, 0};
    const double theta = 0.45, h0 = 0.3;
    auto tm = ising_tree_model(theta, 0.0);
    BoundaryEvidence ev;
    ev.field(1, h0);
    auto post = upward_root_posterior(t, tm, ev);
    CHECK(post[0] == doctest::Approx((1 + theta * h0) / 2).epsilon(1e-13));
    CHECK(post[1] == doctest::Approx((1 - theta * h0) / 2).epsilon(1e-13));
}

TEST_CASE("impossible evidence throws") {
    Tree t;
    t.nodes.resize(3);
    t.nodes[0] = {-1, 0, 0};
    t.nodes[1] = {0, 1, 0};
    t.nodes[2] = {0, 1, 0};
    auto tm = coloring_tree_model(2, 0.0);
    BoundaryEvidence ev;
    ev.observe(1, 0);
    ev.observe(2, 1);  // root would have to differ from both colors
    CHECK_THROWS_AS(upward_root_posterior(t, tm, ev), std::runtime_error);
}

TEST_CASE("magnetization step: odd map with slope k*theta into [-1,1]") {
    IsingTreeParams p(3, 0.6, 0.0);
    CHECK(ising_f_step(0.0, p) == 0.0);
    for (double h : {0.1, 0.5, 0.9, 1.0}) {
        double fp = ising_f_step(h, p);
        CHECK(fp == doctest::Approx(-ising_f_step(-h, p)).epsilon(1e-13));
        CHECK(fp <= 1.0);
        CHECK(fp >= -1.0);
    }
    const double delta = 1e-7;
    double slope = (ising_f_step(delta, p) - ising_f_step(-delta, p)) / (2 * delta);
    CHECK(slope == doctest::Approx(3 * 0.6).epsilon(1e-6));
    // with a field the map is no longer odd and f(0) > 0
    IsingTreeParams biased(3, 0.6, 0.2);
    CHECK(ising_f_step(0.0, biased) > 0.0);
}

TEST_CASE("fixed point matches the closed form at k = 2") {
    // h = 2 theta h / (1 + theta^2 h^2) has top root sqrt(2 theta - 1) / theta
    for (double theta : {0.55, 0.7, 0.8, 0.9}) {
        IsingTreeParams p(2, theta, 0.0);
        double h = ising_fixed_point(p);
        CHECK(h == doctest::Approx(std::sqrt(2 * theta - 1) / theta).epsilon(1e-10));
    }
    // subcritical: unique fixed point 0
    IsingTreeParams sub(2, 0.4, 0.0);
    CHECK(ising_fixed_point(sub) == doctest::Approx(0.0).scale(1).epsilon(1e-9));
    // at criticality the iteration decays polynomially and gives up
    IsingTreeParams crit(2, 0.5, 0.0);
    CHECK_THROWS_AS(ising_fixed_point(crit, 1e-12, 10000), FixedPointError);
}

TEST_CASE("edge correlation endpoints") {
    CHECK(ising_edge_correlation(0.6, 0.0) == doctest::Approx(0.6));
    CHECK(ising_edge_correlation(0.6, 1.0) == doctest::Approx(1.0));
    CHECK(ising_edge_correlation(0.0, 0.5) == doctest::Approx(0.25 / 1.0));
}

TEST_CASE("free energy is exactly log 2 at the trivial point") {
    for (double theta : {0.1, 0.5, 0.85}) {
        for (std::uint32_t k : {2u, 3u}) {
            CHECK(ising_free_energy(theta, 0.0, 0.0, k) == std::log(2.0));
        }
    }
    // supercritical point beats the trivial value
    double h = ising_fixed_point(IsingTreeParams(2, 0.8, 0.0));
    CHECK(ising_free_energy(0.8, 0.0, h, 2) > std::log(2.0));
}

TEST_CASE("all-plus root bias: hand values and agreement with the upward pass") {
    CHECK(ising_root_bias_plus(0.5, 2, 1) == doctest::Approx(27.0 / 28.0).epsilon(1e-13));
    CHECK(ising_root_bias_plus(0.5, 2, 2) == doctest::Approx(0.92702702702702705).epsilon(1e-12));

    for (std::uint32_t t_depth : {1u, 2u, 3u}) {
        const double theta = 0.65;
        auto tree = regular_tree(2, t_depth);
        auto tm = ising_tree_model(theta, 0.0);
        BoundaryEvidence ev;
        for (auto leaf : nodes_at_depth(tree, t_depth)) ev.observe(leaf, 0);
        auto post = upward_root_posterior(tree, tm, ev);
        CHECK(post[0] == doctest::Approx(ising_root_bias_plus(theta, 2, t_depth)).epsilon(1e-12));
    }
}

TEST_CASE("tree reconstruction bias matches the enumerated expectation") {
    const double theta = 0.6;
    const std::uint32_t t_depth = 2;
    auto tree = regular_tree(2, t_depth);
    auto gm = as_graphical_model(tree, ising_tree_model(theta, 0.0));
    double exact = exact_joint_product_tv(gm, tree.root, t_depth);
    auto est = tree_reconstruction_bias(TreeEnsemble::regular(2), TreeModelSpec::ising(theta),
                                        t_depth, 20000, 97, 4);
    REQUIRE(est.trials == 20000);
    CHECK(std::abs(est.mean - exact) < 4 * est.stderr_);
}

TEST_CASE("tree reconstruction bias is bit-stable across job counts") {
    auto spec = TreeModelSpec::coloring(3, 0.2);
    auto a = tree_reconstruction_bias(TreeEnsemble::galton_watson(0.9), spec, 2, 500, 11, 1);
    auto b = tree_reconstruction_bias(TreeEnsemble::galton_watson(0.9), spec, 2, 500, 11, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.trials == b.trials);
}

TEST_CASE("tree bias laws agree between the glass and the ferromagnet") {
    // on trees the random edge signs can be gauged away, so the bias statistic
    // has the same law at eps and theta = 1 - 2*eps
    const double eps = 0.15;
    auto glass = tree_reconstruction_bias(TreeEnsemble::regular(2), TreeModelSpec::spin_glass(eps),
                                          2, 20000, 5, 4);
    auto ferro = tree_reconstruction_bias(TreeEnsemble::regular(2),
                                          TreeModelSpec::ising(1 - 2 * eps), 2, 20000, 6, 4);
    double sigma = std::hypot(glass.stderr_, ferro.stderr_);
    CHECK(std::abs(glass.mean - ferro.mean) < 4 * sigma);
}

TEST_CASE("scan rows serialize with a pinned header") {
    CHECK(TreeScanRow::csv_header() ==
          "ensemble,k_or_gamma,theta,lambda,t,trials,bias_mean,bias_stderr,seed");
    TreeScanRow row;
    row.ensemble = "regular";
    row.k_or_gamma = 2;
    row.theta = 0.5;
    row.lambda = 0;
    row.t = 3;
    row.trials = 100;
    row.bias_mean = 0.25;
    row.bias_stderr = 0.03125;
    row.seed = 42;
    CHECK(row.csv() == "regular,2,0.5,0,3,100,0.25,0.03125,42");
}
