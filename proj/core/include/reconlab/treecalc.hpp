#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "reconlab/exact.hpp"
#include "reconlab/graph.hpp"
#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"
#include "reconlab/stats.hpp"

namespace reconlab {

/** Model attached to a tree: tables indexed by the nodes' parent-edge weight
 *  ids, optional vertex bias, alphabet. The same conventions as
 *  GraphicalModel, minus the graph. */
struct TreeModel {
    std::vector<WeightTable> tables;
    std::vector<double> vertex_bias;  // empty = all ones
    std::uint32_t alphabet_size = 2;

    double bias(std::uint32_t state) const {
        return vertex_bias.empty() ? 1.0 : vertex_bias[state];
    }
};

TreeModel ising_tree_model(double theta, double lambda);
TreeModel coloring_tree_model(std::uint32_t q, double eps);
/// Two tables (coupling and its flip); tree nodes select per-edge tables
/// through their weight ids.
TreeModel spin_glass_tree_model(double eps);

/// The GraphicalModel induced on tree_to_multigraph(t), for oracle cross-checks.
GraphicalModel as_graphical_model(const Tree& t, const TreeModel& tm);

/** Exact sample of the tree Gibbs measure: an upward pass computes each
 *  subtree's no-evidence message, the root is drawn from its marginal, and
 *  children are drawn conditional on their parent
 *  (P(x_c | x_p) proportional to psi(x_p, x_c) * message_c(x_c)). For
 *  bias-free row-balanced tables this reduces to the classic top-down
 *  broadcast with the kernel rows psi(x_p, .)/rowsum; the upward pass keeps it
 *  exact for biased models too. */
Configuration broadcast_sample(const Tree& t, const TreeModel& tm, Rng& rng);

/** Evidence attached to leaves: either an observed state, or (binary
 *  alphabets only) an iid field that weighs the leaf by (1+h0)/2 for state 0
 *  and (1-h0)/2 for state 1. An evidence factor replaces the leaf's vertex
 *  bias; interior nodes keep theirs. */
struct BoundaryEvidence {
    struct Item {
        bool is_field = false;
        std::uint8_t state = 0;  // observed state when !is_field
        double h0 = 0.0;         // field parameter in [-1, 1] when is_field
    };
    std::map<std::uint32_t, Item> items;

    void observe(std::uint32_t node, std::uint8_t state) { items[node] = {false, state, 0.0}; }
    void field(std::uint32_t node, double h0) { items[node] = {true, 0, h0}; }
};

/** Exact root posterior P(X_root | evidence) by leaf-to-root message passing
 *  with per-node normalization. Every referenced node must be a leaf. Throws
 *  std::runtime_error on zero-probability evidence. */
Distribution upward_root_posterior(const Tree& t, const TreeModel& tm,
                                   const BoundaryEvidence& evidence);

struct TreeEnsemble {
    enum class Kind { regular, galton_watson };
    Kind kind = Kind::regular;
    std::uint32_t k = 2;   // regular: root degree k+1, internal branching k
    double gamma = 1.0;    // galton_watson: offspring mean 2*gamma

    static TreeEnsemble regular(std::uint32_t k) { return {Kind::regular, k, 0.0}; }
    static TreeEnsemble galton_watson(double gamma) { return {Kind::galton_watson, 0, gamma}; }
};

/// Model family for tree experiments; spin-glass trees redraw fair-coin edge
/// tables every trial.
struct TreeModelSpec {
    enum class Kind { ising, spin_glass, coloring };
    Kind kind = Kind::ising;
    double theta = 0.5;
    double lambda = 0.0;
    double eps = 0.0;
    std::uint32_t q = 3;

    static TreeModelSpec ising(double theta, double lambda = 0.0) {
        TreeModelSpec s;
        s.kind = Kind::ising;
        s.theta = theta;
        s.lambda = lambda;
        return s;
    }
    static TreeModelSpec spin_glass(double eps) {
        TreeModelSpec s;
        s.kind = Kind::spin_glass;
        s.eps = eps;
        return s;
    }
    static TreeModelSpec coloring(std::uint32_t q, double eps) {
        TreeModelSpec s;
        s.kind = Kind::coloring;
        s.q = q;
        s.eps = eps;
        return s;
    }
};

struct BiasEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t trials = 0;
};

/** Monte Carlo tree-reconstruction bias: per trial, sample a depth-t tree
 *  from the ensemble, broadcast a configuration, freeze the depth-t nodes as
 *  observed evidence and record TV(root posterior, no-evidence root
 *  marginal). Trees with an empty depth-t generation contribute 0. Trials are
 *  distributed over `jobs` workers with per-trial derived seeds and reduced
 *  pairwise, so the estimate is bit-stable for any job count. */
BiasEstimate tree_reconstruction_bias(const TreeEnsemble& ensemble, const TreeModelSpec& spec,
                                      std::uint32_t t, std::uint64_t trials, std::uint64_t seed,
                                      unsigned jobs = 1);

// --- scalar recursion suite (binary interaction theta = 1 - 2*eps) ----------

struct IsingTreeParams {
    std::uint32_t k = 2;   // branching
    double theta = 0.5;    // in [0, 1)
    double lambda = 0.0;   // external field in [0, 1]

    IsingTreeParams(std::uint32_t k_, double theta_, double lambda_);
};

/// One step of the magnetization recursion
/// f(h) = [(1+l)(1+th)^k - (1-l)(1-th)^k] / [(1+l)(1+th)^k + (1-l)(1-th)^k];
/// maps [-1,1] into [-1,1], odd in h at lambda = 0.
double ising_f_step(double h, const IsingTreeParams& params);

struct FixedPointError : std::runtime_error {
    double last_iterate;
    FixedPointError(const std::string& msg, double last)
        : std::runtime_error(msg), last_iterate(last) {}
};

/** Top fixed point of f: iterate from h = 1 (monotone decreasing) until
 *  |h_{n+1} - h_n| <= tol. Throws FixedPointError carrying the last iterate
 *  if max_iter steps do not converge. */
double ising_fixed_point(const IsingTreeParams& params, double tol = 1e-12,
                         std::uint64_t max_iter = 1u << 22);

/// Edge correlation e(theta, h) = (theta + h^2) / (1 + theta h^2).
double ising_edge_correlation(double theta, double h);

/// Free energy density
/// phi = -(k+1)/2 log(1+theta h^2) + log[(1+l)(1+th)^{k+1} + (1-l)(1-th)^{k+1}];
/// phi(theta, 0, 0) evaluates to log 2 exactly.
double ising_free_energy(double theta, double lambda, double h, std::uint32_t k);

/** Probability that the root is + given all-plus depth-t evidence on the tree
 *  with root degree k+1 and branching k:
 *  (1/2) * (1 + g(f^{(t-1)}(1))) where g is f with k replaced by k+1. */
double ising_root_bias_plus(double theta, std::uint32_t k, std::uint32_t t);

/// CSV row for tree-scan experiments
/// (`ensemble,k_or_gamma,theta,lambda,t,trials,bias_mean,bias_stderr,seed`).
struct TreeScanRow {
    std::string ensemble;
    double k_or_gamma = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
    std::uint32_t t = 0;
    std::uint64_t trials = 0;
    double bias_mean = 0.0;
    double bias_stderr = 0.0;
    std::uint64_t seed = 0;

    static std::string csv_header();
    std::string csv() const;
};

}  // namespace reconlab
