#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reconlab/exact.hpp"
#include "reconlab/experiment.hpp"
#include "reconlab/model.hpp"
#include "reconlab/replica.hpp"

namespace reconlab {

/** Monte Carlo estimate of the root-vs-boundary total variation statistic:
 *  E over sampled configurations of TV(P(X_r | X on the boundary shell),
 *  P(X_r)). Trials whose ball was too large to enumerate are skipped and
 *  counted in `aborted`; trials whose boundary values carried zero
 *  conditional mass are skipped and counted in `zero_mass_flags`; neither
 *  kind enters the mean. */
struct ReconEstimate {
    std::uint32_t t = 0;
    double bias_mean = 0.0;
    double bias_stderr = 0.0;
    std::uint64_t trials = 0;            // completed trials entering the mean
    double tree_like_fraction = 0.0;     // completed trials whose ball passed the tree check
    std::uint64_t aborted = 0;
    std::uint64_t zero_mass_flags = 0;
};

struct ReconOptions {
    /// Exact full-instance sampling (and exact root marginals) when
    /// alphabet^N fits; otherwise per-trial heat-bath chains.
    std::uint64_t sampler_budget = 1u << 20;
    /// Cap for the ball-interior enumeration behind the conditional root law.
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    /// Per-trial graphs whose ball interior exceeds this many vertices abort
    /// the trial (counted, not estimated).
    std::uint32_t max_ball_vertices = 25;
    std::uint64_t glauber_sweeps = 1000;   // per-trial sweeps when sampling by MCMC
    std::uint64_t marginal_sweeps = 20000; // auxiliary run when the root marginal is estimated
    std::uint32_t jobs = 1;
};

/** True when a trivial vertex bias plus constant-diagonal/constant-off-diagonal
 *  tables make the Gibbs measure invariant under every global state relabeling,
 *  which forces every one-vertex marginal to be exactly uniform. */
bool state_symmetric_marginals(const GraphicalModel& gm);

/** Reconstruction bias of root r at radius t on a fixed instance. Per trial:
 *  sample X from the model (exact inverse-CDF when the state space fits the
 *  sampler budget, else a fresh burned-in heat-bath chain), freeze X on the
 *  distance-t shell, enumerate the conditional root law inside the ball, and
 *  take total variation against the unconditional root marginal. The
 *  unconditional marginal is analytic (uniform) under state symmetry, exact
 *  when enumerable, otherwise estimated from an auxiliary run whose
 *  worst-case error is added to the reported stderr. */
ReconEstimate graph_reconstruction_bias(const GraphicalModel& gm, std::uint32_t r, std::uint32_t t,
                                        std::uint64_t trials, std::uint64_t seed,
                                        const ReconOptions& opts = {});

/** Same statistic averaged over the ensemble: every trial draws a fresh
 *  instance on n vertices, roots it at vertex 0, and contributes one sample.
 *  tree_like_fraction records how often the ball was a tree. */
ReconEstimate ensemble_reconstruction_bias(const ExperimentModel& em, std::uint32_t n,
                                           std::uint32_t t, std::uint64_t trials,
                                           std::uint64_t seed, const ReconOptions& opts = {});

struct ScanRow {
    std::string model;
    std::string ensemble;
    std::uint32_t n = 0;  // 0 for companion tree rows (no finite instance)
    double k_or_gamma = 0.0;
    double theta_or_eps = 0.0;
    std::uint32_t t = 0;
    std::uint64_t trials = 0;
    double bias_mean = 0.0;
    double bias_stderr = 0.0;
    double tree_like_fraction = 0.0;
    std::uint64_t seed = 0;

    // model,ensemble,N,k_or_gamma,theta_or_eps,t,trials,bias_mean,bias_stderr,tree_like_fraction,seed
    static std::string csv_header();
    std::string csv() const;
};

/** Ferromagnet threshold scan on (k+1)-regular instances: for every (theta, t)
 *  cell one graph-side row (ensemble "regular") and one companion tree row
 *  (ensemble "regular_tree", n = 0, tree_like_fraction = 1) estimated on the
 *  matching branching-k tree ensemble, so decay vs persistence can be read
 *  side by side. */
std::vector<ScanRow> ferro_threshold_scan(std::uint32_t k, const std::vector<double>& theta_grid,
                                          std::uint32_t n, const std::vector<std::uint32_t>& t_grid,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ReconOptions& opts = {});

/** One extended heat-bath run per trial on a fresh (k+1)-regular ferromagnet;
 *  the run is split into halves and the magnetization (n_plus - n_minus)/n is
 *  time-averaged over each half. |second half| is the reported statistic;
 *  |first half| vs |second half| disagreement is the split-run mixing
 *  diagnostic (absolute values, since the field-free model is flip
 *  symmetric). The exceedance threshold is a numeric convention chosen from
 *  pilot runs, echoed in the output. */
struct MagnetizationProxyRow {
    std::uint32_t k = 0;
    double theta = 0.0;
    std::uint32_t n = 0;
    std::uint64_t runs = 0;
    double threshold = 0.0;
    double exceed_fraction = 0.0;     // fraction of runs with |mag| > threshold
    double mean_abs_magnetization = 0.0;
    double split_disagreement = 0.0;  // mean | |first half| - |second half| |
    std::uint64_t seed = 0;

    static std::string csv_header();
    std::string csv() const;
};

MagnetizationProxyRow magnetization_proxy(std::uint32_t k, double theta, std::uint32_t n,
                                          std::uint64_t runs, std::uint64_t sweeps_per_half,
                                          std::uint64_t seed, double threshold = 0.2,
                                          std::uint32_t jobs = 1);

/// Criticality flag for one edge density: 2*gamma*(1-2*eps)^2 vs 1.
struct GammaFlagRow {
    double gamma = 0.0;
    double two_gamma_theta_sq = 0.0;
    bool supercritical = false;

    static std::string csv_header();  // gamma,two_gamma_theta_sq,supercritical
    std::string csv() const;
};

/** Spin-glass threshold scan: per gamma, a criticality flag, overlap
 *  second-moment rows E[Q(xi)^2] along n_grid, and reconstruction-bias rows
 *  at radius t along n_grid. */
struct SpinGlassScanResult {
    std::vector<GammaFlagRow> flags;
    std::vector<SphericityRow> sphericity;
    std::vector<ScanRow> recon;
};

SpinGlassScanResult spin_glass_threshold_scan(const std::vector<double>& gamma_grid, double eps,
                                              const std::vector<std::uint32_t>& n_grid,
                                              std::uint64_t trials, std::uint64_t seed,
                                              std::uint32_t t = 2, const ReconOptions& opts = {});

}  // namespace reconlab
