#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reconlab/experiment.hpp"
#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"

namespace reconlab {

/** Empirical joint type of a replica pair: nu(x,y) = fraction of vertices i
 *  with x1_i = x and x2_i = y. Entries are nonnegative and sum to 1; when the
 *  type comes from configurations of length n, every n*nu(x,y) is integral. */
struct ReplicaType {
    std::uint32_t q = 0;
    std::uint32_t n = 0;     // 0 for abstract grid points not tied to configurations
    std::vector<double> nu;  // row-major q*q

    double at(std::uint32_t x, std::uint32_t y) const { return nu[x * q + y]; }
    double& at(std::uint32_t x, std::uint32_t y) { return nu[x * q + y]; }
    double row_sum(std::uint32_t x) const;
    double col_sum(std::uint32_t y) const;
};

/// Throws std::invalid_argument on shape or simplex violations.
void validate(const ReplicaType& t);

/// The centered reference point: every cell 1/q^2.
ReplicaType uniform_type(std::uint32_t q);

ReplicaType two_replica_type(const Configuration& x1, const Configuration& x2, std::uint32_t q);

/** q12 = n^-1 sum_i s(x1_i) s(x2_i) with spins s(0) = +1, s(1) = -1.
 *  Binary alphabet only. */
double overlap(const Configuration& x1, const Configuration& x2);

/** Q(xi) = (1/n) sum_i (1[x1_i=xi] - 1/q)(1[x2_i=xi] - 1/q). In terms of the
 *  centered type D = nu - 1/q^2 this is
 *      D(xi,xi) - (1/q) sum_x [D(xi,x) + D(x,xi)],
 *  i.e. both the row and the column through xi are centered; on the binary
 *  alphabet Q(+) = Q(-) = q12/4 identically. */
double q_statistic(const ReplicaType& t, std::uint32_t xi);

struct SphericityRow {
    std::string model;
    std::uint32_t n = 0;
    double param1 = 0;  // k or gamma
    double param2 = 0;  // theta or eps
    std::uint32_t xi = 0;
    double eq2_mean = 0;
    double eq2_stderr = 0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    static std::string csv_header();  // model,N,param1,param2,xi,EQ2_mean,EQ2_stderr,trials,seed
    std::string csv() const;
};

struct SphericityOptions {
    std::uint64_t burn_in = 1000;               // sweeps per chain when sampling by MCMC
    std::uint64_t enumeration_budget = 1 << 16; // exact replica pairs when q^n fits
    std::uint32_t jobs = 1;
    /// When set, receives both replicas of every trial in deterministic
    /// (n, trial, replica) order.
    std::vector<Configuration>* dump = nullptr;
};

/** E[Q(xi)^2] per (n, xi): each trial draws a fresh graph + weights from the
 *  ensemble and a pair of independent replicas on that same instance (exact
 *  inverse-CDF sampling when the state space fits the budget, otherwise two
 *  independent burned-in heat-bath chains). */
std::vector<SphericityRow> sphericity_estimate(const ExperimentModel& em,
                                               const std::vector<std::uint32_t>& n_grid,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const SphericityOptions& opts = {});

/// F(nu) = 2 sum_x (sum_y nu(x,y))^2. Always >= 2/q (Cauchy-Schwarz), with
/// equality exactly when all row sums are 1/q.
double coloring_F(const ReplicaType& t);

/** phi(nu) = -sum nu log nu + gamma_bar * log(1 - eb*F(nu) + eb^2*sum nu^2)
 *  with eb = 1 - eps and 0 log 0 = 0: the exponential growth rate governing
 *  the pair-type partition function on sparse random instances.
 *  phi(uniform_type) = 2 log q + 2 gamma_bar log(1 - eb/q) exactly.
 *  Throws std::domain_error when the log argument is <= 0. */
double coloring_phi(const ReplicaType& t, double gamma_bar, double eps);

struct PhiGapResult {
    std::uint32_t q = 0;
    double gamma_bar = 0;
    double eps = 0;
    double delta = 0;
    double delta_prime = 0;
    /// inf over the scanned set of phi(uniform) - phi(nu); +infinity when the
    /// set is empty at this resolution.
    double gap = 0;
    ReplicaType argmin;       // the scanned type attaining the infimum
    std::uint64_t scanned = 0;  // types that satisfied the set conditions

    static std::string csv_header();  // q,gamma,eps,delta,deltap,gap,argmin_nu
    std::string csv() const;          // argmin cells flattened row-major, '|'-separated
};

/** Grid audit of the second-moment gap hypothesis: scans the row-balanced
 *  slice (every row sums to exactly 1/q, so F(nu) = 2/q throughout) at
 *  lattice step 1/resolution per cell, keeps types with
 *      sup_xy |nu(x,y) - 1/q^2| > delta   and   F(nu) <= 2/q + delta_prime,
 *  and returns the infimum of phi(uniform) - phi(nu) over that set. A
 *  positive gap means the uniform type is the strict rate maximizer on the
 *  slice at this resolution (a numeric audit, not a proof).
 *  Requires resolution divisible by q so the slice meets the lattice, and
 *  gamma_bar < (q-1)*log(q-1), the density range the hypothesis concerns. */
PhiGapResult phi_gap_scan(std::uint32_t q, double gamma_bar, double eps, double delta,
                          double delta_prime, std::uint32_t resolution = 60,
                          std::uint32_t jobs = 1);

}  // namespace reconlab
