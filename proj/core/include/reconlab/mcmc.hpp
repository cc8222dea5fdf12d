#pragma once

#include <cstdint>
#include <vector>

#include "reconlab/exact.hpp"
#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"

namespace reconlab {

/// One Markov chain: configuration, sweep counter, private generator, and a
/// count of updates rejected because the conditional had no mass (possible
/// only with hard constraints).
struct ChainState {
    Configuration config;
    std::uint64_t sweep_count = 0;
    Rng rng;
    std::uint64_t zero_mass_rejections = 0;

    ChainState(Configuration c, std::uint64_t seed)
        : config(std::move(c)), rng(make_rng(seed)) {}
};

/** Exact single-site conditional P(X_i = . | rest):
 *  proportional to bias(x) * prod over incident edges psi(x, x_j), self-loops
 *  contributing psi(x, x). May be identically zero under hard constraints. */
std::vector<double> conditional_site_weights(const GraphicalModel& gm,
                                             const std::vector<std::vector<Incidence>>& adj,
                                             const Configuration& x, std::uint32_t i);

/** Heat-bath move: resample X_i from its exact conditional, leaving all other
 *  coordinates unchanged. If the conditional has zero total mass the state is
 *  left unchanged and the rejection counter is bumped. */
void heat_bath_update(const GraphicalModel& gm, const std::vector<std::vector<Incidence>>& adj,
                      ChainState& state, std::uint32_t i);

/// Convenience overload that rebuilds the adjacency (fine for single calls;
/// sweeps should reuse one adjacency).
void heat_bath_update(const GraphicalModel& gm, ChainState& state, std::uint32_t i);

/** Uniform random configuration; for models with hard constraints
 *  (some zero table entry) falls back to a greedy proper assignment in random
 *  vertex order, retrying up to `retries` times. Throws std::runtime_error if
 *  no valid start is found. */
Configuration initial_configuration(const GraphicalModel& gm, Rng& rng, std::uint32_t retries = 100);

/** sweeps * N heat-bath updates: each sweep visits every vertex once in a
 *  fresh uniform random order. Starts from `init` when given, otherwise from
 *  initial_configuration. Returns the final configuration; deterministic
 *  given the seed. The rejection count is reported through `rejections` when
 *  non-null. */
Configuration glauber_run(const GraphicalModel& gm, std::uint64_t sweeps, std::uint64_t seed,
                          const Configuration* init = nullptr,
                          std::uint64_t* rejections = nullptr);

/** n_replicas approximately independent samples: one independent chain per
 *  replica with seed seed_for(seed, replica), each burned in for burn_in
 *  sweeps. spacing is accepted for interface stability but unused (chains are
 *  independent, not thinned). */
std::vector<Configuration> sample_replicas(const GraphicalModel& gm, std::uint32_t n_replicas,
                                           std::uint64_t burn_in, std::uint64_t spacing,
                                           std::uint64_t seed);

/** Transition matrix of one deterministic sweep (site order 0..N-1) over the
 *  full state space, for stationarity checks on tiny instances: row s is the
 *  distribution after sweeping a chain started in state s. State indices use
 *  vertex 0 as the fastest-varying digit, like ExactSampler. */
std::vector<std::vector<double>> sweep_transition_matrix(const GraphicalModel& gm,
                                                         std::uint64_t budget = 1u << 14);

}  // namespace reconlab
