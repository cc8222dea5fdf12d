#include "reconlab/mcmc.hpp"

#include <algorithm>
#include <stdexcept>

namespace reconlab {

std::vector<double> conditional_site_weights(const GraphicalModel& gm,
                                             const std::vector<std::vector<Incidence>>& adj,
                                             const Configuration& x, std::uint32_t i) {
    const std::uint32_t q = gm.alphabet_size;
    std::vector<double> w(q);
    for (std::uint32_t s = 0; s < q; ++s) w[s] = gm.bias(s);
    for (const auto& inc : adj[i]) {
        const WeightTable& psi = gm.tables[gm.graph.edges[inc.edge_id].weight_id];
        if (inc.other == i) {
            for (std::uint32_t s = 0; s < q; ++s) w[s] *= psi.at(s, s);
        } else {
            for (std::uint32_t s = 0; s < q; ++s) w[s] *= psi.at(s, x[inc.other]);
        }
    }
    return w;
}

void heat_bath_update(const GraphicalModel& gm, const std::vector<std::vector<Incidence>>& adj,
                      ChainState& state, std::uint32_t i) {
    if (i >= gm.graph.n) throw std::invalid_argument("heat_bath_update: vertex out of range");
    std::vector<double> w = conditional_site_weights(gm, adj, state.config, i);
    double total = 0.0;
    for (double v : w) total += v;
    if (total <= 0.0) {
        ++state.zero_mass_rejections;  // hard constraints left no valid value
        return;
    }
    double u = uniform_real(state.rng) * total;
    double cum = 0.0;
    for (std::uint32_t s = 0; s < gm.alphabet_size; ++s) {
        cum += w[s];
        if (u < cum) {
            state.config[i] = static_cast<std::uint8_t>(s);
            return;
        }
    }
    state.config[i] = static_cast<std::uint8_t>(gm.alphabet_size - 1);
}

void heat_bath_update(const GraphicalModel& gm, ChainState& state, std::uint32_t i) {
    auto adj = adjacency(gm.graph);
    heat_bath_update(gm, adj, state, i);
}

namespace {

bool has_hard_constraint(const GraphicalModel& gm) {
    for (const auto& tab : gm.tables) {
        for (double v : tab.entries) {
            if (v == 0.0) return true;
        }
    }
    return false;
}

}  // namespace

Configuration initial_configuration(const GraphicalModel& gm, Rng& rng, std::uint32_t retries) {
    const std::uint32_t n = gm.graph.n;
    const std::uint32_t q = gm.alphabet_size;
    if (!has_hard_constraint(gm)) {
        Configuration x(n);
        for (auto& v : x) v = static_cast<std::uint8_t>(uniform_below(rng, q));
        return x;
    }
    // greedy assignment in random order: pick uniformly among values that keep
    // every already-assigned incident factor positive
    auto adj = adjacency(gm.graph);
    for (std::uint32_t attempt = 0; attempt < retries; ++attempt) {
        std::vector<std::uint32_t> order(n);
        for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
        for (std::uint32_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[uniform_below(rng, i)]);

        Configuration x(n, 0);
        std::vector<char> assigned(n, 0);
        bool ok = true;
        for (std::uint32_t idx = 0; ok && idx < n; ++idx) {
            std::uint32_t i = order[idx];
            std::vector<std::uint8_t> options;
            for (std::uint32_t s = 0; s < q; ++s) {
                if (gm.bias(s) <= 0) continue;
                bool valid = true;
                for (const auto& inc : adj[i]) {
                    const WeightTable& psi = gm.tables[gm.graph.edges[inc.edge_id].weight_id];
                    std::uint32_t other_state =
                        inc.other == i ? s : (assigned[inc.other] ? x[inc.other] : q);
                    if (other_state == q) continue;  // neighbor not assigned yet
                    if (psi.at(s, other_state) == 0.0) {
                        valid = false;
                        break;
                    }
                }
                if (valid) options.push_back(static_cast<std::uint8_t>(s));
            }
            if (options.empty()) {
                ok = false;
            } else {
                x[i] = options[uniform_below(rng, options.size())];
                assigned[i] = 1;
            }
        }
        if (ok) return x;
    }
    throw std::runtime_error("initial_configuration: no valid start found within retry budget");
}

Configuration glauber_run(const GraphicalModel& gm, std::uint64_t sweeps, std::uint64_t seed,
                          const Configuration* init, std::uint64_t* rejections) {
    const std::uint32_t n = gm.graph.n;
    auto adj = adjacency(gm.graph);
    ChainState state(Configuration{}, seed);
    if (init != nullptr) {
        if (init->size() != n) throw std::invalid_argument("glauber_run: init length mismatch");
        state.config = *init;
    } else {
        state.config = initial_configuration(gm, state.rng);
    }
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::uint32_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[uniform_below(state.rng, i)]);
        for (std::uint32_t i = 0; i < n; ++i) heat_bath_update(gm, adj, state, order[i]);
        ++state.sweep_count;
    }
    if (rejections != nullptr) *rejections = state.zero_mass_rejections;
    return state.config;
}

std::vector<Configuration> sample_replicas(const GraphicalModel& gm, std::uint32_t n_replicas,
                                           std::uint64_t burn_in, std::uint64_t spacing,
                                           std::uint64_t seed) {
    if (n_replicas < 1) throw std::invalid_argument("sample_replicas: n_replicas must be >= 1");
    (void)spacing;  // independent chains need no thinning
    std::vector<Configuration> out;
    out.reserve(n_replicas);
    for (std::uint32_t r = 0; r < n_replicas; ++r) {
        out.push_back(glauber_run(gm, burn_in, seed_for(seed, r)));
    }
    return out;
}

std::vector<std::vector<double>> sweep_transition_matrix(const GraphicalModel& gm,
                                                         std::uint64_t budget) {
    const std::uint32_t n = gm.graph.n;
    const std::uint32_t q = gm.alphabet_size;
    std::uint64_t states = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        states *= q;
        if (states > budget) throw std::length_error("sweep_transition_matrix: budget exceeded");
    }
    auto adj = adjacency(gm.graph);

    std::vector<std::uint64_t> stride(n);
    stride[0] = 1;
    for (std::uint32_t i = 1; i < n; ++i) stride[i] = stride[i - 1] * q;

    std::vector<std::vector<double>> P(states, std::vector<double>(states, 0.0));
    for (std::uint64_t s = 0; s < states; ++s) P[s][s] = 1.0;

    // compose the per-site heat-bath kernels in scan order
    Configuration x(n);
    std::vector<std::vector<double>> next(states, std::vector<double>(states, 0.0));
    for (std::uint32_t site = 0; site < n; ++site) {
        for (auto& row : next) std::fill(row.begin(), row.end(), 0.0);
        for (std::uint64_t s = 0; s < states; ++s) {
            std::uint64_t rest = s;
            for (std::uint32_t i = 0; i < n; ++i) {
                x[i] = static_cast<std::uint8_t>(rest % q);
                rest /= q;
            }
            std::vector<double> w = conditional_site_weights(gm, adj, x, site);
            double total = 0.0;
            for (double v : w) total += v;
            std::uint64_t base = s - static_cast<std::uint64_t>(x[site]) * stride[site];
            for (std::uint64_t from = 0; from < states; ++from) {
                if (P[from][s] == 0.0) continue;
                if (total <= 0.0) {
                    next[from][s] += P[from][s];  // rejected move keeps the state
                } else {
                    for (std::uint32_t v = 0; v < q; ++v)
                        next[from][base + v * stride[site]] += P[from][s] * (w[v] / total);
                }
            }
        }
        std::swap(P, next);
    }
    return P;
}

}  // namespace reconlab
