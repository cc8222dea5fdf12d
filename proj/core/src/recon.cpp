#include "reconlab/recon.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

#include "reconlab/csv.hpp"
#include "reconlab/ensembles.hpp"
#include "reconlab/mcmc.hpp"
#include "reconlab/parallel.hpp"
#include "reconlab/stats.hpp"
#include "reconlab/treecalc.hpp"

namespace reconlab {

bool state_symmetric_marginals(const GraphicalModel& gm) {
    if (!gm.vertex_bias.empty()) {
        for (double b : gm.vertex_bias)
            if (b != gm.vertex_bias[0]) return false;
    }
    for (const auto& tab : gm.tables) {
        const double diag = tab.at(0, 0);
        const double off = tab.size > 1 ? tab.at(0, 1) : diag;
        for (std::uint32_t x = 0; x < tab.size; ++x)
            for (std::uint32_t y = 0; y < tab.size; ++y)
                if (tab.at(x, y) != (x == y ? diag : off)) return false;
    }
    return true;
}

namespace {

bool state_space_fits(std::uint32_t q, std::uint32_t n, std::uint64_t budget) {
    std::uint64_t total = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (total > budget / q) return false;
        total *= q;
    }
    return total <= budget;
}

/// Per-sweep magnetizations (n_plus - n_minus)/n of one heat-bath chain.
std::vector<double> magnetization_trace(const GraphicalModel& gm, std::uint64_t sweeps,
                                        std::uint64_t seed) {
    const std::uint32_t n = gm.graph.n;
    auto adj = adjacency(gm.graph);
    ChainState state(Configuration{}, seed);
    state.config = initial_configuration(gm, state.rng);
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> trace;
    trace.reserve(sweeps);
    for (std::uint64_t sweep = 0; sweep < sweeps; ++sweep) {
        for (std::uint32_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[uniform_below(state.rng, i)]);
        for (std::uint32_t i = 0; i < n; ++i) heat_bath_update(gm, adj, state, order[i]);
        std::int64_t spin_sum = 0;
        for (std::uint8_t v : state.config) spin_sum += v == 0 ? 1 : -1;
        trace.push_back(static_cast<double>(spin_sum) / n);
    }
    return trace;
}

struct RootPrior {
    Distribution p;
    double err = 0.0;  // worst-case TV error of the estimate (0 when exact)
};

/** Unconditional root marginal: analytic uniform under state symmetry, exact
 *  enumeration when the state space fits, otherwise the empirical marginal of
 *  an auxiliary chain with a conservative half-sum-of-stderr TV error. */
RootPrior root_prior(const GraphicalModel& gm, std::uint32_t r, const ReconOptions& opts,
                     std::uint64_t seed) {
    const std::uint32_t q = gm.alphabet_size;
    if (state_symmetric_marginals(gm)) return {uniform_distribution(q), 0.0};
    if (state_space_fits(q, gm.graph.n, opts.sampler_budget))
        return {exact_marginal(gm, {r}, opts.sampler_budget), 0.0};
    if (opts.marginal_sweeps < 2)
        throw std::invalid_argument("root_prior: marginal_sweeps too small to estimate");
    const std::uint32_t n = gm.graph.n;
    auto adj = adjacency(gm.graph);
    ChainState state(Configuration{}, seed);
    state.config = initial_configuration(gm, state.rng);
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    std::vector<std::uint64_t> counts(q, 0);
    for (std::uint64_t sweep = 0; sweep < opts.glauber_sweeps + opts.marginal_sweeps; ++sweep) {
        for (std::uint32_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[uniform_below(state.rng, i)]);
        for (std::uint32_t i = 0; i < n; ++i) heat_bath_update(gm, adj, state, order[i]);
        if (sweep >= opts.glauber_sweeps) ++counts[state.config[r]];
    }
    RootPrior out;
    out.p.p.resize(q);
    const double total = static_cast<double>(opts.marginal_sweeps);
    double err = 0.0;
    for (std::uint32_t x = 0; x < q; ++x) {
        const double px = counts[x] / total;
        out.p.p[x] = px;
        err += 0.5 * std::sqrt(px * (1.0 - px) / total);
    }
    out.err = err;
    return out;
}

struct TrialOutcome {
    enum class Status { ok, aborted, zero_mass } status = Status::ok;
    double bias = 0.0;
    bool tree_like = false;
};

ReconEstimate reduce_outcomes(const std::vector<TrialOutcome>& outcomes, std::uint32_t t,
                              double prior_err) {
    std::vector<double> biases;
    std::uint64_t aborted = 0, zero_mass = 0, tree_like = 0;
    for (const auto& o : outcomes) {
        switch (o.status) {
            case TrialOutcome::Status::ok:
                biases.push_back(o.bias);
                if (o.tree_like) ++tree_like;
                break;
            case TrialOutcome::Status::aborted: ++aborted; break;
            case TrialOutcome::Status::zero_mass: ++zero_mass; break;
        }
    }
    if (biases.empty())
        throw std::runtime_error("reconstruction bias: no trial completed (all aborted or zero-mass)");
    MeanStderr ms = mean_stderr(biases);
    ReconEstimate est;
    est.t = t;
    est.bias_mean = ms.mean;
    est.bias_stderr = ms.stderr_ + prior_err;
    est.trials = biases.size();
    est.tree_like_fraction = static_cast<double>(tree_like) / static_cast<double>(biases.size());
    est.aborted = aborted;
    est.zero_mass_flags = zero_mass;
    return est;
}

}  // namespace

ReconEstimate graph_reconstruction_bias(const GraphicalModel& gm, std::uint32_t r, std::uint32_t t,
                                        std::uint64_t trials, std::uint64_t seed,
                                        const ReconOptions& opts) {
    validate(gm);
    if (r >= gm.graph.n) throw std::invalid_argument("graph_reconstruction_bias: root out of range");
    if (trials < 1) throw std::invalid_argument("graph_reconstruction_bias: need >= 1 trial");
    const std::uint32_t q = gm.alphabet_size;
    const BallDecomposition dec = ball_decompose(gm.graph, r, t);
    const bool tree_like = local_tree_check(gm.graph, r, t);

    const RootPrior prior = root_prior(gm, r, opts, seed_for(seed, trials + 1));
    const bool exact_sampling = state_space_fits(q, gm.graph.n, opts.sampler_budget);
    std::optional<ExactSampler> sampler;
    if (exact_sampling) sampler.emplace(gm, opts.sampler_budget);

    const std::uint32_t workers = std::max<std::uint32_t>(1, opts.jobs);
    std::vector<TrialOutcome> outcomes(trials);
    // boundary-value TV results repeat heavily on small shells; one cache per
    // worker keeps lookups lock-free and results identical for any job count
    std::vector<std::map<std::vector<std::uint8_t>, std::pair<double, bool>>> caches(workers);

    parallel_for(trials, workers, [&](std::uint64_t trial) {
        const std::uint64_t trial_seed = seed_for(seed, trial);
        Rng rng = make_rng(seed_for(trial_seed, 0));
        Configuration x = exact_sampling
                              ? sampler->draw(rng)
                              : glauber_run(gm, opts.glauber_sweeps, seed_for(trial_seed, 1));
        std::vector<std::uint8_t> key(dec.boundary.size());
        for (std::size_t j = 0; j < dec.boundary.size(); ++j) key[j] = x[dec.boundary[j]];

        auto& cache = caches[trial % workers];
        auto it = cache.find(key);
        std::pair<double, bool> cell;  // (bias, zero_mass)
        if (it != cache.end()) {
            cell = it->second;
        } else {
            try {
                std::vector<std::pair<std::uint32_t, std::uint8_t>> frozen(key.size());
                for (std::size_t j = 0; j < key.size(); ++j) frozen[j] = {dec.boundary[j], key[j]};
                Distribution cond = exact_conditional_root(gm, r, frozen, opts.enumeration_budget);
                cell = {tv_distance(cond, prior.p), false};
            } catch (const std::runtime_error&) {
                cell = {0.0, true};  // boundary values carry zero mass
            }
            cache.emplace(std::move(key), cell);
        }
        outcomes[trial].status =
            cell.second ? TrialOutcome::Status::zero_mass : TrialOutcome::Status::ok;
        outcomes[trial].bias = cell.first;
        outcomes[trial].tree_like = tree_like;
    });

    return reduce_outcomes(outcomes, t, prior.err);
}

ReconEstimate ensemble_reconstruction_bias(const ExperimentModel& em, std::uint32_t n,
                                           std::uint32_t t, std::uint64_t trials,
                                           std::uint64_t seed, const ReconOptions& opts) {
    if (trials < 1) throw std::invalid_argument("ensemble_reconstruction_bias: need >= 1 trial");
    const std::uint32_t q = em.alphabet();
    const std::uint32_t workers = std::max<std::uint32_t>(1, opts.jobs);
    std::vector<TrialOutcome> outcomes(trials);
    std::vector<double> prior_errs(trials, 0.0);

    parallel_for(trials, workers, [&](std::uint64_t trial) {
        const std::uint64_t trial_seed = seed_for(seed, trial);
        Rng rng = make_rng(seed_for(trial_seed, 0));
        GraphicalModel gm = em.realize(n, rng);
        const std::uint32_t r = 0;
        const BallDecomposition dec = ball_decompose(gm.graph, r, t);
        outcomes[trial].tree_like = local_tree_check(gm.graph, r, t);

        const std::size_t interior = dec.ball_vertices.size() - dec.boundary.size();
        if (interior > opts.max_ball_vertices ||
            !state_space_fits(q, static_cast<std::uint32_t>(interior), opts.enumeration_budget)) {
            outcomes[trial].status = TrialOutcome::Status::aborted;
            return;
        }

        Configuration x;
        if (state_space_fits(q, n, opts.sampler_budget)) {
            ExactSampler sampler(gm, opts.sampler_budget);
            x = sampler.draw(rng);
        } else {
            x = glauber_run(gm, opts.glauber_sweeps, seed_for(trial_seed, 1));
        }
        const RootPrior prior = root_prior(gm, r, opts, seed_for(trial_seed, 2));
        prior_errs[trial] = prior.err;

        std::vector<std::pair<std::uint32_t, std::uint8_t>> frozen(dec.boundary.size());
        for (std::size_t j = 0; j < dec.boundary.size(); ++j)
            frozen[j] = {dec.boundary[j], x[dec.boundary[j]]};
        try {
            Distribution cond = exact_conditional_root(gm, r, frozen, opts.enumeration_budget);
            outcomes[trial].bias = tv_distance(cond, prior.p);
        } catch (const std::runtime_error&) {
            outcomes[trial].status = TrialOutcome::Status::zero_mass;
        }
    });

    double err_sum = 0.0;
    std::uint64_t ok = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        if (outcomes[trial].status == TrialOutcome::Status::ok) {
            err_sum += prior_errs[trial];
            ++ok;
        }
    }
    return reduce_outcomes(outcomes, t, ok > 0 ? err_sum / static_cast<double>(ok) : 0.0);
}

std::string ScanRow::csv_header() {
    return "model,ensemble,N,k_or_gamma,theta_or_eps,t,trials,bias_mean,bias_stderr,"
           "tree_like_fraction,seed";
}

std::string ScanRow::csv() const {
    std::string s = model;
    s += ',' + ensemble;
    s += ',' + std::to_string(n);
    s += ',' + csv_double(k_or_gamma);
    s += ',' + csv_double(theta_or_eps);
    s += ',' + std::to_string(t);
    s += ',' + std::to_string(trials);
    s += ',' + csv_double(bias_mean);
    s += ',' + csv_double(bias_stderr);
    s += ',' + csv_double(tree_like_fraction);
    s += ',' + std::to_string(seed);
    return s;
}

std::vector<ScanRow> ferro_threshold_scan(std::uint32_t k, const std::vector<double>& theta_grid,
                                          std::uint32_t n, const std::vector<std::uint32_t>& t_grid,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ReconOptions& opts) {
    if (theta_grid.empty() || t_grid.empty())
        throw std::invalid_argument("ferro_threshold_scan: empty grid");
    std::vector<ScanRow> rows;
    for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
        const double theta = theta_grid[ti];
        for (std::size_t si = 0; si < t_grid.size(); ++si) {
            const std::uint32_t t = t_grid[si];
            const std::uint64_t cell = 2 * (ti * t_grid.size() + si);
            const ExperimentModel em = ExperimentModel::ising_regular(k, theta, 0.0);
            const ReconEstimate est =
                ensemble_reconstruction_bias(em, n, t, trials, seed_for(seed, cell), opts);
            ScanRow graph_row;
            graph_row.model = "ising";
            graph_row.ensemble = "regular";
            graph_row.n = n;
            graph_row.k_or_gamma = k;
            graph_row.theta_or_eps = theta;
            graph_row.t = t;
            graph_row.trials = est.trials;
            graph_row.bias_mean = est.bias_mean;
            graph_row.bias_stderr = est.bias_stderr;
            graph_row.tree_like_fraction = est.tree_like_fraction;
            graph_row.seed = seed;
            rows.push_back(std::move(graph_row));

            const BiasEstimate tree_est =
                tree_reconstruction_bias(TreeEnsemble::regular(k), TreeModelSpec::ising(theta), t,
                                         trials, seed_for(seed, cell + 1), opts.jobs);
            ScanRow tree_row;
            tree_row.model = "ising";
            tree_row.ensemble = "regular_tree";
            tree_row.n = 0;
            tree_row.k_or_gamma = k;
            tree_row.theta_or_eps = theta;
            tree_row.t = t;
            tree_row.trials = tree_est.trials;
            tree_row.bias_mean = tree_est.mean;
            tree_row.bias_stderr = tree_est.stderr_;
            tree_row.tree_like_fraction = 1.0;
            tree_row.seed = seed;
            rows.push_back(std::move(tree_row));
        }
    }
    return rows;
}

std::string MagnetizationProxyRow::csv_header() {
    return "k,theta,N,runs,threshold,exceed_fraction,mean_abs_magnetization,split_disagreement,"
           "seed";
}

std::string MagnetizationProxyRow::csv() const {
    std::string s = std::to_string(k);
    s += ',' + csv_double(theta);
    s += ',' + std::to_string(n);
    s += ',' + std::to_string(runs);
    s += ',' + csv_double(threshold);
    s += ',' + csv_double(exceed_fraction);
    s += ',' + csv_double(mean_abs_magnetization);
    s += ',' + csv_double(split_disagreement);
    s += ',' + std::to_string(seed);
    return s;
}

MagnetizationProxyRow magnetization_proxy(std::uint32_t k, double theta, std::uint32_t n,
                                          std::uint64_t runs, std::uint64_t sweeps_per_half,
                                          std::uint64_t seed, double threshold,
                                          std::uint32_t jobs) {
    if (runs < 1) throw std::invalid_argument("magnetization_proxy: need >= 1 run");
    if (sweeps_per_half < 1) throw std::invalid_argument("magnetization_proxy: need >= 1 sweep");
    std::vector<double> abs_mag(runs), disagreement(runs);
    std::vector<char> exceeded(runs, 0);
    parallel_for(runs, std::max<std::uint32_t>(1, jobs), [&](std::uint64_t run) {
        const std::uint64_t run_seed = seed_for(seed, run);
        Rng rng = make_rng(seed_for(run_seed, 0));
        Multigraph g = sample_regular_multigraph(n, k, rng);
        GraphicalModel gm = ising_model(g, theta, 0.0);
        std::vector<double> trace =
            magnetization_trace(gm, 2 * sweeps_per_half, seed_for(run_seed, 1));
        const double m1 =
            pairwise_sum(trace.data(), sweeps_per_half) / static_cast<double>(sweeps_per_half);
        const double m2 = pairwise_sum(trace.data() + sweeps_per_half, sweeps_per_half) /
                          static_cast<double>(sweeps_per_half);
        abs_mag[run] = std::abs(m2);
        disagreement[run] = std::abs(std::abs(m1) - std::abs(m2));
        exceeded[run] = std::abs(m2) > threshold ? 1 : 0;
    });
    MagnetizationProxyRow row;
    row.k = k;
    row.theta = theta;
    row.n = n;
    row.runs = runs;
    row.threshold = threshold;
    row.mean_abs_magnetization = pairwise_sum(abs_mag) / static_cast<double>(runs);
    row.split_disagreement = pairwise_sum(disagreement) / static_cast<double>(runs);
    std::uint64_t count = 0;
    for (char e : exceeded) count += e;
    row.exceed_fraction = static_cast<double>(count) / static_cast<double>(runs);
    row.seed = seed;
    return row;
}

std::string GammaFlagRow::csv_header() { return "gamma,two_gamma_theta_sq,supercritical"; }

std::string GammaFlagRow::csv() const {
    std::string s = csv_double(gamma);
    s += ',' + csv_double(two_gamma_theta_sq);
    s += ',';
    s += supercritical ? '1' : '0';
    return s;
}

SpinGlassScanResult spin_glass_threshold_scan(const std::vector<double>& gamma_grid, double eps,
                                              const std::vector<std::uint32_t>& n_grid,
                                              std::uint64_t trials, std::uint64_t seed,
                                              std::uint32_t t, const ReconOptions& opts) {
    if (gamma_grid.empty() || n_grid.empty())
        throw std::invalid_argument("spin_glass_threshold_scan: empty grid");
    const double theta = 1.0 - 2.0 * eps;
    SpinGlassScanResult out;
    for (std::size_t gi = 0; gi < gamma_grid.size(); ++gi) {
        const double gamma = gamma_grid[gi];
        GammaFlagRow flag;
        flag.gamma = gamma;
        flag.two_gamma_theta_sq = 2.0 * gamma * theta * theta;
        flag.supercritical = flag.two_gamma_theta_sq > 1.0;
        out.flags.push_back(flag);

        const ExperimentModel em = ExperimentModel::spin_glass_poisson(gamma, eps);
        SphericityOptions sph_opts;
        sph_opts.burn_in = opts.glauber_sweeps;
        sph_opts.jobs = opts.jobs;
        auto sph = sphericity_estimate(em, n_grid, trials, seed_for(seed, 2 * gi), sph_opts);
        for (auto& row : sph) out.sphericity.push_back(std::move(row));

        const std::uint64_t recon_seed = seed_for(seed, 2 * gi + 1);
        for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
            const ReconEstimate est = ensemble_reconstruction_bias(
                em, n_grid[ni], t, trials, seed_for(recon_seed, ni), opts);
            ScanRow row;
            row.model = "spinglass";
            row.ensemble = "poisson";
            row.n = n_grid[ni];
            row.k_or_gamma = gamma;
            row.theta_or_eps = eps;
            row.t = t;
            row.trials = est.trials;
            row.bias_mean = est.bias_mean;
            row.bias_stderr = est.bias_stderr;
            row.tree_like_fraction = est.tree_like_fraction;
            row.seed = seed;
            out.recon.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace reconlab
