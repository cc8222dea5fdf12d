#include "reconlab/treecalc.hpp"

#include <cmath>
#include <sstream>

#include "reconlab/csv.hpp"
#include "reconlab/ensembles.hpp"
#include "reconlab/parallel.hpp"

namespace reconlab {

TreeModel ising_tree_model(double theta, double lambda) {
    if (lambda < 0 || lambda >= 1)
        throw std::invalid_argument("ising_tree_model: lambda must be in [0, 1)");
    TreeModel tm;
    tm.tables = {ising_table(theta)};
    tm.alphabet_size = 2;
    if (lambda > 0) tm.vertex_bias = {1 + lambda, 1 - lambda};
    return tm;
}

TreeModel coloring_tree_model(std::uint32_t q, double eps) {
    TreeModel tm;
    tm.tables = {coloring_table(q, eps)};
    tm.alphabet_size = q;
    return tm;
}

TreeModel spin_glass_tree_model(double eps) {
    TreeModel tm;
    tm.tables = {ising_flip_table(eps), WeightTable(2, {eps, 1 - eps, 1 - eps, eps})};
    tm.alphabet_size = 2;
    return tm;
}

GraphicalModel as_graphical_model(const Tree& t, const TreeModel& tm) {
    GraphicalModel gm;
    gm.graph = tree_to_multigraph(t);
    gm.tables = tm.tables;
    gm.vertex_bias = tm.vertex_bias;
    gm.alphabet_size = tm.alphabet_size;
    validate(gm);
    return gm;
}

namespace {

/** Upward (leaf-to-root) messages: message[i](x) is proportional to the total
 *  weight of node i's subtree when i is in state x, including i's own bias or
 *  evidence factor. Normalized per node; a node whose message vanishes
 *  identically marks impossible evidence. */
std::vector<std::vector<double>> upward_messages(const Tree& t, const TreeModel& tm,
                                                 const BoundaryEvidence& evidence) {
    const std::uint32_t q = tm.alphabet_size;
    auto children = children_of(t);
    for (const auto& [node, item] : evidence.items) {
        if (node >= t.size()) throw std::invalid_argument("evidence: node out of range");
        if (!children[node].empty())
            throw std::invalid_argument("evidence: only leaves may carry evidence");
        if (item.is_field) {
            if (q != 2) throw std::invalid_argument("evidence: field parameter needs a binary alphabet");
            if (item.h0 < -1 || item.h0 > 1)
                throw std::invalid_argument("evidence: field parameter must be in [-1, 1]");
        } else if (item.state >= q) {
            throw std::invalid_argument("evidence: observed state out of range");
        }
    }

    std::vector<std::vector<double>> message(t.size());
    // node ids are in breadth-first order, so children are processed before
    // parents when walking backwards
    for (std::uint32_t idx = t.size(); idx-- > 0;) {
        std::vector<double> m(q, 0.0);
        auto ev = evidence.items.find(idx);
        if (ev != evidence.items.end()) {
            // evidence factor replaces the leaf's own bias
            if (ev->second.is_field) {
                m[0] = (1 + ev->second.h0) / 2;
                m[1] = (1 - ev->second.h0) / 2;
            } else {
                m[ev->second.state] = 1.0;
            }
        } else {
            for (std::uint32_t x = 0; x < q; ++x) m[x] = tm.bias(x);
        }
        for (std::uint32_t c : children[idx]) {
            const WeightTable& psi = tm.tables.at(t.nodes[c].weight_id);
            for (std::uint32_t x = 0; x < q; ++x) {
                if (m[x] == 0) continue;
                double s = 0.0;
                for (std::uint32_t y = 0; y < q; ++y) s += psi.at(x, y) * message[c][y];
                m[x] *= s;
            }
        }
        double sum = 0.0;
        for (double v : m) sum += v;
        if (sum <= 0.0)
            throw std::runtime_error("upward_root_posterior: evidence has zero probability");
        for (auto& v : m) v /= sum;
        message[idx] = std::move(m);
    }
    return message;
}

}  // namespace

Distribution upward_root_posterior(const Tree& t, const TreeModel& tm,
                                   const BoundaryEvidence& evidence) {
    auto message = upward_messages(t, tm, evidence);
    Distribution d;
    d.p = message[t.root];
    return d;
}

Configuration broadcast_sample(const Tree& t, const TreeModel& tm, Rng& rng) {
    const std::uint32_t q = tm.alphabet_size;
    auto message = upward_messages(t, tm, BoundaryEvidence{});
    auto children = children_of(t);
    Configuration x(t.size(), 0);

    auto draw_from = [&rng, q](const std::vector<double>& w) {
        double total = 0.0;
        for (double v : w) total += v;
        double u = uniform_real(rng) * total;
        double cum = 0.0;
        for (std::uint32_t s = 0; s < q; ++s) {
            cum += w[s];
            if (u < cum) return static_cast<std::uint8_t>(s);
        }
        return static_cast<std::uint8_t>(q - 1);
    };

    x[t.root] = draw_from(message[t.root]);
    // ids are breadth-first ordered: parents are assigned before children
    std::vector<double> w(q);
    for (std::uint32_t i = 0; i < t.size(); ++i) {
        for (std::uint32_t c : children[i]) {
            const WeightTable& psi = tm.tables.at(t.nodes[c].weight_id);
            for (std::uint32_t y = 0; y < q; ++y) w[y] = psi.at(x[i], y) * message[c][y];
            x[c] = draw_from(w);
        }
    }
    return x;
}

namespace {

TreeModel realize_tree_model(const TreeModelSpec& spec) {
    switch (spec.kind) {
        case TreeModelSpec::Kind::ising:
            return ising_tree_model(spec.theta, spec.lambda);
        case TreeModelSpec::Kind::spin_glass:
            return spin_glass_tree_model(spec.eps);
        case TreeModelSpec::Kind::coloring:
            return coloring_tree_model(spec.q, spec.eps);
    }
    throw std::logic_error("unreachable");
}

}  // namespace

BiasEstimate tree_reconstruction_bias(const TreeEnsemble& ensemble, const TreeModelSpec& spec,
                                      std::uint32_t t, std::uint64_t trials, std::uint64_t seed,
                                      unsigned jobs) {
    if (trials < 1) throw std::invalid_argument("tree_reconstruction_bias: trials must be >= 1");
    TreeModel tm = realize_tree_model(spec);
    std::vector<double> values(trials, 0.0);

    parallel_for(trials, jobs, [&](std::uint64_t trial) {
        Rng rng = make_rng(seed_for(seed, trial));
        Tree tree = ensemble.kind == TreeEnsemble::Kind::regular
                        ? regular_tree(ensemble.k, t)
                        : sample_galton_watson_tree(ensemble.gamma, t, rng);
        if (spec.kind == TreeModelSpec::Kind::spin_glass) {
            for (std::uint32_t i = 1; i < tree.size(); ++i)
                tree.nodes[i].weight_id = bernoulli(rng, 0.5) ? 1 : 0;
        }
        auto boundary = nodes_at_depth(tree, t);
        if (boundary.empty()) {
            values[trial] = 0.0;  // no surviving generation, nothing to observe
            return;
        }
        Configuration x = broadcast_sample(tree, tm, rng);
        BoundaryEvidence evidence;
        for (std::uint32_t node : boundary) evidence.observe(node, x[node]);
        Distribution posterior = upward_root_posterior(tree, tm, evidence);
        Distribution prior = upward_root_posterior(tree, tm, BoundaryEvidence{});
        values[trial] = tv_distance(posterior, prior);
    });

    MeanStderr ms = mean_stderr(values);
    return {ms.mean, ms.stderr_, trials};
}

IsingTreeParams::IsingTreeParams(std::uint32_t k_, double theta_, double lambda_)
    : k(k_), theta(theta_), lambda(lambda_) {
    if (k < 1) throw std::invalid_argument("IsingTreeParams: k must be >= 1");
    if (theta < 0 || theta >= 1) throw std::invalid_argument("IsingTreeParams: theta must be in [0, 1)");
    if (lambda < 0 || lambda > 1) throw std::invalid_argument("IsingTreeParams: lambda must be in [0, 1]");
}

double ising_f_step(double h, const IsingTreeParams& params) {
    if (h < -1 || h > 1) throw std::invalid_argument("ising_f_step: h must be in [-1, 1]");
    double up = (1 + params.lambda) * std::pow(1 + params.theta * h, static_cast<double>(params.k));
    double dn = (1 - params.lambda) * std::pow(1 - params.theta * h, static_cast<double>(params.k));
    return (up - dn) / (up + dn);
}

double ising_fixed_point(const IsingTreeParams& params, double tol, std::uint64_t max_iter) {
    if (!(tol > 0)) throw std::invalid_argument("ising_fixed_point: tol must be positive");
    double h = 1.0;
    for (std::uint64_t it = 0; it < max_iter; ++it) {
        double next = ising_f_step(h, params);
        if (std::abs(next - h) <= tol) return next;
        h = next;
    }
    throw FixedPointError("ising_fixed_point: no convergence within max_iter", h);
}

double ising_edge_correlation(double theta, double h) {
    if (h < -1 || h > 1) throw std::invalid_argument("ising_edge_correlation: h must be in [-1, 1]");
    return (theta + h * h) / (1 + theta * h * h);
}

double ising_free_energy(double theta, double lambda, double h, std::uint32_t k) {
    if (h < -1 || h > 1) throw std::invalid_argument("ising_free_energy: h must be in [-1, 1]");
    double kp1 = static_cast<double>(k) + 1.0;
    double up = (1 + lambda) * std::pow(1 + theta * h, kp1);
    double dn = (1 - lambda) * std::pow(1 - theta * h, kp1);
    return -0.5 * kp1 * std::log(1 + theta * h * h) + std::log(up + dn);
}

double ising_root_bias_plus(double theta, std::uint32_t k, std::uint32_t t) {
    if (t < 1) throw std::invalid_argument("ising_root_bias_plus: t must be >= 1");
    IsingTreeParams branch(k, theta, 0.0);
    double h = 1.0;
    for (std::uint32_t s = 0; s + 1 < t; ++s) h = ising_f_step(h, branch);
    IsingTreeParams root(k + 1, theta, 0.0);
    return 0.5 * (1 + ising_f_step(h, root));
}

std::string TreeScanRow::csv_header() {
    return "ensemble,k_or_gamma,theta,lambda,t,trials,bias_mean,bias_stderr,seed";
}

std::string TreeScanRow::csv() const {
    std::ostringstream os;
    os << ensemble << ',' << csv_double(k_or_gamma) << ',' << csv_double(theta) << ','
       << csv_double(lambda) << ',' << t << ',' << trials << ',' << csv_double(bias_mean) << ','
       << csv_double(bias_stderr) << ',' << seed;
    return os.str();
}

}  // namespace reconlab
