#include "reconlab/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "reconlab/ensembles.hpp"

namespace reconlab {

WeightTable::WeightTable(std::uint32_t q, std::vector<double> e)
    : size(q), entries(std::move(e)) {
    if (entries.size() != static_cast<std::size_t>(q) * q)
        throw std::invalid_argument("weight table: wrong entry count");
    bool any_positive = false;
    for (std::uint32_t x = 0; x < q; ++x) {
        for (std::uint32_t y = 0; y < q; ++y) {
            double w = at(x, y);
            if (w < 0 || !std::isfinite(w))
                throw std::invalid_argument("weight table: entries must be finite and >= 0");
            if (w != at(y, x)) throw std::invalid_argument("weight table: must be symmetric");
            if (w > 0) any_positive = true;
        }
    }
    if (!any_positive) throw std::invalid_argument("weight table: needs a positive entry");
}

void validate(const GraphicalModel& gm) {
    validate(gm.graph);
    if (gm.alphabet_size < 1) throw std::invalid_argument("model: alphabet_size must be >= 1");
    for (const auto& tab : gm.tables) {
        if (tab.size != gm.alphabet_size)
            throw std::invalid_argument("model: table size does not match alphabet");
    }
    for (const auto& e : gm.graph.edges) {
        if (e.weight_id >= gm.tables.size())
            throw std::invalid_argument("model: edge references missing weight table");
    }
    if (!gm.vertex_bias.empty()) {
        if (gm.vertex_bias.size() != gm.alphabet_size)
            throw std::invalid_argument("model: vertex_bias size does not match alphabet");
        for (double b : gm.vertex_bias) {
            if (!(b > 0) || !std::isfinite(b))
                throw std::invalid_argument("model: vertex_bias entries must be positive");
        }
    }
}

WeightTable ising_table(double theta) {
    if (theta < 0 || theta >= 1)
        throw std::invalid_argument("ising_table: theta must be in [0, 1)");
    return WeightTable(2, {1 + theta, 1 - theta, 1 - theta, 1 + theta});
}

WeightTable ising_flip_table(double eps) {
    if (eps < 0 || eps > 0.5)
        throw std::invalid_argument("ising_flip_table: eps must be in [0, 1/2]");
    return WeightTable(2, {1 - eps, eps, eps, 1 - eps});
}

WeightTable coloring_table(std::uint32_t q, double eps) {
    if (q < 2) throw std::invalid_argument("coloring_table: q must be >= 2");
    if (eps < 0 || eps > 1) throw std::invalid_argument("coloring_table: eps must be in [0, 1]");
    std::vector<double> e(static_cast<std::size_t>(q) * q, 1.0);
    for (std::uint32_t x = 0; x < q; ++x) e[x * q + x] = eps;
    return WeightTable(q, std::move(e));
}

GraphicalModel ising_model(const Multigraph& g, double theta, double lambda) {
    // lambda = 1 would zero out state 1 entirely; graph models require a
    // positive bias, the scalar tree recursions accept the closed interval.
    if (lambda < 0 || lambda >= 1)
        throw std::invalid_argument("ising_model: lambda must be in [0, 1)");
    GraphicalModel gm;
    gm.graph = g;
    for (auto& e : gm.graph.edges) e.weight_id = 0;
    gm.tables = {ising_table(theta)};
    gm.alphabet_size = 2;
    if (lambda > 0) gm.vertex_bias = {1 + lambda, 1 - lambda};
    validate(gm);
    return gm;
}

GraphicalModel spin_glass_model_from_ids(const Multigraph& g, double eps) {
    GraphicalModel gm;
    gm.graph = g;
    gm.tables = {ising_flip_table(eps),
                 WeightTable(2, {eps, 1 - eps, 1 - eps, eps})};
    gm.alphabet_size = 2;
    validate(gm);
    return gm;
}

GraphicalModel spin_glass_model(const Multigraph& g, double eps, Rng& rng) {
    Multigraph assigned = g;
    assign_fair_coin_weight_ids(assigned, rng);
    return spin_glass_model_from_ids(assigned, eps);
}

GraphicalModel coloring_model(const Multigraph& g, std::uint32_t q, double eps) {
    GraphicalModel gm;
    gm.graph = g;
    for (auto& e : gm.graph.edges) e.weight_id = 0;
    gm.tables = {coloring_table(q, eps)};
    gm.alphabet_size = q;
    validate(gm);
    return gm;
}

double log_weight(const GraphicalModel& gm, const Configuration& x) {
    if (x.size() != gm.graph.n) throw std::invalid_argument("log_weight: configuration length mismatch");
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    double lw = 0.0;
    for (const auto& e : gm.graph.edges) {
        double w = gm.tables[e.weight_id].at(x[e.u], x[e.v]);
        if (w == 0) return neg_inf;
        lw += std::log(w);
    }
    if (!gm.vertex_bias.empty()) {
        for (std::uint32_t i = 0; i < gm.graph.n; ++i) lw += std::log(gm.vertex_bias[x[i]]);
    }
    return lw;
}

}  // namespace reconlab
