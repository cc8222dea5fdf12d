#pragma once

#include <cstdint>
#include <vector>

#include "reconlab/graph.hpp"
#include "reconlab/rng.hpp"

namespace reconlab {

/** Symmetric nonnegative |X| x |X| edge potential. Overall scale is
 *  arbitrary (the partition function absorbs it); only scale-invariant
 *  quantities are meaningful. */
struct WeightTable {
    std::uint32_t size = 0;
    std::vector<double> entries;  // row-major, size*size

    WeightTable() = default;
    WeightTable(std::uint32_t q, std::vector<double> e);

    double at(std::uint32_t x, std::uint32_t y) const { return entries[x * size + y]; }
};

using Configuration = std::vector<std::uint8_t>;

/** A pairwise model on a multigraph: every edge contributes one factor
 *  psi_{weight_id}(x_u, x_v) (self-loops contribute psi(x_i, x_i) once,
 *  parallel edges one factor each) and every vertex optionally contributes a
 *  state multiplier bias(x_i). An empty vertex_bias means all ones. */
struct GraphicalModel {
    Multigraph graph;
    std::vector<WeightTable> tables;
    std::vector<double> vertex_bias;  // empty or alphabet_size positive entries
    std::uint32_t alphabet_size = 2;

    double bias(std::uint32_t state) const {
        return vertex_bias.empty() ? 1.0 : vertex_bias[state];
    }
};

/// Throws std::invalid_argument on any violated structural invariant.
void validate(const GraphicalModel& gm);

/** Binary interaction table {{1+theta, 1-theta}, {1-theta, 1+theta}} with
 *  theta = 1 - 2*eps in [0, 1). State 0 is spin +1, state 1 is spin -1.
 *  The (1-eps, eps) flip-probability table is the same object scaled by 1/2;
 *  both parameterizations are exposed and differ only by that scale. */
WeightTable ising_table(double theta);

/// Flip-probability parameterization: {{1-eps, eps}, {eps, 1-eps}}.
WeightTable ising_flip_table(double eps);

/// Antiferromagnetic table: off-diagonal 1, diagonal eps (eps = 0 makes
/// proper colorings the only positive-weight configurations).
WeightTable coloring_table(std::uint32_t q, double eps);

/** Ferromagnet on g: one shared ising_table(theta) plus the external-field
 *  bias (1+lambda, 1-lambda) when lambda > 0. */
GraphicalModel ising_model(const Multigraph& g, double theta, double lambda);

/** Spin glass on g: tables {psi_plus, psi_minus} = {{1-eps,eps},{eps,1-eps}}
 *  and its flip; every edge is reassigned an independent fair-coin table id.
 *  Deterministic given the rng state. */
GraphicalModel spin_glass_model(const Multigraph& g, double eps, Rng& rng);

/// Spin glass edge tables applied to the weight ids already present in g
/// (e.g. loaded from a file); ids must be 0 or 1.
GraphicalModel spin_glass_model_from_ids(const Multigraph& g, double eps);

/// q-coloring model with soft violation weight eps on every edge.
GraphicalModel coloring_model(const Multigraph& g, std::uint32_t q, double eps);

/** log of the unnormalized weight of x: sum of log psi over edges plus log
 *  bias over vertices; -infinity iff some factor vanishes. */
double log_weight(const GraphicalModel& gm, const Configuration& x);

}  // namespace reconlab
