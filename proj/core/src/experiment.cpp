#include "reconlab/experiment.hpp"

#include <stdexcept>

#include "reconlab/ensembles.hpp"

namespace reconlab {

ExperimentModel ExperimentModel::ising_regular(std::uint32_t k, double theta, double lambda) {
    ExperimentModel em;
    em.kind = Kind::ising_regular;
    em.k = k;
    em.theta = theta;
    em.lambda = lambda;
    em.q = 2;
    return em;
}

ExperimentModel ExperimentModel::spin_glass_poisson(double gamma, double eps) {
    ExperimentModel em;
    em.kind = Kind::spin_glass_poisson;
    em.gamma = gamma;
    em.eps = eps;
    em.q = 2;
    return em;
}

ExperimentModel ExperimentModel::coloring_poisson(std::uint32_t q, double gamma, double eps) {
    ExperimentModel em;
    em.kind = Kind::coloring_poisson;
    em.q = q;
    em.gamma = gamma;
    em.eps = eps;
    return em;
}

std::uint32_t ExperimentModel::alphabet() const {
    return kind == Kind::coloring_poisson ? q : 2;
}

std::string ExperimentModel::model_name() const {
    switch (kind) {
        case Kind::ising_regular: return "ising";
        case Kind::spin_glass_poisson: return "spinglass";
        case Kind::coloring_poisson: return "coloring";
    }
    throw std::logic_error("unreachable");
}

std::string ExperimentModel::ensemble_name() const {
    return kind == Kind::ising_regular ? "regular" : "poisson";
}

double ExperimentModel::density_param() const {
    return kind == Kind::ising_regular ? static_cast<double>(k) : gamma;
}

double ExperimentModel::strength_param() const {
    return kind == Kind::ising_regular ? theta : eps;
}

GraphicalModel ExperimentModel::realize(std::uint32_t n, Rng& rng) const {
    switch (kind) {
        case Kind::ising_regular: {
            Multigraph g = sample_regular_multigraph(n, k, rng);
            return ising_model(g, theta, lambda);
        }
        case Kind::spin_glass_poisson: {
            Multigraph g = sample_poisson_multigraph(n, gamma, rng);
            return spin_glass_model(g, eps, rng);
        }
        case Kind::coloring_poisson: {
            Multigraph g = sample_poisson_multigraph(n, gamma, rng);
            return coloring_model(g, q, eps);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace reconlab
