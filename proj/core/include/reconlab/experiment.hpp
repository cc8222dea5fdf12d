#pragma once

#include <cstdint>
#include <string>

#include "reconlab/model.hpp"
#include "reconlab/rng.hpp"

namespace reconlab {

/** A graph ensemble paired with a model family, enough to realize a
 *  GraphicalModel on n vertices from an rng. The three families the
 *  experiments use:
 *    - ising_regular: (k+1)-regular configuration-model ferromagnet
 *    - spin_glass_poisson: Poisson(gamma) edge density, fair-coin couplings
 *    - coloring_poisson: Poisson(gamma) edge density, soft antiferromagnet */
struct ExperimentModel {
    enum class Kind { ising_regular, spin_glass_poisson, coloring_poisson };

    Kind kind = Kind::ising_regular;
    std::uint32_t k = 2;    // regular ensembles: vertex degree k+1
    double gamma = 1.0;     // Poisson ensembles: edge density
    double theta = 0.5;     // ising interaction strength
    double lambda = 0.0;    // ising external field
    double eps = 0.35;      // spin-glass flip / coloring violation weight
    std::uint32_t q = 3;    // coloring palette size

    static ExperimentModel ising_regular(std::uint32_t k, double theta, double lambda = 0.0);
    static ExperimentModel spin_glass_poisson(double gamma, double eps);
    static ExperimentModel coloring_poisson(std::uint32_t q, double gamma, double eps);

    std::uint32_t alphabet() const;
    std::string model_name() const;     // "ising" | "spinglass" | "coloring"
    std::string ensemble_name() const;  // "regular" | "poisson"
    double density_param() const;       // k or gamma
    double strength_param() const;      // theta or eps

    /// Sample a graph on n vertices and attach the model weights.
    GraphicalModel realize(std::uint32_t n, Rng& rng) const;
};

}  // namespace reconlab
