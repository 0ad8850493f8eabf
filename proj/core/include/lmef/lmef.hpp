#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lmef/gan.hpp"
#include "lmef/interpolate.hpp"
#include "lmef/problems.hpp"
#include "lmef/solver.hpp"

namespace lmef {

/// How phase-1 candidates are produced.
enum class InterpolationMode {
    Gan,     // latent interpolation through a trained generator
    Direct,  // piecewise-linear interpolation between centrals in decision space
};

struct LmefConfig {
    std::size_t k = 3;
    double sigma = 0.4;
    double epsilon = 0.1;
    std::uint64_t evaluations = 100000;
    std::size_t population = 100;
    double perturbation_std = 0.1;
    std::size_t pair_cap = 0;  // in-cluster pairs per cluster; 0 means `population`
    bool warm_start = false;   // reuse the previous iteration's GAN instead of a fresh one
    InterpolationMode mode = InterpolationMode::Gan;
    GanTrainConfig gan;
    GanShape shape;
    Execution execution = Execution::Serial;

    std::size_t effective_pair_cap() const { return pair_cap == 0 ? population : pair_cap; }
    /// Throws PreconditionError on out-of-range settings.
    void validate() const;
};

/// One row of the phase-1 event log.
struct IterationLog {
    std::size_t iteration = 0;
    std::uint64_t eval_count = 0;
    std::size_t nondominated = 0;
    ProvenanceCounts generated{};
    ProvenanceCounts accepted{};
    std::size_t evaluated = 0;
    double best_norm = 0.0;    // smallest objective-vector norm in the population
    double median_norm = 0.0;
};

struct LmefResult {
    Population population;
    std::vector<IterationLog> iterations;
    std::uint64_t initial_evaluations = 0;
    std::uint64_t phase1_evaluations = 0;  // offspring + interpolated candidates
    std::uint64_t phase2_evaluations = 0;
};

/// Random initial population of `config.population` members evaluated on the problem.
Population initial_population(Problem& problem, std::size_t size, Rng& rng, Execution exec = Execution::Serial);

/// Two-phase run: interpolation-assisted generations until epsilon * evaluations
/// are used, then the base optimizer on the remainder. Consumes exactly
/// config.evaluations objective calls, counting the initial population.
LmefResult gan_lmef_run(Problem& problem, const LmefConfig& config, const VariationParams& params, Rng& rng,
                        const GenerationObserver& observer = {}, const Optimizer& base = {});

/// Plain NSGA-II baseline sharing the same initialization and budget accounting.
Population nsga2_baseline(Problem& problem, std::size_t population, std::uint64_t evaluations,
                          const VariationParams& params, Rng& rng, const GenerationObserver& observer = {},
                          Execution exec = Execution::Serial);

/// Euclidean norms of all evaluated members' objective vectors.
std::vector<double> objective_norms(const Population& pop);

} // namespace lmef
