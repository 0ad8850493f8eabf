#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lmef/population.hpp"
#include "lmef/problems.hpp"
#include "lmef/rng.hpp"

namespace lmef {

enum class Execution { Serial, Parallel };

/// Knobs of simulated binary crossover and polynomial mutation.
struct VariationParams {
    double crossover_probability = 1.0;
    double crossover_eta = 20.0;
    double mutation_probability = 0.0;
    double mutation_eta = 20.0;

    /// Crossover 1.0 / eta 20, mutation 1/n / eta 20.
    static VariationParams standard(std::size_t n);
    /// Throws PreconditionError when a field is non-finite or out of range.
    void validate() const;
};

/// Called after every generation with the surviving population and the
/// problem's evaluation counter.
using GenerationObserver = std::function<void(const Population&, std::uint64_t)>;

/// Uniformly random individuals inside `bounds` (unevaluated).
Population random_population(const Bounds& bounds, std::size_t size, Rng& rng);

/// Binary tournament by (rank, crowding distance); returns the winning
/// member index of each of `count` tournaments.
std::vector<std::size_t> tournament_indices(const Population& pop, std::size_t count, Rng& rng);

/// Parent pool of size pop.capacity (or pop.size() when capacity is 0).
Population mating_selection(const Population& pop, Rng& rng);

/// SBX on consecutive parent pairs, then polynomial mutation, then clamping.
/// Odd-sized pools pair the last parent with itself. Offspring are unevaluated
/// and there are exactly parents.size() of them.
Population variation(const Population& parents, const VariationParams& params, const Bounds& bounds, Rng& rng);

/// NSGA-II survivor selection back to `capacity` members. Survivors keep their
/// relative order from `pop`.
Population environmental_selection(const Population& pop, std::size_t capacity);

/// Evaluates unevaluated members in order until the problem counter reaches
/// `eval_limit`. Returns how many were evaluated; the rest stay unevaluated.
std::size_t evaluate_until(Problem& problem, std::span<Individual> members, std::uint64_t eval_limit,
                           Execution exec = Execution::Serial);

/// Generational NSGA-II consuming exactly `budget` evaluations from the
/// problem counter (unevaluated members of `init` are charged first).
Population nsga2_run(Problem& problem, Population init, std::uint64_t budget, const VariationParams& params,
                     Rng& rng, const GenerationObserver& observer = {}, Execution exec = Execution::Serial);

/// Signature shared by base optimizers that can finish a run.
using Optimizer = std::function<Population(Problem&, Population, std::uint64_t, const VariationParams&, Rng&,
                                           const GenerationObserver&)>;

} // namespace lmef
