#include "lmef/lmef.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "lmef/error.hpp"
#include "lmef/manifold.hpp"
#include "lmef/pareto.hpp"

namespace lmef {

void LmefConfig::validate() const {
    require(k >= 1, "k must be >= 1");
    require(sigma > 0.0 && sigma <= 1.0, "sigma must lie in (0, 1]");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    require(population >= 2, "population size must be >= 2");
    require(evaluations >= population, "evaluation budget must cover the initial population");
    require(std::isfinite(perturbation_std) && perturbation_std > 0.0, "perturbation std must be positive");
    gan.validate();
}

Population initial_population(Problem& problem, std::size_t size, Rng& rng, Execution exec) {
    Population pop = random_population(problem.bounds(), size, rng);
    evaluate_until(problem, pop.members, problem.eval_count() + size, exec);
    return pop;
}

std::vector<double> objective_norms(const Population& pop) {
    std::vector<double> norms;
    norms.reserve(pop.size());
    for (const auto& ind : pop) {
        if (!ind.evaluated()) continue;
        double s = 0.0;
        for (double v : ind.f()) s += v * v;
        norms.push_back(std::sqrt(s));
    }
    return norms;
}

namespace {

void summarize_norms(const Population& pop, IterationLog& log) {
    auto norms = objective_norms(pop);
    if (norms.empty()) return;
    std::sort(norms.begin(), norms.end());
    log.best_norm = norms.front();
    const std::size_t mid = norms.size() / 2;
    log.median_norm = norms.size() % 2 ? norms[mid] : 0.5 * (norms[mid - 1] + norms[mid]);
}

InterpolationBatch gan_candidates(const Problem& problem, const LmefConfig& config, const std::vector<Vector>& front,
                                  const CentralSolutions& cs, const std::vector<Vector>& centrals,
                                  std::optional<GanModel>& model, Rng& rng) {
    if (!model || !config.warm_start) model = make_gan(problem.bounds(), rng, config.shape);
    const auto latents = sample_latent(config.population, model->latent_dim(), rng);
    model = train(std::move(*model), front, config.gan, rng);

    const LatentGenerator gen = LatentGenerator::from_gan(*model);
    const auto central_latents = extract_central_latents(gen, latents, centrals);

    InterpolationBatch batch = interpolate_between_clusters(gen, central_latents, problem.n());

    std::vector<Vector> central_proj;
    for (std::size_t c : cs.clusters.centrals) central_proj.push_back(cs.projected[c]);
    std::vector<Vector> fakes;
    fakes.reserve(latents.size());
    for (const auto& z : latents) fakes.push_back(gen.generate(z));
    const auto cluster_of = assign_to_centrals(cs.projection, fakes, central_proj);
    batch.append(interpolate_in_cluster(gen, latents, cluster_of, config.effective_pair_cap(), rng));
    batch.append(interpolate_perturbation(gen, latents, config.perturbation_std, rng));
    return batch;
}

} // namespace

LmefResult gan_lmef_run(Problem& problem, const LmefConfig& config, const VariationParams& params, Rng& rng,
                        const GenerationObserver& observer, const Optimizer& base) {
    config.validate();
    params.validate();
    const std::uint64_t start = problem.eval_count();
    const std::uint64_t total_limit = start + config.evaluations;
    const auto phase1_limit =
        start + static_cast<std::uint64_t>(std::floor(config.epsilon * static_cast<double>(config.evaluations)));
    const std::size_t n_pop = config.population;

    LmefResult result;
    Population pop = initial_population(problem, n_pop, rng, config.execution);
    result.initial_evaluations = problem.eval_count() - start;

    std::optional<GanModel> model;
    std::size_t iteration = 0;
    while (problem.eval_count() + n_pop <= phase1_limit) {
        const std::uint64_t before = problem.eval_count();
        const Population parents = mating_selection(pop, rng);
        Population offspring = variation(parents, params, problem.bounds(), rng);
        evaluate_until(problem, offspring.members, phase1_limit, config.execution);

        Population merged(std::move(pop.members), n_pop);
        merged.members.insert(merged.members.end(), std::make_move_iterator(offspring.members.begin()),
                              std::make_move_iterator(offspring.members.end()));

        const Front first = fast_nondominated_sort(merged).front();
        std::vector<Vector> front;
        front.reserve(first.size());
        for (std::size_t i : first) front.push_back(merged[i].genes);

        IterationLog log;
        log.iteration = iteration++;
        log.nondominated = front.size();

        if (front.size() >= 2) {
            const CentralSolutions cs = compute_central_solutions(front, problem.m() - 1, config.k, rng);
            std::vector<Vector> centrals;
            for (std::size_t c : cs.clusters.centrals) centrals.push_back(front[c]);

            InterpolationBatch batch = config.mode == InterpolationMode::Gan
                                           ? gan_candidates(problem, config, front, cs, centrals, model, rng)
                                           : interpolate_direct(centrals, problem.n(), problem.bounds());
            log.generated = batch.provenance_counts();
            if (!batch.empty()) {
                SelectionOutcome sel = manifold_select(centrals, batch, std::move(merged), config.sigma, problem,
                                                       phase1_limit, config.execution);
                merged = std::move(sel.population);
                log.accepted = sel.accepted;
                log.evaluated = sel.evaluated;
            }
        }

        pop = environmental_selection(merged, n_pop);
        result.phase1_evaluations += problem.eval_count() - before;
        log.eval_count = problem.eval_count();
        summarize_norms(pop, log);
        result.iterations.push_back(log);
        if (observer) observer(pop, problem.eval_count());
    }

    const std::uint64_t remaining = total_limit - problem.eval_count();
    const std::uint64_t before_phase2 = problem.eval_count();
    if (base) {
        pop = base(problem, std::move(pop), remaining, params, rng, observer);
    } else {
        pop = nsga2_run(problem, std::move(pop), remaining, params, rng, observer, config.execution);
    }
    result.phase2_evaluations = problem.eval_count() - before_phase2;
    result.population = std::move(pop);
    return result;
}

Population nsga2_baseline(Problem& problem, std::size_t population, std::uint64_t evaluations,
                          const VariationParams& params, Rng& rng, const GenerationObserver& observer, Execution exec) {
    require(evaluations >= population, "evaluation budget must cover the initial population");
    const std::uint64_t start = problem.eval_count();
    Population pop = initial_population(problem, population, rng, exec);
    return nsga2_run(problem, std::move(pop), start + evaluations - problem.eval_count(), params, rng, observer, exec);
}

} // namespace lmef
