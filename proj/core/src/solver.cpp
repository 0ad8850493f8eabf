#include "lmef/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "lmef/error.hpp"
#include "lmef/pareto.hpp"

namespace lmef {

VariationParams VariationParams::standard(std::size_t n) {
    VariationParams p;
    p.mutation_probability = n > 0 ? 1.0 / static_cast<double>(n) : 1.0;
    return p;
}

void VariationParams::validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    require(in_unit(crossover_probability), "crossover probability must lie in [0, 1]");
    require(in_unit(mutation_probability), "mutation probability must lie in [0, 1]");
    require(std::isfinite(crossover_eta) && crossover_eta > 0.0, "crossover distribution index must be > 0");
    require(std::isfinite(mutation_eta) && mutation_eta > 0.0, "mutation distribution index must be > 0");
}

Population random_population(const Bounds& bounds, std::size_t size, Rng& rng) {
    Population pop(size);
    pop.members.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Vector genes(bounds.size());
        for (std::size_t j = 0; j < genes.size(); ++j) genes[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
        pop.members.emplace_back(std::move(genes));
    }
    return pop;
}

namespace {

struct RankCrowding {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

RankCrowding rank_and_crowding(const Population& pop) {
    const auto objectives = objectives_of(pop);
    const auto fronts = fast_nondominated_sort(objectives);
    RankCrowding rc{ranks_from_fronts(fronts, pop.size()), std::vector<double>(pop.size(), 0.0)};
    for (const auto& front : fronts) {
        std::vector<Vector> f;
        f.reserve(front.size());
        for (std::size_t i : front) f.push_back(objectives[i]);
        const auto d = crowding_distance(f);
        for (std::size_t i = 0; i < front.size(); ++i) rc.crowding[front[i]] = d[i];
    }
    return rc;
}

void sbx_pair(Vector& a, Vector& b, const VariationParams& params, const Bounds& bounds, Rng& rng) {
    constexpr double eps = 1.0e-14;
    const double eta = params.crossover_eta;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (rng.uniform() > 0.5) continue;
        if (std::abs(a[j] - b[j]) <= eps) continue;
        const double y1 = std::min(a[j], b[j]);
        const double y2 = std::max(a[j], b[j]);
        const double lo = bounds.lower[j];
        const double hi = bounds.upper[j];
        const double u = rng.uniform();

        auto spread = [&](double beta) {
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                                    : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
        };
        double c1 = 0.5 * ((y1 + y2) - spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1)) * (y2 - y1));
        double c2 = 0.5 * ((y1 + y2) + spread(1.0 + 2.0 * (hi - y2) / (y2 - y1)) * (y2 - y1));
        c1 = std::clamp(c1, lo, hi);
        c2 = std::clamp(c2, lo, hi);
        if (rng.uniform() <= 0.5) {
            a[j] = c2;
            b[j] = c1;
        } else {
            a[j] = c1;
            b[j] = c2;
        }
    }
}

void polynomial_mutation(Vector& x, const VariationParams& params, const Bounds& bounds, Rng& rng) {
    const double eta = params.mutation_eta;
    const double power = 1.0 / (eta + 1.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (rng.uniform() >= params.mutation_probability) continue;
        const double lo = bounds.lower[j];
        const double hi = bounds.upper[j];
        const double width = hi - lo;
        const double delta1 = (x[j] - lo) / width;
        const double delta2 = (hi - x[j]) / width;
        const double u = rng.uniform();
        double deltaq;
        if (u <= 0.5) {
            const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
            deltaq = std::pow(val, power) - 1.0;
        } else {
            const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
            deltaq = 1.0 - std::pow(val, power);
        }
        x[j] = std::clamp(x[j] + deltaq * width, lo, hi);
    }
}

} // namespace

std::vector<std::size_t> tournament_indices(const Population& pop, std::size_t count, Rng& rng) {
    require(!pop.empty(), "mating_selection: empty population");
    require(pop.all_evaluated(), "mating_selection: unevaluated member");
    const auto rc = rank_and_crowding(pop);
    std::vector<std::size_t> winners;
    winners.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t a = rng.index(pop.size());
        const std::size_t b = rng.index(pop.size());
        std::size_t w;
        if (rc.rank[a] != rc.rank[b]) {
            w = rc.rank[a] < rc.rank[b] ? a : b;
        } else if (rc.crowding[a] != rc.crowding[b]) {
            w = rc.crowding[a] > rc.crowding[b] ? a : b;
        } else {
            w = rng.bernoulli(0.5) ? a : b;
        }
        winners.push_back(w);
    }
    return winners;
}

Population mating_selection(const Population& pop, Rng& rng) {
    const std::size_t count = pop.capacity > 0 ? pop.capacity : pop.size();
    Population parents(pop.capacity);
    parents.members.reserve(count);
    for (std::size_t i : tournament_indices(pop, count, rng)) parents.members.push_back(pop[i]);
    return parents;
}

Population variation(const Population& parents, const VariationParams& params, const Bounds& bounds, Rng& rng) {
    params.validate();
    Population offspring(parents.capacity);
    offspring.members.reserve(parents.size() + 1);
    for (std::size_t i = 0; i < parents.size(); i += 2) {
        Vector a = parents[i].genes;
        Vector b = i + 1 < parents.size() ? parents[i + 1].genes : parents[i].genes;
        if (rng.uniform() < params.crossover_probability) sbx_pair(a, b, params, bounds, rng);
        polynomial_mutation(a, params, bounds, rng);
        polynomial_mutation(b, params, bounds, rng);
        bounds.clamp(a);
        bounds.clamp(b);
        offspring.members.emplace_back(std::move(a));
        offspring.members.emplace_back(std::move(b));
    }
    offspring.members.resize(parents.size());
    return offspring;
}

Population environmental_selection(const Population& pop, std::size_t capacity) {
    if (pop.size() <= capacity) {
        return Population(pop.members, capacity);
    }
    const auto objectives = objectives_of(pop);
    const auto fronts = fast_nondominated_sort(objectives);
    std::vector<std::size_t> keep;
    keep.reserve(capacity);
    for (const auto& front : fronts) {
        if (keep.size() + front.size() <= capacity) {
            keep.insert(keep.end(), front.begin(), front.end());
            if (keep.size() == capacity) break;
            continue;
        }
        std::vector<Vector> f;
        f.reserve(front.size());
        for (std::size_t i : front) f.push_back(objectives[i]);
        const auto d = crowding_distance(f);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] > d[b]; });
        for (std::size_t i = 0; keep.size() < capacity; ++i) keep.push_back(front[order[i]]);
        break;
    }
    std::sort(keep.begin(), keep.end());
    Population out(capacity);
    out.members.reserve(keep.size());
    for (std::size_t i : keep) out.members.push_back(pop[i]);
    return out;
}

std::size_t evaluate_until(Problem& problem, std::span<Individual> members, std::uint64_t eval_limit,
                           Execution exec) {
    std::vector<Individual*> pending;
    for (auto& ind : members) {
        if (!ind.evaluated()) pending.push_back(&ind);
    }
    const std::uint64_t used = problem.eval_count();
    const std::uint64_t room = eval_limit > used ? eval_limit - used : 0;
    const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(room, pending.size()));
    pending.resize(take);

    const unsigned workers = exec == Execution::Parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
    if (workers <= 1 || take < 2) {
        for (auto* ind : pending) evaluate(problem, *ind);
        return take;
    }
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < pending.size(); i += workers) evaluate(problem, *pending[i]);
            });
        }
    }
    return take;
}

Population nsga2_run(Problem& problem, Population init, std::uint64_t budget, const VariationParams& params,
                     Rng& rng, const GenerationObserver& observer, Execution exec) {
    if (budget == 0) return init;
    const std::uint64_t limit = problem.eval_count() + budget;
    if (init.capacity == 0) init.capacity = init.size();

    evaluate_until(problem, init.members, limit, exec);
    std::erase_if(init.members, [](const Individual& ind) { return !ind.evaluated(); });
    Population pop = std::move(init);
    if (pop.empty()) return pop;

    while (problem.eval_count() < limit) {
        const Population parents = mating_selection(pop, rng);
        Population offspring = variation(parents, params, problem.bounds(), rng);
        const std::size_t done = evaluate_until(problem, offspring.members, limit, exec);
        offspring.members.resize(done);

        Population merged(std::move(pop.members), pop.capacity);
        merged.members.insert(merged.members.end(), std::make_move_iterator(offspring.members.begin()),
                              std::make_move_iterator(offspring.members.end()));
        pop = environmental_selection(merged, merged.capacity);
        if (observer) observer(pop, problem.eval_count());
    }
    return pop;
}

} // namespace lmef
