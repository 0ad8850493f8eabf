#include <doctest.h>

#include "lmef/error.hpp"
#include "lmef/lmef.hpp"
#include "lmef/metrics.hpp"
#include "lmef/pareto.hpp"
#include "lmef/solver.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace lmef;

TEST_CASE("variation params") {
    const auto p = VariationParams::standard(50);
    CHECK(p.crossover_probability == 1.0);
    CHECK(p.crossover_eta == 20.0);
    CHECK(p.mutation_probability == doctest::Approx(0.02));
    CHECK(p.mutation_eta == 20.0);
    auto bad = p;
    bad.crossover_probability = 1.5;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = p;
    bad.mutation_eta = 0.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("mating selection") {
    Rng rng(1);
    const auto single = testing::population_from({{1, 1}}, 6);
    const auto parents = mating_selection(single, rng);
    CHECK(parents.size() == 6);
    for (const auto& p : parents) CHECK(p.genes == single[0].genes);

    CHECK_THROWS_AS(mating_selection(Population(4), rng), PreconditionError);

    const auto pair = testing::population_from({{1, 1}, {2, 2}}, 2);
    std::size_t wins = 0;
    const std::size_t trials = 10000;
    for (std::size_t i : tournament_indices(pair, trials, rng)) wins += i == 0;
    CHECK(static_cast<double>(wins) / trials == doctest::Approx(0.75).epsilon(0.02));

    Rng a(5), b(5);
    Rng c(6);
    const auto pts = testing::random_points(c, 30, 2);
    const auto pop = testing::population_from(pts, 30);
    CHECK(tournament_indices(pop, 100, a) == tournament_indices(pop, 100, b));
}

TEST_CASE("variation") {
    Rng rng(2);
    Bounds bounds{Vector(5, -1.0), Vector(5, 2.0)};
    Population parents(6);
    for (int i = 0; i < 5; ++i) parents.members.emplace_back(testing::random_points(rng, 1, 5, -1.0, 2.0)[0]);

    VariationParams off{0.0, 20.0, 0.0, 20.0};
    const auto same = variation(parents, off, bounds, rng);
    REQUIRE(same.size() == parents.size());
    for (std::size_t i = 0; i < same.size(); ++i) {
        CHECK(same[i].genes == parents[i].genes);
        CHECK_FALSE(same[i].evaluated());
    }

    Bounds unit{Vector{0.0}, Vector{1.0}};
    VariationParams mutate{0.0, 20.0, 1.0, 20.0};
    std::size_t moved = 0;
    for (int t = 0; t < 1000; ++t) {
        Population one(1);
        one.members.emplace_back(Vector{rng.uniform()});
        moved += variation(one, mutate, unit, rng)[0].genes != one[0].genes;
    }
    CHECK(moved > 990);

    Bounds wide{Vector(500, 0.0), Vector(500, 10.0)};
    const auto params = VariationParams::standard(500);
    for (int t = 0; t < 50; ++t) {
        Population ps(200);
        for (const auto& g : testing::random_points(rng, 200, 500, 0.0, 10.0)) ps.members.emplace_back(g);
        for (const auto& child : variation(ps, params, wide, rng)) REQUIRE(wide.contains(child.genes));
    }
}

TEST_CASE("environmental selection") {
    const auto small = testing::population_from({{1, 2}, {2, 1}}, 5);
    CHECK(environmental_selection(small, 5).size() == 2);

    const auto three = testing::population_from({{1, 2}, {3, 3}, {2, 1}}, 2);
    const auto kept = environmental_selection(three, 2);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].genes[0] == 0.0);
    CHECK(kept[1].genes[0] == 2.0);

    Rng rng(3);
    for (int t = 0; t < 300; ++t) {
        const auto pts = t % 2 ? testing::random_points(rng, 40, 2 + t % 3 / 2) : testing::grid_points(rng, 40, 2, 6);
        const auto chosen = environmental_selection(testing::population_from(pts, 20), 20);
        std::vector<std::size_t> got;
        for (const auto& ind : chosen) got.push_back(static_cast<std::size_t>(ind.genes[0]));
        REQUIRE(got == oracle::survivors(pts, 20));
    }
}

TEST_CASE("evaluate_until stops exactly at the cap") {
    Problem p(ProblemId::LSMOP1, 30, 2);
    Rng rng(4);
    auto pop = random_population(p.bounds(), 10, rng);
    CHECK(evaluate_until(p, pop.members, 7) == 7);
    CHECK(p.eval_count() == 7);
    for (std::size_t i = 0; i < pop.size(); ++i) CHECK(pop[i].evaluated() == (i < 7));
    CHECK(evaluate_until(p, pop.members, 100, Execution::Parallel) == 3);
    CHECK(pop.all_evaluated());
}

TEST_CASE("nsga2 budget, improvement and determinism") {
    const auto params = VariationParams::standard(100);
    {
        Problem p(ProblemId::LSMOP1, 100, 2);
        Rng rng(1);
        const auto init = initial_population(p, 50, rng);
        const auto after_init = p.eval_count();
        const auto same = nsga2_run(p, init, 0, params, rng);
        CHECK(p.eval_count() == after_init);
        REQUIRE(same.size() == init.size());
        for (std::size_t i = 0; i < init.size(); ++i) CHECK(same[i].genes == init[i].genes);

        const auto ref = sample_reference_front(p, 1000);
        const auto final_pop = nsga2_run(p, init, 5000, params, rng);
        CHECK(p.eval_count() - after_init == 5000);
        CHECK(igd(ref, objectives_of(final_pop)) < igd(ref, objectives_of(init)));
    }

    Rng budgets(9);
    for (int t = 0; t < 20; ++t) {
        Problem p(ProblemId::LSMOP5, 40, 2);
        Rng rng(t);
        const std::uint64_t budget = budgets.index(700);
        auto init = random_population(p.bounds(), 20, rng);
        nsga2_run(p, init, budget, VariationParams::standard(40), rng);
        CHECK(p.eval_count() == budget);
    }

    auto run = [&](std::uint64_t seed) {
        Problem p(ProblemId::LSMOP3, 60, 2);
        Rng rng(seed);
        return nsga2_baseline(p, 20, 1000, VariationParams::standard(60), rng);
    };
    const auto a = run(77), b = run(77);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].genes == b[i].genes);
        CHECK(a[i].f() == b[i].f());
    }
}

TEST_CASE("nsga2 elitism") {
    Problem p(ProblemId::LSMOP2, 60, 2);
    Rng rng(6);
    const auto params = VariationParams::standard(60);
    auto pop = initial_population(p, 20, rng);
    for (int gen = 0; gen < 30; ++gen) {
        const auto next = nsga2_run(p, pop, 20, params, rng);
        for (std::size_t i : nondominated_indices(pop)) {
            bool dominated_by_all = true;
            for (const auto& ind : next) dominated_by_all = dominated_by_all && dominates(ind.f(), pop[i].f());
            CHECK_FALSE(dominated_by_all);
        }
        // Nothing from generation t dominates the new first front.
        for (std::size_t j : nondominated_indices(next))
            for (const auto& old : pop) CHECK_FALSE(dominates(old.f(), next[j].f()));
        pop = next;
    }
}
