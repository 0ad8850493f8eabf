#include <doctest.h>

#include <set>

#include "lmef/error.hpp"
#include "lmef/interpolate.hpp"
#include "lmef/log.hpp"
#include "lmef/manifold.hpp"
#include "lmef/pareto.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace lmef;

namespace {

Bounds box(std::size_t n, double lo, double hi) { return Bounds{Vector(n, lo), Vector(n, hi)}; }

struct CaptureLog {
    std::vector<std::string> lines;
    LogSink previous;
    CaptureLog() {
        previous = set_log_sink([this](std::string_view msg) { lines.emplace_back(msg); });
    }
    ~CaptureLog() { set_log_sink(previous); }
};

} // namespace

TEST_CASE("extract central latents") {
    Rng rng(1);
    const auto model = make_gan(box(5, 0, 1), rng);
    const auto gen = LatentGenerator::from_gan(model);
    const auto one = sample_latent(1, 4, rng);
    const auto centrals = testing::random_points(rng, 3, 5);
    CHECK(extract_central_latents(gen, one, centrals) == std::vector<Vector>(3, one[0]));

    const auto latents = sample_latent(20, 4, rng);
    auto exact = centrals;
    exact[1] = generate(model, latents[7]);
    CHECK(extract_central_latents(gen, latents, exact)[1] == latents[7]);

    for (int t = 0; t < 50; ++t) {
        const auto zs = sample_latent(20, 4, rng);
        const auto cs = testing::random_points(rng, 3, 5);
        const auto got = extract_central_latents(gen, zs, cs);
        for (std::size_t c = 0; c < 3; ++c) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < zs.size(); ++i)
                if (oracle::dist(generate(model, zs[i]), cs[c]) < oracle::dist(generate(model, zs[best]), cs[c])) best = i;
            CHECK(got[c] == zs[best]);
        }
    }
    CHECK_THROWS_AS(extract_central_latents(gen, std::vector<Vector>{}, centrals), PreconditionError);
}

TEST_CASE("between-cluster interpolation") {
    Rng rng(2);
    const auto model = make_gan(box(6, 0, 10), rng);
    const auto gen = LatentGenerator::from_gan(model);
    const auto latents = sample_latent(3, 5, rng);
    const auto batch = interpolate_between_clusters(gen, latents, 10);
    REQUIRE(batch.size() == 33);
    for (const auto& c : batch.candidates) CHECK(c.provenance == Provenance::BetweenClusters);
    for (std::size_t pair = 0; pair < 3; ++pair) {
        const auto& first = batch.candidates[pair * 11];
        const auto& last = batch.candidates[pair * 11 + 10];
        const auto& mid = batch.candidates[pair * 11 + 5];
        CHECK(first.latent == latents[first.source_a]);
        CHECK(last.latent == latents[last.source_b]);
        const auto ga = generate(model, latents[first.source_a]);
        const auto gb = generate(model, latents[first.source_b]);
        for (std::size_t j = 0; j < 6; ++j) {
            CHECK(std::abs(first.genes[j] - ga[j]) <= 1e-9);
            CHECK(std::abs(last.genes[j] - gb[j]) <= 1e-9);
        }
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(std::abs(mid.latent[j] - 0.5 * (latents[first.source_a][j] + latents[first.source_b][j])) <= 1e-12);
        }
    }
    CaptureLog log;
    CHECK(interpolate_between_clusters(gen, std::vector<Vector>{latents[0]}, 10).empty());
    CHECK(log.lines.size() == 1);
}

TEST_CASE("identity generator reduces latent to decision-space interpolation") {
    Rng rng(3);
    const Bounds bounds{{0, -2, 5}, {1, 2, 9}};
    const Normalizer norm{bounds};
    const auto gen = LatentGenerator::identity(norm);
    CHECK(gen.latent_dim == 3);
    std::vector<Vector> centrals;
    for (const auto& z : sample_latent(3, 3, rng)) centrals.push_back(norm.from_unit(z));
    std::vector<Vector> latents;
    for (const auto& c : centrals) latents.push_back(norm.to_unit(c));
    const auto through_latent = interpolate_between_clusters(gen, latents, 8);
    const auto direct = interpolate_direct(centrals, 8, bounds);
    REQUIRE(through_latent.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(through_latent.candidates[i].genes[j] - direct.candidates[i].genes[j]) <= 1e-9);
}

TEST_CASE("direct interpolation") {
    const Bounds unit{{0.0}, {1.0}};
    const auto batch = interpolate_direct(std::vector<Vector>{{0.0}, {1.0}}, 4, unit);
    REQUIRE(batch.size() == 5);
    const Vector want{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(batch.candidates[i].genes[0] == want[i]);
        CHECK(batch.candidates[i].provenance == Provenance::DirectIp);
    }
    Rng rng(4);
    const Bounds bounds = box(4, -1, 1);
    const auto pts = testing::random_points(rng, 4, 4, -1, 1);
    const auto many = interpolate_direct(pts, 7, bounds);
    CHECK(many.size() == 6 * 8);
    CHECK(many.candidates[0].genes == pts[0]);
    for (const auto& c : many.candidates) CHECK(bounds.contains(c.genes));
    CaptureLog log;
    CHECK(interpolate_direct(std::vector<Vector>{{0.5}}, 4, unit).empty());
    CHECK_FALSE(log.lines.empty());
}

TEST_CASE("in-cluster interpolation") {
    Rng rng(5);
    const auto model = make_gan(box(4, 0, 1), rng);
    const auto gen = LatentGenerator::from_gan(model);
    const auto z = sample_latent(1, 3, rng)[0];
    const std::vector<Vector> twins{z, z};
    const std::vector<std::size_t> same{0, 0};
    const auto twin_batch = interpolate_in_cluster(gen, twins, same, 5, rng);
    REQUIRE(twin_batch.size() == 1);
    CHECK(twin_batch.candidates[0].genes == generate(model, z));
    CHECK(interpolate_in_cluster(gen, twins, same, 0, rng).empty());

    const auto latents = sample_latent(12, 3, rng);
    const std::vector<std::size_t> clusters{0, 1, 0, 0, 1, 2, 0, 1, 0, 0, 1, 1};
    const auto batch = interpolate_in_cluster(gen, latents, clusters, 4, rng);
    CHECK(batch.size() == 8);  // clusters 0 and 1 capped at 4 pairs, cluster 2 has one fake
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& c : batch.candidates) {
        CHECK(c.provenance == Provenance::InCluster);
        CHECK(clusters[c.source_a] == clusters[c.source_b]);
        CHECK(c.source_a != c.source_b);
        CHECK(seen.insert({std::min(c.source_a, c.source_b), std::max(c.source_a, c.source_b)}).second);
        for (double v : c.latent) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("perturbation interpolation") {
    Rng rng(6);
    const auto model = make_gan(box(5, 0, 1), rng);
    const auto gen = LatentGenerator::from_gan(model);
    const auto latents = sample_latent(40, 4, rng);
    const auto batch = interpolate_perturbation(gen, latents, 0.1, rng);
    REQUIRE(batch.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
        const auto& c = batch.candidates[i];
        CHECK(c.provenance == Provenance::Perturbation);
        std::size_t changed = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            changed += c.latent[j] != latents[i][j];
            CHECK(std::abs(c.latent[j]) <= 1.0);
        }
        CHECK(changed == 1);
    }
    const auto tiny = interpolate_perturbation(gen, latents, 1e-15, rng);
    for (std::size_t i = 0; i < 40; ++i) {
        const auto g = generate(model, latents[i]);
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(tiny.candidates[i].genes[j] - g[j]) <= 1e-9);
    }
    CHECK_THROWS_AS(interpolate_perturbation(gen, latents, 0.0, rng), PreconditionError);
}

TEST_CASE("batch provenance counts") {
    InterpolationBatch a;
    a.candidates.resize(3);
    a.candidates[0].provenance = Provenance::BetweenClusters;
    a.candidates[1].provenance = Provenance::InCluster;
    a.candidates[2].provenance = Provenance::InCluster;
    InterpolationBatch b;
    b.candidates.resize(2);
    b.candidates[0].provenance = Provenance::Perturbation;
    a.append(b);
    const auto counts = a.provenance_counts();
    CHECK(counts == ProvenanceCounts{1, 2, 1, 1});
    std::size_t total = 0;
    for (auto c : counts) total += c;
    CHECK(total == a.size());
}

TEST_CASE("assign fakes to nearest projected central") {
    PcaProjection proj;
    proj.mean = {0.0, 0.0};
    proj.components = {{1.0, 0.0}};
    proj.variances = {1.0};
    const std::vector<Vector> centrals{{-1.0}, {2.0}, {5.0}};
    const std::vector<Vector> pts{{-3.0, 7.0}, {0.6, 0.0}, {0.4, 9.0}, {4.0, -1.0}};
    CHECK(assign_to_centrals(proj, pts, centrals) == std::vector<std::size_t>{0, 1, 0, 2});
}

TEST_CASE("manifold selection") {
    Problem problem(ProblemId::LSMOP1, 30, 2);
    Rng rng(7);
    const Bounds& bounds = problem.bounds();

    auto make_pop = [&](std::size_t size) {
        Population pop(size);
        for (std::size_t i = 0; i < size; ++i) {
            Individual ind(testing::random_points(rng, 1, 30, 0.0, 1.0)[0]);
            for (std::size_t j = 1; j < 30; ++j) ind.genes[j] *= 10;
            evaluate(problem, ind);
            pop.members.push_back(ind);
        }
        return pop;
    };

    for (int t = 0; t < 30; ++t) {
        const auto pop = make_pop(10);
        const auto centrals = genes_of(Population({pop[0], pop[1], pop[2]}, 3));
        InterpolationBatch batch = interpolate_direct(centrals, 5, bounds);
        const double sigma = 0.4;
        const std::size_t before = problem.eval_count();
        const auto out = manifold_select(centrals, batch, pop, sigma, problem, before + 1000);

        // Q' equals the brute-force ranking on a fresh PCA of centrals and batch.
        std::vector<Vector> joint = centrals;
        for (const auto& c : batch.candidates) joint.push_back(c.genes);
        const auto proj = pca_fit(joint, problem.m() - 1);
        std::vector<Vector> pc;
        for (const auto& c : centrals) pc.push_back(proj.project(c));
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t i = 0; i < batch.size(); ++i)
            ranked.push_back({oracle::manifold_distance(proj.project(batch.candidates[i].genes), pc), i});
        std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first < b.first; });
        REQUIRE(out.chosen.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(out.chosen[i] == ranked[i].second);
            CHECK(out.chosen_distance[i] == doctest::Approx(ranked[i].first).epsilon(1e-9));
        }
        CHECK(out.evaluated == 4);
        CHECK(problem.eval_count() - before == 4);
        CHECK(out.population.size() == pop.size());

        // Every replaced slot now holds a candidate that dominates the original.
        std::size_t replaced = 0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (out.population[i].genes == pop[i].genes) continue;
            ++replaced;
            CHECK(dominates(out.population[i].f(), pop[i].f()));
        }
        std::size_t accepted = 0;
        for (auto a : out.accepted) accepted += a;
        CHECK(accepted == replaced);
    }

    // A candidate that dominates everybody enters exactly once.
    auto pop = make_pop(6);
    const auto centrals = genes_of(Population({pop[0], pop[1]}, 2));
    InterpolationBatch batch;
    Candidate star;
    star.genes = problem.optimal_genes(Vector{0.5});
    batch.candidates.push_back(star);
    const auto before = problem.eval_count();
    const auto out = manifold_select(centrals, batch, pop, 0.2, problem, before + 100);
    std::size_t copies = 0;
    for (const auto& ind : out.population) copies += ind.genes == star.genes;
    CHECK(copies == 1);
    CHECK(out.accepted[static_cast<std::size_t>(Provenance::DirectIp)] == 1);

    // The evaluation cap truncates Q' to a prefix.
    const auto capped = manifold_select(centrals, interpolate_direct(centrals, 20, bounds), pop, 0.9, problem,
                                        problem.eval_count() + 2);
    CHECK(capped.evaluated == 2);
}
