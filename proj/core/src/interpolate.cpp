#include "lmef/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <cassert>

#include "lmef/error.hpp"
#include "lmef/log.hpp"
#include "lmef/pareto.hpp"

namespace lmef {

std::string_view to_string(Provenance p) {
    switch (p) {
    case Provenance::BetweenClusters: return "between_clusters";
    case Provenance::InCluster: return "in_cluster";
    case Provenance::Perturbation: return "perturbation";
    case Provenance::DirectIp: return "direct_ip";
    }
    return "unknown";
}

void InterpolationBatch::append(InterpolationBatch other) {
    candidates.insert(candidates.end(), std::make_move_iterator(other.candidates.begin()),
                      std::make_move_iterator(other.candidates.end()));
}

ProvenanceCounts InterpolationBatch::provenance_counts() const {
    ProvenanceCounts counts{};
    for (const auto& c : candidates) ++counts[static_cast<std::size_t>(c.provenance)];
    return counts;
}

LatentGenerator LatentGenerator::from_gan(const GanModel& model) {
    return LatentGenerator{model.latent_dim(), [&model](std::span<const double> z) { return lmef::generate(model, z); }};
}

LatentGenerator LatentGenerator::identity(const Normalizer& normalizer) {
    return LatentGenerator{normalizer.bounds.size(), [normalizer](std::span<const double> z) {
                               Vector x = normalizer.from_unit(z);
                               normalizer.bounds.clamp(x);
                               return x;
                           }};
}

std::vector<Vector> extract_central_latents(const LatentGenerator& gen, std::span<const Vector> latents,
                                            std::span<const Vector> centrals) {
    require(!latents.empty(), "extract_central_latents: no latents");
    std::vector<Vector> generated;
    generated.reserve(latents.size());
    for (const auto& z : latents) generated.push_back(gen.generate(z));

    std::vector<Vector> out;
    out.reserve(centrals.size());
    for (const auto& c : centrals) {
        std::size_t best = 0;
        double best_d = squared_distance(generated[0], c);
        for (std::size_t i = 1; i < generated.size(); ++i) {
            const double d = squared_distance(generated[i], c);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        out.push_back(latents[best]);
    }
    return out;
}

InterpolationBatch interpolate_between_clusters(const LatentGenerator& gen, std::span<const Vector> central_latents,
                                                std::size_t steps) {
    InterpolationBatch batch;
    if (central_latents.size() < 2) {
        log_warning("between-cluster interpolation needs at least two clusters; skipped");
        return batch;
    }
    require(steps >= 1, "interpolate_between_clusters: steps must be positive");
    const std::size_t k = central_latents.size();
    batch.candidates.reserve(k * (k - 1) / 2 * (steps + 1));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const Vector& zi = central_latents[i];
            const Vector& zj = central_latents[j];
            for (std::size_t l = 0; l <= steps; ++l) {
                const double alpha = static_cast<double>(l) / static_cast<double>(steps);
                Vector z(zi.size());
                for (std::size_t d = 0; d < z.size(); ++d) z[d] = (1.0 - alpha) * zi[d] + alpha * zj[d];
                Candidate c;
                c.genes = gen.generate(z);
                c.provenance = Provenance::BetweenClusters;
                c.latent = std::move(z);
                c.source_a = i;
                c.source_b = j;
                c.alpha = alpha;
                batch.candidates.push_back(std::move(c));
            }
        }
    }
    return batch;
}

InterpolationBatch interpolate_in_cluster(const LatentGenerator& gen, std::span<const Vector> latents,
                                          std::span<const std::size_t> cluster_of, std::size_t pair_cap, Rng& rng) {
    require(cluster_of.size() == latents.size(), "interpolate_in_cluster: one cluster label per latent required");
    InterpolationBatch batch;
    if (pair_cap == 0 || latents.empty()) return batch;
    const std::size_t k = *std::max_element(cluster_of.begin(), cluster_of.end()) + 1;
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < latents.size(); ++i) members[cluster_of[i]].push_back(i);

    for (const auto& group : members) {
        if (group.size() < 2) continue;
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t b = a + 1; b < group.size(); ++b) pairs.emplace_back(group[a], group[b]);
        }
        const std::size_t take = std::min(pair_cap, pairs.size());
        for (std::size_t i = 0; i < take; ++i) std::swap(pairs[i], pairs[i + rng.index(pairs.size() - i)]);
        for (std::size_t i = 0; i < take; ++i) {
            const auto [a, b] = pairs[i];
            Vector z(latents[a].size());
            for (std::size_t d = 0; d < z.size(); ++d) z[d] = (latents[a][d] + latents[b][d]) / 2.0;
            Candidate c;
            c.genes = gen.generate(z);
            c.provenance = Provenance::InCluster;
            c.latent = std::move(z);
            c.source_a = a;
            c.source_b = b;
            c.alpha = 0.5;
            batch.candidates.push_back(std::move(c));
        }
    }
    return batch;
}

InterpolationBatch interpolate_perturbation(const LatentGenerator& gen, std::span<const Vector> latents, double stddev,
                                            Rng& rng) {
    require(stddev > 0.0 && std::isfinite(stddev), "interpolate_perturbation: stddev must be positive");
    InterpolationBatch batch;
    batch.candidates.reserve(latents.size());
    for (std::size_t i = 0; i < latents.size(); ++i) {
        Vector z = latents[i];
        require(!z.empty(), "interpolate_perturbation: empty latent");
        const std::size_t d = rng.index(z.size());
        z[d] = std::clamp(z[d] + rng.normal(0.0, stddev), -1.0, 1.0);
        Candidate c;
        c.genes = gen.generate(z);
        c.provenance = Provenance::Perturbation;
        c.latent = std::move(z);
        c.source_a = i;
        batch.candidates.push_back(std::move(c));
    }
    return batch;
}

InterpolationBatch interpolate_direct(std::span<const Vector> centrals, std::size_t steps, const Bounds& bounds) {
    InterpolationBatch batch;
    if (centrals.size() < 2) {
        log_warning("direct interpolation needs at least two centrals; skipped");
        return batch;
    }
    require(steps >= 1, "interpolate_direct: steps must be positive");
    for (std::size_t i = 0; i < centrals.size(); ++i) {
        for (std::size_t j = i + 1; j < centrals.size(); ++j) {
            for (std::size_t l = 0; l <= steps; ++l) {
                const double alpha = static_cast<double>(l) / static_cast<double>(steps);
                Vector x(centrals[i].size());
                for (std::size_t d = 0; d < x.size(); ++d) x[d] = (1.0 - alpha) * centrals[i][d] + alpha * centrals[j][d];
                bounds.clamp(x);
                Candidate c;
                c.genes = std::move(x);
                c.provenance = Provenance::DirectIp;
                c.source_a = i;
                c.source_b = j;
                c.alpha = alpha;
                batch.candidates.push_back(std::move(c));
            }
        }
    }
    return batch;
}

std::vector<std::size_t> assign_to_centrals(const PcaProjection& projection, std::span<const Vector> points,
                                            std::span<const Vector> centrals_projected) {
    require(!centrals_projected.empty(), "assign_to_centrals: no centrals");
    std::vector<std::size_t> out;
    out.reserve(points.size());
    for (const auto& x : points) {
        const Vector y = projection.project(x);
        std::size_t best = 0;
        double best_d = squared_distance(y, centrals_projected[0]);
        for (std::size_t c = 1; c < centrals_projected.size(); ++c) {
            const double d = squared_distance(y, centrals_projected[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out.push_back(best);
    }
    return out;
}

SelectionOutcome manifold_select(std::span<const Vector> centrals, const InterpolationBatch& batch, Population pop,
                                 double sigma, Problem& problem, std::uint64_t eval_limit, Execution exec) {
    require(!batch.empty(), "manifold_select: empty candidate batch");
    require(!centrals.empty(), "manifold_select: no centrals");
    require(sigma > 0.0 && sigma <= 1.0, "manifold_select: sigma must lie in (0, 1]");
    require(pop.all_evaluated(), "manifold_select: unevaluated population member");

    std::vector<Vector> points(centrals.begin(), centrals.end());
    for (const auto& c : batch.candidates) points.push_back(c.genes);
    const PcaProjection projection = pca_fit(points, problem.m() - 1);
    const auto central_proj = projection.project_all(centrals);

    std::vector<double> score(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Vector y = projection.project(batch.candidates[i].genes);
        if (central_proj.size() >= 2) {
            score[i] = manifold_distance(y, central_proj);
        } else {
            score[i] = euclidean_distance(y, central_proj.front());
        }
    }
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

    const auto quota = static_cast<std::size_t>(std::floor(sigma * static_cast<double>(pop.capacity)));
    order.resize(std::min(quota, order.size()));

    SelectionOutcome out;
    std::vector<Individual> selected;
    selected.reserve(order.size());
    for (std::size_t i : order) selected.emplace_back(batch.candidates[i].genes);
    out.evaluated = evaluate_until(problem, selected, eval_limit, exec);
    selected.resize(out.evaluated);
    order.resize(out.evaluated);
    out.chosen = order;
    for (std::size_t i : order) out.chosen_distance.push_back(score[i]);

    std::vector<bool> replaced(pop.size(), false);
    for (std::size_t s = 0; s < selected.size(); ++s) {
        const Vector& f = selected[s].f();
        for (std::size_t p = 0; p < pop.size(); ++p) {
            if (replaced[p] || !dominates(f, pop[p].f())) continue;
            assert(dominates(f, pop[p].f()));
            pop[p] = selected[s];
            replaced[p] = true;
            ++out.accepted[static_cast<std::size_t>(batch.candidates[order[s]].provenance)];
            break;
        }
    }
    out.population = std::move(pop);
    return out;
}

} // namespace lmef
