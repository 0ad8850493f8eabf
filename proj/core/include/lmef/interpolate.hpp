#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "lmef/gan.hpp"
#include "lmef/manifold.hpp"
#include "lmef/population.hpp"
#include "lmef/problems.hpp"
#include "lmef/rng.hpp"
#include "lmef/solver.hpp"

namespace lmef {

enum class Provenance { BetweenClusters = 0, InCluster, Perturbation, DirectIp };
inline constexpr std::size_t kProvenanceCount = 4;
using ProvenanceCounts = std::array<std::size_t, kProvenanceCount>;

std::string_view to_string(Provenance p);

inline constexpr std::size_t kNoSource = std::numeric_limits<std::size_t>::max();

struct Candidate {
    Vector genes;
    Provenance provenance = Provenance::DirectIp;
    Vector latent;                   // empty for decision-space candidates
    std::size_t source_a = kNoSource;  // central or latent index
    std::size_t source_b = kNoSource;
    double alpha = 0.0;              // mixing weight for between-cluster / direct candidates
};

struct InterpolationBatch {
    std::vector<Candidate> candidates;

    std::size_t size() const noexcept { return candidates.size(); }
    bool empty() const noexcept { return candidates.empty(); }
    void append(InterpolationBatch other);
    ProvenanceCounts provenance_counts() const;
};

/// Maps a latent code to a decision vector. GAN generators and test stubs
/// both plug in here.
struct LatentGenerator {
    std::size_t latent_dim = 0;
    std::function<Vector(std::span<const double>)> generate;

    /// Borrows `model`; it must outlive the returned generator.
    static LatentGenerator from_gan(const GanModel& model);
    /// latent_dim == n, x = denormalize(z) clamped to bounds.
    static LatentGenerator identity(const Normalizer& normalizer);
};

/// For each central, the latent whose generation lies nearest to it
/// (Euclidean, decision space, lowest latent index on ties).
std::vector<Vector> extract_central_latents(const LatentGenerator& gen, std::span<const Vector> latents,
                                            std::span<const Vector> centrals);

/// G((1-a) z_i + a z_j) for every unordered central pair and a = l/steps,
/// l = 0..steps. Fewer than two latents yields an empty batch and a warning.
InterpolationBatch interpolate_between_clusters(const LatentGenerator& gen, std::span<const Vector> central_latents,
                                                std::size_t steps);

/// For each cluster, up to `pair_cap` random distinct latent pairs (a, b)
/// produce G((z_a + z_b) / 2). `cluster_of[i]` is the cluster of latents[i].
InterpolationBatch interpolate_in_cluster(const LatentGenerator& gen, std::span<const Vector> latents,
                                          std::span<const std::size_t> cluster_of, std::size_t pair_cap, Rng& rng);

/// One Gaussian kick per latent on a uniformly chosen coordinate, clamped to [-1, 1].
InterpolationBatch interpolate_perturbation(const LatentGenerator& gen, std::span<const Vector> latents, double stddev,
                                            Rng& rng);

/// Decision-space segments (1-a) C_i + a C_j between every central pair,
/// clamped to bounds (the direct interpolation ablation).
InterpolationBatch interpolate_direct(std::span<const Vector> centrals, std::size_t steps, const Bounds& bounds);

/// Index of the nearest projected central for every point.
std::vector<std::size_t> assign_to_centrals(const PcaProjection& projection, std::span<const Vector> points,
                                            std::span<const Vector> centrals_projected);

struct SelectionOutcome {
    Population population;
    std::vector<std::size_t> chosen;       // batch indices of Q', ascending manifold distance
    std::vector<double> chosen_distance;   // manifold distance of each chosen candidate
    std::size_t evaluated = 0;
    ProvenanceCounts accepted{};
};

/// Manifold selection: PCA on centrals + batch, rank candidates by manifold
/// distance, evaluate the floor(sigma * capacity) best within `eval_limit`, and
/// let each evaluated candidate replace the first not-yet-replaced member it
/// dominates. With a single central the rank is the distance to it.
SelectionOutcome manifold_select(std::span<const Vector> centrals, const InterpolationBatch& batch, Population pop,
                                 double sigma, Problem& problem, std::uint64_t eval_limit,
                                 Execution exec = Execution::Serial);

} // namespace lmef
