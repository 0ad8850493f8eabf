#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmef/population.hpp"
#include "lmef/rng.hpp"

namespace lmef {

/// Linear projection onto the leading principal axes of a point set.
///
/// Components are unit vectors sign-normalized so that their largest-magnitude
/// coordinate is positive. Axes the data does not span (rank deficiency or
/// fewer points than target_dim + 1) are zero vectors with zero variance.
struct PcaProjection {
    Vector mean;
    std::vector<Vector> components;
    Vector variances;

    std::size_t dim() const noexcept { return components.size(); }
    Vector project(std::span<const double> x) const;
    std::vector<Vector> project_all(std::span<const Vector> xs) const;
    Vector reconstruct(std::span<const double> y) const;
};

/// Fits a PCA projection to `data` (rows are points). Throws PreconditionError
/// when fewer than two points are given or target_dim is zero.
PcaProjection pca_fit(std::span<const Vector> data, std::size_t target_dim);

struct ClusterModel {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;
    std::vector<Vector> centroids;
    std::vector<std::size_t> centrals;  // empty until central_solutions() runs
    std::size_t iterations = 0;
    std::vector<double> objective_trace;  // within-cluster SSE after each Lloyd step

    std::vector<std::vector<std::size_t>> members() const;
};

/// Lloyd's k-means with seeded initialization on k distinct points.
///
/// Empty clusters are repaired once per iteration by moving in the point
/// farthest from its centroid. Stops when no assignment changes or after
/// `max_iterations`. Throws PreconditionError when points.size() < k or k == 0.
ClusterModel kmeans(std::span<const Vector> points, std::size_t k, Rng& rng, std::size_t max_iterations = 100);

/// Fills `centrals` with, for each cluster, the member nearest its centroid
/// (lowest index on ties). Throws PreconditionError on an empty cluster.
ClusterModel central_solutions(std::span<const Vector> projected, ClusterModel clusters);

/// Sum of the Euclidean distances from x to its two nearest centrals.
/// Throws PreconditionError with fewer than two centrals.
double manifold_distance(std::span<const double> x, std::span<const Vector> centrals);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Result of mapping a nondominated set to its (m-1)-dimensional manifold and
/// picking one representative per cluster.
struct CentralSolutions {
    PcaProjection projection;
    std::vector<Vector> projected;  // projection of every input point
    ClusterModel clusters;          // centrals index into the input points
};

/// PCA to m-1 dims, k-means with min(k, |points|) clusters, then centrals.
CentralSolutions compute_central_solutions(std::span<const Vector> nondominated_genes, std::size_t manifold_dim,
                                           std::size_t k, Rng& rng);

} // namespace lmef
