#include "lmef/manifold.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lmef/error.hpp"

namespace lmef {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

Vector PcaProjection::project(std::span<const double> x) const {
    Vector y(components.size(), 0.0);
    for (std::size_t c = 0; c < components.size(); ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < mean.size(); ++i) s += components[c][i] * (x[i] - mean[i]);
        y[c] = s;
    }
    return y;
}

std::vector<Vector> PcaProjection::project_all(std::span<const Vector> xs) const {
    std::vector<Vector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(project(x));
    return out;
}

Vector PcaProjection::reconstruct(std::span<const double> y) const {
    Vector x = mean;
    for (std::size_t c = 0; c < components.size(); ++c) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += components[c][i] * y[c];
    }
    return x;
}

PcaProjection pca_fit(std::span<const Vector> data, std::size_t target_dim) {
    require(data.size() >= 2, "pca_fit: need at least two points");
    require(target_dim >= 1, "pca_fit: target dimension must be positive");
    const auto rows = static_cast<Eigen::Index>(data.size());
    const auto cols = static_cast<Eigen::Index>(data.front().size());
    require(cols >= 1, "pca_fit: empty points");

    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        require(static_cast<Eigen::Index>(data[r].size()) == cols, "pca_fit: points differ in length");
        for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = data[r][c];
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::MatrixXd& v = svd.matrixV();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    const double cutoff = std::max(largest * 1e-10, std::numeric_limits<double>::min());

    PcaProjection proj;
    proj.mean.assign(mean.data(), mean.data() + cols);
    proj.components.assign(target_dim, Vector(static_cast<std::size_t>(cols), 0.0));
    proj.variances.assign(target_dim, 0.0);
    const double dof = static_cast<double>(rows - 1);
    for (std::size_t c = 0; c < target_dim && static_cast<Eigen::Index>(c) < sv.size(); ++c) {
        const auto ci = static_cast<Eigen::Index>(c);
        if (sv(ci) <= cutoff) break;
        Eigen::VectorXd axis = v.col(ci);
        Eigen::Index arg = 0;
        axis.cwiseAbs().maxCoeff(&arg);
        if (axis(arg) < 0.0) axis = -axis;
        proj.components[c].assign(axis.data(), axis.data() + cols);
        proj.variances[c] = sv(ci) * sv(ci) / dof;
    }
    return proj;
}

std::vector<std::vector<std::size_t>> ClusterModel::members() const {
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].push_back(i);
    return out;
}

namespace {

std::size_t nearest(std::span<const double> x, const std::vector<Vector>& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

} // namespace

ClusterModel kmeans(std::span<const Vector> points, std::size_t k, Rng& rng, std::size_t max_iterations) {
    require(k >= 1, "kmeans: k must be positive");
    require(points.size() >= k, "kmeans: fewer points than clusters");
    const std::size_t count = points.size();
    const std::size_t dim = points.front().size();

    // Partial Fisher-Yates over point indices picks k distinct seeds.
    std::vector<std::size_t> pool(count);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.index(count - i)]);
    }

    ClusterModel model;
    model.k = k;
    for (std::size_t i = 0; i < k; ++i) model.centroids.push_back(points[pool[i]]);
    model.assignments.assign(count, k);  // sentinel: nothing assigned yet

    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        std::vector<std::size_t> next(count);
        for (std::size_t i = 0; i < count; ++i) next[i] = nearest(points[i], model.centroids);

        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t c : next) ++sizes[c];
        for (std::size_t empty = 0; empty < k; ++empty) {
            if (sizes[empty] != 0) continue;
            std::size_t far = count;
            double far_d = -1.0;
            for (std::size_t i = 0; i < count; ++i) {
                if (sizes[next[i]] < 2) continue;
                const double d = squared_distance(points[i], model.centroids[next[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == count) break;
            --sizes[next[far]];
            next[far] = empty;
            sizes[empty] = 1;
        }

        const bool changed = next != model.assignments;
        model.assignments = std::move(next);
        model.iterations = iter + 1;

        std::vector<Vector> sums(k, Vector(dim, 0.0));
        for (std::size_t i = 0; i < count; ++i) {
            auto& s = sums[model.assignments[i]];
            for (std::size_t d = 0; d < dim; ++d) s[d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d) model.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
        }
        double sse = 0.0;
        for (std::size_t i = 0; i < count; ++i) sse += squared_distance(points[i], model.centroids[model.assignments[i]]);
        model.objective_trace.push_back(sse);

        if (!changed) break;
    }
    return model;
}

ClusterModel central_solutions(std::span<const Vector> projected, ClusterModel clusters) {
    require(clusters.assignments.size() == projected.size(), "central_solutions: assignment size mismatch");
    clusters.centrals.assign(clusters.k, projected.size());
    std::vector<double> best(clusters.k, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < projected.size(); ++i) {
        const std::size_t c = clusters.assignments[i];
        const double d = squared_distance(projected[i], clusters.centroids[c]);
        if (d < best[c]) {
            best[c] = d;
            clusters.centrals[c] = i;
        }
    }
    for (std::size_t c = 0; c < clusters.k; ++c) {
        require(clusters.centrals[c] < projected.size(), "central_solutions: empty cluster");
    }
    return clusters;
}

double manifold_distance(std::span<const double> x, std::span<const Vector> centrals) {
    require(centrals.size() >= 2, "manifold_distance: need at least two centrals");
    double first = std::numeric_limits<double>::infinity();
    double second = first;
    for (const auto& c : centrals) {
        const double d = euclidean_distance(x, c);
        if (d < first) {
            second = first;
            first = d;
        } else if (d < second) {
            second = d;
        }
    }
    return first + second;
}

CentralSolutions compute_central_solutions(std::span<const Vector> nondominated_genes, std::size_t manifold_dim,
                                           std::size_t k, Rng& rng) {
    require(!nondominated_genes.empty(), "compute_central_solutions: empty nondominated set");
    CentralSolutions out;
    if (nondominated_genes.size() == 1) {
        out.projection.mean = nondominated_genes.front();
        out.projection.components.assign(manifold_dim, Vector(nondominated_genes.front().size(), 0.0));
        out.projection.variances.assign(manifold_dim, 0.0);
    } else {
        out.projection = pca_fit(nondominated_genes, manifold_dim);
    }
    out.projected = out.projection.project_all(nondominated_genes);
    const std::size_t clusters = std::min(k, nondominated_genes.size());
    out.clusters = central_solutions(out.projected, kmeans(out.projected, clusters, rng));
    return out;
}

} // namespace lmef
