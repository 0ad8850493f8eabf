#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmef/population.hpp"

namespace lmef {

enum class ProblemId { LSMOP1 = 1, LSMOP2, LSMOP3, LSMOP4, LSMOP5, LSMOP6, LSMOP7, LSMOP8, LSMOP9 };

/// Parses "LSMOP1".."LSMOP9" (case-insensitive). Throws PreconditionError otherwise.
ProblemId parse_problem_id(std::string_view text);
std::string to_string(ProblemId id);

/// Base landscape functions applied to each variable subcomponent.
enum class Landscape { Sphere, Schwefel, Rosenbrock, Rastrigin, Griewank, Ackley };

double landscape_value(Landscape fn, std::span<const double> x);
/// Location of the landscape's global minimum along every coordinate.
double landscape_optimum(Landscape fn);

/// One LSMOP benchmark instance.
///
/// Variables x[0..m-2] are position variables on [0, 1]; x[m-1..n-1] are
/// distance variables on [0, 10]. Distance variables are linked to x[0]
/// (linearly for LSMOP1-4, through a cosine factor for LSMOP5-9), then split
/// into m groups of nk = 5 subcomponents whose sizes follow a logistic-map
/// sequence. Each objective's group is scored by the odd/even landscape
/// pair of the instance.
class Problem {
public:
    static constexpr std::size_t kSubcomponents = 5;

    /// Throws PreconditionError when m < 2, n < m, or n is too small for
    /// every group to receive at least one variable per subcomponent.
    Problem(ProblemId id, std::size_t n, std::size_t m);

    Problem(const Problem&) = delete;
    Problem& operator=(const Problem&) = delete;

    ProblemId id() const noexcept { return id_; }
    std::string name() const { return to_string(id_); }
    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    const Bounds& bounds() const noexcept { return bounds_; }
    const std::vector<std::size_t>& subcomponent_sizes() const noexcept { return sublen_; }

    /// Objective vector of `genes`; increments eval_count by one.
    /// Throws PreconditionError on a length mismatch or out-of-bounds gene.
    Vector evaluate(std::span<const double> genes);

    std::uint64_t eval_count() const noexcept { return eval_count_.load(std::memory_order_relaxed); }

    /// Pareto-optimal decision vector whose position variables equal `position`
    /// (length m-1, each on [0, 1]). For LSMOP9 the result is on the front only
    /// when the position lies in the front's disconnected segments; see
    /// front_position(). For LSMOP6 and LSMOP7 the Rosenbrock groups put the
    /// optimum outside the box once position[0] > 0.9; genes are clamped there.
    Vector optimal_genes(std::span<const double> position) const;

    /// Maps u in [0,1]^(m-1) to a position lying on the Pareto front. Identity
    /// except for LSMOP9, whose segments are stretched to cover u.
    Vector front_position(std::span<const double> u) const;

    /// Landscape pair (odd-indexed objective groups, even-indexed groups).
    std::pair<Landscape, Landscape> landscapes() const noexcept;
    bool nonlinear_linkage() const noexcept { return id_ >= ProblemId::LSMOP5; }

private:
    Vector linked_distance_variables(std::span<const double> genes) const;
    Vector group_values(std::span<const double> linked) const;

    ProblemId id_;
    std::size_t n_;
    std::size_t m_;
    Bounds bounds_;
    std::vector<std::size_t> sublen_;
    std::vector<std::size_t> group_offset_;
    std::atomic<std::uint64_t> eval_count_{0};
};

/// Evaluates an individual in place through the problem's counter.
void evaluate(Problem& problem, Individual& ind);

/// Sampled true Pareto front.
struct ReferenceFront {
    std::vector<Vector> points;
    std::size_t count() const noexcept { return points.size(); }
};

/// Approximately uniform sample of the analytic Pareto front.
///
/// For m = 2 exactly `count` points are returned (evenly spaced in the front
/// parameter). For m >= 3 the simplex lattice with the largest resolution
/// not exceeding `count` points is used, so fewer points may come back.
/// Points are filtered to be mutually nondominated.
/// Throws PreconditionError when count < m.
ReferenceFront sample_reference_front(const Problem& problem, std::size_t count);

/// Default reference-front density used by the experiment harness.
std::size_t default_reference_size(std::size_t m);

/// Deviation of an objective vector from the analytic front of `id`
/// (0 on the front). Used by tests and diagnostics.
double front_residual(ProblemId id, std::span<const double> f);

} // namespace lmef
