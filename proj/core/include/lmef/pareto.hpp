#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lmef/population.hpp"

namespace lmef {

using Front = std::vector<std::size_t>;

/// Pareto dominance under minimization, exact floating comparison.
/// Throws PreconditionError on length mismatch or non-finite entries.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Deb's fast nondominated sort. Fronts hold member indices in ascending order.
std::vector<Front> fast_nondominated_sort(std::span<const Vector> objectives);
std::vector<Front> fast_nondominated_sort(const Population& pop);

/// Rank (front index) of every member, derived from the fronts.
std::vector<std::size_t> ranks_from_fronts(const std::vector<Front>& fronts, std::size_t size);

/// NSGA-II crowding distance of one front.
///
/// Boundary members get +inf. When several members share an extreme value the
/// lowest index takes the +inf slot. Objectives with zero range contribute 0.
std::vector<double> crowding_distance(std::span<const Vector> front);

/// Indices of the nondominated members of a population (front 0).
Front nondominated_indices(const Population& pop);

} // namespace lmef
