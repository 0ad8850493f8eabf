#include "lmef/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lmef/error.hpp"

namespace lmef {

std::vector<Vector> objectives_of(const Population& pop) {
    std::vector<Vector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) {
        require(ind.evaluated(), "objectives_of: unevaluated member");
        out.push_back(ind.f());
    }
    return out;
}

std::vector<Vector> genes_of(const Population& pop) {
    std::vector<Vector> out;
    out.reserve(pop.size());
    for (const auto& ind : pop) out.push_back(ind.genes);
    return out;
}

namespace {

bool dominates_unchecked(const Vector& a, const Vector& b) {
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

void check_objectives(std::span<const Vector> objectives) {
    if (objectives.empty()) return;
    const std::size_t m = objectives.front().size();
    for (const auto& f : objectives) {
        require(f.size() == m, "objective vectors differ in length");
        for (double v : f) {
            require(std::isfinite(v), "non-finite objective value");
        }
    }
}

} // namespace

bool dominates(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "dominates: length mismatch");
    bool strictly_better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(std::isfinite(a[i]) && std::isfinite(b[i]), "dominates: non-finite entry");
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly_better = true;
    }
    return strictly_better;
}

std::vector<Front> fast_nondominated_sort(std::span<const Vector> objectives) {
    check_objectives(objectives);
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<Front> fronts;
    Front current;

    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates_unchecked(objectives[p], objectives[q])) {
                dominated[p].push_back(q);
                ++domination_count[q];
            } else if (dominates_unchecked(objectives[q], objectives[p])) {
                dominated[q].push_back(p);
                ++domination_count[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        Front next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated[p]) {
                if (--domination_count[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<Front> fast_nondominated_sort(const Population& pop) {
    require(pop.all_evaluated(), "fast_nondominated_sort: unevaluated member");
    const auto objectives = objectives_of(pop);
    return fast_nondominated_sort(objectives);
}

std::vector<std::size_t> ranks_from_fronts(const std::vector<Front>& fronts, std::size_t size) {
    std::vector<std::size_t> rank(size, 0);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        for (std::size_t i : fronts[r]) rank[i] = r;
    }
    return rank;
}

std::vector<double> crowding_distance(std::span<const Vector> front) {
    require(!front.empty(), "crowding_distance: empty front");
    check_objectives(front);
    const std::size_t size = front.size();
    const std::size_t m = front.front().size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> distance(size, 0.0);
    if (size <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }

    std::vector<std::size_t> order(size);
    for (std::size_t obj = 0; obj < m; ++obj) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (front[a][obj] != front[b][obj]) return front[a][obj] < front[b][obj];
            return a < b;
        });
        // The max slot goes to the lowest index holding the max value, excluding
        // the member already holding the min slot.
        const double max_value = front[order.back()][obj];
        std::size_t pos = size - 1;
        for (std::size_t i = 1; i < size; ++i) {
            if (front[order[i]][obj] == max_value) {
                pos = i;
                break;
            }
        }
        std::rotate(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos) + 1, order.end());

        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double range = max_value - front[order.front()][obj];
        if (range <= 0.0) continue;
        for (std::size_t i = 1; i + 1 < size; ++i) {
            distance[order[i]] += (front[order[i + 1]][obj] - front[order[i - 1]][obj]) / range;
        }
    }
    return distance;
}

Front nondominated_indices(const Population& pop) {
    if (pop.empty()) return {};
    return fast_nondominated_sort(pop).front();
}

} // namespace lmef
