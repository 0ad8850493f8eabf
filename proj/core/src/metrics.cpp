#include "lmef/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "lmef/error.hpp"
#include "lmef/manifold.hpp"

namespace lmef {

std::string_view to_string(IgdForm form) {
    return form == IgdForm::Squared ? "squared" : "plain";
}

IgdForm parse_igd_form(std::string_view text) {
    if (text == "squared") return IgdForm::Squared;
    if (text == "plain") return IgdForm::Plain;
    throw PreconditionError("unknown IGD form '" + std::string(text) + "' (expected squared|plain)");
}

double igd(std::span<const Vector> reference, std::span<const Vector> obtained, IgdForm form) {
    require(!reference.empty(), "igd: empty reference set");
    require(!obtained.empty(), "igd: empty obtained set");
    const std::size_t m = reference.front().size();
    for (const auto& p : obtained) require(p.size() == m, "igd: objective count mismatch");
    double total = 0.0;
    for (const auto& r : reference) {
        require(r.size() == m, "igd: objective count mismatch");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : obtained) best = std::min(best, squared_distance(r, p));
        total += form == IgdForm::Squared ? best : std::sqrt(best);
    }
    return total / static_cast<double>(reference.size());
}

double igd(const ReferenceFront& reference, std::span<const Vector> obtained, IgdForm form) {
    return igd(reference.points, obtained, form);
}

double spacing(std::span<const Vector> front) {
    require(front.size() >= 2, "spacing: need at least two points");
    const std::size_t count = front.size();
    std::vector<double> nearest(count, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            if (i != j) nearest[i] = std::min(nearest[i], euclidean_distance(front[i], front[j]));
        }
    }
    const double avg = mean(nearest);
    double ss = 0.0;
    for (double e : nearest) ss += (e - avg) * (e - avg);
    return std::sqrt(ss / static_cast<double>(count - 1));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return ss / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

std::vector<SummaryRow> aggregate(std::span<const RunRecord> records) {
    using Key = std::tuple<std::string, std::string, std::size_t, std::size_t>;
    std::vector<Key> order;
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> cells;
    for (const auto& r : records) {
        if (!r.ok()) continue;
        Key key{r.algorithm, r.problem, r.n, r.m};
        auto [it, inserted] = cells.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.first.push_back(r.igd);
        it->second.second.push_back(r.sp);
    }
    std::vector<SummaryRow> rows;
    for (const auto& key : order) {
        const auto& [igds, sps] = cells.at(key);
        SummaryRow row;
        std::tie(row.algorithm, row.problem, row.n, row.m) = key;
        row.runs = igds.size();
        row.igd_mean = mean(igds);
        row.igd_variance = population_variance(igds);
        row.sp_mean = mean(sps);
        row.sp_variance = population_variance(sps);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

// Midranks of the pooled sample, doubled so they are integers.
std::vector<long long> doubled_midranks(const std::vector<double>& pooled) {
    const std::size_t total = pooled.size();
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
    std::vector<long long> ranks(total);
    for (std::size_t i = 0; i < total;) {
        std::size_t j = i;
        while (j + 1 < total && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // ranks i+1..j+1 averaged, doubled
        const auto twice = static_cast<long long>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = twice;
        i = j + 1;
    }
    return ranks;
}

double exact_p_value(const std::vector<long long>& ranks, std::size_t n1, long long observed) {
    const long long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0LL);
    // counts[j][s]: subsets of size j with doubled rank sum s
    std::vector<std::vector<double>> counts(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    counts[0][0] = 1.0;
    for (long long r : ranks) {
        for (std::size_t j = n1; j >= 1; --j) {
            auto& dst = counts[j];
            const auto& src = counts[j - 1];
            for (long long s = max_sum; s >= r; --s) dst[static_cast<std::size_t>(s)] += src[static_cast<std::size_t>(s - r)];
        }
    }
    const long long total_n = static_cast<long long>(ranks.size());
    const long long center = static_cast<long long>(n1) * (total_n + 1);  // doubled expected rank sum
    const long long dev = std::llabs(observed - center);
    double extreme = 0.0;
    double all = 0.0;
    for (long long s = 0; s <= max_sum; ++s) {
        const double c = counts[n1][static_cast<std::size_t>(s)];
        all += c;
        if (std::llabs(s - center) >= dev) extreme += c;
    }
    return extreme / all;
}

double normal_p_value(const std::vector<double>& pooled, std::size_t n1, long long observed) {
    const double na = static_cast<double>(n1);
    const double nb = static_cast<double>(pooled.size() - n1);
    const double total = na + nb;
    const double u = static_cast<double>(observed) / 2.0 - na * (na + 1.0) / 2.0;
    const double mu = na * nb / 2.0;

    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var = na * nb / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if (var <= 0.0) return 1.0;
    const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

} // namespace

double rank_sum_test(std::span<const double> a, std::span<const double> b, RankSumMethod method) {
    require(a.size() >= 4 && b.size() >= 4, "rank_sum_test: each sample needs at least four values");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    for (double v : pooled) require(std::isfinite(v), "rank_sum_test: non-finite value");
    const auto ranks = doubled_midranks(pooled);
    const long long observed = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0LL);

    const bool exact = method == RankSumMethod::Exact || (method == RankSumMethod::Auto && pooled.size() <= 40);
    return exact ? exact_p_value(ranks, a.size(), observed) : normal_p_value(pooled, a.size(), observed);
}

} // namespace lmef
