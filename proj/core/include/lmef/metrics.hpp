#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmef/population.hpp"
#include "lmef/problems.hpp"

namespace lmef {

/// Squared: mean over reference points of the squared distance to the nearest
/// obtained point. Plain: the same with the unsquared distance (the usual IGD).
enum class IgdForm { Squared, Plain };

std::string_view to_string(IgdForm form);
IgdForm parse_igd_form(std::string_view text);

/// Inverted generational distance. Throws PreconditionError on empty sets or
/// mismatched objective counts.
double igd(std::span<const Vector> reference, std::span<const Vector> obtained, IgdForm form = IgdForm::Squared);
double igd(const ReferenceFront& reference, std::span<const Vector> obtained, IgdForm form = IgdForm::Squared);

/// Schott's spacing: sample standard deviation of nearest-neighbour distances.
/// Throws PreconditionError with fewer than two points.
double spacing(std::span<const Vector> front);

struct TracePoint {
    std::uint64_t evaluations = 0;
    double igd = 0.0;
};

struct RunRecord {
    std::string algorithm;
    std::string problem;
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::uint64_t evaluations = 0;
    double igd = 0.0;
    double sp = 0.0;
    std::size_t front_size = 0;
    std::vector<TracePoint> trace;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SummaryRow {
    std::string algorithm;
    std::string problem;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t runs = 0;
    double igd_mean = 0.0;
    double igd_variance = 0.0;
    double sp_mean = 0.0;
    double sp_variance = 0.0;
};

/// Mean and population variance of final IGD and SP per
/// (algorithm, problem, n, m) cell, in first-appearance order. Failed runs are skipped.
std::vector<SummaryRow> aggregate(std::span<const RunRecord> records);

double mean(std::span<const double> xs);
double population_variance(std::span<const double> xs);
double median(std::vector<double> xs);

enum class RankSumMethod { Auto, Exact, Normal };

/// Two-sided Wilcoxon rank-sum p-value with midranks for ties.
/// Exact uses the full permutation distribution of the rank sum; Normal the
/// tie-corrected normal approximation with continuity correction. Auto picks
/// Exact when the pooled size is at most 40. Throws PreconditionError when
/// either sample has fewer than four values.
double rank_sum_test(std::span<const double> a, std::span<const double> b, RankSumMethod method = RankSumMethod::Auto);

} // namespace lmef
