#include "lmef/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>

#include "lmef/error.hpp"
#include "lmef/pareto.hpp"

namespace lmef {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDistanceUpper = 10.0;

// Endpoints of the two LSMOP9 front segments along each position variable.
constexpr double kSegment9[4] = {0.0, 0.251412, 0.631627, 0.859401};

std::vector<std::size_t> chaotic_subcomponent_sizes(std::size_t n, std::size_t m) {
    std::vector<double> c(m);
    c[0] = 3.8 * 0.1 * (1.0 - 0.1);
    for (std::size_t i = 1; i < m; ++i) {
        c[i] = 3.8 * c[i - 1] * (1.0 - c[i - 1]);
    }
    const double total = std::accumulate(c.begin(), c.end(), 0.0);
    const double per_sub = static_cast<double>(n - m + 1) / static_cast<double>(Problem::kSubcomponents);
    std::vector<std::size_t> sizes(m);
    for (std::size_t i = 0; i < m; ++i) {
        sizes[i] = static_cast<std::size_t>(std::floor(c[i] / total * per_sub));
    }
    return sizes;
}

double lsmop9_tail(std::span<const double> f, double g, std::size_t m) {
    double s = 0.0;
    for (std::size_t t = 0; t + 1 < m; ++t) {
        s += f[t] / (1.0 + g) * (1.0 + std::sin(3.0 * kPi * f[t]));
    }
    return (1.0 + g) * (static_cast<double>(m) - s);
}

} // namespace

ProblemId parse_problem_id(std::string_view text) {
    std::string upper(text);
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (upper.size() == 6 && upper.rfind("LSMOP", 0) == 0 && upper[5] >= '1' && upper[5] <= '9') {
        return static_cast<ProblemId>(upper[5] - '0');
    }
    throw PreconditionError("unknown problem id '" + std::string(text) + "' (expected LSMOP1..LSMOP9)");
}

std::string to_string(ProblemId id) {
    return "LSMOP" + std::to_string(static_cast<int>(id));
}

double landscape_value(Landscape fn, std::span<const double> x) {
    const double len = static_cast<double>(x.size());
    switch (fn) {
    case Landscape::Sphere: {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    }
    case Landscape::Schwefel: {
        double s = 0.0;
        for (double v : x) s = std::max(s, std::abs(v));
        return s;
    }
    case Landscape::Rosenbrock: {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            const double a = x[i] * x[i] - x[i + 1];
            const double b = x[i] - 1.0;
            s += 100.0 * a * a + b * b;
        }
        return s;
    }
    case Landscape::Rastrigin: {
        double s = 0.0;
        for (double v : x) s += v * v - 10.0 * std::cos(2.0 * kPi * v) + 10.0;
        return s;
    }
    case Landscape::Griewank: {
        double s = 0.0;
        double p = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            s += x[i] * x[i];
            p *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
        }
        return s / 4000.0 - p + 1.0;
    }
    case Landscape::Ackley: {
        double sq = 0.0;
        double cs = 0.0;
        for (double v : x) {
            sq += v * v;
            cs += std::cos(2.0 * kPi * v);
        }
        return 20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sq / len)) - std::exp(cs / len) + std::numbers::e;
    }
    }
    return 0.0;
}

double landscape_optimum(Landscape fn) {
    return fn == Landscape::Rosenbrock ? 1.0 : 0.0;
}

Problem::Problem(ProblemId id, std::size_t n, std::size_t m) : id_(id), n_(n), m_(m) {
    require(m >= 2, "problem needs at least two objectives");
    require(n >= m, "problem needs n >= m");
    sublen_ = chaotic_subcomponent_sizes(n, m);
    for (std::size_t s : sublen_) {
        require(s >= 1, to_string(id) + ": n=" + std::to_string(n) + " too small for m=" + std::to_string(m) +
                            " (a variable group would be empty)");
    }
    group_offset_.resize(m);
    std::size_t offset = m - 1;
    for (std::size_t i = 0; i < m; ++i) {
        group_offset_[i] = offset;
        offset += sublen_[i] * kSubcomponents;
    }
    bounds_.lower.assign(n, 0.0);
    bounds_.upper.assign(n, kDistanceUpper);
    for (std::size_t i = 0; i + 1 < m; ++i) bounds_.upper[i] = 1.0;
}

std::pair<Landscape, Landscape> Problem::landscapes() const noexcept {
    using L = Landscape;
    switch (id_) {
    case ProblemId::LSMOP1: return {L::Sphere, L::Sphere};
    case ProblemId::LSMOP2: return {L::Griewank, L::Schwefel};
    case ProblemId::LSMOP3: return {L::Rastrigin, L::Rosenbrock};
    case ProblemId::LSMOP4: return {L::Ackley, L::Griewank};
    case ProblemId::LSMOP5: return {L::Sphere, L::Sphere};
    case ProblemId::LSMOP6: return {L::Rosenbrock, L::Schwefel};
    case ProblemId::LSMOP7: return {L::Ackley, L::Rosenbrock};
    case ProblemId::LSMOP8: return {L::Griewank, L::Sphere};
    case ProblemId::LSMOP9: return {L::Sphere, L::Ackley};
    }
    return {L::Sphere, L::Sphere};
}

Vector Problem::linked_distance_variables(std::span<const double> genes) const {
    // Returned vector is indexed like genes; entries below m-1 are unused.
    Vector linked(genes.begin(), genes.end());
    const double shift = genes[0] * kDistanceUpper;
    const double dn = static_cast<double>(n_);
    for (std::size_t j = m_ - 1; j < n_; ++j) {
        const double i = static_cast<double>(j + 1);
        const double factor = nonlinear_linkage() ? 1.0 + std::cos(0.5 * kPi * i / dn) : 1.0 + i / dn;
        linked[j] = factor * genes[j] - shift;
    }
    return linked;
}

Vector Problem::group_values(std::span<const double> linked) const {
    const auto [odd, even] = landscapes();
    Vector g(m_, 0.0);
    for (std::size_t obj = 0; obj < m_; ++obj) {
        const Landscape fn = (obj % 2 == 0) ? odd : even;
        const std::size_t len = sublen_[obj];
        double sum = 0.0;
        for (std::size_t k = 0; k < kSubcomponents; ++k) {
            sum += landscape_value(fn, linked.subspan(group_offset_[obj] + k * len, len));
        }
        g[obj] = sum / static_cast<double>(len) / static_cast<double>(kSubcomponents);
    }
    return g;
}

Vector Problem::evaluate(std::span<const double> genes) {
    require(genes.size() == n_, to_string(id_) + ": expected " + std::to_string(n_) + " genes, got " +
                                    std::to_string(genes.size()));
    for (std::size_t i = 0; i < n_; ++i) {
        if (!(genes[i] >= bounds_.lower[i] && genes[i] <= bounds_.upper[i])) {
            throw PreconditionError(to_string(id_) + ": gene " + std::to_string(i) + " = " + std::to_string(genes[i]) +
                                    " outside bounds");
        }
    }
    eval_count_.fetch_add(1, std::memory_order_relaxed);

    const Vector linked = linked_distance_variables(genes);
    const Vector g = group_values(linked);
    Vector f(m_, 0.0);

    if (id_ == ProblemId::LSMOP9) {
        const double big_g = 1.0 + std::accumulate(g.begin(), g.end(), 0.0);
        for (std::size_t t = 0; t + 1 < m_; ++t) f[t] = genes[t];
        f[m_ - 1] = lsmop9_tail(f, big_g, m_);
        return f;
    }

    const bool curved = nonlinear_linkage();
    for (std::size_t j = 0; j < m_; ++j) {
        double value = curved ? 1.0 + g[j] + (j + 1 < m_ ? g[j + 1] : 0.0) : 1.0 + g[j];
        // Products over the first m-1-j position variables, closed by the
        // complementary term of variable m-1-j.
        for (std::size_t t = 0; t + 1 + j < m_; ++t) {
            value *= curved ? std::cos(0.5 * kPi * genes[t]) : genes[t];
        }
        if (j > 0) {
            const double x = genes[m_ - 1 - j];
            value *= curved ? std::sin(0.5 * kPi * x) : 1.0 - x;
        }
        f[j] = value;
    }
    return f;
}

Vector Problem::optimal_genes(std::span<const double> position) const {
    require(position.size() == m_ - 1, "optimal_genes: position must have m-1 entries");
    Vector genes(n_, 0.0);
    for (std::size_t t = 0; t + 1 < m_; ++t) {
        require(position[t] >= 0.0 && position[t] <= 1.0, "optimal_genes: position outside [0, 1]");
        genes[t] = position[t];
    }
    const auto [odd, even] = landscapes();
    Vector target(n_, 0.0);
    for (std::size_t obj = 0; obj < m_; ++obj) {
        const double opt = landscape_optimum(obj % 2 == 0 ? odd : even);
        const std::size_t begin = group_offset_[obj];
        const std::size_t end = begin + sublen_[obj] * kSubcomponents;
        for (std::size_t j = begin; j < end; ++j) target[j] = opt;
    }
    const double shift = genes[0] * kDistanceUpper;
    const double dn = static_cast<double>(n_);
    for (std::size_t j = m_ - 1; j < n_; ++j) {
        const double i = static_cast<double>(j + 1);
        const double factor = nonlinear_linkage() ? 1.0 + std::cos(0.5 * kPi * i / dn) : 1.0 + i / dn;
        genes[j] = std::clamp((target[j] + shift) / factor, 0.0, kDistanceUpper);
    }
    return genes;
}

Vector Problem::front_position(std::span<const double> u) const {
    require(u.size() == m_ - 1, "front_position: expected m-1 coordinates");
    Vector x(u.begin(), u.end());
    if (id_ != ProblemId::LSMOP9) return x;
    const double first = kSegment9[1] - kSegment9[0];
    const double second = kSegment9[3] - kSegment9[2];
    const double split = first / (first + second);
    for (double& v : x) {
        v = v <= split ? kSegment9[0] + v * first / split : kSegment9[2] + (v - split) * second / (1.0 - split);
    }
    return x;
}

void evaluate(Problem& problem, Individual& ind) {
    ind.objectives = problem.evaluate(ind.genes);
}

namespace {

// Objective vector at a front position, without touching an evaluation counter.
Vector front_point(ProblemId id, std::size_t m, std::span<const double> x) {
    Vector f(m, 0.0);
    if (id == ProblemId::LSMOP9) {
        for (std::size_t t = 0; t + 1 < m; ++t) f[t] = x[t];
        f[m - 1] = lsmop9_tail(f, 1.0, m);
        return f;
    }
    const bool curved = id >= ProblemId::LSMOP5;
    for (std::size_t j = 0; j < m; ++j) {
        double value = 1.0;
        for (std::size_t t = 0; t + 1 + j < m; ++t) value *= curved ? std::cos(0.5 * kPi * x[t]) : x[t];
        if (j > 0) {
            const double v = x[m - 1 - j];
            value *= curved ? std::sin(0.5 * kPi * v) : 1.0 - v;
        }
        f[j] = value;
    }
    return f;
}

void compositions(std::size_t parts, std::size_t total, std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
    if (parts == 1) {
        current.push_back(total);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (std::size_t i = 0; i <= total; ++i) {
        current.push_back(i);
        compositions(parts - 1, total - i, current, out);
        current.pop_back();
    }
}

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

std::vector<Vector> nondominated_filter(std::vector<Vector> points) {
    std::vector<Vector> kept;
    kept.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (j != i && (dominates(points[j], points[i]) || (j < i && points[j] == points[i]))) dominated = true;
        }
        if (!dominated) kept.push_back(points[i]);
    }
    return kept;
}

} // namespace

ReferenceFront sample_reference_front(const Problem& problem, std::size_t count) {
    const std::size_t m = problem.m();
    require(count >= m, "sample_reference_front: count must be >= m");
    ReferenceFront front;
    const ProblemId id = problem.id();

    if (m == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double u = static_cast<double>(i) / static_cast<double>(count - 1);
            const Vector x = problem.front_position(std::span<const double>(&u, 1));
            front.points.push_back(front_point(id, m, x));
        }
        front.points = nondominated_filter(std::move(front.points));
        return front;
    }

    if (id == ProblemId::LSMOP9) {
        // Regular grid over the (m-1)-dimensional position cube.
        std::size_t per_axis = 1;
        while (std::pow(static_cast<double>(per_axis + 1), static_cast<double>(m - 1)) <= static_cast<double>(count)) {
            ++per_axis;
        }
        std::vector<Vector> positions;
        if (per_axis < 2) {
            positions.emplace_back(m - 1, 0.0);
            for (std::size_t t = 0; t + 1 < m; ++t) {
                Vector u(m - 1, 0.0);
                u[t] = 1.0;
                positions.push_back(u);
            }
        } else {
            std::vector<std::size_t> idx(m - 1, 0);
            while (true) {
                Vector u(m - 1);
                for (std::size_t t = 0; t + 1 < m; ++t) {
                    u[t] = static_cast<double>(idx[t]) / static_cast<double>(per_axis - 1);
                }
                positions.push_back(u);
                std::size_t t = 0;
                while (t < idx.size() && ++idx[t] == per_axis) idx[t++] = 0;
                if (t == idx.size()) break;
            }
        }
        for (const auto& u : positions) front.points.push_back(front_point(id, m, problem.front_position(u)));
        front.points = nondominated_filter(std::move(front.points));
        return front;
    }

    // Simplex lattice with H divisions: C(H+m-1, m-1) points.
    std::size_t divisions = 1;
    while (binomial(divisions + 1 + m - 1, m - 1) <= static_cast<double>(count)) ++divisions;
    std::vector<std::vector<std::size_t>> lattice;
    std::vector<std::size_t> scratch;
    compositions(m, divisions, scratch, lattice);
    const bool curved = id >= ProblemId::LSMOP5;
    for (const auto& w : lattice) {
        Vector p(m);
        double norm = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            p[j] = static_cast<double>(w[j]) / static_cast<double>(divisions);
            norm += p[j] * p[j];
        }
        if (curved) {
            norm = std::sqrt(norm);
            for (double& v : p) v /= norm;
        }
        front.points.push_back(std::move(p));
    }
    front.points = nondominated_filter(std::move(front.points));
    return front;
}

std::size_t default_reference_size(std::size_t m) {
    return m == 2 ? 1000 : 5000;
}

double front_residual(ProblemId id, std::span<const double> f) {
    const std::size_t m = f.size();
    if (id == ProblemId::LSMOP9) {
        return std::abs(f[m - 1] - lsmop9_tail(f, 1.0, m));
    }
    if (id >= ProblemId::LSMOP5) {
        double s = 0.0;
        for (double v : f) s += v * v;
        return std::abs(std::sqrt(s) - 1.0);
    }
    return std::abs(std::accumulate(f.begin(), f.end(), 0.0) - 1.0);
}

} // namespace lmef
