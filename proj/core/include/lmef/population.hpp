#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lmef {

using Vector = std::vector<double>;

struct Individual {
    Vector genes;
    std::optional<Vector> objectives;

    Individual() = default;
    explicit Individual(Vector g) : genes(std::move(g)) {}
    Individual(Vector g, Vector f) : genes(std::move(g)), objectives(std::move(f)) {}

    bool evaluated() const noexcept { return objectives.has_value(); }
    const Vector& f() const { return objectives.value(); }
};

struct Population {
    std::vector<Individual> members;
    std::size_t capacity = 0;

    Population() = default;
    explicit Population(std::size_t cap) : capacity(cap) {}
    Population(std::vector<Individual> m, std::size_t cap) : members(std::move(m)), capacity(cap) {}

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
    Individual& operator[](std::size_t i) { return members[i]; }
    const Individual& operator[](std::size_t i) const { return members[i]; }
    auto begin() { return members.begin(); }
    auto end() { return members.end(); }
    auto begin() const { return members.begin(); }
    auto end() const { return members.end(); }

    bool all_evaluated() const noexcept {
        for (const auto& ind : members) {
            if (!ind.evaluated()) return false;
        }
        return true;
    }
};

/// Box constraints of a decision space.
struct Bounds {
    Vector lower;
    Vector upper;

    std::size_t size() const noexcept { return lower.size(); }
    bool contains(std::span<const double> x) const noexcept {
        if (x.size() != lower.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
        }
        return true;
    }
    void clamp(std::span<double> x) const noexcept {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < lower[i]) x[i] = lower[i];
            else if (x[i] > upper[i]) x[i] = upper[i];
        }
    }
};

/// Objective vectors of every member, in order. Members must be evaluated.
std::vector<Vector> objectives_of(const Population& pop);
std::vector<Vector> genes_of(const Population& pop);

} // namespace lmef
