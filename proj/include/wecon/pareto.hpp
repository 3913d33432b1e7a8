#ifndef WECON_PARETO_HPP
#define WECON_PARETO_HPP

#include <optional>
#include <span>
#include <vector>

#include "wecon/problems.hpp"

namespace wecon {

/// Minimization dominance: a <= b in every coordinate and a != b.
bool dominates(std::span<const double> a, std::span<const double> b);

/// Mutually non-dominated archive of objective vectors, optionally carrying
/// the solutions that produced them. Exact duplicates collapse to the first
/// inserted entry.
class ParetoArchive {
public:
    struct Entry {
        std::vector<double> f;
        std::optional<Solution> sol;
    };

    /// Returns true when the point entered the archive (it was not
    /// dominated by, nor equal to, an existing member). Dominated members
    /// are evicted.
    bool insert(std::vector<double> f, std::optional<Solution> sol = std::nullopt);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    std::vector<std::vector<double>> points() const;

private:
    std::vector<Entry> entries_;
};

/// Non-dominated subset of a point set (duplicates collapsed).
ParetoArchive pareto_filter(const std::vector<std::vector<double>>& points);

}  // namespace wecon

#endif  // WECON_PARETO_HPP
