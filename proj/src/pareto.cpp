#include "wecon/pareto.hpp"

#include <algorithm>
#include <stdexcept>

namespace wecon {

bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dominates: dimension mismatch");
    bool strict = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strict = true;
    }
    return strict;
}

bool ParetoArchive::insert(std::vector<double> f, std::optional<Solution> sol) {
    for (const Entry& e : entries_) {
        if (e.f == f) return false;
        if (dominates(e.f, f)) return false;
    }
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const Entry& e) { return dominates(f, e.f); }),
                   entries_.end());
    entries_.push_back(Entry{std::move(f), std::move(sol)});
    return true;
}

std::vector<std::vector<double>> ParetoArchive::points() const {
    std::vector<std::vector<double>> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) out.push_back(e.f);
    return out;
}

ParetoArchive pareto_filter(const std::vector<std::vector<double>>& points) {
    ParetoArchive archive;
    if (points.empty()) return archive;
    const std::size_t dim = points[0].size();
    for (const auto& p : points)
        if (p.size() != dim) throw std::invalid_argument("pareto_filter: dimension mismatch");

    // Lexicographic presort: a point can only be dominated by one sorted
    // no later than itself, keeping the scan near O(n * front size).
    std::vector<int> order(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return points[a] < points[b]; });
    for (int i : order) archive.insert(points[i]);
    return archive;
}

}  // namespace wecon
