#ifndef WECON_HYPERVOLUME_HPP
#define WECON_HYPERVOLUME_HPP

#include <optional>
#include <vector>

#include "wecon/pareto.hpp"
#include "wecon/problems.hpp"

namespace wecon {

/// Reference and ideal points bounding the normalization box.
struct HvContext {
    std::vector<double> ref;    // r*, worst corner
    std::vector<double> ideal;  // z, best corner

    int kappa() const { return static_cast<int>(ref.size()); }
    void validate() const;
};

/// Normalized hypervolume in [0, 1]: Lebesgue measure of the region the
/// points dominate inside [ideal, ref], divided by the box volume. Points
/// are clipped to the box first; two objectives use a sort-and-sweep,
/// three use slicing along the last coordinate.
double hypervolume(const std::vector<std::vector<double>>& points, const HvContext& ctx);
double hypervolume(const ParetoArchive& archive, const HvContext& ctx);

/// Relative HV shortfall in percent: (hv_ref - hv) / hv_ref * 100.
double hv_gap(double hv, double hv_ref);

/// Built-in reference/ideal points per (problem, size), in the internal
/// minimization convention (Bi-KP entries negated). Unlisted pairs return
/// nothing; callers must then supply explicit points.
std::optional<HvContext> builtin_hv_context(ProblemKind kind, int n);

}  // namespace wecon

#endif  // WECON_HYPERVOLUME_HPP
