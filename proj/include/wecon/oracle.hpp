#ifndef WECON_ORACLE_HPP
#define WECON_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "wecon/hypervolume.hpp"
#include "wecon/pareto.hpp"
#include "wecon/problems.hpp"

namespace wecon {

/// Ground truth from exhaustive enumeration on tiny instances.
struct OracleResult {
    ParetoArchive archive;
    std::uint64_t enumerated = 0;
    double wall_s = 0.0;
};

/// All (n-1)!/2 distinct tours (first node fixed, reversals deduplicated).
/// Requires n <= 10.
OracleResult enumerate_pareto_tsp(const Instance& inst);

/// All feasible item subsets. Requires n <= 20.
OracleResult enumerate_pareto_kp_subsets(const Instance& inst);

/// Capacity DP with integer-scaled weights (weights multiplied by `scale`
/// and rounded; exact when the scaled weights are integral).
OracleResult enumerate_pareto_kp_dp(const Instance& inst, int scale = 1000);

/// All capacity-feasible set partitions into routes, each route order
/// brute-force optimized. Requires n <= 7.
OracleResult enumerate_pareto_cvrp(const Instance& inst);

/// Dispatch on the instance kind (subset enumeration for Bi-KP).
OracleResult enumerate_pareto(const Instance& inst);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo normalized hypervolume: the fraction of uniform box samples
/// dominated by some point, with its binomial standard error.
McEstimate mc_hypervolume(const std::vector<std::vector<double>>& points, const HvContext& ctx,
                          std::uint64_t samples, std::uint64_t seed);

}  // namespace wecon

#endif  // WECON_ORACLE_HPP
