#ifndef WECON_PROBLEMS_HPP
#define WECON_PROBLEMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wecon/matrix.hpp"
#include "wecon/rng.hpp"

namespace wecon {

enum class ProblemKind { BiTSP, TriTSP, BiCVRP, BiKP };

std::string kind_name(ProblemKind k);
ProblemKind kind_from_name(const std::string& s);

/// Objective count.
int kappa_of(ProblemKind k);
/// Per-node feature width: 2*kappa coordinates (MOTSP), x/y/demand (Bi-CVRP),
/// weight + two profits (Bi-KP).
int feature_width(ProblemKind k);
bool is_euclidean(ProblemKind k);

/// One problem instance. Node features live in a dense table whose row
/// count is n, plus a leading depot row for Bi-CVRP. All objectives are
/// minimized internally; Bi-KP profits are negated on ingestion and
/// un-negated for reporting.
struct Instance {
    ProblemKind kind = ProblemKind::BiTSP;
    int n = 0;        // customers (Bi-CVRP) / nodes / items
    int kappa = 2;
    Matrix<double> features;
    double capacity = 0.0;  // vehicle capacity (Bi-CVRP) or knapsack capacity (Bi-KP)
    std::string id;

    int node_count() const { return kind == ProblemKind::BiCVRP ? n + 1 : n; }
    bool has_capacity() const {
        return kind == ProblemKind::BiCVRP || kind == ProblemKind::BiKP;
    }
    double demand(int node) const;  // Bi-CVRP demand / Bi-KP weight
    void validate() const;
};

/// Mutable decoding state owned by a single rollout.
struct RolloutState {
    std::vector<std::uint8_t> visited;
    int current = -1;
    int first = -1;
    double remaining = 0.0;
    int t = 0;
    std::vector<double> logps;  // per-step log-probabilities of chosen actions
};

/// A decoded solution: flat index sequence plus its internal
/// (minimization-convention) objective vector.
struct Solution {
    std::vector<int> sequence;
    std::vector<double> objectives;
    bool feasible = true;
    std::vector<double> step_logp;

    double sum_logp() const;
};

/// Uniform random instance; deterministic in (kind, n, seed).
Instance generate_instance(ProblemKind kind, int n, std::uint64_t seed);

/// Vehicle capacity used for demand scaling, by customer count.
int cvrp_capacity_scale(int n);

RolloutState initial_state(const Instance& inst);

/// True once the rollout is complete (all nodes visited / all customers
/// served / no item fits).
bool is_terminal(const Instance& inst, const RolloutState& state);

/// Per-node feasibility at the current step. Throws if no node is feasible
/// while the rollout is not terminal.
std::vector<std::uint8_t> feasible_mask(const Instance& inst, const RolloutState& state);

/// Apply one action; the action must be feasible. Visiting the Bi-CVRP
/// depot refills the vehicle.
RolloutState step(const Instance& inst, const RolloutState& state, int action);

/// Internal objectives (all minimized). Throws naming the violated
/// constraint when the solution is infeasible.
std::vector<double> objective_vector(const Instance& inst, const Solution& sol);

/// Objectives in the problem's native sense (Bi-KP profits un-negated).
std::vector<double> reported_objectives(const Instance& inst, const std::vector<double>& internal);

/// The eight axis reflections/swaps applied independently per coordinate
/// set: 8 instances for Bi-CVRP, 64 for Bi-TSP, 512 for Tri-TSP, original
/// first. Bi-KP has no coordinates to transform.
std::vector<Instance> augment(const Instance& inst);

}  // namespace wecon

#endif  // WECON_PROBLEMS_HPP
