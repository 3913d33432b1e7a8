#include "wecon/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wecon {

namespace {

constexpr double kFeasTol = 1e-9;

double dist2d(double ax, double ay, double bx, double by) {
    const double dx = ax - bx;
    const double dy = ay - by;
    return std::sqrt(dx * dx + dy * dy);
}

[[noreturn]] void infeasible(const std::string& what) {
    throw std::runtime_error("infeasible solution: " + what);
}

}  // namespace

std::string kind_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::BiTSP: return "bitsp";
        case ProblemKind::TriTSP: return "tritsp";
        case ProblemKind::BiCVRP: return "bicvrp";
        case ProblemKind::BiKP: return "bikp";
    }
    throw std::logic_error("unknown problem kind");
}

ProblemKind kind_from_name(const std::string& s) {
    if (s == "bitsp") return ProblemKind::BiTSP;
    if (s == "tritsp") return ProblemKind::TriTSP;
    if (s == "bicvrp") return ProblemKind::BiCVRP;
    if (s == "bikp") return ProblemKind::BiKP;
    throw std::invalid_argument("unknown problem kind: " + s);
}

int kappa_of(ProblemKind k) { return k == ProblemKind::TriTSP ? 3 : 2; }

int feature_width(ProblemKind k) {
    switch (k) {
        case ProblemKind::BiTSP: return 4;
        case ProblemKind::TriTSP: return 6;
        case ProblemKind::BiCVRP: return 3;
        case ProblemKind::BiKP: return 3;
    }
    throw std::logic_error("unknown problem kind");
}

bool is_euclidean(ProblemKind k) { return k != ProblemKind::BiKP; }

double Instance::demand(int node) const {
    if (kind == ProblemKind::BiCVRP) return features.at(node, 2);
    if (kind == ProblemKind::BiKP) return features.at(node, 0);
    throw std::logic_error("demand undefined for " + kind_name(kind));
}

void Instance::validate() const {
    if (kappa != kappa_of(kind))
        throw std::invalid_argument("instance: kappa " + std::to_string(kappa) +
                                    " does not match " + kind_name(kind));
    if (features.rows != node_count() || features.cols != feature_width(kind))
        throw std::invalid_argument("instance: feature table must be " +
                                    shape_str(node_count(), feature_width(kind)) + ", got " +
                                    shape_str(features.rows, features.cols));
    const int coord_cols = kind == ProblemKind::BiKP ? 0
                          : kind == ProblemKind::BiCVRP ? 2
                                                        : 2 * kappa;
    for (int i = 0; i < features.rows; ++i)
        for (int j = 0; j < coord_cols; ++j) {
            const double x = features.at(i, j);
            if (!(x >= 0.0 && x <= 1.0))
                throw std::invalid_argument("instance: coordinate outside [0,1]");
        }
    if (kind == ProblemKind::BiCVRP) {
        if (features.at(0, 2) != 0.0)
            throw std::invalid_argument("instance: depot demand must be 0");
        for (int i = 1; i <= n; ++i) {
            const double d = features.at(i, 2);
            if (!(d > 0.0 && d < capacity))
                throw std::invalid_argument(
                    "instance: demand must be in (0, capacity) at node " + std::to_string(i));
        }
    }
    if (kind == ProblemKind::BiKP) {
        for (int i = 0; i < n; ++i) {
            const double w = features.at(i, 0);
            if (!(w > 0.0 && w < capacity))
                throw std::invalid_argument(
                    "instance: item weight must be in (0, capacity) at item " + std::to_string(i));
        }
    }
}

int cvrp_capacity_scale(int n) {
    if (n <= 20) return 30;
    if (n <= 50) return 40;
    return 50;
}

Instance generate_instance(ProblemKind kind, int n, std::uint64_t seed) {
    const int min_n = kind == ProblemKind::BiKP ? 1 : 2;
    if (n < min_n)
        throw std::invalid_argument("generate_instance: n must be >= " + std::to_string(min_n) +
                                    " for " + kind_name(kind));
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(n)));
    Instance inst;
    inst.kind = kind;
    inst.n = n;
    inst.kappa = kappa_of(kind);
    inst.id = kind_name(kind) + std::to_string(n) + "-s" + std::to_string(seed);

    switch (kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: {
            inst.features = Matrix<double>(n, 2 * inst.kappa);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < 2 * inst.kappa; ++j)
                    inst.features.at(i, j) = rng.next_double();
            break;
        }
        case ProblemKind::BiCVRP: {
            // Unit-scaled demands: raw {1..9} divided by the size-dependent
            // vehicle capacity, which itself is normalized to 1.
            const double q = static_cast<double>(cvrp_capacity_scale(n));
            inst.features = Matrix<double>(n + 1, 3);
            inst.capacity = 1.0;
            inst.features.at(0, 0) = rng.next_double();
            inst.features.at(0, 1) = rng.next_double();
            inst.features.at(0, 2) = 0.0;
            for (int i = 1; i <= n; ++i) {
                inst.features.at(i, 0) = rng.next_double();
                inst.features.at(i, 1) = rng.next_double();
                inst.features.at(i, 2) = static_cast<double>(rng.uniform_int(1, 9)) / q;
            }
            break;
        }
        case ProblemKind::BiKP: {
            inst.features = Matrix<double>(n, 3);
            inst.capacity = std::max(1.0, static_cast<double>(n) / 4.0);
            for (int i = 0; i < n; ++i) {
                double w = rng.next_double();
                while (w <= 0.0) w = rng.next_double();
                inst.features.at(i, 0) = w;
                inst.features.at(i, 1) = rng.next_double();
                inst.features.at(i, 2) = rng.next_double();
            }
            break;
        }
    }
    inst.validate();
    return inst;
}

RolloutState initial_state(const Instance& inst) {
    RolloutState s;
    s.visited.assign(inst.node_count(), 0);
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP:
            break;
        case ProblemKind::BiCVRP:
            s.current = 0;  // start at the depot; the depot never counts as "visited"
            s.remaining = inst.capacity;
            break;
        case ProblemKind::BiKP:
            s.remaining = inst.capacity;
            break;
    }
    return s;
}

bool is_terminal(const Instance& inst, const RolloutState& state) {
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: {
            for (int i = 0; i < inst.n; ++i)
                if (!state.visited[i]) return false;
            return true;
        }
        case ProblemKind::BiCVRP: {
            for (int i = 1; i <= inst.n; ++i)
                if (!state.visited[i]) return false;
            return true;
        }
        case ProblemKind::BiKP: {
            for (int i = 0; i < inst.n; ++i)
                if (!state.visited[i] && inst.demand(i) <= state.remaining + kFeasTol)
                    return false;
            return true;
        }
    }
    return true;
}

std::vector<std::uint8_t> feasible_mask(const Instance& inst, const RolloutState& state) {
    std::vector<std::uint8_t> mask(inst.node_count(), 0);
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP:
            for (int i = 0; i < inst.n; ++i) mask[i] = !state.visited[i];
            break;
        case ProblemKind::BiCVRP: {
            // Depot is masked right after a depot visit so no route is empty.
            for (int i = 1; i <= inst.n; ++i)
                mask[i] = !state.visited[i] && inst.demand(i) <= state.remaining + kFeasTol;
            mask[0] = (state.current != 0) && !is_terminal(inst, state);
            break;
        }
        case ProblemKind::BiKP:
            for (int i = 0; i < inst.n; ++i)
                mask[i] = !state.visited[i] && inst.demand(i) <= state.remaining + kFeasTol;
            break;
    }
    if (!is_terminal(inst, state) &&
        std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }))
        throw std::runtime_error("feasible_mask: no feasible node in non-terminal state");
    return mask;
}

RolloutState step(const Instance& inst, const RolloutState& state, int action) {
    const auto mask = feasible_mask(inst, state);
    if (action < 0 || action >= static_cast<int>(mask.size()) || !mask[action])
        throw std::runtime_error("step: action " + std::to_string(action) +
                                 " is infeasible at step " + std::to_string(state.t));
    RolloutState s = state;
    s.t += 1;
    s.current = action;
    if (s.first < 0) s.first = action;
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP:
            s.visited[action] = 1;
            break;
        case ProblemKind::BiCVRP:
            if (action == 0) {
                s.remaining = inst.capacity;
            } else {
                s.visited[action] = 1;
                s.remaining -= inst.demand(action);
            }
            break;
        case ProblemKind::BiKP:
            s.visited[action] = 1;
            s.remaining -= inst.demand(action);
            break;
    }
    if (s.remaining < -kFeasTol)
        throw std::runtime_error("step: capacity went negative");
    return s;
}

namespace {

std::vector<double> motsp_objectives(const Instance& inst, const std::vector<int>& tour) {
    if (static_cast<int>(tour.size()) != inst.n) infeasible("tour must visit all nodes");
    std::vector<std::uint8_t> seen(inst.n, 0);
    for (int v : tour) {
        if (v < 0 || v >= inst.n) infeasible("node index out of range");
        if (seen[v]) infeasible("node visited twice");
        seen[v] = 1;
    }
    std::vector<double> F(inst.kappa, 0.0);
    for (int k = 0; k < inst.kappa; ++k) {
        const int cx = 2 * k, cy = 2 * k + 1;
        double len = 0.0;
        for (std::size_t j = 0; j + 1 < tour.size(); ++j)
            len += dist2d(inst.features.at(tour[j], cx), inst.features.at(tour[j], cy),
                          inst.features.at(tour[j + 1], cx), inst.features.at(tour[j + 1], cy));
        len += dist2d(inst.features.at(tour.back(), cx), inst.features.at(tour.back(), cy),
                      inst.features.at(tour.front(), cx), inst.features.at(tour.front(), cy));
        F[k] = len;
    }
    return F;
}

std::vector<double> bicvrp_objectives(const Instance& inst, const std::vector<int>& seq) {
    std::vector<std::uint8_t> seen(inst.n + 1, 0);
    double total = 0.0, longest = 0.0;
    double route_len = 0.0, route_load = 0.0;
    int prev = 0;
    bool route_open = false;
    auto close_route = [&]() {
        route_len += dist2d(inst.features.at(prev, 0), inst.features.at(prev, 1),
                            inst.features.at(0, 0), inst.features.at(0, 1));
        total += route_len;
        longest = std::max(longest, route_len);
        route_len = 0.0;
        route_load = 0.0;
        prev = 0;
        route_open = false;
    };
    for (int v : seq) {
        if (v < 0 || v > inst.n) infeasible("node index out of range");
        if (v == 0) {
            if (!route_open) infeasible("empty route (consecutive depot visits)");
            close_route();
            continue;
        }
        if (seen[v]) infeasible("customer " + std::to_string(v) + " visited twice");
        seen[v] = 1;
        route_load += inst.demand(v);
        if (route_load > inst.capacity + kFeasTol)
            infeasible("route demand exceeds vehicle capacity");
        route_len += dist2d(inst.features.at(prev, 0), inst.features.at(prev, 1),
                            inst.features.at(v, 0), inst.features.at(v, 1));
        prev = v;
        route_open = true;
    }
    if (route_open) close_route();
    for (int i = 1; i <= inst.n; ++i)
        if (!seen[i]) infeasible("customer " + std::to_string(i) + " not visited");
    return {total, longest};
}

std::vector<double> bikp_objectives(const Instance& inst, const std::vector<int>& items) {
    std::vector<std::uint8_t> seen(inst.n, 0);
    double weight = 0.0, p1 = 0.0, p2 = 0.0;
    for (int v : items) {
        if (v < 0 || v >= inst.n) infeasible("item index out of range");
        if (seen[v]) infeasible("item selected twice");
        seen[v] = 1;
        weight += inst.features.at(v, 0);
        p1 += inst.features.at(v, 1);
        p2 += inst.features.at(v, 2);
    }
    if (weight > inst.capacity + kFeasTol) infeasible("total weight exceeds knapsack capacity");
    // stored negated so every problem minimizes
    return {-p1, -p2};
}

}  // namespace

std::vector<double> objective_vector(const Instance& inst, const Solution& sol) {
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: return motsp_objectives(inst, sol.sequence);
        case ProblemKind::BiCVRP: return bicvrp_objectives(inst, sol.sequence);
        case ProblemKind::BiKP: return bikp_objectives(inst, sol.sequence);
    }
    throw std::logic_error("unknown problem kind");
}

std::vector<double> reported_objectives(const Instance& inst, const std::vector<double>& internal) {
    if (inst.kind != ProblemKind::BiKP) return internal;
    std::vector<double> out(internal.size());
    for (std::size_t i = 0; i < internal.size(); ++i) out[i] = -internal[i];
    return out;
}

double Solution::sum_logp() const {
    return std::accumulate(step_logp.begin(), step_logp.end(), 0.0);
}

std::vector<Instance> augment(const Instance& inst) {
    if (!is_euclidean(inst.kind))
        throw std::invalid_argument("augmentation undefined for " + kind_name(inst.kind));
    const int sets = inst.kind == ProblemKind::BiCVRP ? 1 : inst.kappa;
    // the eight unit-square isometries
    const auto apply = [](int m, double x, double y) -> std::pair<double, double> {
        switch (m) {
            case 0: return {x, y};
            case 1: return {y, x};
            case 2: return {x, 1.0 - y};
            case 3: return {y, 1.0 - x};
            case 4: return {1.0 - x, y};
            case 5: return {1.0 - y, x};
            case 6: return {1.0 - x, 1.0 - y};
            default: return {1.0 - y, 1.0 - x};
        }
    };
    int count = 1;
    for (int s = 0; s < sets; ++s) count *= 8;

    std::vector<Instance> out;
    out.reserve(count);
    for (int code = 0; code < count; ++code) {
        Instance a = inst;
        int rem = code;
        for (int s = sets - 1; s >= 0; --s) {
            const int m = rem % 8;
            rem /= 8;
            const int cx = 2 * s, cy = 2 * s + 1;
            for (int i = 0; i < inst.features.rows; ++i) {
                const auto [nx, ny] = apply(m, inst.features.at(i, cx), inst.features.at(i, cy));
                a.features.at(i, cx) = nx;
                a.features.at(i, cy) = ny;
            }
        }
        a.id = inst.id + "-aug" + std::to_string(code);
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace wecon
