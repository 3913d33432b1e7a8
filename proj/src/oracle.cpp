#include "wecon/oracle.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "wecon/rng.hpp"

namespace wecon {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

double dist2d(const Instance& inst, int a, int b, int cx, int cy) {
    const double dx = inst.features.at(a, cx) - inst.features.at(b, cx);
    const double dy = inst.features.at(a, cy) - inst.features.at(b, cy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

OracleResult enumerate_pareto_tsp(const Instance& inst) {
    if (inst.kind != ProblemKind::BiTSP && inst.kind != ProblemKind::TriTSP)
        throw std::invalid_argument("enumerate_pareto_tsp: not an MOTSP instance");
    if (inst.n > 10)
        throw std::invalid_argument("enumerate_pareto_tsp: n > 10 is too large to enumerate");
    Stopwatch sw;
    OracleResult res;

    std::vector<int> rest(inst.n - 1);
    std::iota(rest.begin(), rest.end(), 1);
    std::vector<int> tour(inst.n);
    tour[0] = 0;
    Solution sol;
    do {
        // reversal-canonical: second node index below last node index
        if (inst.n > 2 && rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), tour.begin() + 1);
        sol.sequence = tour;
        res.enumerated += 1;
        res.archive.insert(objective_vector(inst, sol), sol);
    } while (std::next_permutation(rest.begin(), rest.end()));

    res.wall_s = sw.seconds();
    return res;
}

OracleResult enumerate_pareto_kp_subsets(const Instance& inst) {
    if (inst.kind != ProblemKind::BiKP)
        throw std::invalid_argument("enumerate_pareto_kp_subsets: not a Bi-KP instance");
    if (inst.n > 20)
        throw std::invalid_argument("enumerate_pareto_kp_subsets: n > 20 is too large");
    Stopwatch sw;
    OracleResult res;

    const std::uint32_t limit = 1u << inst.n;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        double w = 0.0, p1 = 0.0, p2 = 0.0;
        for (int i = 0; i < inst.n; ++i) {
            if (!(mask >> i & 1u)) continue;
            w += inst.features.at(i, 0);
            p1 += inst.features.at(i, 1);
            p2 += inst.features.at(i, 2);
        }
        res.enumerated += 1;
        if (w > inst.capacity) continue;
        res.archive.insert({-p1, -p2});
    }

    res.wall_s = sw.seconds();
    return res;
}

OracleResult enumerate_pareto_kp_dp(const Instance& inst, int scale) {
    if (inst.kind != ProblemKind::BiKP)
        throw std::invalid_argument("enumerate_pareto_kp_dp: not a Bi-KP instance");
    if (scale < 1) throw std::invalid_argument("enumerate_pareto_kp_dp: scale must be positive");
    Stopwatch sw;
    OracleResult res;

    const long long cap = static_cast<long long>(std::floor(inst.capacity * scale + 1e-9));
    std::vector<long long> w(inst.n);
    for (int i = 0; i < inst.n; ++i)
        w[i] = static_cast<long long>(std::llround(inst.features.at(i, 0) * scale));

    // dp[c] = non-dominated (profit1, profit2) pairs achievable at weight c
    std::vector<std::vector<std::array<double, 2>>> dp(cap + 1);
    dp[0].push_back({0.0, 0.0});
    auto push_nondom = [](std::vector<std::array<double, 2>>& set, std::array<double, 2> q) {
        for (const auto& e : set)
            if (e[0] >= q[0] && e[1] >= q[1]) return;  // maximization dominance
        set.erase(std::remove_if(set.begin(), set.end(),
                                 [&](const auto& e) {
                                     return q[0] >= e[0] && q[1] >= e[1] &&
                                            (q[0] > e[0] || q[1] > e[1]);
                                 }),
                  set.end());
        set.push_back(q);
    };
    for (int i = 0; i < inst.n; ++i) {
        if (w[i] > cap) continue;
        for (long long c = cap; c >= w[i]; --c) {
            for (const auto& e : dp[c - w[i]]) {
                push_nondom(dp[c],
                            {e[0] + inst.features.at(i, 1), e[1] + inst.features.at(i, 2)});
                res.enumerated += 1;
            }
        }
    }
    for (long long c = 0; c <= cap; ++c)
        for (const auto& e : dp[c]) res.archive.insert({-e[0], -e[1]});

    res.wall_s = sw.seconds();
    return res;
}

namespace {

/// Minimal depot-to-depot route length through a customer subset, brute
/// force over visit orders. Memoized per bitmask.
struct RouteCache {
    const Instance& inst;
    std::unordered_map<std::uint32_t, double> memo;

    double length(std::uint32_t mask) {
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        std::vector<int> nodes;
        for (int i = 0; i < 32; ++i)
            if (mask >> i & 1u) nodes.push_back(i + 1);
        double best = std::numeric_limits<double>::infinity();
        do {
            double len = dist2d(inst, 0, nodes.front(), 0, 1);
            for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
                len += dist2d(inst, nodes[j], nodes[j + 1], 0, 1);
            len += dist2d(inst, nodes.back(), 0, 0, 1);
            best = std::min(best, len);
        } while (std::next_permutation(nodes.begin(), nodes.end()));
        return memo.emplace(mask, best).first->second;
    }
};

void partitions_rec(const Instance& inst, int next, std::vector<std::uint32_t>& blocks,
                    std::vector<double>& loads, RouteCache& cache, OracleResult& res) {
    if (next > inst.n) {
        res.enumerated += 1;
        double total = 0.0, longest = 0.0;
        for (std::uint32_t b : blocks) {
            const double len = cache.length(b);
            total += len;
            longest = std::max(longest, len);
        }
        res.archive.insert({total, longest});
        return;
    }
    const double d = inst.demand(next);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (loads[k] + d > inst.capacity + 1e-9) continue;
        blocks[k] |= 1u << (next - 1);
        loads[k] += d;
        partitions_rec(inst, next + 1, blocks, loads, cache, res);
        loads[k] -= d;
        blocks[k] &= ~(1u << (next - 1));
    }
    blocks.push_back(1u << (next - 1));
    loads.push_back(d);
    partitions_rec(inst, next + 1, blocks, loads, cache, res);
    blocks.pop_back();
    loads.pop_back();
}

}  // namespace

OracleResult enumerate_pareto_cvrp(const Instance& inst) {
    if (inst.kind != ProblemKind::BiCVRP)
        throw std::invalid_argument("enumerate_pareto_cvrp: not a Bi-CVRP instance");
    if (inst.n > 7)
        throw std::invalid_argument("enumerate_pareto_cvrp: n > 7 is too large to enumerate");
    Stopwatch sw;
    OracleResult res;
    RouteCache cache{inst, {}};
    std::vector<std::uint32_t> blocks;
    std::vector<double> loads;
    partitions_rec(inst, 1, blocks, loads, cache, res);
    res.wall_s = sw.seconds();
    return res;
}

OracleResult enumerate_pareto(const Instance& inst) {
    switch (inst.kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: return enumerate_pareto_tsp(inst);
        case ProblemKind::BiCVRP: return enumerate_pareto_cvrp(inst);
        case ProblemKind::BiKP: return enumerate_pareto_kp_subsets(inst);
    }
    throw std::logic_error("unknown problem kind");
}

McEstimate mc_hypervolume(const std::vector<std::vector<double>>& points, const HvContext& ctx,
                          std::uint64_t samples, std::uint64_t seed) {
    ctx.validate();
    if (samples < 1) throw std::invalid_argument("mc_hypervolume: samples must be >= 1");
    const int k = ctx.kappa();

    std::vector<std::vector<double>> clipped;
    clipped.reserve(points.size());
    for (const auto& p : points) {
        std::vector<double> q(k);
        for (int j = 0; j < k; ++j) q[j] = std::clamp(p[j], ctx.ideal[j], ctx.ref[j]);
        clipped.push_back(std::move(q));
    }

    Rng rng(seed);
    std::uint64_t hits = 0;
    std::vector<double> u(k);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (int j = 0; j < k; ++j) u[j] = ctx.ideal[j] + (ctx.ref[j] - ctx.ideal[j]) * rng.next_double();
        for (const auto& p : clipped) {
            bool dom = true;
            for (int j = 0; j < k; ++j)
                if (p[j] > u[j]) {
                    dom = false;
                    break;
                }
            if (dom) {
                ++hits;
                break;
            }
        }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(samples);
    McEstimate est;
    est.value = frac;
    est.std_error = std::sqrt(std::max(frac * (1.0 - frac), 0.0) / static_cast<double>(samples));
    return est;
}

}  // namespace wecon
