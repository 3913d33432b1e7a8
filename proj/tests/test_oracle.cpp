#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wecon/model.hpp"
#include "wecon/oracle.hpp"

using namespace wecon;

TEST_CASE("tour enumeration counts match (n-1)!/2") {
    CHECK(enumerate_pareto_tsp(generate_instance(ProblemKind::BiTSP, 4, 1)).enumerated == 3);
    CHECK(enumerate_pareto_tsp(generate_instance(ProblemKind::BiTSP, 6, 1)).enumerated == 60);
    CHECK(enumerate_pareto_tsp(generate_instance(ProblemKind::BiTSP, 8, 1)).enumerated == 2520);
    CHECK_THROWS(enumerate_pareto_tsp(generate_instance(ProblemKind::BiTSP, 11, 1)));
}

TEST_CASE("identical coordinate sets collapse the front to a single point") {
    Instance inst = generate_instance(ProblemKind::BiTSP, 6, 5);
    for (int i = 0; i < 6; ++i) {
        inst.features.at(i, 2) = inst.features.at(i, 0);
        inst.features.at(i, 3) = inst.features.at(i, 1);
    }
    const auto res = enumerate_pareto_tsp(inst);
    CHECK(res.archive.size() == 1);
    CHECK(res.archive.points()[0][0] == doctest::Approx(res.archive.points()[0][1]));
}

TEST_CASE("knapsack: single fitting item dominates the empty selection") {
    Instance inst;
    inst.kind = ProblemKind::BiKP;
    inst.n = 1;
    inst.kappa = 2;
    inst.capacity = 1.0;
    inst.features = Matrix<double>(1, 3, {0.5, 0.3, 0.4});
    const auto res = enumerate_pareto_kp_subsets(inst);
    CHECK(res.enumerated == 2);
    REQUIRE(res.archive.size() == 1);
    CHECK(res.archive.points()[0] == std::vector<double>{-0.3, -0.4});
}

TEST_CASE("knapsack: all items too heavy leaves only the empty selection") {
    Instance inst;
    inst.kind = ProblemKind::BiKP;
    inst.n = 3;
    inst.kappa = 2;
    inst.capacity = 0.1;
    inst.features = Matrix<double>(3, 3, {0.5, 1, 1, 0.6, 2, 2, 0.7, 3, 3});
    const auto res = enumerate_pareto_kp_subsets(inst);
    REQUIRE(res.archive.size() == 1);
    CHECK(res.archive.points()[0][0] == 0.0);
    CHECK(res.archive.points()[0][1] == 0.0);
}

TEST_CASE("knapsack subset enumeration and capacity DP agree") {
    // integral scaled weights keep the DP exact
    Rng rng(9);
    Instance inst;
    inst.kind = ProblemKind::BiKP;
    inst.n = 12;
    inst.kappa = 2;
    inst.capacity = 3.0;
    inst.features = Matrix<double>(12, 3);
    for (int i = 0; i < 12; ++i) {
        inst.features.at(i, 0) = rng.uniform_int(1, 999) / 1000.0;
        inst.features.at(i, 1) = rng.next_double();
        inst.features.at(i, 2) = rng.next_double();
    }
    auto subsets = enumerate_pareto_kp_subsets(inst).archive.points();
    auto dp = enumerate_pareto_kp_dp(inst, 1000).archive.points();
    std::sort(subsets.begin(), subsets.end());
    std::sort(dp.begin(), dp.end());
    REQUIRE(subsets.size() == dp.size());
    for (std::size_t i = 0; i < subsets.size(); ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(subsets[i][j] == doctest::Approx(dp[i][j]).epsilon(1e-9));
}

TEST_CASE("cvrp oracle covers every partition and matches objective evaluation") {
    const Instance inst = generate_instance(ProblemKind::BiCVRP, 5, 3);
    const auto res = enumerate_pareto_cvrp(inst);
    CHECK(res.enumerated >= 1);
    CHECK(res.archive.size() >= 1);
    for (const auto& p : res.archive.points()) CHECK(p[0] >= p[1]);  // total >= longest

    // every random feasible rollout is weakly dominated by an archive member
    Rng rng(4);
    const ModelConfig cfg{.d = 16, .L = 1, .M = 2};
    auto table = init_parameters<float>(cfg, ProblemKind::BiCVRP, 8);
    for (int trial = 0; trial < 10; ++trial) {
        Rng rr(100 + trial);
        const Solution sol = rollout(table, cfg, inst, sample_weight_vector(2, rng),
                                     DecodeMode::Sample, 1, rr);
        bool covered = false;
        for (const auto& p : res.archive.points()) {
            bool weak = true;
            for (int j = 0; j < 2; ++j) weak = weak && p[j] <= sol.objectives[j] + 1e-9;
            covered = covered || weak;
        }
        CHECK(covered);
    }
}

TEST_CASE("oracle hypervolume upper-bounds any solver archive") {
    const Instance inst = generate_instance(ProblemKind::BiTSP, 6, 21);
    const auto oracle = enumerate_pareto_tsp(inst);
    const HvContext ctx{{10.0, 10.0}, {0.0, 0.0}};
    const double hv_exact = hypervolume(oracle.archive, ctx);

    const ModelConfig cfg{.d = 16, .L = 1, .M = 2};
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 5);
    std::vector<std::vector<double>> pool;
    for (const auto& lam : das_dennis_weights(2, 10)) {
        Rng rng(1);
        pool.push_back(rollout(table, cfg, inst, lam, DecodeMode::Greedy, 1, rng).objectives);
    }
    const double hv_model = hypervolume(pareto_filter(pool), ctx);
    CHECK(hv_model <= hv_exact + 1e-12);

    // and every greedy solution is weakly dominated by an oracle member
    for (const auto& f : pool) {
        bool covered = false;
        for (const auto& p : oracle.archive.points()) {
            bool weak = true;
            for (int j = 0; j < 2; ++j) weak = weak && p[j] <= f[j] + 1e-9;
            covered = covered || weak;
        }
        CHECK(covered);
    }
}

TEST_CASE("monte-carlo hypervolume endpoints") {
    const HvContext ctx{{1.0, 1.0}, {0.0, 0.0}};
    const auto full = mc_hypervolume({{0.0, 0.0}}, ctx, 20000, 3);
    CHECK(full.value == 1.0);
    CHECK(full.std_error == 0.0);
    const auto empty = mc_hypervolume({}, ctx, 1000, 3);
    CHECK(empty.value == 0.0);
}

TEST_CASE("monte-carlo hypervolume brackets the worked example") {
    const HvContext ctx{{1.0, 1.0}, {0.0, 0.0}};
    const auto est = mc_hypervolume({{0.2, 0.6}, {0.5, 0.3}}, ctx, 200000, 17);
    CHECK(std::abs(est.value - 0.47) <= 3.0 * est.std_error);
}
