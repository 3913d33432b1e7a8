#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wecon/hypervolume.hpp"
#include "wecon/oracle.hpp"
#include "wecon/pareto.hpp"
#include "wecon/rng.hpp"
#include "wecon/weights.hpp"

using namespace wecon;

namespace {

// Neumaier compensated summation; exact for the lattice fractions in use.
double compensated_sum(const std::vector<double>& xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

// quadratic-scan non-domination oracle
std::vector<std::vector<double>> pairwise_scan(const std::vector<std::vector<double>>& pts) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < pts.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(pts[j], pts[i])) keep = false;
            if (pts[j] == pts[i] && j < i) keep = false;  // duplicate, keep first
        }
        if (keep) out.push_back(pts[i]);
    }
    return out;
}

// inclusion-exclusion union volume for <= 5 boxes [p, ref]
double incl_excl_hv(const std::vector<std::vector<double>>& pts, const HvContext& ctx) {
    const int n = static_cast<int>(pts.size());
    const int k = ctx.kappa();
    double volume = 0.0;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<double> corner(ctx.ideal);
        int bits = 0;
        for (int i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            ++bits;
            for (int j = 0; j < k; ++j)
                corner[j] = std::max(corner[j], std::clamp(pts[i][j], ctx.ideal[j], ctx.ref[j]));
        }
        double v = 1.0;
        for (int j = 0; j < k; ++j) v *= std::max(0.0, ctx.ref[j] - corner[j]);
        volume += (bits % 2 ? 1.0 : -1.0) * v;
    }
    double box = 1.0;
    for (int j = 0; j < k; ++j) box *= ctx.ref[j] - ctx.ideal[j];
    return volume / box;
}

}  // namespace

TEST_CASE("das-dennis lattice counts and order") {
    const auto w2 = das_dennis_weights(2, 100);
    REQUIRE(w2.size() == 101);
    CHECK(w2.front().lambda == std::vector<double>{0.0, 1.0});
    CHECK(w2[1].lambda[0] == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(w2[1].lambda[1] == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(w2.back().lambda == std::vector<double>{1.0, 0.0});

    CHECK(das_dennis_weights(3, 13).size() == 105);
    CHECK(das_dennis_count(3, 13) == 105);

    const auto w1 = das_dennis_weights(2, 1);
    REQUIRE(w1.size() == 2);
    CHECK(w1[0].lambda == std::vector<double>{0.0, 1.0});
    CHECK(w1[1].lambda == std::vector<double>{1.0, 0.0});
}

TEST_CASE("das-dennis entries sum to exactly one under compensated summation") {
    for (const auto& [kappa, H] : std::vector<std::pair<int, int>>{{2, 100}, {3, 13}}) {
        for (const auto& w : das_dennis_weights(kappa, H)) {
            CHECK(compensated_sum(w.lambda) == 1.0);
            w.validate();
        }
    }
}

TEST_CASE("weighted-sum scalarization") {
    WeightVector half{{0.5, 0.5}}, first{{1.0, 0.0}}, second{{0.0, 1.0}};
    const std::vector<double> F{3.0, 5.0};
    CHECK(scalarize_ws(F, half) == doctest::Approx(4.0));
    CHECK(scalarize_ws(F, first) == doctest::Approx(3.0));
    CHECK(scalarize_ws(F, second) == doctest::Approx(5.0));
    WeightVector bad{{0.5, 0.25, 0.25}};
    CHECK_THROWS(scalarize_ws(F, bad));
}

TEST_CASE("weighted-sum is linear and its argmin ignores positive rescaling") {
    Rng rng(3);
    std::vector<std::vector<double>> set;
    for (int i = 0; i < 12; ++i) set.push_back({rng.next_double(), rng.next_double()});
    WeightVector lam{{0.3, 0.7}};
    WeightVector scaled{{0.6, 1.4}};  // not normalized on purpose
    auto argmin = [&](const WeightVector& w) {
        int best = 0;
        for (int i = 1; i < 12; ++i)
            if (scalarize_ws(set[i], w) < scalarize_ws(set[best], w)) best = i;
        return best;
    };
    CHECK(argmin(lam) == argmin(scaled));

    const std::vector<double> a{1.0, 2.0}, b{3.0, -1.0};
    std::vector<double> apb{a[0] + b[0], a[1] + b[1]};
    CHECK(scalarize_ws(apb, lam) ==
          doctest::Approx(scalarize_ws(a, lam) + scalarize_ws(b, lam)));
}

TEST_CASE("Tchebycheff scalarization") {
    WeightVector half{{0.5, 0.5}}, first{{1.0, 0.0}};
    const std::vector<double> F{3.0, 5.0}, z{0.0, 0.0};
    CHECK(scalarize_tch(F, half, z) == doctest::Approx(2.5));
    CHECK(scalarize_tch(z, half, z) == 0.0);
    CHECK(scalarize_tch(F, first, z) == doctest::Approx(3.0));
}

TEST_CASE("dominance definition") {
    CHECK(dominates(std::vector<double>{1, 2}, std::vector<double>{2, 2}));
    CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{1, 2}));
    CHECK_FALSE(dominates(std::vector<double>{1, 3}, std::vector<double>{2, 2}));
    CHECK_FALSE(dominates(std::vector<double>{2, 2}, std::vector<double>{1, 2}));
    CHECK_THROWS(dominates(std::vector<double>{1}, std::vector<double>{1, 2}));
}

TEST_CASE("pareto filter basics") {
    const auto a = pareto_filter({{1, 2}, {2, 1}, {2, 2}});
    CHECK(a.size() == 2);
    const auto single = pareto_filter({{3, 4}});
    CHECK(single.size() == 1);
    CHECK(pareto_filter({}).empty());
    const auto dup = pareto_filter({{1, 1}, {1, 1}, {1, 1}});
    CHECK(dup.size() == 1);
}

TEST_CASE("pareto filter agrees with the quadratic-scan oracle on 200 random 3-D points") {
    Rng rng(7);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back({rng.uniform_int(0, 9) / 10.0, rng.next_double(), rng.next_double()});
    auto got = pareto_filter(pts).points();
    auto want = pairwise_scan(pts);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);

    // output is mutually non-dominated
    for (std::size_t i = 0; i < got.size(); ++i)
        for (std::size_t j = 0; j < got.size(); ++j)
            if (i != j) CHECK_FALSE(dominates(got[i], got[j]));
}

TEST_CASE("hypervolume endpoints and the worked two-point example") {
    HvContext ctx{{1.0, 1.0}, {0.0, 0.0}};
    CHECK(hypervolume({{0.0, 0.0}}, ctx) == 1.0);
    CHECK(hypervolume({{1.0, 1.0}}, ctx) == 0.0);
    const double hv = hypervolume({{0.2, 0.6}, {0.5, 0.3}}, ctx);
    CHECK(std::abs(hv - 0.47) < 1e-12);
}

TEST_CASE("hypervolume matches inclusion-exclusion on small archives") {
    Rng rng(11);
    for (int kappa : {2, 3}) {
        std::vector<double> r(kappa, 1.0), z(kappa, 0.0);
        HvContext ctx{r, z};
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<std::vector<double>> pts;
            const int m = 1 + rng.uniform_int(0, 4);
            for (int i = 0; i < m; ++i) {
                std::vector<double> p(kappa);
                for (auto& x : p) x = rng.next_double();
                pts.push_back(std::move(p));
            }
            CHECK(hypervolume(pts, ctx) == doctest::Approx(incl_excl_hv(pts, ctx)).epsilon(1e-9));
        }
    }
}

TEST_CASE("hypervolume agrees with the Monte-Carlo oracle") {
    Rng rng(13);
    for (int kappa : {2, 3}) {
        HvContext ctx{std::vector<double>(kappa, 1.0), std::vector<double>(kappa, 0.0)};
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<std::vector<double>> pts;
            for (int i = 0; i < 6; ++i) {
                std::vector<double> p(kappa);
                for (auto& x : p) x = rng.next_double();
                pts.push_back(std::move(p));
            }
            const double exact = hypervolume(pts, ctx);
            const auto mc = mc_hypervolume(pts, ctx, 100000, 1234 + trial);
            CHECK(std::abs(exact - mc.value) <= 4.0 * mc.std_error + 1e-12);
        }
    }
}

TEST_CASE("hypervolume insertion monotonicity") {
    Rng rng(17);
    HvContext ctx{{1.0, 1.0}, {0.0, 0.0}};
    std::vector<std::vector<double>> pts;
    double last = 0.0;
    for (int i = 0; i < 50; ++i) {
        pts.push_back({rng.next_double(), rng.next_double()});
        const double hv = hypervolume(pts, ctx);
        CHECK(hv >= last - 1e-12);
        last = hv;
    }
    // inserting a dominated point changes nothing
    ParetoArchive archive = pareto_filter(pts);
    const double before = hypervolume(archive, ctx);
    std::vector<double> dominated{archive.points()[0][0] + 1e-3, archive.points()[0][1] + 1e-3};
    pts.push_back(dominated);
    CHECK(hypervolume(pts, ctx) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("points outside the box are clipped") {
    HvContext ctx{{1.0, 1.0}, {0.0, 0.0}};
    CHECK(hypervolume({{-0.5, -0.5}}, ctx) == 1.0);
    CHECK(hypervolume({{2.0, 2.0}}, ctx) == 0.0);
    CHECK(hypervolume({{-1.0, 0.5}}, ctx) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hv gap") {
    CHECK(hv_gap(0.7077, 0.7079) == doctest::Approx(0.03).epsilon(0.1));
    CHECK(hv_gap(0.42, 0.42) == 0.0);
    CHECK(hv_gap(0.5, 1.0) == doctest::Approx(50.0));
    CHECK_THROWS(hv_gap(0.5, 0.0));
}

TEST_CASE("built-in reference table") {
    auto bitsp20 = builtin_hv_context(ProblemKind::BiTSP, 20);
    REQUIRE(bitsp20.has_value());
    CHECK(bitsp20->ref == std::vector<double>{20.0, 20.0});
    CHECK(bitsp20->ideal == std::vector<double>{0.0, 0.0});
    auto cvrp50 = builtin_hv_context(ProblemKind::BiCVRP, 50);
    REQUIRE(cvrp50.has_value());
    CHECK(cvrp50->ref == std::vector<double>{45.0, 4.0});
    auto kp100 = builtin_hv_context(ProblemKind::BiKP, 100);
    REQUIRE(kp100.has_value());
    CHECK(kp100->ref == std::vector<double>{-20.0, -20.0});
    CHECK(kp100->ideal == std::vector<double>{-50.0, -50.0});
    kp100->validate();
    auto tri50 = builtin_hv_context(ProblemKind::TriTSP, 50);
    REQUIRE(tri50.has_value());
    CHECK(tri50->ref == std::vector<double>{35.0, 35.0, 35.0});
    CHECK_FALSE(builtin_hv_context(ProblemKind::BiTSP, 33).has_value());
}
