#include "wecon/hypervolume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wecon {

void HvContext::validate() const {
    if (ref.size() != ideal.size() || ref.empty())
        throw std::invalid_argument("hv context: ref/ideal dimension mismatch");
    for (std::size_t j = 0; j < ref.size(); ++j)
        if (!(ref[j] > ideal[j]))
            throw std::invalid_argument("hv context: ref must exceed ideal in every objective");
}

namespace {

/// 2-D dominated area w.r.t. reference r, for points already inside the
/// box. Sort by f1; surviving points have strictly decreasing f2.
double area_2d(std::vector<std::array<double, 2>> pts, double r1, double r2) {
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double prev_f2 = r2;
    for (const auto& p : pts) {
        if (p[1] >= prev_f2) continue;  // dominated in this sweep
        area += (r1 - p[0]) * (prev_f2 - p[1]);
        prev_f2 = p[1];
    }
    return area;
}

}  // namespace

double hypervolume(const std::vector<std::vector<double>>& points, const HvContext& ctx) {
    ctx.validate();
    const int k = ctx.kappa();
    if (k != 2 && k != 3)
        throw std::invalid_argument("hypervolume: only 2 or 3 objectives supported");

    // clip into [ideal, ref]; points at the reference contribute nothing
    std::vector<std::vector<double>> clipped;
    clipped.reserve(points.size());
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != k)
            throw std::invalid_argument("hypervolume: point dimension mismatch");
        std::vector<double> q(k);
        for (int j = 0; j < k; ++j) q[j] = std::clamp(p[j], ctx.ideal[j], ctx.ref[j]);
        clipped.push_back(std::move(q));
    }

    double box = 1.0;
    for (int j = 0; j < k; ++j) box *= ctx.ref[j] - ctx.ideal[j];

    if (clipped.empty()) return 0.0;

    if (k == 2) {
        std::vector<std::array<double, 2>> pts;
        pts.reserve(clipped.size());
        for (const auto& p : clipped) pts.push_back({p[0], p[1]});
        return area_2d(std::move(pts), ctx.ref[0], ctx.ref[1]) / box;
    }

    // k == 3: sweep slabs along the third coordinate; each slab contributes
    // (2-D area of points at or below its bottom) x slab height.
    std::vector<double> levels;
    levels.reserve(clipped.size() + 1);
    for (const auto& p : clipped) levels.push_back(p[2]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    levels.push_back(ctx.ref[2]);

    double volume = 0.0;
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        const double height = levels[l + 1] - levels[l];
        if (height <= 0.0) continue;
        std::vector<std::array<double, 2>> slab;
        for (const auto& p : clipped)
            if (p[2] <= levels[l]) slab.push_back({p[0], p[1]});
        volume += area_2d(std::move(slab), ctx.ref[0], ctx.ref[1]) * height;
    }
    return volume / box;
}

double hypervolume(const ParetoArchive& archive, const HvContext& ctx) {
    return hypervolume(archive.points(), ctx);
}

double hv_gap(double hv, double hv_ref) {
    if (!(hv_ref > 0.0)) throw std::invalid_argument("hv_gap: reference HV must be positive");
    return (hv_ref - hv) / hv_ref * 100.0;
}

std::optional<HvContext> builtin_hv_context(ProblemKind kind, int n) {
    const auto ctx2 = [](double r, double z) {
        return HvContext{{r, r}, {z, z}};
    };
    switch (kind) {
        case ProblemKind::BiTSP:
            switch (n) {
                case 20: return ctx2(20, 0);
                case 50: return ctx2(35, 0);
                case 100: return ctx2(65, 0);
                case 150: return ctx2(85, 0);
                case 200: return ctx2(115, 0);
                case 500: return ctx2(250, 0);
                case 1000: return ctx2(450, 0);
            }
            break;
        case ProblemKind::BiCVRP:
            switch (n) {
                case 20: return HvContext{{30, 4}, {0, 0}};
                case 50: return HvContext{{45, 4}, {0, 0}};
                case 100: return HvContext{{80, 4}, {0, 0}};
            }
            break;
        case ProblemKind::BiKP:
            // profits are negated internally, so ref/ideal flip sign too
            switch (n) {
                case 50: return ctx2(-5, -30);
                case 100: return ctx2(-20, -50);
                case 200: return ctx2(-30, -75);
                case 500: return ctx2(-90, -150);
                case 1000: return ctx2(-130, -260);
            }
            break;
        case ProblemKind::TriTSP:
            switch (n) {
                case 20: return HvContext{{20, 20, 20}, {0, 0, 0}};
                case 50: return HvContext{{35, 35, 35}, {0, 0, 0}};
                case 100: return HvContext{{65, 65, 65}, {0, 0, 0}};
            }
            break;
    }
    return std::nullopt;
}

}  // namespace wecon
