#include "wecon/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wecon {

void WeightVector::validate() const {
    if (lambda.empty()) throw std::invalid_argument("weight vector: empty");
    double sum = 0.0;
    for (double l : lambda) {
        if (l < 0.0) throw std::invalid_argument("weight vector: negative entry");
        sum += l;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("weight vector: entries must sum to 1");
}

long long das_dennis_count(int kappa, int H) {
    // C(H + kappa - 1, kappa - 1)
    long long c = 1;
    for (int i = 1; i <= kappa - 1; ++i) c = c * (H + i) / i;
    return c;
}

namespace {

void lattice_rec(int kappa, int H, int pos, int left, std::vector<int>& m,
                 std::vector<WeightVector>& out) {
    if (pos == kappa - 1) {
        m[pos] = left;
        WeightVector w;
        w.lambda.resize(kappa);
        for (int j = 0; j < kappa; ++j) w.lambda[j] = static_cast<double>(m[j]) / H;
        out.push_back(std::move(w));
        return;
    }
    for (int v = 0; v <= left; ++v) {
        m[pos] = v;
        lattice_rec(kappa, H, pos + 1, left - v, m, out);
    }
}

}  // namespace

std::vector<WeightVector> das_dennis_weights(int kappa, int H) {
    if (kappa < 2) throw std::invalid_argument("das_dennis_weights: kappa must be >= 2");
    if (H < 1) throw std::invalid_argument("das_dennis_weights: H must be >= 1");
    std::vector<WeightVector> out;
    out.reserve(static_cast<std::size_t>(das_dennis_count(kappa, H)));
    std::vector<int> m(kappa, 0);
    lattice_rec(kappa, H, 0, H, m, out);
    return out;
}

WeightVector sample_weight_vector(int kappa, Rng& rng) {
    WeightVector w;
    w.lambda.resize(kappa);
    double sum = 0.0;
    for (int j = 0; j < kappa; ++j) {
        double u = rng.next_double();
        while (u <= 0.0) u = rng.next_double();
        w.lambda[j] = -std::log(u);
        sum += w.lambda[j];
    }
    for (double& l : w.lambda) l /= sum;
    return w;
}

double scalarize_ws(std::span<const double> F, const WeightVector& lambda) {
    if (F.size() != lambda.lambda.size())
        throw std::invalid_argument("scalarize_ws: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j) s += lambda.lambda[j] * F[j];
    return s;
}

double scalarize_tch(std::span<const double> F, const WeightVector& lambda,
                     std::span<const double> ideal) {
    if (F.size() != lambda.lambda.size() || F.size() != ideal.size())
        throw std::invalid_argument("scalarize_tch: dimension mismatch");
    double best = 0.0;
    for (std::size_t j = 0; j < F.size(); ++j)
        best = std::max(best, lambda.lambda[j] * std::abs(F[j] - ideal[j]));
    return best;
}

}  // namespace wecon
