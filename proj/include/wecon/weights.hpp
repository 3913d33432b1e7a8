#ifndef WECON_WEIGHTS_HPP
#define WECON_WEIGHTS_HPP

#include <span>
#include <vector>

#include "wecon/rng.hpp"

namespace wecon {

/// Nonnegative weights summing to one; one subproblem per vector.
struct WeightVector {
    std::vector<double> lambda;

    int kappa() const { return static_cast<int>(lambda.size()); }
    void validate() const;
};

/// Simplex lattice with entries m/H: all C(H+kappa-1, kappa-1) vectors in
/// lexicographically ascending order.
std::vector<WeightVector> das_dennis_weights(int kappa, int H);

/// Number of lattice vectors, C(H+kappa-1, kappa-1).
long long das_dennis_count(int kappa, int H);

/// Uniform draw from the simplex (normalized exponentials).
WeightVector sample_weight_vector(int kappa, Rng& rng);

/// Weighted sum: sum_j lambda_j F_j.
double scalarize_ws(std::span<const double> F, const WeightVector& lambda);

/// Weighted Tchebycheff: max_j lambda_j |F_j - z_j|.
double scalarize_tch(std::span<const double> F, const WeightVector& lambda,
                     std::span<const double> ideal);

}  // namespace wecon

#endif  // WECON_WEIGHTS_HPP
