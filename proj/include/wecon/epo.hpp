#ifndef WECON_EPO_HPP
#define WECON_EPO_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wecon/model.hpp"
#include "wecon/problems.hpp"
#include "wecon/weights.hpp"

namespace wecon {

enum class Scalarization { WS, TCH };

std::string scalarization_name(Scalarization s);
Scalarization scalarization_from_name(const std::string& s);

/// Preference-optimization settings. guided_count < 0 selects the default
/// ceil(r/c) guided rollouts per (instance, weight); 0 disables guidance
/// entirely (the plain-PO baseline).
struct TrainConfig {
    int r = 8;
    int c = 8;
    int k = 5;
    double beta = 3.5;
    int steps = 500;
    int batch = 16;
    double lr = 3e-4;
    double wd = 1e-6;
    std::uint64_t seed = 1;
    int guided_count = -1;
    Scalarization scalarization = Scalarization::WS;
    int checkpoint_every = 0;

    int effective_guided_count() const { return guided_count < 0 ? (r + c - 1) / c : guided_count; }
    bool plain_po() const { return effective_guided_count() == 0; }
    void validate() const;
};

/// 1-based rollout indices decoded with guidance: {1 + m*c} clipped to r
/// and to `count` entries.
std::vector<int> guided_indices(int r, int c, int count);

/// Ordered (winner, loser) pair. y = 1 when the winner's scalarized
/// objective is strictly lower; equal objectives keep y = 0.
struct PreferencePair {
    Solution winner, loser;
    int winner_index = -1;
    int loser_index = -1;
    int y = 1;
    double winner_obj = 0.0;
    double loser_obj = 0.0;
};

/// All r(r-1)/2 pairs of the sampled solutions under one weight vector.
std::vector<PreferencePair> build_pairs(const std::vector<Solution>& sols,
                                        const WeightVector& lambda,
                                        Scalarization scal = Scalarization::WS,
                                        std::span<const double> ideal = {});

/// Length-normalized trajectory log-likelihood recorded at sampling time.
double implicit_reward(const Solution& sol);

/// sigma(beta * (f_w - f_l)).
double preference_prob(double f_w, double f_l, double beta);

/// -y * log sigma(beta * (f_w - f_l)) on the tape; y = 0 yields a constant
/// zero with no gradient.
template <class S>
Var epo_pair_loss(Tape<S>& t, Var f_w, Var f_l, int y, double beta) {
    if (y == 0) return t.scalar(S(0));
    Var margin = t.scale(t.sub(f_w, f_l), static_cast<S>(beta));
    return t.scale(t.log_sigmoid(margin), S(-1));
}

/// Decode r solutions for one (instance, weight): guided rollouts at the
/// configured indices, plain sampling elsewhere. One RNG seed per rollout.
template <class S>
std::vector<Solution> sample_solutions(const ParameterTable<S>& params, const ModelConfig& mcfg,
                                       const Instance& inst, const WeightVector& lambda,
                                       const TrainConfig& tcfg,
                                       std::span<const std::uint64_t> rollout_seeds) {
    tcfg.validate();
    if (static_cast<int>(rollout_seeds.size()) != tcfg.r)
        throw std::invalid_argument("sample_solutions: need one seed per rollout");
    const std::vector<int> guided = guided_indices(tcfg.r, tcfg.c, tcfg.effective_guided_count());
    std::vector<Solution> out;
    out.reserve(tcfg.r);
    for (int i = 1; i <= tcfg.r; ++i) {
        const bool is_guided =
            std::find(guided.begin(), guided.end(), i) != guided.end();
        Rng rng(rollout_seeds[i - 1]);
        out.push_back(rollout(params, mcfg, inst, lambda,
                              is_guided ? DecodeMode::Guided : DecodeMode::Sample, tcfg.k, rng));
    }
    return out;
}

/// Master RNG stream that drives one training run's sampling phase; all
/// weight vectors, instance seeds, and rollout seeds are drawn from it in
/// a fixed order.
Rng training_master_rng(std::uint64_t seed);

/// One batch item's sampling plan, drawn from the master stream.
struct BatchItemPlan {
    WeightVector lambda;
    Instance inst;
    std::vector<std::uint64_t> rollout_seeds;
};

BatchItemPlan plan_batch_item(ProblemKind kind, int n, int r, Rng& master);

struct MetricsRow {
    int step = 0;
    double mean_loss = 0.0;
    double mean_best_ws = 0.0;
    double elapsed_s = 0.0;
};

struct TrainResult {
    ParameterTable<float> params;
    std::vector<MetricsRow> log;
    bool aborted = false;
    std::string abort_reason;
};

/// Preference-optimization training loop: per step and batch item, sample
/// a weight vector and an instance, decode r solutions, build pairs,
/// average the pair losses over the batch, and take one Adam step. A
/// non-finite loss aborts and returns the last good parameters.
TrainResult train(ProblemKind kind, int n, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const std::function<void(int, const ParameterTable<float>&)>& checkpoint_cb =
                      nullptr);

}  // namespace wecon

#endif  // WECON_EPO_HPP
