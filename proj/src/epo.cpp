#include "wecon/epo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wecon {

std::string scalarization_name(Scalarization s) {
    return s == Scalarization::WS ? "ws" : "tch";
}

Scalarization scalarization_from_name(const std::string& s) {
    if (s == "ws") return Scalarization::WS;
    if (s == "tch") return Scalarization::TCH;
    throw std::invalid_argument("unknown scalarization: " + s);
}

void TrainConfig::validate() const {
    if (r < 2) throw std::invalid_argument("train config: r must be >= 2");
    if (c <= 1) throw std::invalid_argument("train config: c must be > 1");
    if (k < 1) throw std::invalid_argument("train config: k must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("train config: beta must be positive");
    if (steps < 0 || batch < 1) throw std::invalid_argument("train config: bad steps/batch");
    if (guided_count > (r + c - 1) / c)
        throw std::invalid_argument("train config: guided_count exceeds ceil(r/c)");
}

std::vector<int> guided_indices(int r, int c, int count) {
    std::vector<int> idx;
    for (int m = 0; 1 + m * c <= r && static_cast<int>(idx.size()) < count; ++m)
        idx.push_back(1 + m * c);
    return idx;
}

namespace {

double scalarized(const Solution& sol, const WeightVector& lambda, Scalarization scal,
                  std::span<const double> ideal) {
    if (scal == Scalarization::WS) return scalarize_ws(sol.objectives, lambda);
    static thread_local std::vector<double> zeros;
    if (ideal.empty()) {
        zeros.assign(sol.objectives.size(), 0.0);
        ideal = zeros;
    }
    return scalarize_tch(sol.objectives, lambda, ideal);
}

}  // namespace

std::vector<PreferencePair> build_pairs(const std::vector<Solution>& sols,
                                        const WeightVector& lambda, Scalarization scal,
                                        std::span<const double> ideal) {
    if (sols.size() < 2) throw std::invalid_argument("build_pairs: need at least two solutions");
    std::vector<double> s(sols.size());
    for (std::size_t i = 0; i < sols.size(); ++i) s[i] = scalarized(sols[i], lambda, scal, ideal);

    std::vector<PreferencePair> pairs;
    pairs.reserve(sols.size() * (sols.size() - 1) / 2);
    for (std::size_t i = 0; i < sols.size(); ++i) {
        for (std::size_t j = i + 1; j < sols.size(); ++j) {
            PreferencePair p;
            if (s[i] < s[j]) {
                p = {sols[i], sols[j], static_cast<int>(i), static_cast<int>(j), 1, s[i], s[j]};
            } else if (s[j] < s[i]) {
                p = {sols[j], sols[i], static_cast<int>(j), static_cast<int>(i), 1, s[j], s[i]};
            } else {
                p = {sols[i], sols[j], static_cast<int>(i), static_cast<int>(j), 0, s[i], s[j]};
            }
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

double implicit_reward(const Solution& sol) {
    if (sol.step_logp.empty()) {
        if (sol.sequence.empty()) return 0.0;
        throw std::invalid_argument("implicit_reward: solution has no recorded log-probs");
    }
    return sol.sum_logp() / static_cast<double>(sol.step_logp.size());
}

double preference_prob(double f_w, double f_l, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("preference_prob: beta must be positive");
    const double x = beta * (f_w - f_l);
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

Rng training_master_rng(std::uint64_t seed) { return Rng(mix_seed(seed, 0x7261696eULL)); }

BatchItemPlan plan_batch_item(ProblemKind kind, int n, int r, Rng& master) {
    BatchItemPlan plan;
    plan.lambda = sample_weight_vector(kappa_of(kind), master);
    plan.inst = generate_instance(kind, n, master.next_u64());
    plan.rollout_seeds.resize(r);
    for (auto& s : plan.rollout_seeds) s = master.next_u64();
    return plan;
}

TrainResult train(ProblemKind kind, int n, const ModelConfig& mcfg, const TrainConfig& tcfg,
                  const std::function<void(int, const ParameterTable<float>&)>& checkpoint_cb) {
    mcfg.validate();
    tcfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    TrainResult res;
    res.params = init_parameters<float>(mcfg, kind, tcfg.seed);
    Rng master = training_master_rng(tcfg.seed);

    struct Item {
        WeightVector lambda;
        Instance inst;
        std::vector<Solution> sols;
        std::vector<PreferencePair> pairs;
    };

    for (int step_i = 1; step_i <= tcfg.steps; ++step_i) {
        // sampling phase: rollouts under read-only parameters
        std::vector<Item> items;
        items.reserve(tcfg.batch);
        for (int b = 0; b < tcfg.batch; ++b) {
            BatchItemPlan plan = plan_batch_item(kind, n, tcfg.r, master);
            Item it;
            it.lambda = std::move(plan.lambda);
            it.inst = std::move(plan.inst);
            it.sols = sample_solutions(res.params, mcfg, it.inst, it.lambda, tcfg,
                                       plan.rollout_seeds);
            it.pairs = build_pairs(it.sols, it.lambda, tcfg.scalarization);
            items.push_back(std::move(it));
        }

        std::size_t total_pairs = 0;
        for (const Item& it : items) total_pairs += it.pairs.size();

        // gradient phase: recompute trajectory likelihoods under the
        // current parameters and differentiate the mean pair loss
        std::vector<Matrix<float>> grads;
        double loss_sum = 0.0;
        double best_sum = 0.0;
        for (const Item& it : items) {
            Tape<float> tape(true);
            BoundParams<float> bound(tape, res.params, true);
            std::vector<const Solution*> ptrs;
            ptrs.reserve(it.sols.size());
            for (const Solution& s : it.sols) ptrs.push_back(&s);
            std::vector<Var> f = replay_avg_logp(tape, bound, mcfg, it.inst, it.lambda, ptrs);

            std::vector<Var> losses;
            for (const PreferencePair& p : it.pairs) {
                if (p.y == 0) continue;
                losses.push_back(epo_pair_loss(tape, f[p.winner_index], f[p.loser_index], p.y,
                                               tcfg.beta));
            }
            double best = std::numeric_limits<double>::infinity();
            for (const Solution& s : it.sols)
                best = std::min(best, scalarized(s, it.lambda, tcfg.scalarization, {}));
            best_sum += best;

            if (losses.empty()) continue;
            Var item_sum = losses.size() == 1 ? losses[0] : tape.add_n(losses);
            for (Var l : losses) loss_sum += tape.val(l).v[0];
            Var root = tape.scale(item_sum, 1.0f / static_cast<float>(total_pairs));
            tape.backward(root);
            std::vector<Matrix<float>> g = bound.collect_grads();
            if (grads.empty()) {
                grads = std::move(g);
            } else {
                for (std::size_t i = 0; i < grads.size(); ++i)
                    for (std::size_t k2 = 0; k2 < grads[i].v.size(); ++k2)
                        grads[i].v[k2] += g[i].v[k2];
            }
        }

        const double mean_loss = total_pairs ? loss_sum / static_cast<double>(total_pairs) : 0.0;
        const double mean_best = best_sum / static_cast<double>(tcfg.batch);

        if (!std::isfinite(mean_loss)) {
            res.aborted = true;
            res.abort_reason = "non-finite loss at step " + std::to_string(step_i);
            return res;
        }
        if (!grads.empty()) {
            try {
                res.params.adam_step(grads, tcfg.lr, tcfg.wd);
            } catch (const std::exception& e) {
                res.aborted = true;
                res.abort_reason = e.what();
                return res;
            }
        }

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.log.push_back(MetricsRow{step_i, mean_loss, mean_best, elapsed});
        if (checkpoint_cb && tcfg.checkpoint_every > 0 && step_i % tcfg.checkpoint_every == 0)
            checkpoint_cb(step_i, res.params);
    }
    return res;
}

}  // namespace wecon
