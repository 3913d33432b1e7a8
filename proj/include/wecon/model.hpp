#ifndef WECON_MODEL_HPP
#define WECON_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wecon/nn.hpp"
#include "wecon/params.hpp"
#include "wecon/problems.hpp"
#include "wecon/weights.hpp"

namespace wecon {

enum class DecoderKind { Plain, RF, CCO };
enum class EncoderKind { Full, AblationApprox };

std::string decoder_name(DecoderKind k);
DecoderKind decoder_from_name(const std::string& s);

/// Architecture hyperparameters. The feed-forward hidden width is 2d
/// rounded up to a multiple of eight.
struct ModelConfig {
    int d = 128;
    int L = 6;
    int M = 8;
    double C = 10.0;
    DecoderKind decoder = DecoderKind::RF;
    bool grf = true;
    EncoderKind encoder = EncoderKind::Full;
    int experts = 4;

    int ff_hidden() const { return ((2 * d + 7) / 8) * 8; }

    void validate() const {
        if (d < 1 || M < 1 || d % M != 0)
            throw std::invalid_argument("model config: M must divide d");
        if (L < 1) throw std::invalid_argument("model config: L must be >= 1");
        if (!(C > 0.0)) throw std::invalid_argument("model config: C must be positive");
        if (decoder == DecoderKind::CCO && experts < 1)
            throw std::invalid_argument("model config: experts must be >= 1");
    }
};

int context_width(ProblemKind kind, int d);

/// Build the full parameter table for (config, problem). Each matrix is
/// initialized uniform(-1/sqrt(d), 1/sqrt(d)) from a stream seeded by
/// (seed, name), so a parameter's values do not depend on which other
/// parameters the configuration declares.
template <class S>
ParameterTable<S> init_parameters(const ModelConfig& cfg, ProblemKind kind, std::uint64_t seed);

/// Feature table as the network sees it (Bi-CVRP demand normalized by the
/// vehicle capacity).
Matrix<double> model_features(const Instance& inst);

template <class S>
struct EncoderOutput {
    Var H;  // n x d node embeddings
    Var A;  // 1 x d weight embedding
};

// ---- implementation ----

namespace model_detail {

template <class S>
MhaParams<S> mha_params(const BoundParams<S>& p, const std::string& prefix) {
    return MhaParams<S>{p(prefix + ".Wq"), p(prefix + ".Wk"), p(prefix + ".Wv"),
                        p(prefix + ".Wo"), p(prefix + ".bo")};
}

template <class S>
SwigluParams<S> ff_params(const BoundParams<S>& p, const std::string& prefix) {
    return SwigluParams<S>{p(prefix + ".W1"), p(prefix + ".b1"), p(prefix + ".W2"),
                           p(prefix + ".b2"), p(prefix + ".Wout")};
}

constexpr double kRmsEps = 1e-6;

/// RMSNorm(x + sub(x)) then RMSNorm(. + FF(.)), the residual pattern every
/// attention block uses.
template <class S>
Var residual_norm(Tape<S>& t, const BoundParams<S>& p, Var x, Var sub,
                  const std::string& prefix) {
    Var y = t.rmsnorm(t.add(x, sub), p(prefix + ".n1.g"), S(kRmsEps));
    Var f = swiglu_ff(t, y, ff_params(p, prefix + ".ff"));
    return t.rmsnorm(t.add(y, f), p(prefix + ".n2.g"), S(kRmsEps));
}

}  // namespace model_detail

/// H0 = G W0 + b0 per node, A0 = lambda W_l + b_l as a single token.
template <class S>
EncoderOutput<S> embed_inputs(Tape<S>& t, const BoundParams<S>& p, const Instance& inst,
                              const WeightVector& lambda) {
    if (lambda.kappa() != inst.kappa)
        throw std::invalid_argument("embed_inputs: weight dimension mismatch");
    Var G = t.constant(model_features(inst).template cast<S>());
    Matrix<S> lam(1, lambda.kappa());
    for (int j = 0; j < lambda.kappa(); ++j) lam.at(0, j) = static_cast<S>(lambda.lambda[j]);
    Var lv = t.constant(std::move(lam));
    return {linear(t, G, p("embed.node.W"), p("embed.node.b")),
            linear(t, lv, p("embed.weight.W"), p("embed.weight.b"))};
}

/// One encoder layer: MHSA over nodes, weight<-nodes and nodes<-weight
/// cross attention, then gated residual fusion of the weight embedding
/// into every node. With GRF disabled the layer returns H2 unchanged; the
/// approximated ablation encoder keeps only the nodes<-weight block.
template <class S>
EncoderOutput<S> encoder_layer(Tape<S>& t, const BoundParams<S>& p, Var H, Var A,
                               const ModelConfig& cfg, int layer) {
    using model_detail::mha_params;
    using model_detail::residual_norm;
    const std::string lp = "enc" + std::to_string(layer);

    Var mhsa = multi_head(t, H, H, H, mha_params(p, lp + ".self"), cfg.M);
    Var H1 = residual_norm(t, p, H, mhsa, lp + ".self");

    Var A1 = A;
    if (cfg.encoder == EncoderKind::Full) {
        Var aw = multi_head(t, A, H1, H1, mha_params(p, lp + ".cross_w"), cfg.M);
        A1 = residual_norm(t, p, A, aw, lp + ".cross_w");
    }

    Var hw = multi_head(t, H1, A1, A1, mha_params(p, lp + ".cross_h"), cfg.M);
    Var H2 = residual_norm(t, p, H1, hw, lp + ".cross_h");

    if (!cfg.grf || cfg.encoder == EncoderKind::AblationApprox) return {H2, A1};

    const int n = t.val(H2).rows;
    Var An = t.broadcast_rows(A1, n);
    Var gate_h = t.gelu(linear(t, t.concat_cols(H2, An), p(lp + ".grf.W4"), p(lp + ".grf.b4")));
    Var gate = t.sigmoid(linear(t, gate_h, p(lp + ".grf.W5"), p(lp + ".grf.b5")));
    Var inject = t.mul_rowvec(gate, t.matmul(A1, p(lp + ".grf.W3")));
    return {t.add(H2, inject), A1};
}

template <class S>
EncoderOutput<S> encode(Tape<S>& t, const BoundParams<S>& p, const Instance& inst,
                        const WeightVector& lambda, const ModelConfig& cfg) {
    EncoderOutput<S> e = embed_inputs(t, p, inst, lambda);
    for (int l = 0; l < cfg.L; ++l) e = encoder_layer(t, p, e.H, e.A, cfg, l);
    return e;
}

/// Raw (unprojected) context row: first+last node embeddings for MOTSP,
/// last node embedding plus remaining capacity for Bi-CVRP, mean-pooled
/// graph embedding plus remaining capacity for Bi-KP.
template <class S>
Var context_query(Tape<S>& t, ProblemKind kind, const RolloutState& state, Var H,
                  const Instance& inst) {
    switch (kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: {
            if (state.first < 0)
                throw std::logic_error("context_query: MOTSP rollout not started");
            return t.concat_cols(t.pick_rows(H, {state.first}), t.pick_rows(H, {state.current}));
        }
        case ProblemKind::BiCVRP: {
            Var last = t.pick_rows(H, {state.current});
            Var cap = t.constant(
                Matrix<S>(1, 1, {static_cast<S>(state.remaining / inst.capacity)}));
            return t.concat_cols(last, cap);
        }
        case ProblemKind::BiKP: {
            Var cap = t.constant(
                Matrix<S>(1, 1, {static_cast<S>(state.remaining / inst.capacity)}));
            return t.concat_cols(t.mean_rows(H), cap);
        }
    }
    throw std::logic_error("unknown problem kind");
}

/// Residual fusion of the query with the weight embedding:
/// x + ReLU([x || A] W6 + b6) W7 + b7.
template <class S>
Var rf_block(Tape<S>& t, const BoundParams<S>& p, Var x, Var A) {
    Var h = t.relu(linear(t, t.concat_cols(x, A), p("dec.rf.W6"), p("dec.rf.b6")));
    return t.add(x, linear(t, h, p("dec.rf.W7"), p("dec.rf.b7")));
}

/// Renormalized top-1 gate: the highest-scoring expert (ties -> lowest
/// index) carries weight one, the rest zero.
std::vector<double> top1_gate(const std::vector<double>& softmax_scores);

struct CcoTrace {
    int expert = -1;
    std::vector<double> gate;
};

/// Sparse mixture-of-experts fusion: q = RMSNorm(sum_i G_i E_i(x) + x).
template <class S>
Var cco_block(Tape<S>& t, const BoundParams<S>& p, Var x, CcoTrace* trace = nullptr) {
    Var scores = t.softmax_rows(linear(t, x, p("dec.cco.gate.W"), p("dec.cco.gate.b")));
    const Matrix<S>& s = t.val(scores);
    std::vector<double> probs(s.v.begin(), s.v.end());
    const std::vector<double> gate = top1_gate(probs);
    int chosen = 0;
    for (std::size_t i = 0; i < gate.size(); ++i)
        if (gate[i] > 0.0) chosen = static_cast<int>(i);
    if (trace) {
        trace->expert = chosen;
        trace->gate = gate;
    }
    const std::string ep = "dec.cco.e" + std::to_string(chosen);
    Var h = t.relu(linear(t, x, p(ep + ".W1"), p(ep + ".b1")));
    Var expert = linear(t, h, p(ep + ".W2"), p(ep + ".b2"));
    Var mix = t.scale(expert, static_cast<S>(gate[chosen]));
    return t.rmsnorm(t.add(mix, x), p("dec.cco.n.g"), S(model_detail::kRmsEps));
}

template <class S>
struct DecoderStep {
    Var logits;     // pre-mask tanh-clipped scores, 1 x node_count
    Var log_probs;  // masked log-probabilities, 1 x node_count
};

/// One decoding step: project the raw context, attend over [H || A],
/// apply the configured fusion, then C*tanh(q h_i / sqrt(d)) compatibility
/// logits with infeasible nodes masked out.
template <class S>
DecoderStep<S> decoder_step(Tape<S>& t, const BoundParams<S>& p, Var hq_raw, Var H, Var A,
                            const std::vector<std::uint8_t>& mask, const ModelConfig& cfg,
                            CcoTrace* trace = nullptr) {
    bool any = false;
    for (std::uint8_t m : mask) any = any || (m != 0);
    if (!any) throw std::invalid_argument("decoder_step: no feasible node");

    Var hq = linear(t, hq_raw, p("dec.ctx.W"), p("dec.ctx.b"));
    Var HA = t.concat_rows(H, A);
    Var h1 = multi_head(t, hq, HA, HA, model_detail::mha_params(p, "dec.mha"), cfg.M);

    Var qc = h1;
    if (cfg.decoder == DecoderKind::RF) {
        qc = rf_block(t, p, h1, A);
    } else if (cfg.decoder == DecoderKind::CCO) {
        qc = cco_block(t, p, rf_block(t, p, h1, A), trace);
    }

    Var compat = t.scale(t.matmul_nt(qc, H), S(1) / std::sqrt(S(cfg.d)));
    Var logits = t.scale(t.tanh_op(compat), static_cast<S>(cfg.C));
    return {logits, t.log_softmax_rows(logits, &mask)};
}

enum class DecodeMode { Greedy, Sample, Guided };

/// Restricted draw used by guided rollouts: sample from the top-k feasible
/// nodes by probability (ties -> lowest index), renormalized; falls back
/// to the whole feasible set when it is smaller than k.
int guided_sample(const std::vector<double>& probs, const std::vector<std::uint8_t>& mask, int k,
                  Rng& rng);

int greedy_pick(const std::vector<double>& log_probs, const std::vector<std::uint8_t>& mask);
int categorical_pick(const std::vector<double>& probs, const std::vector<std::uint8_t>& mask,
                     Rng& rng);

/// Autoregressive decode of one (instance, weight) subproblem. MOTSP
/// rollouts start from `first_node` without a policy decision; per-step
/// log-probabilities cover policy decisions only.
template <class S>
Solution rollout(const ParameterTable<S>& params, const ModelConfig& cfg, const Instance& inst,
                 const WeightVector& lambda, DecodeMode mode, int guided_k, Rng& rng,
                 int first_node = 0) {
    Tape<S> t(false);
    BoundParams<S> p(t, params, false);
    EncoderOutput<S> enc = encode(t, p, inst, lambda, cfg);
    const std::size_t base = t.size();

    RolloutState state = initial_state(inst);
    Solution sol;
    if (inst.kind == ProblemKind::BiTSP || inst.kind == ProblemKind::TriTSP) {
        state = step(inst, state, first_node);
        sol.sequence.push_back(first_node);
    }

    while (!is_terminal(inst, state)) {
        const auto mask = feasible_mask(inst, state);
        Var hq = context_query<S>(t, inst.kind, state, enc.H, inst);
        DecoderStep<S> ds = decoder_step(t, p, hq, enc.H, enc.A, mask, cfg);
        const Matrix<S>& lp = t.val(ds.log_probs);
        std::vector<double> logp(lp.v.size());
        for (std::size_t i = 0; i < lp.v.size(); ++i) logp[i] = static_cast<double>(lp.v[i]);

        int action;
        if (mode == DecodeMode::Greedy) {
            action = greedy_pick(logp, mask);
        } else {
            std::vector<double> probs(logp.size(), 0.0);
            for (std::size_t i = 0; i < logp.size(); ++i)
                if (mask[i]) probs[i] = std::exp(logp[i]);
            action = mode == DecodeMode::Sample ? categorical_pick(probs, mask, rng)
                                                : guided_sample(probs, mask, guided_k, rng);
        }
        sol.sequence.push_back(action);
        sol.step_logp.push_back(logp[action]);
        state = step(inst, state, action);
        t.truncate(base);
    }

    sol.objectives = objective_vector(inst, sol);
    sol.feasible = true;
    return sol;
}

/// Teacher-forced log-likelihoods of recorded trajectories under the
/// current parameters, sharing one encoder pass. Returns the
/// length-normalized log-probability (implicit reward) per trajectory.
template <class S>
std::vector<Var> replay_avg_logp(Tape<S>& t, const BoundParams<S>& p, const ModelConfig& cfg,
                                 const Instance& inst, const WeightVector& lambda,
                                 const std::vector<const Solution*>& sols) {
    EncoderOutput<S> enc = encode(t, p, inst, lambda, cfg);
    std::vector<Var> rewards;
    rewards.reserve(sols.size());
    const bool forced_start =
        inst.kind == ProblemKind::BiTSP || inst.kind == ProblemKind::TriTSP;
    for (const Solution* sol : sols) {
        RolloutState state = initial_state(inst);
        std::size_t pos = 0;
        if (forced_start) {
            state = step(inst, state, sol->sequence.at(0));
            pos = 1;
        }
        std::vector<Var> picks;
        picks.reserve(sol->sequence.size() - pos);
        for (; pos < sol->sequence.size(); ++pos) {
            const int action = sol->sequence[pos];
            const auto mask = feasible_mask(inst, state);
            Var hq = context_query<S>(t, inst.kind, state, enc.H, inst);
            DecoderStep<S> ds = decoder_step(t, p, hq, enc.H, enc.A, mask, cfg);
            picks.push_back(t.pick(ds.log_probs, 0, action));
            state = step(inst, state, action);
        }
        if (picks.empty())
            rewards.push_back(t.scalar(S(0)));
        else
            rewards.push_back(t.scale(t.add_n(picks), S(1) / S(picks.size())));
    }
    return rewards;
}

/// Cosine similarity between the weight embedding and the mean node
/// embedding (encoder conditioning diagnostic).
template <class S>
double encoder_cosine(const Matrix<S>& H, const Matrix<S>& A) {
    std::vector<double> mean(H.cols, 0.0);
    for (int i = 0; i < H.rows; ++i)
        for (int j = 0; j < H.cols; ++j) mean[j] += static_cast<double>(H.at(i, j));
    for (double& m : mean) m /= H.rows;
    double dot = 0.0, na = 0.0, nm = 0.0;
    for (int j = 0; j < H.cols; ++j) {
        const double a = static_cast<double>(A.at(0, j));
        dot += a * mean[j];
        na += a * a;
        nm += mean[j] * mean[j];
    }
    const double denom = std::sqrt(na) * std::sqrt(nm);
    return denom > 0.0 ? dot / denom : 0.0;
}

template <class S>
ParameterTable<S> init_parameters(const ModelConfig& cfg, ProblemKind kind, std::uint64_t seed) {
    cfg.validate();
    ParameterTable<S> table;
    const int d = cfg.d;
    const double bound = 1.0 / std::sqrt(static_cast<double>(d));
    const int dff = cfg.ff_hidden();

    auto mat = [&](const std::string& name, int r, int c) {
        init_uniform(table.add(name, {r, c}), bound, seed);
    };
    auto bias = [&](const std::string& name, int len) { table.add(name, {len}); };
    auto gain = [&](const std::string& name, int len) {
        table.add(name, {len}).value.fill(S(1));
    };
    auto mha_core = [&](const std::string& prefix) {
        mat(prefix + ".Wq", d, d);
        mat(prefix + ".Wk", d, d);
        mat(prefix + ".Wv", d, d);
        mat(prefix + ".Wo", d, d);
        bias(prefix + ".bo", d);
    };
    auto attn_block = [&](const std::string& prefix) {
        mha_core(prefix);
        gain(prefix + ".n1.g", d);
        mat(prefix + ".ff.W1", d, dff);
        bias(prefix + ".ff.b1", dff);
        mat(prefix + ".ff.W2", d, dff);
        bias(prefix + ".ff.b2", dff);
        mat(prefix + ".ff.Wout", dff, d);
        gain(prefix + ".n2.g", d);
    };

    mat("embed.node.W", feature_width(kind), d);
    bias("embed.node.b", d);
    mat("embed.weight.W", kappa_of(kind), d);
    bias("embed.weight.b", d);

    for (int l = 0; l < cfg.L; ++l) {
        const std::string lp = "enc" + std::to_string(l);
        attn_block(lp + ".self");
        if (cfg.encoder == EncoderKind::Full) attn_block(lp + ".cross_w");
        attn_block(lp + ".cross_h");
        if (cfg.grf && cfg.encoder == EncoderKind::Full) {
            mat(lp + ".grf.W3", d, d);
            mat(lp + ".grf.W4", 2 * d, d);
            bias(lp + ".grf.b4", d);
            mat(lp + ".grf.W5", d, d);
            bias(lp + ".grf.b5", d);
        }
    }

    mat("dec.ctx.W", context_width(kind, d), d);
    bias("dec.ctx.b", d);
    mha_core("dec.mha");

    if (cfg.decoder == DecoderKind::RF || cfg.decoder == DecoderKind::CCO) {
        mat("dec.rf.W6", 2 * d, d);
        bias("dec.rf.b6", d);
        mat("dec.rf.W7", d, d);
        bias("dec.rf.b7", d);
    }
    if (cfg.decoder == DecoderKind::CCO) {
        mat("dec.cco.gate.W", d, cfg.experts);
        bias("dec.cco.gate.b", cfg.experts);
        for (int e = 0; e < cfg.experts; ++e) {
            const std::string ep = "dec.cco.e" + std::to_string(e);
            mat(ep + ".W1", d, d);
            bias(ep + ".b1", d);
            mat(ep + ".W2", d, d);
            bias(ep + ".b2", d);
        }
        gain("dec.cco.n.g", d);
    }
    return table;
}

}  // namespace wecon

#endif  // WECON_MODEL_HPP
