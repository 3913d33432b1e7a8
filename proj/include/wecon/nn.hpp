#ifndef WECON_NN_HPP
#define WECON_NN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wecon/tape.hpp"

namespace wecon {

/// x W + b; pass an invalid Var to skip the bias.
template <class S>
Var linear(Tape<S>& t, Var x, Var W, Var b = Var{}) {
    Var y = t.matmul(x, W);
    if (b.valid()) y = t.add_rowvec(y, b);
    return y;
}

/// Gated feed-forward: [SiLU(x W1 + b1) ⊙ (x W2 + b2)] Wout.
/// The two branch projections map d -> d_ff, the output projection back to d.
template <class S>
struct SwigluParams {
    Var W1, b1, W2, b2, Wout;
};

template <class S>
Var swiglu_ff(Tape<S>& t, Var x, const SwigluParams<S>& p) {
    Var gate = t.silu(linear(t, x, p.W1, p.b1));
    Var value = linear(t, x, p.W2, p.b2);
    return t.matmul(t.mul(gate, value), p.Wout);
}

/// Single scaled-dot-product head with per-head projections:
/// softmax((Q Wq)(K Wk)^T / sqrt(d')) (V Wv). Masked keys get -inf logits.
template <class S>
Var attention_head(Tape<S>& t, Var Q, Var K, Var V, Var Wq, Var Wk, Var Wv,
                   const std::vector<std::uint8_t>* key_mask = nullptr) {
    const int dp = t.val(Wq).cols;
    Var scores = t.scale(t.matmul_nt(t.matmul(Q, Wq), t.matmul(K, Wk)),
                         S(1) / std::sqrt(S(dp)));
    Var probs = t.softmax_rows(scores, key_mask);
    return t.matmul(probs, t.matmul(V, Wv));
}

template <class S>
struct MhaParams {
    Var Wq, Wk, Wv;  // d_q x d, d_kv x d, d_kv x d (heads are column blocks)
    Var Wo, bo;      // d x d, 1 x d
};

/// Multi-head attention: per-head column blocks of the fused projections,
/// concatenated and passed through the output projection.
template <class S>
Var multi_head(Tape<S>& t, Var Q, Var K, Var V, const MhaParams<S>& p, int heads,
               const std::vector<std::uint8_t>* key_mask = nullptr) {
    const int d = t.val(p.Wq).cols;
    if (d % heads != 0)
        throw std::invalid_argument("multi_head: width " + std::to_string(d) +
                                    " not divisible by " + std::to_string(heads) + " heads");
    const int dp = d / heads;
    const S inv_sqrt = S(1) / std::sqrt(S(dp));

    Var Qf = t.matmul(Q, p.Wq);
    Var Kf = t.matmul(K, p.Wk);
    Var Vf = t.matmul(V, p.Wv);

    std::vector<Var> outs;
    outs.reserve(heads);
    for (int m = 0; m < heads; ++m) {
        Var qh = t.slice_cols(Qf, m * dp, dp);
        Var kh = t.slice_cols(Kf, m * dp, dp);
        Var vh = t.slice_cols(Vf, m * dp, dp);
        Var probs = t.softmax_rows(t.scale(t.matmul_nt(qh, kh), inv_sqrt), key_mask);
        outs.push_back(t.matmul(probs, vh));
    }
    return linear(t, t.concat_cols_n(outs), p.Wo, p.bo);
}

}  // namespace wecon

#endif  // WECON_NN_HPP
