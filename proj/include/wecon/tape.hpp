#ifndef WECON_TAPE_HPP
#define WECON_TAPE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wecon/matrix.hpp"

namespace wecon {

struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode autodiff over a per-forward tape of dense matrices.
///
/// Ops append one node each; backward() walks the tape in reverse and
/// accumulates gradients into every node that requires them. A tape
/// constructed with grad disabled computes identical values but records
/// no backward closures, so it doubles as the inference path. truncate()
/// drops the newest nodes, which lets rollouts reuse one tape across
/// decoding steps without growing memory.
template <class S>
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_(grad_enabled) {}

    bool grad_enabled() const { return grad_; }

    Var input(Matrix<S> m, bool requires_grad = true) {
        return push(std::move(m), grad_ && requires_grad, {});
    }
    Var constant(Matrix<S> m) { return input(std::move(m), false); }
    Var scalar(S x) {
        Matrix<S> m(1, 1);
        m.v[0] = x;
        return constant(std::move(m));
    }

    const Matrix<S>& val(Var v) const { return nodes_[check(v)].val; }
    const Matrix<S>& grad(Var v) const {
        const Node& n = nodes_[check(v)];
        if (n.grad.v.empty()) throw std::logic_error("Tape: gradient not computed");
        return n.grad;
    }
    bool has_grad(Var v) const { return !nodes_[check(v)].grad.v.empty(); }

    std::size_t size() const { return nodes_.size(); }
    void truncate(std::size_t n) {
        if (n > nodes_.size()) throw std::logic_error("Tape: truncate beyond size");
        nodes_.resize(n);
    }

    /// Backpropagate from a 1x1 root. Gradients accumulate, so zero_grad()
    /// must be called between independent backward passes on one tape.
    void backward(Var root) {
        Node& r = nodes_[check(root)];
        if (!grad_) throw std::logic_error("Tape: backward on grad-disabled tape");
        if (r.val.rows != 1 || r.val.cols != 1)
            throw std::invalid_argument("Tape: backward root must be scalar");
        ensure_grad(root.id).v[0] += S(1);
        for (int i = root.id; i >= 0; --i) {
            Node& n = nodes_[i];
            if (n.back && !n.grad.v.empty()) n.back(*this, i);
        }
    }

    void zero_grad() {
        for (Node& n : nodes_) n.grad = Matrix<S>();
    }

    // ---- arithmetic ----

    Var matmul(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (A.cols != B.rows)
            throw std::invalid_argument("matmul: inner dimensions " + shape_str(A.rows, A.cols) +
                                        " vs " + shape_str(B.rows, B.cols));
        Matrix<S> C(A.rows, B.cols);
        gemm_nn(A, B, C);
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) add_gemm_nt(t.ensure_grad(a.id), G, t.val(b));
            if (t.wants(b)) add_gemm_tn(t.ensure_grad(b.id), t.val(a), G);
        });
    }

    /// A * B^T without materializing the transpose.
    Var matmul_nt(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (A.cols != B.cols)
            throw std::invalid_argument("matmul_nt: inner dimensions disagree");
        Matrix<S> C(A.rows, B.rows);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < B.rows; ++j) {
                S acc = 0;
                for (int k = 0; k < A.cols; ++k) acc += A.at(i, k) * B.at(j, k);
                C.at(i, j) = acc;
            }
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) add_gemm_nn_acc(t.ensure_grad(a.id), G, t.val(b));
            if (t.wants(b)) add_gemm_tn(t.ensure_grad(b.id), G, t.val(a));
        });
    }

    Var add(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (!A.same_shape(B)) throw std::invalid_argument("add: shape mismatch");
        Matrix<S> C = A;
        for (std::size_t i = 0; i < C.v.size(); ++i) C.v[i] += B.v[i];
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) axpy(t.ensure_grad(a.id), G);
            if (t.wants(b)) axpy(t.ensure_grad(b.id), G);
        });
    }

    Var sub(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (!A.same_shape(B)) throw std::invalid_argument("sub: shape mismatch");
        Matrix<S> C = A;
        for (std::size_t i = 0; i < C.v.size(); ++i) C.v[i] -= B.v[i];
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) axpy(t.ensure_grad(a.id), G);
            if (t.wants(b)) axpy(t.ensure_grad(b.id), G, S(-1));
        });
    }

    /// a (n x d) + row vector b (1 x d), broadcast over rows.
    Var add_rowvec(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (B.rows != 1 || B.cols != A.cols)
            throw std::invalid_argument("add_rowvec: expected 1x" + std::to_string(A.cols));
        Matrix<S> C = A;
        for (int i = 0; i < C.rows; ++i)
            for (int j = 0; j < C.cols; ++j) C.at(i, j) += B.at(0, j);
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) axpy(t.ensure_grad(a.id), G);
            if (t.wants(b)) {
                Matrix<S>& gb = t.ensure_grad(b.id);
                for (int i = 0; i < G.rows; ++i)
                    for (int j = 0; j < G.cols; ++j) gb.at(0, j) += G.at(i, j);
            }
        });
    }

    Var mul(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (!A.same_shape(B)) throw std::invalid_argument("mul: shape mismatch");
        Matrix<S> C = A;
        for (std::size_t i = 0; i < C.v.size(); ++i) C.v[i] *= B.v[i];
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) {
                Matrix<S>& ga = t.ensure_grad(a.id);
                const Matrix<S>& B2 = t.val(b);
                for (std::size_t i = 0; i < G.v.size(); ++i) ga.v[i] += G.v[i] * B2.v[i];
            }
            if (t.wants(b)) {
                Matrix<S>& gb = t.ensure_grad(b.id);
                const Matrix<S>& A2 = t.val(a);
                for (std::size_t i = 0; i < G.v.size(); ++i) gb.v[i] += G.v[i] * A2.v[i];
            }
        });
    }

    /// a (n x d) ⊙ row vector b (1 x d), broadcast over rows.
    Var mul_rowvec(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (B.rows != 1 || B.cols != A.cols)
            throw std::invalid_argument("mul_rowvec: expected 1x" + std::to_string(A.cols));
        Matrix<S> C = A;
        for (int i = 0; i < C.rows; ++i)
            for (int j = 0; j < C.cols; ++j) C.at(i, j) *= B.at(0, j);
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            const Matrix<S>& A2 = t.val(a);
            const Matrix<S>& B2 = t.val(b);
            if (t.wants(a)) {
                Matrix<S>& ga = t.ensure_grad(a.id);
                for (int i = 0; i < G.rows; ++i)
                    for (int j = 0; j < G.cols; ++j) ga.at(i, j) += G.at(i, j) * B2.at(0, j);
            }
            if (t.wants(b)) {
                Matrix<S>& gb = t.ensure_grad(b.id);
                for (int i = 0; i < G.rows; ++i)
                    for (int j = 0; j < G.cols; ++j) gb.at(0, j) += G.at(i, j) * A2.at(i, j);
            }
        });
    }

    Var scale(Var a, S c) {
        Matrix<S> C = val(a);
        for (S& x : C.v) x *= c;
        return push(std::move(C), needs_grad(a), [a, c](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (t.wants(a)) axpy(t.ensure_grad(a.id), G, c);
        });
    }

    // ---- elementwise nonlinearities ----

    Var sigmoid(Var a) {
        return unary(a, [](S x) { return sigmoid_fn(x); },
                     [](S x) {
                         const S s = sigmoid_fn(x);
                         return s * (S(1) - s);
                     });
    }

    Var silu(Var a) {
        return unary(a, [](S x) { return x * sigmoid_fn(x); },
                     [](S x) {
                         const S s = sigmoid_fn(x);
                         return s * (S(1) + x * (S(1) - s));
                     });
    }

    Var gelu(Var a) {
        return unary(a,
                     [](S x) {
                         return S(0.5) * x * (S(1) + std::erf(x * S(0.7071067811865475)));
                     },
                     [](S x) {
                         const S cdf = S(0.5) * (S(1) + std::erf(x * S(0.7071067811865475)));
                         const S pdf = std::exp(S(-0.5) * x * x) * S(0.3989422804014327);
                         return cdf + x * pdf;
                     });
    }

    Var relu(Var a) {
        return unary(a, [](S x) { return x > S(0) ? x : S(0); },
                     [](S x) { return x > S(0) ? S(1) : S(0); });
    }

    Var tanh_op(Var a) {
        return unary(a, [](S x) { return std::tanh(x); },
                     [](S x) {
                         const S th = std::tanh(x);
                         return S(1) - th * th;
                     });
    }

    /// log(sigmoid(x)) = -softplus(-x), numerically stable on both tails.
    Var log_sigmoid(Var a) {
        return unary(a,
                     [](S x) {
                         return x >= S(0) ? -std::log1p(std::exp(-x))
                                          : x - std::log1p(std::exp(x));
                     },
                     [](S x) { return sigmoid_fn(-x); });
    }

    // ---- normalization / softmax ----

    /// Per-row x / sqrt(mean(x^2) + eps) ⊙ gain.
    Var rmsnorm(Var x, Var gain, S eps) {
        const Matrix<S>& X = val(x);
        const Matrix<S>& G = val(gain);
        if (G.rows != 1 || G.cols != X.cols)
            throw std::invalid_argument("rmsnorm: gain must be 1x" + std::to_string(X.cols));
        const int d = X.cols;
        Matrix<S> Y(X.rows, d);
        std::vector<S> inv_rms(X.rows);
        for (int i = 0; i < X.rows; ++i) {
            S ss = 0;
            for (int j = 0; j < d; ++j) ss += X.at(i, j) * X.at(i, j);
            const S r = std::sqrt(ss / S(d) + eps);
            inv_rms[i] = S(1) / r;
            for (int j = 0; j < d; ++j) Y.at(i, j) = X.at(i, j) * inv_rms[i] * G.at(0, j);
        }
        return push(std::move(Y), needs_grad(x, gain),
                    [x, gain, inv_rms = std::move(inv_rms), d](Tape& t, int self) {
                        const Matrix<S>& dY = t.nodes_[self].grad;
                        const Matrix<S>& X2 = t.val(x);
                        const Matrix<S>& G2 = t.val(gain);
                        if (t.wants(x)) {
                            Matrix<S>& gx = t.ensure_grad(x.id);
                            for (int i = 0; i < X2.rows; ++i) {
                                const S ir = inv_rms[i];
                                S dot = 0;  // sum_j dY_j * g_j * x_j
                                for (int j = 0; j < d; ++j)
                                    dot += dY.at(i, j) * G2.at(0, j) * X2.at(i, j);
                                const S k = dot * ir * ir * ir / S(d);
                                for (int j = 0; j < d; ++j)
                                    gx.at(i, j) += dY.at(i, j) * G2.at(0, j) * ir - X2.at(i, j) * k;
                            }
                        }
                        if (t.wants(gain)) {
                            Matrix<S>& gg = t.ensure_grad(gain.id);
                            for (int i = 0; i < X2.rows; ++i)
                                for (int j = 0; j < d; ++j)
                                    gg.at(0, j) += dY.at(i, j) * X2.at(i, j) * inv_rms[i];
                        }
                    });
    }

    /// Row-wise softmax. A mask (one flag per column, applied to every row)
    /// assigns exactly zero probability to masked entries.
    Var softmax_rows(Var a, const std::vector<std::uint8_t>* mask = nullptr) {
        const Matrix<S>& A = val(a);
        check_mask(A, mask);
        Matrix<S> P(A.rows, A.cols);
        for (int i = 0; i < A.rows; ++i) softmax_row(A, i, mask, P);
        return push(std::move(P), needs_grad(a), [a](Tape& t, int self) {
            // dL/da = p ⊙ (dp − <p, dp>); masked entries have p = 0.
            const Matrix<S>& dP = t.nodes_[self].grad;
            const Matrix<S>& P2 = t.nodes_[self].val;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (int i = 0; i < P2.rows; ++i) {
                S dot = 0;
                for (int j = 0; j < P2.cols; ++j) dot += P2.at(i, j) * dP.at(i, j);
                for (int j = 0; j < P2.cols; ++j)
                    ga.at(i, j) += P2.at(i, j) * (dP.at(i, j) - dot);
            }
        });
    }

    /// Row-wise log-softmax; masked entries are -inf in the output and
    /// receive no gradient.
    Var log_softmax_rows(Var a, const std::vector<std::uint8_t>* mask = nullptr) {
        const Matrix<S>& A = val(a);
        check_mask(A, mask);
        Matrix<S> Y(A.rows, A.cols);
        std::vector<std::uint8_t> keep = mask ? *mask : std::vector<std::uint8_t>(A.cols, 1);
        for (int i = 0; i < A.rows; ++i) {
            S mx = -std::numeric_limits<S>::infinity();
            for (int j = 0; j < A.cols; ++j)
                if (keep[j] && A.at(i, j) > mx) mx = A.at(i, j);
            if (mx == -std::numeric_limits<S>::infinity())
                throw std::invalid_argument("log_softmax: all entries masked");
            S se = 0;
            for (int j = 0; j < A.cols; ++j)
                if (keep[j]) se += std::exp(A.at(i, j) - mx);
            const S lse = mx + std::log(se);
            for (int j = 0; j < A.cols; ++j)
                Y.at(i, j) = keep[j] ? A.at(i, j) - lse : -std::numeric_limits<S>::infinity();
        }
        return push(std::move(Y), needs_grad(a), [a, keep = std::move(keep)](Tape& t, int self) {
            const Matrix<S>& dY = t.nodes_[self].grad;
            const Matrix<S>& Y2 = t.nodes_[self].val;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (int i = 0; i < Y2.rows; ++i) {
                S sum = 0;
                for (int j = 0; j < Y2.cols; ++j)
                    if (keep[j]) sum += dY.at(i, j);
                for (int j = 0; j < Y2.cols; ++j)
                    if (keep[j]) ga.at(i, j) += dY.at(i, j) - std::exp(Y2.at(i, j)) * sum;
            }
        });
    }

    // ---- shape plumbing ----

    Var concat_cols(Var a, Var b) { return concat_cols_n({a, b}); }

    Var concat_cols_n(const std::vector<Var>& xs) {
        if (xs.empty()) throw std::invalid_argument("concat_cols_n: empty");
        const int rows = val(xs[0]).rows;
        int cols = 0;
        for (Var x : xs) {
            if (val(x).rows != rows) throw std::invalid_argument("concat_cols: row mismatch");
            cols += val(x).cols;
        }
        Matrix<S> C(rows, cols);
        int off = 0;
        for (Var x : xs) {
            const Matrix<S>& X = val(x);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < X.cols; ++j) C.at(i, off + j) = X.at(i, j);
            off += X.cols;
        }
        bool rg = false;
        for (Var x : xs) rg = rg || wants(x);
        return push(std::move(C), rg && grad_, [xs](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            int off2 = 0;
            for (Var x : xs) {
                const int c = t.val(x).cols;
                if (t.wants(x)) {
                    Matrix<S>& gx = t.ensure_grad(x.id);
                    for (int i = 0; i < G.rows; ++i)
                        for (int j = 0; j < c; ++j) gx.at(i, j) += G.at(i, off2 + j);
                }
                off2 += c;
            }
        });
    }

    Var concat_rows(Var a, Var b) {
        const Matrix<S>&A = val(a), &B = val(b);
        if (A.cols != B.cols) throw std::invalid_argument("concat_rows: col mismatch");
        Matrix<S> C(A.rows + B.rows, A.cols);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
        for (int i = 0; i < B.rows; ++i)
            for (int j = 0; j < B.cols; ++j) C.at(A.rows + i, j) = B.at(i, j);
        return push(std::move(C), needs_grad(a, b), [a, b](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            const int ra = t.val(a).rows;
            if (t.wants(a)) {
                Matrix<S>& ga = t.ensure_grad(a.id);
                for (int i = 0; i < ga.rows; ++i)
                    for (int j = 0; j < ga.cols; ++j) ga.at(i, j) += G.at(i, j);
            }
            if (t.wants(b)) {
                Matrix<S>& gb = t.ensure_grad(b.id);
                for (int i = 0; i < gb.rows; ++i)
                    for (int j = 0; j < gb.cols; ++j) gb.at(i, j) += G.at(ra + i, j);
            }
        });
    }

    Var slice_cols(Var a, int start, int len) {
        const Matrix<S>& A = val(a);
        if (start < 0 || start + len > A.cols) throw std::invalid_argument("slice_cols: range");
        Matrix<S> C(A.rows, len);
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < len; ++j) C.at(i, j) = A.at(i, start + j);
        return push(std::move(C), needs_grad(a), [a, start, len](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (int i = 0; i < G.rows; ++i)
                for (int j = 0; j < len; ++j) ga.at(i, start + j) += G.at(i, j);
        });
    }

    Var pick_rows(Var a, std::vector<int> idx) {
        const Matrix<S>& A = val(a);
        for (int i : idx)
            if (i < 0 || i >= A.rows) throw std::invalid_argument("pick_rows: index");
        Matrix<S> C(static_cast<int>(idx.size()), A.cols);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < A.cols; ++j) C.at(static_cast<int>(i), j) = A.at(idx[i], j);
        return push(std::move(C), needs_grad(a), [a, idx = std::move(idx)](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (int j = 0; j < G.cols; ++j)
                    ga.at(idx[i], j) += G.at(static_cast<int>(i), j);
        });
    }

    /// 1 x d row broadcast to n x d.
    Var broadcast_rows(Var a, int n) {
        const Matrix<S>& A = val(a);
        if (A.rows != 1) throw std::invalid_argument("broadcast_rows: expected one row");
        Matrix<S> C(n, A.cols);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(0, j);
        return push(std::move(C), needs_grad(a), [a](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (int i = 0; i < G.rows; ++i)
                for (int j = 0; j < G.cols; ++j) ga.at(0, j) += G.at(i, j);
        });
    }

    Var mean_rows(Var a) {
        const Matrix<S>& A = val(a);
        Matrix<S> C(1, A.cols);
        for (int j = 0; j < A.cols; ++j) {
            S acc = 0;
            for (int i = 0; i < A.rows; ++i) acc += A.at(i, j);
            C.at(0, j) = acc / S(A.rows);
        }
        return push(std::move(C), needs_grad(a), [a](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            const S inv = S(1) / S(ga.rows);
            for (int i = 0; i < ga.rows; ++i)
                for (int j = 0; j < ga.cols; ++j) ga.at(i, j) += G.at(0, j) * inv;
        });
    }

    Var pick(Var a, int r, int c) {
        const Matrix<S>& A = val(a);
        if (r < 0 || r >= A.rows || c < 0 || c >= A.cols)
            throw std::invalid_argument("pick: index out of range");
        Matrix<S> C(1, 1);
        C.v[0] = A.at(r, c);
        return push(std::move(C), needs_grad(a), [a, r, c](Tape& t, int self) {
            const S g = t.nodes_[self].grad.v[0];
            if (t.wants(a)) t.ensure_grad(a.id).at(r, c) += g;
        });
    }

    Var sum_all(Var a) {
        const Matrix<S>& A = val(a);
        Matrix<S> C(1, 1);
        S acc = 0;
        for (S x : A.v) acc += x;
        C.v[0] = acc;
        return push(std::move(C), needs_grad(a), [a](Tape& t, int self) {
            const S g = t.nodes_[self].grad.v[0];
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            for (S& x : ga.v) x += g;
        });
    }

    /// Sum of equally shaped vars.
    Var add_n(const std::vector<Var>& xs) {
        if (xs.empty()) throw std::invalid_argument("add_n: empty");
        Matrix<S> C = val(xs[0]);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const Matrix<S>& X = val(xs[i]);
            if (!X.same_shape(C)) throw std::invalid_argument("add_n: shape mismatch");
            for (std::size_t k = 0; k < C.v.size(); ++k) C.v[k] += X.v[k];
        }
        bool rg = false;
        for (Var x : xs) rg = rg || wants(x);
        return push(std::move(C), rg && grad_, [xs](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            for (Var x : xs)
                if (t.wants(x)) axpy(t.ensure_grad(x.id), G);
        });
    }

private:
    struct Node {
        Matrix<S> val;
        Matrix<S> grad;
        std::function<void(Tape&, int)> back;
        bool requires_grad = false;
    };

    std::vector<Node> nodes_;
    bool grad_ = true;

    static S sigmoid_fn(S x) {
        return x >= S(0) ? S(1) / (S(1) + std::exp(-x))
                         : std::exp(x) / (S(1) + std::exp(x));
    }

    int check(Var v) const {
        if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size())
            throw std::logic_error("Tape: invalid var");
        return v.id;
    }

    bool wants(Var v) const { return nodes_[v.id].requires_grad; }
    bool needs_grad(Var a) const { return grad_ && wants(a); }
    bool needs_grad(Var a, Var b) const { return grad_ && (wants(a) || wants(b)); }

    Matrix<S>& ensure_grad(int id) {
        Node& n = nodes_[id];
        if (n.grad.v.empty()) n.grad = Matrix<S>(n.val.rows, n.val.cols);
        return n.grad;
    }

    Var push(Matrix<S> val, bool rg, std::function<void(Tape&, int)> back) {
        Node n;
        n.val = std::move(val);
        n.requires_grad = rg;
        if (rg) n.back = std::move(back);
        nodes_.push_back(std::move(n));
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    template <class F, class D>
    Var unary(Var a, F fwd, D dfn) {
        Matrix<S> C = val(a);
        for (S& x : C.v) x = fwd(x);
        return push(std::move(C), needs_grad(a), [a, dfn](Tape& t, int self) {
            const Matrix<S>& G = t.nodes_[self].grad;
            if (!t.wants(a)) return;
            Matrix<S>& ga = t.ensure_grad(a.id);
            const Matrix<S>& A = t.val(a);
            for (std::size_t i = 0; i < A.v.size(); ++i) ga.v[i] += G.v[i] * dfn(A.v[i]);
        });
    }

    static void check_mask(const Matrix<S>& A, const std::vector<std::uint8_t>* mask) {
        if (mask && static_cast<int>(mask->size()) != A.cols)
            throw std::invalid_argument("softmax: mask length mismatch");
    }

    static void softmax_row(const Matrix<S>& A, int i, const std::vector<std::uint8_t>* mask,
                            Matrix<S>& P) {
        S mx = -std::numeric_limits<S>::infinity();
        for (int j = 0; j < A.cols; ++j)
            if (!mask || (*mask)[j])
                if (A.at(i, j) > mx) mx = A.at(i, j);
        if (mx == -std::numeric_limits<S>::infinity())
            throw std::invalid_argument("softmax: all entries masked");
        S se = 0;
        for (int j = 0; j < A.cols; ++j) {
            if (!mask || (*mask)[j]) {
                P.at(i, j) = std::exp(A.at(i, j) - mx);
                se += P.at(i, j);
            } else {
                P.at(i, j) = S(0);
            }
        }
        for (int j = 0; j < A.cols; ++j) P.at(i, j) /= se;
    }

    static void axpy(Matrix<S>& dst, const Matrix<S>& src, S c = S(1)) {
        for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += c * src.v[i];
    }

    // dst += A * B
    static void add_gemm_nn_acc(Matrix<S>& dst, const Matrix<S>& A, const Matrix<S>& B) {
        for (int i = 0; i < A.rows; ++i)
            for (int k = 0; k < A.cols; ++k) {
                const S a = A.at(i, k);
                if (a == S(0)) continue;
                for (int j = 0; j < B.cols; ++j) dst.at(i, j) += a * B.at(k, j);
            }
    }
    // dst += A * B^T
    static void add_gemm_nt(Matrix<S>& dst, const Matrix<S>& A, const Matrix<S>& B) {
        for (int i = 0; i < A.rows; ++i)
            for (int j = 0; j < B.rows; ++j) {
                S acc = 0;
                for (int k = 0; k < A.cols; ++k) acc += A.at(i, k) * B.at(j, k);
                dst.at(i, j) += acc;
            }
    }
    // dst += A^T * B
    static void add_gemm_tn(Matrix<S>& dst, const Matrix<S>& A, const Matrix<S>& B) {
        for (int k = 0; k < A.rows; ++k)
            for (int i = 0; i < A.cols; ++i) {
                const S a = A.at(k, i);
                if (a == S(0)) continue;
                for (int j = 0; j < B.cols; ++j) dst.at(i, j) += a * B.at(k, j);
            }
    }
    static void gemm_nn(const Matrix<S>& A, const Matrix<S>& B, Matrix<S>& C) {
        for (int i = 0; i < A.rows; ++i)
            for (int k = 0; k < A.cols; ++k) {
                const S a = A.at(i, k);
                if (a == S(0)) continue;
                for (int j = 0; j < B.cols; ++j) C.at(i, j) += a * B.at(k, j);
            }
    }
};

}  // namespace wecon

#endif  // WECON_TAPE_HPP
