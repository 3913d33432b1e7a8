#ifndef WECON_PARAMS_HPP
#define WECON_PARAMS_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wecon/matrix.hpp"
#include "wecon/rng.hpp"
#include "wecon/tape.hpp"

namespace wecon {

namespace detail {

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
inline std::uint32_t crc32(const unsigned char* data, std::size_t len,
                           std::uint32_t seed = 0) {
    static const auto table = [] {
        std::vector<std::uint32_t> t(256);
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = seed ^ 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

}  // namespace detail

/// One named parameter with shape metadata and Adam moments.
template <class S>
struct Param {
    std::string name;
    std::vector<int> shape;  // rank 1 or 2
    Matrix<S> value;         // rank-1 stored as 1 x d
    Matrix<S> m, v;          // Adam moments, allocated on first step

    std::size_t count() const { return value.size(); }
};

/// Ordered collection of all learnable parameters plus optimizer state.
/// Iteration order is insertion order; lookups go through an index map.
template <class S>
class ParameterTable {
public:
    Param<S>& add(const std::string& name, std::vector<int> shape) {
        if (index_.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
        int rows = 1, cols = 0;
        if (shape.size() == 1) {
            cols = shape[0];
        } else if (shape.size() == 2) {
            rows = shape[0];
            cols = shape[1];
        } else {
            throw std::invalid_argument("parameter rank must be 1 or 2: " + name);
        }
        index_[name] = static_cast<int>(params_.size());
        params_.push_back(Param<S>{name, std::move(shape), Matrix<S>(rows, cols), {}, {}});
        return params_.back();
    }

    Param<S>& at(const std::string& name) {
        return params_[index_of(name)];
    }
    int index_of(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + name);
        return it->second;
    }
    const Param<S>& at(const std::string& name) const {
        return const_cast<ParameterTable*>(this)->at(name);
    }
    bool has(const std::string& name) const { return index_.count(name) != 0; }

    std::vector<Param<S>>& params() { return params_; }
    const std::vector<Param<S>>& params() const { return params_; }
    std::size_t size() const { return params_.size(); }

    std::int64_t step() const { return step_; }

    std::size_t total_count() const {
        std::size_t c = 0;
        for (const auto& p : params_) c += p.count();
        return c;
    }

    template <class T>
    ParameterTable<T> cast() const {
        ParameterTable<T> out;
        for (const auto& p : params_) {
            auto& q = out.add(p.name, p.shape);
            q.value = p.value.template cast<T>();
        }
        return out;
    }

    /// Decoupled-weight-decay Adam. Gradients are indexed by table order.
    /// Any non-finite gradient entry rejects the whole step.
    void adam_step(const std::vector<Matrix<S>>& grads, double lr, double wd,
                   double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
        if (grads.size() != params_.size())
            throw std::invalid_argument("adam_step: gradient count mismatch");
        for (std::size_t i = 0; i < params_.size(); ++i) {
            if (!grads[i].same_shape(params_[i].value))
                throw std::invalid_argument("adam_step: gradient shape mismatch for " +
                                            params_[i].name);
            for (S g : grads[i].v)
                if (!std::isfinite(static_cast<double>(g)))
                    throw std::runtime_error("adam_step: non-finite gradient in " +
                                             params_[i].name);
        }
        ++step_;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Param<S>& p = params_[i];
            if (p.m.v.empty()) {
                p.m = Matrix<S>(p.value.rows, p.value.cols);
                p.v = Matrix<S>(p.value.rows, p.value.cols);
            }
            for (std::size_t k = 0; k < p.value.v.size(); ++k) {
                const double g = static_cast<double>(grads[i].v[k]);
                const double m = beta1 * static_cast<double>(p.m.v[k]) + (1.0 - beta1) * g;
                const double v = beta2 * static_cast<double>(p.v.v[k]) + (1.0 - beta2) * g * g;
                p.m.v[k] = static_cast<S>(m);
                p.v.v[k] = static_cast<S>(v);
                const double mhat = m / bc1;
                const double vhat = v / bc2;
                double x = static_cast<double>(p.value.v[k]);
                x -= lr * mhat / (std::sqrt(vhat) + eps);
                x -= lr * wd * x;
                p.value.v[k] = static_cast<S>(x);
            }
        }
    }

private:
    std::vector<Param<S>> params_;
    std::unordered_map<std::string, int> index_;
    std::int64_t step_ = 0;
};

/// Initialize a matrix parameter uniform(-bound, bound); the stream is
/// seeded from (seed, name) so values do not depend on which other
/// parameters exist in the table.
template <class S>
void init_uniform(Param<S>& p, double bound, std::uint64_t seed) {
    Rng rng(mix_seed(seed, fnv1a64(p.name)));
    for (S& x : p.value.v) x = static_cast<S>(rng.uniform(-bound, bound));
}

/// Parameter handles bound into one tape for a forward pass.
template <class S>
class BoundParams {
public:
    BoundParams(Tape<S>& tape, const ParameterTable<S>& table, bool requires_grad = true)
        : tape_(&tape), table_(&table) {
        vars_.reserve(table.size());
        for (const auto& p : table.params()) vars_.push_back(tape.input(p.value, requires_grad));
    }

    Var operator()(const std::string& name) const {
        return vars_[table_->index_of(name)];
    }

    /// Gradients in table order (zero matrices where no gradient reached).
    std::vector<Matrix<S>> collect_grads() const {
        std::vector<Matrix<S>> out;
        out.reserve(vars_.size());
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (tape_->has_grad(vars_[i]))
                out.push_back(tape_->grad(vars_[i]));
            else
                out.push_back(Matrix<S>(table_->params()[i].value.rows,
                                        table_->params()[i].value.cols));
        }
        return out;
    }

private:
    Tape<S>* tape_;
    const ParameterTable<S>* table_;
    std::vector<Var> vars_;
};

// ---- checkpoint format ----
// magic "WECN1", then per parameter:
//   u32 name length, name bytes, u32 rank, u32 dims..., f32 values (row-major)
// all little-endian, trailing CRC32 over every preceding byte.

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t x) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((x >> (8 * i)) & 0xFF));
}
inline std::uint32_t get_u32(const std::string& buf, std::size_t& off) {
    if (off + 4 > buf.size()) throw std::runtime_error("checkpoint: truncated");
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i)
        x |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    off += 4;
    return x;
}
inline void put_f32(std::string& buf, float x) {
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put_u32(buf, bits);
}
inline float get_f32(const std::string& buf, std::size_t& off) {
    const std::uint32_t bits = get_u32(buf, off);
    float x;
    std::memcpy(&x, &bits, 4);
    return x;
}

}  // namespace detail

template <class S>
void save_checkpoint(const ParameterTable<S>& table, const std::string& path) {
    std::string buf = "WECN1";
    for (const auto& p : table.params()) {
        detail::put_u32(buf, static_cast<std::uint32_t>(p.name.size()));
        buf += p.name;
        detail::put_u32(buf, static_cast<std::uint32_t>(p.shape.size()));
        for (int d : p.shape) detail::put_u32(buf, static_cast<std::uint32_t>(d));
        for (S x : p.value.v) detail::put_f32(buf, static_cast<float>(x));
    }
    const std::uint32_t crc =
        detail::crc32(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    detail::put_u32(buf, crc);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

template <class S>
ParameterTable<S> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 9 || buf.compare(0, 5, "WECN1") != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    std::size_t tail = buf.size() - 4;
    const std::uint32_t want =
        detail::crc32(reinterpret_cast<const unsigned char*>(buf.data()), tail);
    std::size_t off = tail;
    const std::uint32_t got = detail::get_u32(buf, off);
    if (want != got) throw std::runtime_error("checkpoint: CRC mismatch in " + path);

    ParameterTable<S> table;
    off = 5;
    while (off < tail) {
        const std::uint32_t nlen = detail::get_u32(buf, off);
        if (off + nlen > tail) throw std::runtime_error("checkpoint: truncated name");
        std::string name = buf.substr(off, nlen);
        off += nlen;
        const std::uint32_t rank = detail::get_u32(buf, off);
        if (rank < 1 || rank > 2) throw std::runtime_error("checkpoint: bad rank for " + name);
        std::vector<int> shape;
        std::size_t count = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            const std::uint32_t d = detail::get_u32(buf, off);
            shape.push_back(static_cast<int>(d));
            count *= d;
        }
        auto& p = table.add(name, shape);
        for (std::size_t i = 0; i < count; ++i)
            p.value.v[i] = static_cast<S>(detail::get_f32(buf, off));
    }
    return table;
}

}  // namespace wecon

#endif  // WECON_PARAMS_HPP
