#ifndef WECON_MATRIX_HPP
#define WECON_MATRIX_HPP

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace wecon {

/// Dense row-major matrix. Rank-1 data is stored as a single row.
template <class S>
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<S> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, S(0)) {}
    Matrix(int r, int c, std::initializer_list<S> init)
        : rows(r), cols(c), v(init) {
        if (v.size() != static_cast<std::size_t>(r) * c)
            throw std::invalid_argument("Matrix: initializer size mismatch");
    }

    S& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    const S& at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

    std::size_t size() const { return v.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(S x) { std::fill(v.begin(), v.end(), x); }

    template <class T>
    Matrix<T> cast() const {
        Matrix<T> out(rows, cols);
        for (std::size_t i = 0; i < v.size(); ++i) out.v[i] = static_cast<T>(v[i]);
        return out;
    }

    static Matrix row(std::initializer_list<S> init) {
        Matrix m;
        m.rows = 1;
        m.cols = static_cast<int>(init.size());
        m.v = init;
        return m;
    }
};

inline std::string shape_str(int r, int c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace wecon

#endif  // WECON_MATRIX_HPP
