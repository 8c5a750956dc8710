#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "instanton/exact/scalar.hpp"

namespace instanton {

// Dense row-major matrix.  `proto` supplies zero/one in rings whose
// elements carry runtime context (F_p).
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t r, size_t c, const T& proto = T())
        : r_(r), c_(c), proto_(proto), a_(r * c, Alg<T>::zero(proto)) {}

    static Matrix identity(size_t n, const T& proto = T()) {
        Matrix m(n, n, proto);
        for (size_t i = 0; i < n; ++i) m(i, i) = Alg<T>::one(proto);
        return m;
    }

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    const T& proto() const { return proto_; }
    T& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const T& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    Matrix operator*(const Matrix& o) const {
        if (c_ != o.r_) throw Error("exact.shape", "matrix product shape mismatch");
        Matrix m(r_, o.c_, proto_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t k = 0; k < c_; ++k) {
                const T& x = (*this)(i, k);
                if (Alg<T>::is_zero(x)) continue;
                for (size_t j = 0; j < o.c_; ++j)
                    if (!Alg<T>::is_zero(o(k, j))) m(i, j) += x * o(k, j);
            }
        return m;
    }
    Matrix operator+(const Matrix& o) const {
        shape_check(o);
        Matrix m = *this;
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
        return m;
    }
    Matrix operator-(const Matrix& o) const {
        shape_check(o);
        Matrix m = *this;
        for (size_t i = 0; i < a_.size(); ++i) m.a_[i] -= o.a_[i];
        return m;
    }
    Matrix scaled(const T& s) const {
        Matrix m = *this;
        for (auto& x : m.a_) x = x * s;
        return m;
    }
    bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
    bool operator!=(const Matrix& o) const { return !(*this == o); }
    bool is_zero() const {
        for (auto& x : a_)
            if (!Alg<T>::is_zero(x)) return false;
        return true;
    }
    Matrix transpose() const {
        Matrix m(c_, r_, proto_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }
    Matrix block(const std::vector<size_t>& rs, const std::vector<size_t>& cs) const {
        Matrix m(rs.size(), cs.size(), proto_);
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = 0; j < cs.size(); ++j) m(i, j) = (*this)(rs[i], cs[j]);
        return m;
    }

    void swap_rows(size_t i, size_t j) {
        if (i == j) return;
        for (size_t k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
    }
    void swap_cols(size_t i, size_t j) {
        if (i == j) return;
        for (size_t k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
    }
    // row_i += f * row_j
    void add_row(size_t i, size_t j, const T& f) {
        if (Alg<T>::is_zero(f)) return;
        for (size_t k = 0; k < c_; ++k)
            if (!Alg<T>::is_zero((*this)(j, k))) (*this)(i, k) += f * (*this)(j, k);
    }
    void add_col(size_t i, size_t j, const T& f) {
        if (Alg<T>::is_zero(f)) return;
        for (size_t k = 0; k < r_; ++k)
            if (!Alg<T>::is_zero((*this)(k, j))) (*this)(k, i) += f * (*this)(k, j);
    }
    void scale_row(size_t i, const T& f) {
        for (size_t k = 0; k < c_; ++k) (*this)(i, k) = (*this)(i, k) * f;
    }
    void scale_col(size_t j, const T& f) {
        for (size_t k = 0; k < r_; ++k) (*this)(k, j) = (*this)(k, j) * f;
    }

private:
    void shape_check(const Matrix& o) const {
        if (r_ != o.r_ || c_ != o.c_) throw Error("exact.shape", "matrix shape mismatch");
    }
    size_t r_ = 0, c_ = 0;
    T proto_{};
    std::vector<T> a_;
};

// Sparse storage: only nonzero entries are kept.
template <class T>
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(size_t r, size_t c, const T& proto = T()) : r_(r), c_(c), proto_(proto) {}

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    const T& proto() const { return proto_; }
    const std::map<std::pair<size_t, size_t>, T>& entries() const { return e_; }

    T get(size_t i, size_t j) const {
        auto it = e_.find({i, j});
        return it == e_.end() ? Alg<T>::zero(proto_) : it->second;
    }
    void set(size_t i, size_t j, const T& v) {
        if (i >= r_ || j >= c_) throw Error("exact.index", "sparse index out of range");
        if (Alg<T>::is_zero(v)) e_.erase({i, j});
        else e_[{i, j}] = v;
    }
    void add(size_t i, size_t j, const T& v) { set(i, j, get(i, j) + v); }

    Matrix<T> dense() const {
        Matrix<T> m(r_, c_, proto_);
        for (auto& [k, v] : e_) m(k.first, k.second) = v;
        return m;
    }
    static SparseMatrix from_dense(const Matrix<T>& m) {
        SparseMatrix s(m.rows(), m.cols(), m.proto());
        for (size_t i = 0; i < m.rows(); ++i)
            for (size_t j = 0; j < m.cols(); ++j)
                if (!Alg<T>::is_zero(m(i, j))) s.e_[{i, j}] = m(i, j);
        return s;
    }
    bool operator==(const SparseMatrix& o) const { return r_ == o.r_ && c_ == o.c_ && e_ == o.e_; }

private:
    size_t r_ = 0, c_ = 0;
    T proto_{};
    std::map<std::pair<size_t, size_t>, T> e_;
};

// ---- linear algebra over a field ----

template <class T>
struct Echelon {
    Matrix<T> R;                 // reduced row echelon form
    std::vector<size_t> pivots;  // pivot column of each nonzero row
};

template <class T>
Echelon<T> rref(Matrix<T> m) {
    static_assert(Alg<T>::is_field, "rref needs a field");
    Echelon<T> e;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        size_t piv = row;
        while (piv < m.rows() && Alg<T>::is_zero(m(piv, col))) ++piv;
        if (piv == m.rows()) continue;
        m.swap_rows(row, piv);
        m.scale_row(row, Alg<T>::inv(m(row, col)));
        for (size_t i = 0; i < m.rows(); ++i)
            if (i != row && !Alg<T>::is_zero(m(i, col))) m.add_row(i, row, -m(i, col));
        e.pivots.push_back(col);
        ++row;
    }
    e.R = std::move(m);
    return e;
}

template <class T>
size_t rank(const Matrix<T>& m) {
    if constexpr (Alg<T>::is_field) {
        return rref(m).pivots.size();
    } else {
        // Bareiss elimination; every division below is exact
        Matrix<T> a = m;
        T prev = Alg<T>::one(m.proto());
        size_t row = 0;
        for (size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
            size_t piv = row;
            while (piv < a.rows() && Alg<T>::is_zero(a(piv, col))) ++piv;
            if (piv == a.rows()) continue;
            a.swap_rows(row, piv);
            for (size_t i = row + 1; i < a.rows(); ++i) {
                T f = a(i, col), g = a(row, col);
                for (size_t k = col; k < a.cols(); ++k) {
                    T q, r;
                    Alg<T>::divmod(a(i, k) * g - a(row, k) * f, prev, q, r);
                    a(i, k) = q;
                }
            }
            prev = a(row, col);
            ++row;
        }
        return row;
    }
}

// Columns spanning the kernel of m.
template <class T>
Matrix<T> kernel_basis(const Matrix<T>& m) {
    auto e = rref(m);
    std::vector<bool> is_piv(m.cols(), false);
    for (auto p : e.pivots) is_piv[p] = true;
    std::vector<size_t> free;
    for (size_t j = 0; j < m.cols(); ++j)
        if (!is_piv[j]) free.push_back(j);
    Matrix<T> K(m.cols(), free.size(), m.proto());
    for (size_t f = 0; f < free.size(); ++f) {
        K(free[f], f) = Alg<T>::one(m.proto());
        for (size_t r = 0; r < e.pivots.size(); ++r) K(e.pivots[r], f) = -e.R(r, free[f]);
    }
    return K;
}

template <class T>
Matrix<T> hcat(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows()) throw Error("exact.shape", "hcat row mismatch");
    Matrix<T> m(a.rows(), a.cols() + b.cols(), a.rows() ? a.proto() : b.proto());
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
        for (size_t j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
    }
    return m;
}

// Is every column of b in the column span of a?
template <class T>
bool in_span(const Matrix<T>& a, const Matrix<T>& b) {
    return rank(hcat(a, b)) == rank(a);
}

}  // namespace instanton
