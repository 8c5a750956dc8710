#pragma once

#include <vector>

#include "instanton/exact/matrix.hpp"

namespace instanton {

template <class T>
struct SmithForm {
    Matrix<T> D, U, V;        // U * A * V = D
    Matrix<T> Uinv, Vinv;
    std::vector<T> factors;   // nonzero diagonal, d1 | d2 | ...
    size_t rank() const { return factors.size(); }
};

namespace detail {

// Row/column operations applied to A while keeping U, V and their inverses.
template <class T>
struct SmithState {
    Matrix<T> A, U, V, Ui, Vi;

    void swap_rows(size_t i, size_t j) { A.swap_rows(i, j); U.swap_rows(i, j); Ui.swap_cols(i, j); }
    void swap_cols(size_t i, size_t j) { A.swap_cols(i, j); V.swap_cols(i, j); Vi.swap_rows(i, j); }
    void add_row(size_t i, size_t j, const T& f) {
        A.add_row(i, j, f);
        U.add_row(i, j, f);
        Ui.add_col(j, i, -f);
    }
    void add_col(size_t i, size_t j, const T& f) {
        A.add_col(i, j, f);
        V.add_col(i, j, f);
        Vi.add_row(j, i, -f);
    }
    void scale_row(size_t i, const T& u) {
        A.scale_row(i, u);
        U.scale_row(i, u);
        Ui.scale_col(i, Alg<T>::unit_inverse(u));
    }
};

}  // namespace detail

template <class T>
SmithForm<T> smith_normal_form(const Matrix<T>& A) {
    const size_t m = A.rows(), n = A.cols();
    const T& pr = A.proto();
    detail::SmithState<T> st{A, Matrix<T>::identity(m, pr), Matrix<T>::identity(n, pr),
                             Matrix<T>::identity(m, pr), Matrix<T>::identity(n, pr)};
    auto& a = st.A;
    auto nz = [](const T& x) { return !Alg<T>::is_zero(x); };

    size_t t = 0;
    for (; t < std::min(m, n); ++t) {
        for (;;) {
            // smallest-norm pivot in the trailing block
            size_t pi = m, pj = n;
            Int best = -1;
            for (size_t i = t; i < m; ++i)
                for (size_t j = t; j < n; ++j)
                    if (nz(a(i, j))) {
                        Int nv = Alg<T>::norm(a(i, j));
                        if (best < 0 || nv < best) { best = nv; pi = i; pj = j; }
                    }
            if (pi == m) goto done;
            st.swap_rows(t, pi);
            st.swap_cols(t, pj);

            bool dirty = false;
            for (size_t i = t + 1; i < m; ++i) {
                if (!nz(a(i, t))) continue;
                T q, r;
                Alg<T>::divmod(a(i, t), a(t, t), q, r);
                st.add_row(i, t, -q);
                if (nz(a(i, t))) dirty = true;
            }
            for (size_t j = t + 1; j < n; ++j) {
                if (!nz(a(t, j))) continue;
                T q, r;
                Alg<T>::divmod(a(t, j), a(t, t), q, r);
                st.add_col(j, t, -q);
                if (nz(a(t, j))) dirty = true;
            }
            if (dirty) continue;

            // divisibility: pull an offending row up and go again
            bool fixed = true;
            for (size_t i = t + 1; i < m && fixed; ++i)
                for (size_t j = t + 1; j < n; ++j) {
                    if (!nz(a(i, j))) continue;
                    T q, r;
                    Alg<T>::divmod(a(i, j), a(t, t), q, r);
                    if (nz(r)) {
                        st.add_row(t, i, Alg<T>::one(pr));
                        fixed = false;
                        break;
                    }
                }
            if (fixed) break;
        }
        st.scale_row(t, Alg<T>::canonical_unit(a(t, t)));
    }
done:
    SmithForm<T> f;
    for (size_t i = 0; i < std::min(m, n); ++i)
        if (nz(a(i, i))) f.factors.push_back(a(i, i));
    f.D = std::move(st.A);
    f.U = std::move(st.U);
    f.V = std::move(st.V);
    f.Uinv = std::move(st.Ui);
    f.Vinv = std::move(st.Vi);
    return f;
}

template <class T>
SmithForm<T> smith_normal_form(const SparseMatrix<T>& A) {
    return smith_normal_form(A.dense());
}

// Runtime guard used by document-facing code paths.
inline void require_pid(const Ring& r) {
    if (!r.is_pid()) throw Error("ring-not-PID", "Smith normal form needs a principal ideal domain, got " + r.name());
}

}  // namespace instanton
