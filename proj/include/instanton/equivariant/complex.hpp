#pragma once

#include "instanton/exact/complex.hpp"

namespace instanton::equivariant {

// Flow complex together with its u-action (degree +3, odd).
template <class T>
struct EquivariantComplex {
    GradedComplex<T> C;
    SparseMatrix<T> u;

    size_t size() const { return C.size(); }
};

template <class T>
Report check_u(const EquivariantComplex<T>& E) {
    if (auto r = check_complex(E.C); !r) return r;
    for (auto& [ij, v] : E.u.entries())
        if (E.C.key(E.C.deg[ij.second] + 3) != E.C.key(E.C.deg[ij.first]))
            return Report::fail("u-invariant-violated", "u(" + E.C.names[ij.second] + ") has a term of the wrong degree");
    auto d = E.C.d.dense(), u = E.u.dense();
    auto first_nonzero = [&](const Matrix<T>& m) -> std::string {
        for (size_t i = 0; i < m.rows(); ++i)
            for (size_t j = 0; j < m.cols(); ++j)
                if (!Alg<T>::is_zero(m(i, j))) return E.C.names[j] + " -> " + E.C.names[i];
        return "";
    };
    if (auto w = first_nonzero(u * u); !w.empty()) return Report::fail("u-invariant-violated", "u^2 != 0 at " + w);
    if (auto w = first_nonzero(d * u + u * d); !w.empty())
        return Report::fail("u-invariant-violated", "du + ud != 0 at " + w);
    return Report::pass();
}

}  // namespace instanton::equivariant
