#pragma once

// Cycle/boundary bases and ranks of induced maps over a field.

#include "instanton/exact/complex.hpp"

namespace instanton::equivariant {

template <class K>
Matrix<K> zero_matrix(size_t r, size_t c, const K& proto) {
    return Matrix<K>(r, c, Alg<K>::zero(proto));
}

// Everything below works in the coordinates of a single grading: d has
// degree -1, so cycles and boundaries in grading k only involve the
// generators of gradings k - 1, k and k + 1.

// Kernel of d on grading k, as columns over the generators of grading k.
template <class K>
Matrix<K> cycles(const GradedComplex<K>& C, long k) {
    auto dk = C.block(k);
    if (dk.rows() == 0) {
        Matrix<K> id = zero_matrix(dk.cols(), dk.cols(), C.proto);
        for (size_t i = 0; i < dk.cols(); ++i) id(i, i) = Alg<K>::one(C.proto);
        return id;
    }
    return kernel_basis(dk);
}

template <class K>
size_t homology_dim(const GradedComplex<K>& C, long k) {
    return cycles(C, k).cols() - rank(C.block(k + 1));
}

// rank of the map on homology induced by f (full coordinates) from
// grading ka of A to grading kb of B.  Entries of f leaving grading kb are
// an error in the caller's map, not something to be quietly dropped.
template <class K>
size_t induced_rank(const Matrix<K>& f, const GradedComplex<K>& A, long ka, const GradedComplex<K>& B, long kb) {
    auto src = A.in_grading(ka), dst = B.in_grading(kb);
    std::vector<long> row(B.size(), -1);
    for (size_t i = 0; i < dst.size(); ++i) row[dst[i]] = static_cast<long>(i);
    Matrix<K> F = zero_matrix(dst.size(), src.size(), A.proto);
    for (size_t j = 0; j < src.size(); ++j)
        for (size_t i = 0; i < f.rows(); ++i) {
            const K& v = f(i, src[j]);
            if (Alg<K>::is_zero(v)) continue;
            if (row[i] < 0) throw Error("equivariant.inhomogeneous", "map does not land in grading " + std::to_string(kb));
            F(static_cast<size_t>(row[i]), j) = v;
        }
    auto Bd = B.block(kb + 1);
    auto img = F * cycles(A, ka);
    return rank(hcat(img, Bd)) - rank(Bd);
}

// Exactness at a middle term with incoming rank `in` and outgoing rank `out`.
inline bool exact_at(size_t dim, size_t in, size_t out) { return dim == in + out; }

}  // namespace instanton::equivariant
