#pragma once

// I-, I^inf, I+ of a complex with u-action over R[U], |U| = -4.
//
//   I-   = H(C[U],        d + U u)
//   I^inf= H(C[U, U^-1],  d + U u)
//   I+   = H(C[U^-1],     d + U u),   U kills C U^0
//
// with 0 -> C[U] -> C[U,U^-1] -> C[U^-1] -> 0, the second map x U^j -> x U^{j+1}
// (degree -4).  The triangle is I- ->(0) I^inf ->(-4) I+ ->(3) I-.

#include "instanton/equivariant/complex.hpp"
#include "instanton/equivariant/field.hpp"

namespace instanton::equivariant {

struct TripleRow {
    long grading;
    size_t minus, infty, plus;
    size_t rank_i, rank_p, rank_delta;  // i: I-_m -> Iinf_m, p: Iinf_m -> I+_{m-4}, delta: I+_m -> I-_{m+3}
};

struct RUModule {
    size_t free = 0;
    std::vector<std::string> torsion;  // invariant factors f with R[U]/(f)
};

struct EquivariantTriple {
    std::string ring;
    bool graded = false;
    std::vector<TripleRow> rows;   // graded window on the integer lift
    RUModule minus, infty, plus;   // ungraded R[U]-structure; plus.free counts towers R[U,U^-1]/R[U]
    bool exact = true;
    bool composites_zero = true;
    bool tower_injective = true;
    std::string detail;
};

namespace detail {

// Truncated piece of C (x) R[U^j] for j in [jlo, jhi] restricted to total
// degrees in [lo, hi]; generator (x, j) has degree deg x - 4j.
template <class K>
struct UPiece {
    GradedComplex<K> C;
    std::map<std::pair<size_t, long>, size_t> at;
};

template <class K>
UPiece<K> u_piece(const EquivariantComplex<K>& E, long jlo, long jhi, long lo, long hi) {
    UPiece<K> P;
    std::vector<std::string> names;
    std::vector<long> deg;
    std::vector<std::pair<size_t, long>> keys;
    for (long j = jlo; j <= jhi; ++j)
        for (size_t x = 0; x < E.size(); ++x) {
            long g = E.C.deg[x] - 4 * j;
            if (g < lo || g > hi) continue;
            P.at[{x, j}] = names.size();
            names.push_back(E.C.names[x] + "*U^" + std::to_string(j));
            deg.push_back(g);
            keys.push_back({x, j});
        }
    P.C = GradedComplex<K>(E.C.proto, 0, names, deg);
    for (size_t col = 0; col < keys.size(); ++col) {
        auto [x, j] = keys[col];
        for (auto& [ij, v] : E.C.d.entries())
            if (ij.second == x)
                if (auto it = P.at.find({ij.first, j}); it != P.at.end()) P.C.d.add(it->second, col, v);
        for (auto& [ij, v] : E.u.entries())
            if (ij.second == x)
                if (auto it = P.at.find({ij.first, j + 1}); it != P.at.end()) P.C.d.add(it->second, col, v);
    }
    return P;
}

template <class K>
Matrix<K> transfer(const UPiece<K>& from, const UPiece<K>& to, long jshift) {
    Matrix<K> m = zero_matrix(to.C.size(), from.C.size(), from.C.proto);
    for (auto& [key, col] : from.at)
        if (auto it = to.at.find({key.first, key.second + jshift}); it != to.at.end())
            m(it->second, col) = Alg<K>::one(from.C.proto);
    return m;
}

}  // namespace detail

// d has degree exactly -1 and u exactly +3 on the integer lift.
template <class K>
bool graded_on_lift(const EquivariantComplex<K>& E) {
    for (auto& [ij, v] : E.C.d.entries())
        if (E.C.deg[ij.first] != E.C.deg[ij.second] - 1) return false;
    for (auto& [ij, v] : E.u.entries())
        if (E.C.deg[ij.first] != E.C.deg[ij.second] + 3) return false;
    return true;
}

template <class K>
RUModule ungraded_minus(const EquivariantComplex<K>& E, RUModule& infty, RUModule& plus) {
    using P = Poly<K>;
    size_t n = E.size();
    P zero;
    Matrix<P> D(n, n, zero);
    for (auto& [ij, v] : E.C.d.entries()) D(ij.first, ij.second) = D(ij.first, ij.second) + P::constant(v);
    for (auto& [ij, v] : E.u.entries()) D(ij.first, ij.second) = D(ij.first, ij.second) + P::monomial(v, 1);
    RUModule minus;
    size_t r = 0;
    std::vector<std::string> tors, tors_inf;
    if (n) {
        auto sf = smith_normal_form(D);
        r = sf.rank();
        for (auto& f : sf.factors) {
            if (Alg<P>::is_unit(f)) continue;
            // normalise to a monic factor
            P m = f * P::constant(Alg<K>::inv(f.lead()));
            tors.push_back(Alg<P>::str(m));
            bool pure_u = true;
            for (long i = 0; i < m.degree(); ++i)
                if (!Alg<K>::is_zero(m.coeffs()[static_cast<size_t>(i)])) pure_u = false;
            if (!pure_u) tors_inf.push_back(Alg<P>::str(m));
        }
    }
    minus.free = n - 2 * r;
    minus.torsion = tors;
    infty.free = n - 2 * r;
    infty.torsion = tors_inf;
    plus.free = n - 2 * r;
    plus.torsion = tors;
    return minus;
}

template <class K>
EquivariantTriple equivariant_triple(const EquivariantComplex<K>& E, const std::string& ring_name) {
    static_assert(Alg<K>::is_field, "equivariant homology needs field coefficients");
    if (auto r = check_u(E); !r) throw Error("u-invariant-violated", r.detail);
    if (E.C.period != 0 && E.C.period % 8 != 0)
        throw Error("equivariant.period", "period must be 0 or a multiple of 8 for d + U u to be homogeneous");
    EquivariantTriple T;
    T.ring = ring_name;
    T.minus = ungraded_minus(E, T.infty, T.plus);
    T.graded = graded_on_lift(E);
    if (!T.graded) {
        T.detail = "differential is homogeneous only modulo the period; graded tables omitted";
        return T;
    }
    if (E.size() == 0) return T;
    long mn = *std::min_element(E.C.deg.begin(), E.C.deg.end());
    long mx = *std::max_element(E.C.deg.begin(), E.C.deg.end());
    long lo = mn - 12, hi = mx + 12;
    // every j that can land in [lo - 5, hi + 5]
    long jmax = (mx - (lo - 5)) / 4 + 1, jmin = -((hi + 5 - mn) / 4 + 1);
    auto Mi = detail::u_piece(E, 0, jmax, lo - 5, hi + 5);
    auto Inf = detail::u_piece(E, jmin, jmax, lo - 5, hi + 5);
    auto Pl = detail::u_piece(E, jmin, 0, lo - 5, hi + 5);
    auto I = detail::transfer(Mi, Inf, 0);
    auto Pm = detail::transfer(Inf, Pl, 1);
    auto Lift = detail::transfer(Pl, Inf, -1);
    auto Dinf = Inf.C.d.dense();
    auto Back = detail::transfer(Inf, Mi, 0);
    auto Delta = Back * (Dinf * Lift);
    auto Umap = detail::transfer(Mi, Mi, 1);
    Matrix<K> IDelta = I * Delta, PmI = Pm * I, DeltaPm = Delta * Pm;

    auto in_window = [&](long m) { return m >= lo && m <= hi; };
    std::map<long, TripleRow> rows;
    for (long m = lo - 4; m <= hi + 4; ++m) {
        TripleRow r{m, homology_dim(Mi.C, m), homology_dim(Inf.C, m), homology_dim(Pl.C, m), 0, 0, 0};
        r.rank_i = induced_rank(I, Mi.C, m, Inf.C, m);
        r.rank_p = induced_rank(Pm, Inf.C, m, Pl.C, m - 4);
        r.rank_delta = induced_rank(Delta, Pl.C, m, Mi.C, m + 3);
        rows[m] = r;
    }
    for (long m = lo; m <= hi; ++m) {
        const auto& r = rows[m];
        bool ok = exact_at(r.minus, rows[m - 3].rank_delta, r.rank_i) && exact_at(r.infty, r.rank_i, r.rank_p) &&
                  exact_at(r.plus, rows[m + 4].rank_p, r.rank_delta);
        if (!ok && T.exact) {
            T.exact = false;
            T.detail = "rank equalities fail in grading " + std::to_string(m);
        }
        bool zero = induced_rank(IDelta, Pl.C, m, Inf.C, m + 3) == 0 && induced_rank(PmI, Mi.C, m, Pl.C, m - 4) == 0 &&
                    induced_rank(DeltaPm, Inf.C, m, Mi.C, m - 1) == 0;
        if (!zero && T.composites_zero) {
            T.composites_zero = false;
            T.detail = "a composite of consecutive triangle maps is nonzero in grading " + std::to_string(m);
        }
        if (in_window(m)) T.rows.push_back(r);
    }
    // the U-tower: multiplication by U is injective on I- below every generator
    for (long m = lo; m < mn - 4; ++m)
        if (induced_rank(Umap, Mi.C, m, Mi.C, m - 4) != rows[m].minus) T.tower_injective = false;
    return T;
}

}  // namespace instanton::equivariant
