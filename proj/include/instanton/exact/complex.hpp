#pragma once

#include <map>
#include <string>
#include <vector>

#include "instanton/exact/smith.hpp"

namespace instanton {

// Free complex: generators with integer grading lifts, differential stored
// column-wise (column j is d of generator j).  period 0 means Z-graded.
template <class T>
struct GradedComplex {
    T proto{};
    long period = 8;
    std::vector<std::string> names;
    std::vector<long> deg;
    SparseMatrix<T> d;

    GradedComplex() = default;
    GradedComplex(const T& pr, long period_, std::vector<std::string> n, std::vector<long> g)
        : proto(pr), period(period_), names(std::move(n)), deg(std::move(g)), d(deg.size(), deg.size(), pr) {}

    size_t size() const { return deg.size(); }
    long key(long g) const { return period > 0 ? mod_floor(g, period) : g; }

    std::vector<long> gradings() const {
        std::vector<long> ks;
        for (auto g : deg) ks.push_back(key(g));
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        return ks;
    }
    std::vector<size_t> in_grading(long k) const {
        std::vector<size_t> out;
        for (size_t i = 0; i < size(); ++i)
            if (key(deg[i]) == key(k)) out.push_back(i);
        return out;
    }
    // d restricted to generators of grading k -> grading k-1
    Matrix<T> block(long k) const {
        auto src = in_grading(k), dst = in_grading(k - 1);
        Matrix<T> m(dst.size(), src.size(), proto);
        std::map<size_t, size_t> row;
        for (size_t i = 0; i < dst.size(); ++i) row[dst[i]] = i;
        std::map<size_t, size_t> col;
        for (size_t j = 0; j < src.size(); ++j) col[src[j]] = j;
        for (auto& [ij, v] : d.entries()) {
            auto r = row.find(ij.first);
            auto c = col.find(ij.second);
            if (r != row.end() && c != col.end()) m(r->second, c->second) = v;
        }
        return m;
    }
};

// Degree and square-zero checks; names the first offending pair.
template <class T>
Report check_complex(const GradedComplex<T>& C) {
    for (auto& [ij, v] : C.d.entries()) {
        if (C.key(C.deg[ij.second] - 1) != C.key(C.deg[ij.first]))
            return Report::fail("not-a-complex", "d(" + C.names[ij.second] + ") has a term in " + C.names[ij.first] +
                                                     " of the wrong degree");
    }
    auto dd = C.d.dense();
    auto sq = dd * dd;
    for (size_t i = 0; i < sq.rows(); ++i)
        for (size_t j = 0; j < sq.cols(); ++j)
            if (!Alg<T>::is_zero(sq(i, j)))
                return Report::fail("not-a-complex", "d^2(" + C.names[j] + ") has coefficient " + Alg<T>::str(sq(i, j)) +
                                                         " on " + C.names[i]);
    return Report::pass();
}

template <class T>
struct HomologyGroup {
    long grading = 0;
    size_t free = 0;
    std::vector<T> torsion;  // non-unit invariant factors
    bool zero() const { return free == 0 && torsion.empty(); }
};

template <class T>
std::string describe(const HomologyGroup<T>& h, const std::string& ring) {
    if (h.zero()) return "0";
    std::string s;
    if (h.free) s = ring + (h.free > 1 ? "^" + std::to_string(h.free) : "");
    for (auto& t : h.torsion) s += (s.empty() ? "" : " + ") + ring + "/" + Alg<T>::str(t);
    return s;
}

template <class T>
std::vector<HomologyGroup<T>> homology(const GradedComplex<T>& C) {
    if (auto r = check_complex(C); !r) throw Error(r.tag, r.detail);
    std::vector<HomologyGroup<T>> out;
    for (long k : C.gradings()) {
        auto out_block = C.block(k);
        auto in_block = C.block(k + 1);
        HomologyGroup<T> h;
        h.grading = k;
        size_t n = C.in_grading(k).size();
        size_t r_out = rank(out_block), r_in;
        if constexpr (Alg<T>::is_field) {
            r_in = rank(in_block);
        } else {
            auto sf = smith_normal_form(in_block);
            r_in = sf.rank();
            for (auto& f : sf.factors)
                if (!Alg<T>::is_unit(f)) h.torsion.push_back(f);
        }
        h.free = n - r_out - r_in;
        out.push_back(std::move(h));
    }
    return out;
}

template <class T>
long total_rank(const std::vector<HomologyGroup<T>>& H) {
    long s = 0;
    for (auto& h : H) s += static_cast<long>(h.free);
    return s;
}

}  // namespace instanton
