#pragma once

// Irreducible complex, its identification with u CM[-3], the E^1 page of the
// periodic filtration, and Euler characteristics.

#include <set>

#include "instanton/equivariant/field.hpp"
#include "instanton/flow/category.hpp"

namespace instanton::equivariant {

using flow::FlowCategory;
using flow::Kind;

// d^irr(a) = sum_b #C(a,b) b, the count read off g0 -> g0 of fiber-degree-0
// blocks between irreducibles.
template <class T>
GradedComplex<T> irreducible_complex(const FlowCategory& fc, const T& proto) {
    flow::require_valid(fc);
    std::vector<size_t> irr;
    std::map<size_t, size_t> pos;
    std::vector<std::string> names;
    std::vector<long> deg;
    for (size_t a = 0; a < fc.size(); ++a)
        if (fc.objects[a].kind == Kind::irreducible) {
            pos[a] = irr.size();
            irr.push_back(a);
            names.push_back(fc.objects[a].name);
            deg.push_back(fc.objects[a].grading);
        }
    GradedComplex<T> C(proto, fc.period, names, deg);
    for (auto& [ab, op] : fc.blocks) {
        if (!pos.count(ab.first) || !pos.count(ab.second) || fc.degree(ab.first, ab.second) != 0) continue;
        auto it = op.find({0, 0});
        if (it != op.end()) C.d.add(pos[ab.second], pos[ab.first], from_rat(it->second, proto));
    }
    return C;
}

// a -> g3^a identifies (C^irr, d^irr) with (u CM[-3], -d); checked
// generator by generator.
template <class T>
Report verify_floer_iso(const FlowCategory& fc, const T& proto) {
    auto E = flow::cm_complex(fc, proto);
    auto I = irreducible_complex(fc, proto);
    flow::Layout L(fc);
    std::vector<size_t> top;  // CM index of g3^a for each irreducible
    for (size_t a = 0; a < fc.size(); ++a)
        if (fc.objects[a].kind == Kind::irreducible) {
            size_t g0 = L.at(a, 0), g3 = L.at(a, 1);
            if (E.u.get(g3, g0) != Alg<T>::one(proto))
                return Report::fail("floer-iso.u", "u g0 != g3 on " + fc.objects[a].name);
            if (E.C.deg[g3] - 3 != fc.objects[a].grading)
                return Report::fail("floer-iso.grading", "grading of g3 on " + fc.objects[a].name + " is not i + 3");
            top.push_back(g3);
        }
    // u CM is spanned by the g3's: every u-image lies in their span
    std::set<size_t> in_top(top.begin(), top.end());
    for (auto& [ij, v] : E.u.entries())
        if (!in_top.count(ij.first)) return Report::fail("floer-iso.image", "u-image leaves the span of the g3 generators");
    for (size_t i = 0; i < top.size(); ++i) {
        // -d(g3^a) restricted to u CM must equal d^irr(a) under the map
        for (size_t k = 0; k < E.size(); ++k) {
            T v = E.C.d.get(k, top[i]);
            if (Alg<T>::is_zero(v)) continue;
            if (!in_top.count(k))
                return Report::fail("floer-iso.subcomplex", "d(" + E.C.names[top[i]] + ") leaves u CM at " + E.C.names[k]);
        }
        for (size_t j = 0; j < top.size(); ++j) {
            T lhs = I.d.get(j, i);
            T rhs = Alg<T>::zero(proto) - E.C.d.get(top[j], top[i]);
            if (lhs != rhs)
                return Report::fail("floer-iso.differential", "d^irr(" + I.names[i] + ") on " + I.names[j] + " is " +
                                                                  Alg<T>::str(lhs) + " but -d(g3) gives " + Alg<T>::str(rhs));
        }
    }
    return Report::pass();
}

// Z/2-graded Euler characteristic of a finite-rank homology listing.
template <class T>
Int euler_char(const std::vector<HomologyGroup<T>>& H, long period) {
    if (period % 2 != 0) throw Error("ungraded", "odd period gives no Z/2 grading");
    Int chi = 0;
    for (auto& h : H) chi += (mod_floor(h.grading, 2) == 0 ? 1 : -1) * static_cast<long>(h.free);
    return chi;
}

// E^1 = sum of orbit homologies, d^1 = fiber-degree-0 blocks.
template <class K>
struct E1Page {
    GradedComplex<K> E1;
    std::vector<HomologyGroup<K>> E2;
    size_t d1_rank = 0;
    Int chi_e1 = 0, chi_e2 = 0, chi_hm = 0;
};

template <class K>
E1Page<K> e1_page(const equivariant::EquivariantComplex<K>& C, const FlowCategory& fc) {
    static_assert(Alg<K>::is_field, "the E^1 page is computed over a field");
    auto expect = flow::cm_complex(fc, C.C.proto);
    if (expect.C.names != C.C.names || expect.C.deg != C.C.deg || !(expect.C.d == C.C.d))
        throw Error("mismatched-inputs", "complex is not the flow complex of the given category");
    flow::Layout L(fc);
    E1Page<K> P;
    P.E1 = GradedComplex<K>(C.C.proto, fc.period, C.C.names, C.C.deg);
    for (auto& [ab, op] : fc.blocks) {
        if (fc.degree(ab.first, ab.second) != 0) continue;
        for (auto& [k, v] : op) {
            Rat c = v * flow::sign_of(fc.objects[ab.first].model().degree(k.first));
            P.E1.d.add(L.at(ab.second, k.second), L.at(ab.first, k.first), from_rat(c, C.C.proto));
        }
    }
    if (auto r = check_complex(P.E1); !r) throw Error("internal.e1", "(d^1)^2 != 0: " + r.detail);
    P.d1_rank = rank(P.E1.d.dense());
    P.E2 = homology(P.E1);
    long e1 = 0;
    for (auto g : C.C.deg) e1 += mod_floor(g, 2) == 0 ? 1 : -1;
    P.chi_e1 = e1;
    P.chi_e2 = euler_char(P.E2, fc.period);
    P.chi_hm = euler_char(homology(C.C), fc.period);
    return P;
}

}  // namespace instanton::equivariant
