#pragma once

// Wall crossing at an abelian object: the irreducible complex of the
// suspension contains that of the original category as a subcomplex with
// quotient one generator S[rho] in grading i(rho) - 1, whose differential is
// -V2 = -sum_b n_b b.

#include "instanton/equivariant/irreducible.hpp"
#include "instanton/flow/suspension.hpp"

namespace instanton::flow {

template <class K>
struct WallcrossReport {
    std::string rho;
    long rho_grading = 0;
    std::vector<HomologyGroup<K>> I0, I1;
    std::map<std::string, Rat> V2;   // count of isolated irreducible components per target
    struct Row {
        long grading;
        size_t h0, h1, q, rank_i, rank_q, rank_conn;
    };
    std::vector<Row> rows;
    bool exact = true;
    bool even_rho = true;
    Int chi0 = 0, chi1 = 0;
    std::string detail;
};

template <class K>
WallcrossReport<K> wallcross(const FlowCategory& fc, const SectionData& s, const K& proto) {
    static_assert(Alg<K>::is_field, "rank-exactness is checked over a field");
    auto S = suspend(fc, s);
    size_t r = fc.index(s.rho);
    auto A = equivariant::irreducible_complex(fc, proto);
    auto B = equivariant::irreducible_complex(S, proto);
    auto sname = sphere_bundle_name(s.rho);
    WallcrossReport<K> W;
    W.rho = s.rho;
    W.rho_grading = fc.objects[r].grading;
    W.even_rho = mod_floor(W.rho_grading, 2) == 0;
    // inclusion A -> B by name; quotient B -> span{S[rho]}
    Matrix<K> inc = equivariant::zero_matrix(B.size(), A.size(), proto);
    size_t spos = B.size();
    for (size_t j = 0; j < B.size(); ++j)
        if (B.names[j] == sname) spos = j;
    if (spos == B.size()) throw Error("internal.wallcross", "suspension lost its sphere bundle");
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
            if (A.names[i] == B.names[j]) inc(j, i) = Alg<K>::one(proto);
    for (size_t j = 0; j < B.size(); ++j) {
        K v = B.d.get(j, spos);
        if (!Alg<K>::is_zero(v)) W.V2[B.names[j]] = 0;
    }
    for (auto& [name, op] : s.B)
        if (auto it = op.find({0, 0}); it != op.end() && S.objects[S.index(name)].kind == Kind::irreducible &&
                                         S.degree(S.index(sname), S.index(name)) == 0)
            W.V2[name] = it->second;
    GradedComplex<K> Q(proto, fc.period, {sname}, {W.rho_grading - 1});
    Matrix<K> quo = equivariant::zero_matrix(1, B.size(), proto);
    quo(0, spos) = Alg<K>::one(proto);
    // connecting map: lift the generator, apply d, read in A
    Matrix<K> conn = equivariant::zero_matrix(A.size(), 1, proto);
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < B.size(); ++j)
            if (A.names[i] == B.names[j]) conn(i, 0) = B.d.get(j, spos);
    std::set<long> ks;
    for (auto* C : {&A, &B, &Q})
        for (long k : C->gradings()) {
            ks.insert(C->key(k));
            ks.insert(C->key(k + 1));
            ks.insert(C->key(k - 1));
        }
    std::map<long, typename WallcrossReport<K>::Row> rows;
    for (long k : ks) {
        typename WallcrossReport<K>::Row row{k,
                                             equivariant::homology_dim(A, k),
                                             equivariant::homology_dim(B, k),
                                             equivariant::homology_dim(Q, k),
                                             equivariant::induced_rank(inc, A, k, B, k),
                                             equivariant::induced_rank(quo, B, k, Q, k),
                                             equivariant::induced_rank(conn, Q, k, A, k - 1)};
        rows[k] = row;
    }
    auto key = [&](long k) { return fc.period > 0 ? mod_floor(k, fc.period) : k; };
    for (auto& [k, row] : rows) {
        auto next = rows.find(key(k + 1));
        size_t into_a = next == rows.end() ? 0 : next->second.rank_conn;
        bool ok = row.h0 == into_a + row.rank_i && row.h1 == row.rank_i + row.rank_q && row.q == row.rank_q + row.rank_conn;
        if (!ok && W.exact) {
            W.exact = false;
            W.detail = "long exact sequence fails in grading " + std::to_string(k);
        }
        W.rows.push_back(row);
    }
    W.I0 = homology(A);
    W.I1 = homology(B);
    W.chi0 = equivariant::euler_char(W.I0, fc.period);
    W.chi1 = equivariant::euler_char(W.I1, fc.period);
    return W;
}

// Successive wall crossings along a list of signature classes; each step
// suspends at the current object of that class with default sections.
struct ChamberStep {
    std::string cls, object;
    Int chi;
};

template <class K>
std::vector<ChamberStep> chamber_ledger(FlowCategory fc, const std::vector<std::string>& path, const K& proto) {
    std::vector<ChamberStep> out;
    auto chi_of = [&](const FlowCategory& c) {
        return equivariant::euler_char(homology(equivariant::irreducible_complex(c, proto)), c.period);
    };
    out.push_back({"", "", chi_of(fc)});
    for (auto& cls : path) {
        std::optional<size_t> at;
        for (size_t a = 0; a < fc.size(); ++a)
            if (fc.objects[a].kind == Kind::abelian && base_class(fc.objects[a].name) == cls) at = a;
        if (!at) throw Error("not-abelian", "no abelian object of class '" + cls + "'");
        auto name = fc.objects[*at].name;
        if (mod_floor(fc.objects[*at].grading, 2) != 0)
            throw Error("abelian-grading-parity", "abelian object '" + name + "' sits in odd grading");
        fc = suspend(fc, default_sections(fc, name));
        out.push_back({cls, name, chi_of(fc)});
    }
    return out;
}

}  // namespace instanton::flow
