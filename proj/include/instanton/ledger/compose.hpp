#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instanton/ledger/index.hpp"

namespace instanton::ledger {

// ---- chambers ----

struct Adjacency {
    bool adjacent = false;
    std::string at;
};

inline void require_same_classes(const Chamber& a, const Chamber& b) {
    if (a.size() != b.size()) throw Error("missing-data", "signature data on different class sets");
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib)
        if (ia->first != ib->first) throw Error("missing-data", "class " + ia->first + " missing on one side");
}

inline void require_mod4(const Chamber& a, const Chamber& b) {
    for (auto& [k, v] : a) {
        Int d = b.at(k) - v;
        if (d % 4 != 0) throw Error("mod4-violation", k + ": values differ by " + to_string(d));
        if (v % 2 != 0) throw Error("mod4-violation", k + ": value " + to_string(v) + " is odd");
    }
}

// s1 = s0 + 4 delta_rho
inline Adjacency adjacent(const Chamber& s0, const Chamber& s1) {
    require_same_classes(s0, s1);
    require_mod4(s0, s1);
    Adjacency out;
    int moved = 0;
    for (auto& [k, v] : s0) {
        Int d = s1.at(k) - v;
        if (d == 0) continue;
        ++moved;
        if (d != 4) return {};
        out.at = k;
    }
    out.adjacent = moved == 1;
    if (!out.adjacent) out.at.clear();
    return out;
}

struct ChamberStep {
    std::string at;
    int direction = +1;   // +1: next = prev + 4 delta, -1: next = prev - 4 delta
    Chamber to;
};

// Up to the pointwise max, then down.
inline std::vector<ChamberStep> chamber_path(const Chamber& s, const Chamber& sp) {
    require_same_classes(s, sp);
    require_mod4(s, sp);
    std::vector<ChamberStep> path;
    Chamber cur = s;
    for (auto& [k, v] : s) {
        Int top = std::max(v, sp.at(k));
        while (cur[k] < top) {
            cur[k] += 4;
            path.push_back({k, +1, cur});
        }
    }
    for (auto& [k, v] : sp) {
        while (cur[k] > v) {
            cur[k] -= 4;
            path.push_back({k, -1, cur});
        }
    }
    return path;
}

// ---- composite records ----

struct CompositeRecord {
    Record rec;                 // on W1 u W2, elements concatenated
    size_t first = 0, second = 0;
    ClassRef middle;
};

inline Cobordism composite_sheet(const Cobordism& W1, const Cobordism& W2) {
    Cobordism W;
    W.name = W1.name + "+" + W2.name;
    W.b1 = W1.b1 + W2.b1;
    W.bplus = W1.bplus + W2.bplus;
    W.chi = W1.chi + W2.chi;
    W.sigma = W1.sigma + W2.sigma;
    W.Y = W1.Y;
    W.Yp = W2.Yp;
    return W;
}

// Gluing along a rational homology sphere identifies H^2 of the composite
// with pairs agreeing on the middle; squares add.
inline std::vector<CompositeRecord> compose_records(const Cobordism& W1, const std::vector<Record>& R1,
                                                    const Cobordism& W2, const std::vector<Record>& R2) {
    std::vector<CompositeRecord> out;
    auto cat = [](const Elem& a, const Elem& b) {
        Elem e = a;
        e.insert(e.end(), b.begin(), b.end());
        return e;
    };
    for (size_t i = 0; i < R1.size(); ++i)
        for (size_t j = 0; j < R2.size(); ++j) {
            const Record &A = R1[i], &B = R2[j];
            Elem ax = W1.restrict_out(A.x), ay = W1.restrict_out(A.y);
            Elem bx = W2.restrict_in(B.x), by = W2.restrict_in(B.y);
            std::vector<std::pair<Elem, Elem>> sides;  // (partner of A.x, partner of A.y)
            if (ax == bx && ay == by) sides.push_back({B.x, B.y});
            if (!B.central && ax == by && ay == bx) sides.push_back({B.y, B.x});
            if (A.central && sides.size() == 2) sides.pop_back();
            for (auto& [px, py] : sides) {
                CompositeRecord c;
                c.first = i;
                c.second = j;
                c.rec.central = A.central && B.central;
                c.rec.x = cat(A.x, px);
                c.rec.y = cat(A.y, py);
                c.rec.in = A.in;
                c.rec.out = W2.Yp.classify(W2.restrict_out(px), W2.restrict_out(py));
                c.rec.square = A.square + B.square;
                c.middle = W1.Yp.classify(ax, ay);
                out.push_back(std::move(c));
            }
        }
    return out;
}

// ---- composite shift ----

enum class Hypothesis { proof, statement };

inline Hypothesis parse_hypothesis(const std::string& s) {
    if (s == "proof") return Hypothesis::proof;
    if (s == "statement") return Hypothesis::statement;
    throw Error("usage.bad-hypothesis", "hypothesis must be 'proof' or 'statement'");
}

struct MiddleChoice {
    std::string at;
    std::optional<Int> lo, hi;   // interval for f1; absent side is unbounded
    Int f1 = 0;
    int a = 0;                   // sigma^- = sigma^+ - 4a
};

struct ComposeResult {
    Int f0 = 0, f2 = 0;
    std::vector<MiddleChoice> middle;
    Chamber sigma0, sigma1_plus, sigma1_minus, sigma2;
    Classification c1, c2, c12;
    size_t additivity_checked = 0;
    bool admissible_middle = false;
    bool certified = false;
    std::string detail;
};

inline ComposeResult compose_shift(const Cobordism& W1, const std::vector<Record>& R1, const Cobordism& W2,
                                   const std::vector<Record>& R2, const Chamber& s0, const Chamber& s1,
                                   const Chamber& s2, Hypothesis hyp = Hypothesis::proof) {
    for (const Cobordism* W : {&W1, &W2}) {
        long d = hyp == Hypothesis::proof ? W->B() : -W->B();
        if (d < 0)
            throw Error("hypothesis-violated", W->name + ": b1 - b+ = " + std::to_string(W->B()) + " has the wrong sign for the " +
                                                   (hyp == Hypothesis::proof ? "proof" : "statement") + " hypothesis");
    }
    auto has_central = [](const std::vector<Record>& R) {
        return std::any_of(R.begin(), R.end(), [](const Record& r) { return r.central; });
    };
    if ((W1.bplus > 0 && has_central(R1)) || (W2.bplus > 0 && has_central(R2)))
        throw Error("hypothesis-violated", "b+ > 0 on a cobordism carrying central reducibles");

    Cobordism W12 = composite_sheet(W1, W2);
    auto C12 = compose_records(W1, R1, W2, R2);
    std::vector<Record> R12;
    for (auto& c : C12) R12.push_back(c.rec);

    ComposeResult out;
    out.admissible_middle = W1.Yp.b1 > 0;

    // additivity N12 = N1 + N2 + c(middle)
    for (auto& c : C12) {
        const Record &A = R1[c.first], &B = R2[c.second];
        if (A.central || B.central) continue;
        Int n12 = normal_index(c.rec, W12, s0, s2);
        Int n1 = normal_index(A, W1, s0, s1), n2 = normal_index(B, W2, s1, s2);
        Int cm = c.middle.central ? 2 : 0;
        if (n12 != n1 + n2 + cm)
            throw Error("compose.additivity", "N12 = " + to_string(n12) + " but N1 + N2 + c = " + to_string(Int(n1 + n2 + cm)));
        ++out.additivity_checked;
    }

    out.sigma1_plus = s1;
    out.sigma1_minus = s1;
    for (auto& rho : W1.Yp.abelian_classes()) {
        MiddleChoice m;
        m.at = rho.name;
        const Record *arg_lo = nullptr, *arg_hi = nullptr;
        for (auto& L : R1) {
            if (L.central || !L.in.central || L.out != rho || L.square > 0) continue;
            Int v = 2 * W1.B() - 2 * normal_index(L, W1, s0, s1);
            if (!m.lo || v > *m.lo) m.lo = v, arg_lo = &L;
        }
        for (auto& L : R2) {
            if (L.central || L.in != rho || !L.out.central || L.square > 0) continue;
            Int v = 2 * normal_index(L, W2, s1, s2) - 2 * W2.B() + 4;
            if (!m.hi || v < *m.hi) m.hi = v, arg_hi = &L;
        }
        // multiple of 4 in [lo, hi] closest to 0
        auto floor4 = [](const Int& v) -> Int { Int q = v / 4; if (q * 4 > v) --q; return q * 4; };
        auto ceil4 = [&](const Int& v) -> Int { Int f = floor4(v); return f == v ? f : f + 4; };
        Int f = 0;
        if (m.lo && f < *m.lo) f = ceil4(*m.lo);
        if (m.hi && f > *m.hi) f = floor4(*m.hi);
        if ((m.lo && f < *m.lo) || (m.hi && f > *m.hi))
            throw Error("infeasible", "no multiple of 4 in [" + to_string(*m.lo) + ", " + to_string(*m.hi) + "] at " + rho.name +
                                          ": " + arg_lo->label(W1.H2W) + " on " + W1.name + " vs " + arg_hi->label(W2.H2W) +
                                          " on " + W2.name);
        m.f1 = f;
        m.a = m.hi && f > *m.hi - 4 ? 1 : 0;
        out.sigma1_plus[rho.name] = s1.at(rho.name) + f;
        out.sigma1_minus[rho.name] = s1.at(rho.name) + f - 4 * m.a;
        out.middle.push_back(m);
    }

    // outer shifts: f0 = -4 n0 on Y, f2 = +4 n2 on Y''
    Int n0 = 0, n2 = 0;
    auto need = [](const Int& gap) -> Int { return gap < 0 ? Int((-gap + 1) / 2) : Int(0); };
    auto eligible = [](const Record& L) { return !L.central && !L.pseudocentral() && L.square <= 0; };
    for (auto& L : R1)
        if (eligible(L) && !L.in.central)
            n0 = std::max(n0, need(normal_index(L, W1, s0, out.sigma1_plus) - W1.B()));
    for (auto& L : R2)
        if (eligible(L) && !L.out.central)
            n2 = std::max(n2, need(normal_index(L, W2, out.sigma1_minus, s2) - W2.B()));
    for (auto& L : R12) {
        if (!eligible(L) || (L.in.central && L.out.central)) continue;
        Int gap = normal_index(L, W12, s0, s2) - W12.B() + (L.in.central ? Int(0) : Int(2 * n0)) + (L.out.central ? Int(0) : Int(2 * n2));
        if (gap >= 0) continue;
        if (!L.in.central) n0 += need(gap);
        else n2 += need(gap);
    }
    out.f0 = -4 * n0;
    out.f2 = 4 * n2;
    out.sigma0 = shifted(s0, out.f0);
    out.sigma2 = shifted(s2, out.f2);
    out.c1 = classify(W1, out.sigma0, out.sigma1_plus, R1);
    out.c2 = classify(W2, out.sigma1_minus, out.sigma2, R2);
    out.c12 = classify(W12, out.sigma0, out.sigma2, R12);
    out.certified = is_pseudo_unobstructed(out.c1.taxonomy) && is_pseudo_unobstructed(out.c2.taxonomy) &&
                    is_pseudo_unobstructed(out.c12.taxonomy);
    if (!out.certified) {
        for (auto* c : {&out.c1, &out.c2, &out.c12})
            if (!is_pseudo_unobstructed(c->taxonomy)) out.detail = c->reason;
    }
    return out;
}

// ---- pseudocentral count ----

struct PseudocentralCount {
    size_t pairs = 0;         // |Z~|
    size_t central = 0;       // ι-fixed pairs
    size_t pseudocentral = 0; // free ι-orbits
    bool identity = false;
    std::vector<std::pair<Elem, Elem>> listing;
};

// Pairs (y, y') with r_W(y) = r_W(y') = (x, x'), y - y' torsion, y + y' = c.
inline PseudocentralCount pseudocentral_count(const Cobordism& W, const Elem& theta, const Elem& theta_p) {
    PseudocentralCount out;
    const auto& G = W.H2W;
    size_t f0 = G.factors().size();
    Elem base = G.zero();
    for (size_t k = f0; k < base.size(); ++k) {
        if (W.c[k] % 2 != 0) return out.identity = true, out;
        base[k] = W.c[k] / 2;
    }
    for (auto& t : G.torsion_elements()) {
        Elem y = G.add(base, t);
        Elem yp = G.sub(W.c, y);
        if (!G.is_torsion(G.sub(y, yp))) continue;
        if (W.restrict_in(y) != theta || W.restrict_in(yp) != theta) continue;
        if (W.restrict_out(y) != theta_p || W.restrict_out(yp) != theta_p) continue;
        out.listing.emplace_back(y, yp);
    }
    std::sort(out.listing.begin(), out.listing.end());
    out.pairs = out.listing.size();
    size_t moved = 0;
    for (auto& [y, yp] : out.listing) {
        bool closed = std::binary_search(out.listing.begin(), out.listing.end(), std::make_pair(yp, y));
        if (!closed) return out;
        if (y == yp) ++out.central;
        else ++moved;
    }
    out.pseudocentral = moved / 2;
    out.identity = moved % 2 == 0 && out.pairs == out.central + 2 * out.pseudocentral;
    return out;
}

}  // namespace instanton::ledger
