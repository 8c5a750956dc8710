#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instanton/exact/group.hpp"

namespace instanton::ledger {

// A reducible flat class on a rational homology sphere: central {x} with
// 2x = w, or abelian {z1, z2} with z1 + z2 = w, z1 != z2 (stored sorted).
struct ClassRef {
    bool central = true;
    Elem a, b;
    std::string name;
    bool operator==(const ClassRef& o) const { return central == o.central && a == o.a && b == o.b; }
};

struct AbelianData {
    std::string name;
    Elem z1, z2;
    long h1_dim = 0;            // dim_R H^1(Y; C_rho), even
    std::optional<Rat> rho;     // rho(ad_rho)
};

struct ThreeManifold {
    std::string name = "Y";
    long b1 = 0;                // b1 > 0: admissible, no reducibles
    FinAbGroup H2;
    Elem w;
    std::vector<AbelianData> abelian;                    // optional per-class data
    std::vector<std::pair<std::string, Elem>> central_names;

    std::vector<Elem> centrals() const {
        if (b1 > 0) return {};
        return solve_2x_eq_b(H2, w);
    }
    // Unordered pairs {z1, z2}, z1 < z2, z1 + z2 = w.
    std::vector<std::pair<Elem, Elem>> abelian_pairs() const {
        std::vector<std::pair<Elem, Elem>> out;
        if (b1 > 0) return out;
        for (auto& z1 : H2.elements()) {
            Elem z2 = H2.sub(w, z1);
            if (z1 < z2) out.emplace_back(z1, z2);
        }
        return out;
    }

    ClassRef central_class(const Elem& x) const {
        ClassRef c{true, x, x, ""};
        for (auto& [n, e] : central_names)
            if (e == x) c.name = n;
        if (c.name.empty()) {
            auto cs = centrals();
            auto it = std::find(cs.begin(), cs.end(), x);
            c.name = "theta" + std::to_string(it - cs.begin());
        }
        return c;
    }
    ClassRef abelian_class(Elem z1, Elem z2) const {
        if (z2 < z1) std::swap(z1, z2);
        ClassRef c{false, z1, z2, ""};
        if (auto d = data(z1, z2)) c.name = d->name;
        if (c.name.empty()) {
            auto ps = abelian_pairs();
            auto it = std::find(ps.begin(), ps.end(), std::make_pair(z1, z2));
            c.name = "rho" + std::to_string(it - ps.begin());
        }
        return c;
    }
    // The restriction {a, b} of a reducible on a cobordism.
    ClassRef classify(const Elem& a, const Elem& b) const {
        if (a == b) return central_class(a);
        return abelian_class(a, b);
    }
    const AbelianData* data(Elem z1, Elem z2) const {
        if (z2 < z1) std::swap(z1, z2);
        for (auto& d : abelian) {
            Elem u = d.z1, v = d.z2;
            if (v < u) std::swap(u, v);
            if (u == z1 && v == z2) return &d;
        }
        return nullptr;
    }
    const AbelianData* data_by_name(const std::string& n) const {
        for (auto& d : abelian)
            if (d.name == n) return &d;
        return nullptr;
    }
    std::vector<ClassRef> abelian_classes() const {
        std::vector<ClassRef> out;
        for (auto& [a, b] : abelian_pairs()) out.push_back(abelian_class(a, b));
        return out;
    }
    long h1_dim(const ClassRef& c) const {
        auto d = data(c.a, c.b);
        return d ? d->h1_dim : 0;
    }
};

struct Reducibles3d {
    std::vector<Elem> central;
    std::vector<std::pair<Elem, Elem>> abelian;
};

inline Reducibles3d enum_reducibles_3d(const ThreeManifold& Y) {
    if (!Y.H2.finite()) throw Error("sheet.infinite-H2", "H^2(Y) must be finite for a rational homology sphere");
    return {Y.centrals(), Y.abelian_pairs()};
}

// Cohomological record of a cobordism W: Y -> Y'.
struct Cobordism {
    std::string name = "W";
    long b1 = 0, bplus = 0;
    Int chi = 0, sigma = 0;
    FinAbGroup H2W;
    Elem c;                                  // PD(c), Smith coordinates
    ThreeManifold Y, Yp;
    std::vector<std::vector<Int>> r, rp;     // generator images in Y / Y' generators
    Matrix<Rat> Q;                           // x^2 = x^T Q x on H2W generators

    long B() const { return b1 - bplus; }

    Elem restrict_in(const Elem& e) const { return apply(Y.H2, r, e); }
    Elem restrict_out(const Elem& e) const { return apply(Yp.H2, rp, e); }

    Rat square(const Elem& e) const {
        auto x = H2W.to_gens(e);
        Rat s = 0;
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < x.size(); ++j) s += Q(i, j) * Rat(x[i] * x[j]);
        return s;
    }

    // Restriction maps must kill relations and carry c to w, w'; Q must be
    // symmetric and vanish on relations.
    Report check() const {
        size_t n = H2W.generators();
        if (r.size() != n || rp.size() != n)
            return Report::fail("sheet.restriction", "restriction needs one image per generator");
        for (auto& row : r)
            if (row.size() != Y.H2.generators()) return Report::fail("sheet.restriction", "bad image length (Y)");
        for (auto& row : rp)
            if (row.size() != Yp.H2.generators()) return Report::fail("sheet.restriction", "bad image length (Y')");
        if (Q.rows() != n || Q.cols() != n) return Report::fail("sheet.qform", "Qform must be square on the generators");
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (Q(i, j) != Q(j, i)) return Report::fail("sheet.qform", "Qform is not symmetric");
        // relations: the kernel of Z^n -> H2W is spanned by Uinv columns of
        // unit-free rows and factor multiples; test on a generating set.
        for (auto& rel : relation_vectors()) {
            if (restrict_raw(Y.H2, r, rel) != Y.H2.zero())
                return Report::fail("sheet.restriction", "restriction to Y is not a homomorphism");
            if (restrict_raw(Yp.H2, rp, rel) != Yp.H2.zero())
                return Report::fail("sheet.restriction", "restriction to Y' is not a homomorphism");
            for (size_t i = 0; i < n; ++i) {
                Rat s = 0;
                for (size_t j = 0; j < n; ++j) s += Q(i, j) * Rat(rel[j]);
                if (s != 0) return Report::fail("sheet.qform", "Qform does not vanish on a relation");
            }
        }
        if (restrict_in(c) != Y.w) return Report::fail("sheet.c-class", "c does not restrict to w on Y");
        if (restrict_out(c) != Yp.w) return Report::fail("sheet.c-class", "c does not restrict to w' on Y'");
        if (b1 < 0 || bplus < 0) return Report::fail("sheet.betti", "Betti numbers must be non-negative");
        return Report::pass();
    }

    // Generators of ker(Z^n -> H2W), in presentation coordinates.
    std::vector<std::vector<Int>> relation_vectors() const {
        std::vector<std::vector<Int>> out;
        size_t n = H2W.generators();
        for (size_t i = 0; i < n; ++i) {
            std::vector<Int> e(n, 0);
            e[i] = 1;
            // order of the generator's image, if finite, gives one relation
            Elem g = H2W.from_gens(e);
            if (!H2W.is_torsion(g)) continue;
            Int k = 1;
            Elem acc = g;
            while (acc != H2W.zero()) {
                acc = H2W.add(acc, g);
                ++k;
            }
            for (auto& v : e) v *= k;
            out.push_back(e);
        }
        // differences between a vector and the representative of its class
        for (size_t i = 0; i < n; ++i) {
            std::vector<Int> e(n, 0);
            e[i] = 1;
            auto rep = H2W.to_gens(H2W.from_gens(e));
            for (size_t j = 0; j < n; ++j) rep[j] = e[j] - rep[j];
            if (std::any_of(rep.begin(), rep.end(), [](const Int& v) { return v != 0; })) out.push_back(rep);
        }
        return out;
    }

private:
    Elem apply(const FinAbGroup& T, const std::vector<std::vector<Int>>& img, const Elem& e) const {
        return restrict_raw(T, img, H2W.to_gens(e));
    }
    static Elem restrict_raw(const FinAbGroup& T, const std::vector<std::vector<Int>>& img, const std::vector<Int>& x) {
        std::vector<Int> y(T.generators(), 0);
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < y.size(); ++j) y[j] += x[i] * img[i][j];
        return T.from_gens(y);
    }
};

// Reducible on W: central x (2x = c) or abelian {x, y}.
struct Record {
    bool central = false;
    Elem x, y;
    ClassRef in, out;   // restrictions to Y and Y'
    Rat square;         // (x - y)^2
    Rat energy() const { return -2 * square; }
    bool pseudocentral() const { return !central && in.central && out.central && square == 0; }
    std::string label(const FinAbGroup& G) const {
        return central ? "central " + G.str(x) : "abelian {" + G.str(x) + "," + G.str(y) + "}";
    }
};

struct Enumeration4d {
    std::vector<Record> records;
    bool saturated = false;  // some record touches the search bound
};

namespace detail {

inline std::vector<Elem> box(const FinAbGroup& G, long bound, bool& capped) {
    capped = G.free_rank() > 0;
    auto tors = G.torsion_elements();
    if (G.free_rank() == 0) return tors;
    std::vector<Elem> out;
    size_t f0 = G.factors().size();
    std::vector<long> cur(G.free_rank(), -bound);
    for (;;) {
        for (auto& t : tors) {
            Elem e = t;
            for (size_t k = 0; k < cur.size(); ++k) e[f0 + k] = cur[k];
            out.push_back(e);
        }
        size_t k = 0;
        while (k < cur.size() && cur[k] == bound) cur[k++] = -bound;
        if (k == cur.size()) break;
        ++cur[k];
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool on_boundary(const FinAbGroup& G, const Elem& e, long bound) {
    for (size_t k = G.factors().size(); k < e.size(); ++k)
        if (abs(e[k]) >= bound) return true;
    return false;
}

}  // namespace detail

inline Enumeration4d enum_reducibles_4d(const Cobordism& W, std::optional<long> bound = std::nullopt) {
    if (W.H2W.free_rank() > 0 && !bound)
        throw Error("unbounded-search", "H^2(W) is infinite; supply a search bound");
    if (W.Y.b1 > 0 || W.Yp.b1 > 0) return {};
    long B = bound.value_or(0);
    bool capped = false;
    auto elems = detail::box(W.H2W, B, capped);
    Enumeration4d out;
    for (auto& x : elems) {
        Elem y = W.H2W.sub(W.c, x);
        if (!(x <= y)) continue;
        // y may leave the box; still a legitimate record
        Record rec;
        rec.central = x == y;
        rec.x = x;
        rec.y = y;
        rec.in = W.Y.classify(W.restrict_in(x), W.restrict_in(y));
        rec.out = W.Yp.classify(W.restrict_out(x), W.restrict_out(y));
        rec.square = rec.central ? Rat(0) : W.square(W.H2W.sub(x, y));
        if (capped && (detail::on_boundary(W.H2W, x, B) || detail::on_boundary(W.H2W, y, B))) out.saturated = true;
        out.records.push_back(std::move(rec));
    }
    // pairs {x, y} with y outside the box but x inside and x > y are seen from
    // neither side; add them from x's side
    if (capped) {
        for (auto& x : elems) {
            Elem y = W.H2W.sub(W.c, x);
            if (x <= y) continue;
            if (std::binary_search(elems.begin(), elems.end(), y)) continue;
            Record rec;
            rec.central = false;
            rec.x = y;
            rec.y = x;
            rec.in = W.Y.classify(W.restrict_in(y), W.restrict_in(x));
            rec.out = W.Yp.classify(W.restrict_out(y), W.restrict_out(x));
            rec.square = W.square(W.H2W.sub(x, y));
            out.saturated = true;
            out.records.push_back(std::move(rec));
        }
        std::sort(out.records.begin(), out.records.end(),
                  [](const Record& a, const Record& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    }
    return out;
}

}  // namespace instanton::ledger
