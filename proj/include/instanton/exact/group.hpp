#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "instanton/exact/smith.hpp"

namespace instanton {

using Elem = std::vector<Int>;

// Finitely generated abelian group Z^n / span(relations).  Elements are
// stored in Smith coordinates: one residue per invariant factor (>= 2),
// then the free coordinates.
class FinAbGroup {
public:
    FinAbGroup() = default;

    // relations: each inner vector is one relation, length = generators
    static FinAbGroup from_presentation(size_t generators, const std::vector<std::vector<Int>>& relations) {
        Matrix<Int> R(generators, relations.size());
        for (size_t j = 0; j < relations.size(); ++j) {
            if (relations[j].size() != generators)
                throw Error("group.bad-presentation", "relation length differs from generator count");
            for (size_t i = 0; i < generators; ++i) R(i, j) = relations[j][i];
        }
        auto sf = smith_normal_form(R);
        FinAbGroup g;
        g.gens_ = generators;
        g.U_ = sf.U;
        g.Uinv_ = sf.Uinv;
        for (size_t i = 0; i < generators; ++i) {
            Int d = i < sf.factors.size() ? sf.factors[i] : Int(0);
            if (d == 1) continue;
            g.rows_.push_back(i);
            if (d == 0) ++g.free_;
            else g.factors_.push_back(d);
        }
        return g;
    }

    // Z/d1 + ... + Z^free, one generator each.
    static FinAbGroup from_factors(const std::vector<Int>& factors, size_t free = 0) {
        std::vector<std::vector<Int>> rel;
        size_t n = factors.size() + free;
        for (size_t i = 0; i < factors.size(); ++i) {
            if (factors[i] < 1) throw Error("group.bad-presentation", "invariant factors must be positive");
            std::vector<Int> r(n, 0);
            r[i] = factors[i];
            rel.push_back(r);
        }
        return from_presentation(n, rel);
    }

    const std::vector<Int>& factors() const { return factors_; }
    size_t free_rank() const { return free_; }
    size_t generators() const { return gens_; }
    size_t width() const { return factors_.size() + free_; }
    bool finite() const { return free_ == 0; }
    Int order() const {
        if (!finite()) throw Error("group.infinite", "order of an infinite group");
        Int o = 1;
        for (auto& d : factors_) o *= d;
        return o;
    }
    size_t even_factors() const {
        return static_cast<size_t>(std::count_if(factors_.begin(), factors_.end(), [](const Int& d) { return d % 2 == 0; }));
    }

    Elem zero() const { return Elem(width(), 0); }

    // From coordinates in the presentation's generators.
    Elem from_gens(const std::vector<Int>& x) const {
        if (x.size() != gens_) throw Error("group.bad-element", "element has wrong length");
        Elem e(width());
        for (size_t k = 0; k < rows_.size(); ++k) {
            Int y = 0;
            for (size_t j = 0; j < gens_; ++j) y += U_(rows_[k], j) * x[j];
            e[k] = y;
        }
        return reduce(std::move(e));
    }
    // A representative in the presentation's generators.
    std::vector<Int> to_gens(const Elem& e) const {
        std::vector<Int> x(gens_, 0);
        for (size_t k = 0; k < rows_.size(); ++k)
            for (size_t i = 0; i < gens_; ++i) x[i] += Uinv_(i, rows_[k]) * e[k];
        return x;
    }

    Elem reduce(Elem e) const {
        for (size_t k = 0; k < factors_.size(); ++k) {
            e[k] %= factors_[k];
            if (e[k] < 0) e[k] += factors_[k];
        }
        return e;
    }
    Elem add(const Elem& a, const Elem& b) const {
        Elem e(width());
        for (size_t k = 0; k < e.size(); ++k) e[k] = a[k] + b[k];
        return reduce(std::move(e));
    }
    Elem neg(const Elem& a) const {
        Elem e(width());
        for (size_t k = 0; k < e.size(); ++k) e[k] = -a[k];
        return reduce(std::move(e));
    }
    Elem sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }
    Elem mul(const Int& n, const Elem& a) const {
        Elem e(width());
        for (size_t k = 0; k < e.size(); ++k) e[k] = n * a[k];
        return reduce(std::move(e));
    }
    bool is_torsion(const Elem& a) const {
        for (size_t k = factors_.size(); k < a.size(); ++k)
            if (a[k] != 0) return false;
        return true;
    }
    Elem torsion_part(const Elem& a) const {
        Elem e = a;
        for (size_t k = factors_.size(); k < e.size(); ++k) e[k] = 0;
        return e;
    }

    // Every element, lexicographic in Smith coordinates.
    std::vector<Elem> elements() const {
        if (!finite()) throw Error("unbounded-search", "cannot list an infinite group");
        std::vector<Elem> out;
        Elem cur = zero();
        for (;;) {
            out.push_back(cur);
            size_t k = cur.size();
            while (k > 0) {
                --k;
                if (++cur[k] < factors_[k]) break;
                cur[k] = 0;
                if (k == 0) return out;
            }
            if (cur.empty()) return out;
        }
    }
    // Torsion elements (finite for any finitely generated group).
    std::vector<Elem> torsion_elements() const {
        auto t = FinAbGroup::from_factors(factors_, 0);
        std::vector<Elem> out;
        for (auto& e : t.elements()) {
            Elem x = zero();
            for (size_t k = 0; k < e.size(); ++k) x[k] = e[k];
            out.push_back(x);
        }
        return out;
    }

    std::string str(const Elem& e) const {
        std::string s = "(";
        for (size_t k = 0; k < e.size(); ++k) s += (k ? "," : "") + e[k].str();
        return s + ")";
    }

private:
    size_t gens_ = 0, free_ = 0;
    std::vector<Int> factors_;
    std::vector<size_t> rows_;  // Smith rows kept (factor != 1)
    Matrix<Int> U_, Uinv_;
};

// All x with 2x = b, sorted.
inline std::vector<Elem> solve_2x_eq_b(const FinAbGroup& G, const Elem& b) {
    const auto& f = G.factors();
    std::vector<std::vector<Int>> choices(G.width());
    for (size_t k = 0; k < G.width(); ++k) {
        if (k < f.size()) {
            const Int& d = f[k];
            if (d % 2 == 1) {
                Int half = (d + 1) / 2;  // inverse of 2
                choices[k].push_back((b[k] * half) % d);
            } else {
                if (b[k] % 2 != 0) return {};
                choices[k].push_back(b[k] / 2);
                choices[k].push_back(b[k] / 2 + d / 2);
            }
        } else {
            if (b[k] % 2 != 0) return {};
            choices[k].push_back(b[k] / 2);
        }
    }
    std::vector<Elem> out;
    Elem cur(G.width());
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == cur.size()) { out.push_back(G.reduce(cur)); return; }
        for (auto& c : choices[k]) { cur[k] = c; rec(k + 1); }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Homomorphism Z^n -> target given on the generators of a source presentation.
struct GroupHom {
    const FinAbGroup* source = nullptr;
    const FinAbGroup* target = nullptr;
    std::vector<std::vector<Int>> images;  // image of each source generator, in target generators

    Elem apply(const Elem& e) const {
        auto x = source->to_gens(e);
        std::vector<Int> y(target->generators(), 0);
        for (size_t i = 0; i < x.size(); ++i)
            for (size_t j = 0; j < y.size(); ++j) y[j] += x[i] * images[i][j];
        return target->from_gens(y);
    }
};

}  // namespace instanton
