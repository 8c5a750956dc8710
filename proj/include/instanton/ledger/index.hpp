#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instanton/ledger/sheets.hpp"

namespace instanton::ledger {

// Signature data: abelian class name -> even integer.
using Chamber = std::map<std::string, Int>;

inline Report validate_sigma(const ThreeManifold& Y, const Chamber& s) {
    for (auto& c : Y.abelian_classes()) {
        auto it = s.find(c.name);
        if (it == s.end()) return Report::fail("missing-data", "no signature value for " + c.name);
        Int v = it->second;
        Int h = Y.h1_dim(c);
        if (((v - h) % 4 + 4) % 4 != 0)
            return Report::fail("mod4-violation", c.name + ": sigma = " + to_string(v) + " but dim H^1 = " + to_string(h));
    }
    for (auto& [n, v] : s) {
        bool known = false;
        for (auto& c : Y.abelian_classes()) known = known || c.name == n;
        if (!known) return Report::fail("missing-data", "signature value for unknown class " + n);
    }
    return Report::pass();
}

namespace detail {

// (sigma(alpha) + rho(alpha)) / 2 and r(alpha) for one end
inline std::pair<Rat, long> end_terms(const ThreeManifold& Y, const ClassRef& a, const Chamber& s) {
    if (a.central) return {Rat(0), 3};
    auto it = s.find(a.name);
    if (it == s.end()) throw Error("missing-data", "no signature value for " + a.name + " on " + Y.name);
    auto d = Y.data(a.a, a.b);
    if (!d || !d->rho) throw Error("missing-data", "no rho invariant for " + a.name + " on " + Y.name);
    return {(Rat(it->second) + *d->rho) / 2, 1};
}

}  // namespace detail

// Normal index of an abelian record.  Central records get the same formula
// with x = y, which is what the pseudocentral bookkeeping needs.
inline Int normal_index(const Record& L, const Cobordism& W, const Chamber& s, const Chamber& sp) {
    auto [in, r_in] = detail::end_terms(W.Y, L.in, s);
    auto [out, r_out] = detail::end_terms(W.Yp, L.out, sp);
    Rat N = L.energy() + 2 * W.B() + out - in + 1 - Rat(r_in + r_out, 2);
    if (denominator(N) != 1 || numerator(N) % 2 != 0)
        throw Error("parity-violation", "normal index of " + L.label(W.H2W) + " is " + to_string(N) + ", not an even integer");
    return numerator(N);
}

enum class Taxonomy { unobstructed, pseudo_unobstructed, nearly_unobstructed, general };

inline std::string taxonomy_name(Taxonomy t) {
    switch (t) {
    case Taxonomy::unobstructed: return "unobstructed";
    case Taxonomy::pseudo_unobstructed: return "pseudo-unobstructed";
    case Taxonomy::nearly_unobstructed: return "nearly-unobstructed";
    default: return "general";
    }
}

struct RecordLabel {
    size_t record = 0;
    std::string label;           // central / unobstructed / obstructed / pseudocentral
    std::optional<Int> index;    // abelian records only
};

struct Classification {
    Taxonomy taxonomy = Taxonomy::general;
    std::vector<RecordLabel> labels;
    bool side_condition = true;  // b+ = 0 or no central records
    std::string reason;
};

inline Classification classify(const Cobordism& W, const Chamber& s, const Chamber& sp, const std::vector<Record>& recs) {
    Classification out;
    size_t centrals = 0, obstructed = 0, pseudo = 0, near = 0;
    for (size_t i = 0; i < recs.size(); ++i) {
        const auto& L = recs[i];
        RecordLabel lab{i, "", std::nullopt};
        if (L.central) {
            lab.label = "central";
            ++centrals;
        } else {
            Int N = normal_index(L, W, s, sp);
            lab.index = N;
            if (L.square > 0 || N >= W.B()) {
                lab.label = "unobstructed";
            } else if (L.pseudocentral()) {
                lab.label = "pseudocentral";
                ++pseudo;
            } else {
                lab.label = "obstructed";
                ++obstructed;
                if (!L.in.central && !L.out.central && N == -2) ++near;
            }
        }
        out.labels.push_back(lab);
    }
    out.side_condition = W.bplus == 0 || centrals == 0;
    if (!out.side_condition) {
        out.reason = "b+ > 0 and W carries central reducibles";
    } else if (obstructed == 0 && pseudo == 0) {
        out.taxonomy = Taxonomy::unobstructed;
    } else if (obstructed == 0) {
        out.taxonomy = Taxonomy::pseudo_unobstructed;
        out.reason = std::to_string(pseudo) + " pseudocentral obstruction(s)";
    }
    if (out.taxonomy == Taxonomy::general && W.b1 == 0 && W.bplus == 0 && obstructed + pseudo == 1 && near == 1) {
        out.taxonomy = Taxonomy::nearly_unobstructed;
        out.reason = "one abelian-to-abelian record with index -2";
    }
    if (out.taxonomy == Taxonomy::general && out.reason.empty())
        out.reason = std::to_string(obstructed) + " obstructed record(s)";
    return out;
}

inline bool is_pseudo_unobstructed(Taxonomy t) {
    return t == Taxonomy::unobstructed || t == Taxonomy::pseudo_unobstructed;
}

// ---- grading formulas ----

inline long mod_n(const Int& v, long n) {
    Int r = v % n;
    if (r < 0) r += n;
    return static_cast<long>(r);
}

inline long framed_index_closed(long b1, long bplus, const Int& c2) {
    return mod_n(Int(3 * (b1 - bplus)) + 2 * c2, 8);
}

// 2c^2 - (3/2)(chi + sigma) mod 8
inline long framed_index_cob(const Int& chi, const Int& sigma, const Rat& c2) {
    Int cs = chi + sigma;
    if (cs % 2 != 0) throw Error("parity-violation", "chi + sigma = " + to_string(cs) + " is odd");
    Rat v = 2 * c2 - Rat(3 * (cs / 2));
    if (denominator(v) != 1) throw Error("parity-violation", "2c^2 = " + to_string(Rat(2 * c2)) + " is not an integer");
    return mod_n(numerator(v), 8);
}

inline long mod2_grading(const Int& index, const Int& chi, const Int& sigma) {
    Int cs = chi + sigma;
    if (cs % 2 != 0) throw Error("parity-violation", "chi + sigma = " + to_string(cs) + " is odd");
    return mod_n(index + 3 * (cs / 2), 2);
}

// ---- shifts ----

struct ShiftResult {
    Int n = 0;
    Int f = 0, fp = 0;          // constant shifts on abelian classes of Y, Y'
    Chamber sigma, sigma_p;     // shifted chambers
    Classification after;
    bool certified = false;
    std::string detail;
};

inline Chamber shifted(const Chamber& s, const Int& by) {
    Chamber out = s;
    for (auto& [k, v] : out) v += by;
    return out;
}

// n = least n >= 0 with N(L,s0,s0') - (b1 - b+) >= -2n over non-pseudocentral
// abelian records that can carry instantons ((x-y)^2 <= 0).
inline ShiftResult shift_search(const Cobordism& W, const std::vector<Record>& recs, const Chamber& s0, const Chamber& s0p) {
    bool centrals = std::any_of(recs.begin(), recs.end(), [](const Record& r) { return r.central; });
    if (W.bplus > 0 && centrals)
        throw Error("hypothesis-violated", "b+ > 0 and W carries central reducibles; no shift can help");
    ShiftResult out;
    for (auto& L : recs) {
        if (L.central || L.pseudocentral() || L.square > 0) continue;
        Int gap = normal_index(L, W, s0, s0p) - W.B();
        if (gap < 0) {
            Int need = (-gap + 1) / 2;
            if (need > out.n) out.n = need;
        }
    }
    out.f = -4 * out.n;
    out.fp = 4 * out.n;
    out.sigma = shifted(s0, out.f);
    out.sigma_p = shifted(s0p, out.fp);
    out.after = classify(W, out.sigma, out.sigma_p, recs);
    out.certified = is_pseudo_unobstructed(out.after.taxonomy);
    if (!out.certified) {
        for (auto& lab : out.after.labels)
            if (lab.label == "obstructed")
                out.detail = "record " + recs[lab.record].label(W.H2W) +
                             " is central at both ends; no shift changes its index";
    }
    return out;
}

}  // namespace instanton::ledger
