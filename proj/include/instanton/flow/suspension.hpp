#pragma once

// Suspension at an abelian object rho: rho is replaced by S[rho] (an SO(3)
// orbit, grading i(rho) - 1) and rho' (an S^2 orbit, grading i(rho) - 2).
//
// Operators between the orbit models of rho and its replacements:
//   P  : rho -> S[rho]    s0 -> 0, s2 -> g3          (pullback to the sphere bundle)
//   pi : S[rho] -> rho'   g0 -> s0, g3 -> 0          (bundle projection)
//   H  : rho -> rho'      s0 -> kappa s2             (the circle fiber, transferred)
// The circle fiber is half the boundary of a section over S^2 minus a disc
// (Euler number 2), so kappa = 1/2.

#include "instanton/flow/category.hpp"

namespace instanton::flow {

inline const Rat kappa{1, 2};

inline Op pullback_op() { return {{{1, 1}, 1}}; }
inline Op projection_op() { return {{{0, 0}, 1}}; }
inline Op transfer_op() { return {{{0, 1}, kappa}}; }

inline std::string base_class(std::string n) {
    while (!n.empty() && n.back() == '\'') n.pop_back();
    return n;
}
inline std::string sphere_bundle_name(const std::string& rho) { return "S[" + rho + "]"; }
inline std::string shifted_name(const std::string& rho) { return rho + "'"; }

// Blowup and zero-locus operators out of rho, keyed by target object name.
struct SectionData {
    std::string rho;
    std::map<std::string, Op> B;  // SO(3) model -> C(beta), degree i(rho,beta) - 2
    std::map<std::string, Op> Z;  // S^2 model  -> C(beta), degree i(rho,beta) - 3
};

namespace detail {

inline size_t require_abelian(const FlowCategory& fc, const std::string& rho) {
    auto r = fc.find(rho);
    if (!r) throw Error("not-abelian", "no object named '" + rho + "'");
    if (fc.objects[*r].kind != Kind::abelian)
        throw Error("not-abelian", "'" + rho + "' is a " + kind_name(fc.objects[*r].kind) + " object");
    return *r;
}

inline const Op& lookup(const std::map<std::string, Op>& m, const std::string& k) {
    static const Op none;
    auto it = m.find(k);
    return it == m.end() ? none : it->second;
}

}  // namespace detail

// Degree, equivariance and collapse checks: F(rho,beta) = B o P + Z o H.
inline Report check_sections(const FlowCategory& fc, const SectionData& s) {
    size_t r = detail::require_abelian(fc, s.rho);
    Object S{sphere_bundle_name(s.rho), Kind::irreducible, fc.objects[r].grading - 1};
    Object R{shifted_name(s.rho), Kind::abelian, fc.objects[r].grading - 2};
    for (auto* m : {&s.B, &s.Z})
        for (auto& [name, op] : *m) {
            auto b = fc.find(name);
            if (!b || *b == r) return Report::fail("section-incompatible", "section targets unknown object '" + name + "'");
            const Object& src = m == &s.B ? S : R;
            long deg = fc.reduce(src.grading - fc.objects[*b].grading - 1);
            std::string what = std::string(m == &s.B ? "B" : "Z") + "(" + s.rho + ", " + name + ")";
            if (auto w = detail::degree_witness(src, fc.objects[*b], op, deg))
                return Report::fail("section-incompatible", what + ": " + *w);
            if (auto w = detail::equivariance_witness(src, fc.objects[*b], op, deg))
                return Report::fail("section-incompatible", what + ": " + *w);
        }
    for (size_t b = 0; b < fc.size(); ++b) {
        if (b == r) continue;
        const auto& name = fc.objects[b].name;
        Op lifted = op_sum(op_then(pullback_op(), detail::lookup(s.B, name)),
                           op_then(transfer_op(), detail::lookup(s.Z, name)));
        if (lifted != fc.block(r, b))
            return Report::fail("section-incompatible",
                                "B o P + Z o H does not collapse to F(" + s.rho + ", " + name + "): got " +
                                    detail::show_op(fc.objects[r], fc.objects[b], lifted) + ", expected " +
                                    detail::show_op(fc.objects[r], fc.objects[b], fc.block(r, b)));
    }
    return Report::pass();
}

// Object order: rho's slot is taken by S[rho], rho' is appended right after.
struct SuspensionLayout {
    std::vector<std::optional<size_t>> old_to_new;
    size_t rho = 0, S = 0, bar = 0;
};

inline SuspensionLayout suspension_layout(const FlowCategory& fc, size_t rho) {
    SuspensionLayout L;
    L.rho = rho;
    size_t k = 0;
    for (size_t a = 0; a < fc.size(); ++a) {
        if (a == rho) {
            L.S = k++;
            L.bar = k++;
            L.old_to_new.push_back(std::nullopt);
        } else {
            L.old_to_new.push_back(k++);
        }
    }
    return L;
}

inline FlowCategory suspend_unchecked(const FlowCategory& fc, const SectionData& s) {
    size_t r = detail::require_abelian(fc, s.rho);
    auto L = suspension_layout(fc, r);
    FlowCategory S;
    S.period = fc.period;
    for (size_t a = 0; a < fc.size(); ++a) {
        if (a == r) {
            S.add(sphere_bundle_name(s.rho), Kind::irreducible, fc.objects[r].grading - 1);
            S.add(shifted_name(s.rho), Kind::abelian, fc.objects[r].grading - 2);
        } else {
            S.add(fc.objects[a].name, fc.objects[a].kind, fc.objects[a].grading);
        }
    }
    for (auto& [ab, op] : fc.blocks) {
        auto [a, b] = ab;
        if (a != r && b != r) S.set(*L.old_to_new[a], *L.old_to_new[b], op);
        if (a != r && b == r) {
            S.set(*L.old_to_new[a], L.S, op_then(op, pullback_op()));
            S.set(*L.old_to_new[a], L.bar, op_then(op, transfer_op()));
        }
    }
    for (size_t b = 0; b < fc.size(); ++b) {
        if (b == r) continue;
        const auto& name = fc.objects[b].name;
        S.set(L.S, *L.old_to_new[b], op_scaled(detail::lookup(s.B, name), -1));
        S.set(L.bar, *L.old_to_new[b], detail::lookup(s.Z, name));
    }
    S.set(L.S, L.bar, projection_op());
    return S;
}

inline FlowCategory suspend(const FlowCategory& fc, const SectionData& s) {
    require_valid(fc);
    if (auto r = check_sections(fc, s); !r) throw Error(r.tag, r.detail);
    auto S = suspend_unchecked(fc, s);
    if (auto r = validate_flowcat(S); !r)
        throw Error("section-incompatible", "boundary constraint on the sections fails: " + r.tag + ": " + r.detail);
    return S;
}

// Z = 0 and B = n * identity, allowed when every block out of rho is the
// 3-dimensional one (fiber degree 1, s2 -> n g3).
inline SectionData default_sections(const FlowCategory& fc, const std::string& rho) {
    size_t r = detail::require_abelian(fc, rho);
    SectionData s{rho, {}, {}};
    for (size_t b = 0; b < fc.size(); ++b) {
        const Op& f = fc.block(r, b);
        if (f.empty()) continue;
        const auto& B = fc.objects[b];
        if (fc.degree(r, b) != 1 || B.kind != Kind::irreducible)
            throw Error("higher-block-present", "block (" + rho + ", " + B.name + ") has fiber degree " +
                                                    std::to_string(fc.degree(r, b)) + "; sections must be supplied");
        Rat n = f.at({1, 1});
        s.B[B.name] = {{{0, 0}, n}, {{1, 1}, n}};
    }
    return s;
}

// Identity off rho; rho -> S[rho] is P and rho -> rho' is H.
inline Bimodule sigma_rho(const FlowCategory& fc, const SectionData& s) {
    auto S = suspend(fc, s);
    size_t r = fc.index(s.rho);
    auto L = suspension_layout(fc, r);
    Bimodule M{fc, S, 0, {}};
    for (size_t a = 0; a < fc.size(); ++a)
        if (a != r) M.set(a, *L.old_to_new[a], op_identity(fc.objects[a].kind));
    M.set(r, L.S, pullback_op());
    M.set(r, L.bar, transfer_op());
    if (auto rep = validate_bimodule(M); !rep) throw Error("internal.sigma", rep.tag + ": " + rep.detail);
    return M;
}

// ---------------------------------------------------------------------------
// W_hat : S_rho C -> C' lifting W : C -> C'.

struct BimoduleSections {
    std::map<std::string, Op> B;  // (S[rho], a')
    std::map<std::string, Op> Z;  // (rho', a')
};

inline Bimodule lift_Wplus(const Bimodule& w, const SectionData& s, const BimoduleSections& ws) {
    if (auto r = validate_bimodule(w); !r) throw Error("invalid-bimodule", r.tag + ": " + r.detail);
    const auto& C = w.source;
    auto S = suspend(C, s);
    size_t r = C.index(s.rho);
    auto L = suspension_layout(C, r);
    Bimodule W{S, w.target, w.shift, {}};
    for (auto& [xy, op] : w.blocks)
        if (xy.first != r) W.set(*L.old_to_new[xy.first], xy.second, op);
    for (auto* m : {&ws.B, &ws.Z})
        for (auto& [name, op] : *m) {
            auto y = w.target.find(name);
            if (!y) throw Error("section-incompatible", "section targets unknown object '" + name + "'");
            W.set(m == &ws.B ? L.S : L.bar, *y, op);
        }
    if (auto rep = validate_bimodule_blocks(W); !rep) throw Error("section-incompatible", rep.tag + ": " + rep.detail);
    for (size_t y = 0; y < w.target.size(); ++y) {
        Op lifted = op_sum(op_then(pullback_op(), W.block(L.S, y)), op_then(transfer_op(), W.block(L.bar, y)));
        if (lifted != w.block(r, y))
            throw Error("section-incompatible", "B_W o P + Z_W o H does not collapse to W(" + s.rho + ", " +
                                                    w.target.objects[y].name + ")");
    }
    if (auto f = first_relation_failure(W))
        throw Error("section-incompatible", "boundary constraint fails at (" + S.objects[f->x].name + ", " +
                                                w.target.objects[f->y].name + "): residual " +
                                                detail::show_op(S.objects[f->x], w.target.objects[f->y], f->residual));
    return W;
}

// ---------------------------------------------------------------------------
// W_- : C -> S_{rho'} C' for a cobordism whose obstructed reducible runs
// rho -> rho' with index -2.

struct WminusInput {
    FlowCategory source, target;
    std::string rho, rho_p;
    SectionData target_sections;            // suspension data for target at rho'
    long shift = 0;                         // i(W; a, a') = i(a) - i'(a') + shift
    std::map<std::pair<std::string, std::string>, Op> N;
    std::map<std::string, Op> B;            // B(a, rho): C(a) -> SO(3) model of S[rho']
};

struct WminusFailure : Error {
    char case_tag;
    WminusFailure(char c, const std::string& what)
        : Error("relation-violated", std::string("case (") + c + "): " + what), case_tag(c) {}
};

inline Bimodule build_Wminus(const WminusInput& in) {
    const auto &C = in.source, &Cp = in.target;
    require_valid(C);
    size_t r = detail::require_abelian(C, in.rho);
    size_t rp = detail::require_abelian(Cp, in.rho_p);
    if (in.target_sections.rho != in.rho_p)
        throw Error("section-incompatible", "target sections are for '" + in.target_sections.rho + "', not '" + in.rho_p + "'");
    auto S = suspend(Cp, in.target_sections);
    auto L = suspension_layout(Cp, rp);
    long obstructed = C.objects[r].grading - Cp.objects[rp].grading + in.shift;
    if (obstructed != -2)
        throw Error("degree-mismatch", "obstructed reducible " + in.rho + " -> " + in.rho_p + " has index " +
                                           std::to_string(obstructed) + ", expected -2");
    Bimodule W{C, S, in.shift, {}};
    for (auto& [key, op] : in.N) {
        size_t a = C.index(key.first), b = Cp.index(key.second);
        if (a == r && b == rp) throw Error("document.block", "N(rho, rho') is replaced by the correspondence");
        if (b != rp) {
            W.set(a, *L.old_to_new[b], op);
        } else {
            Op top = W.block(a, L.S);
            op_add(top, op_then(op, pullback_op()));
            W.set(a, L.S, top);
            W.set(a, L.bar, op_then(op, transfer_op()));
        }
    }
    for (auto& [name, op] : in.B) {
        size_t a = C.index(name);
        if (a == r) throw Error("document.block", "B(a, rho) needs a != rho");
        Op top = W.block(a, L.S);
        op_add(top, op, -sign_of(C.rel(a, r)));
        W.set(a, L.S, top);
    }
    W.set(r, L.bar, op_identity(Kind::abelian));
    if (auto rep = validate_bimodule_blocks(W); !rep) throw Error(rep.tag, rep.detail);
    if (auto f = first_relation_failure(W)) {
        char tag = f->x == r ? 'r' : (f->y == L.S || f->y == L.bar) ? 'l' : 'c';
        throw WminusFailure(tag, "at (" + C.objects[f->x].name + ", " + S.objects[f->y].name + "): residual " +
                                     detail::show_op(C.objects[f->x], S.objects[f->y], f->residual));
    }
    return W;
}

}  // namespace instanton::flow
