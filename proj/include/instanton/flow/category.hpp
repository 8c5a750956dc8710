#pragma once

// Flow categories, bimodules and homotopies in the minimal-model shadow.
// Every orbit carries a chain model with zero internal differential:
//   central     {g0}
//   abelian     {s0, s2}
//   irreducible {g0, g3},  u g0 = g3
// A block between two objects is an operator on these generators.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "instanton/equivariant/complex.hpp"

namespace instanton::flow {

enum class Kind { central, abelian, irreducible };

inline std::string kind_name(Kind k) {
    switch (k) {
        case Kind::central: return "central";
        case Kind::abelian: return "abelian";
        case Kind::irreducible: return "irreducible";
    }
    return "?";
}

inline Kind parse_kind(const std::string& s) {
    if (s == "central") return Kind::central;
    if (s == "abelian") return Kind::abelian;
    if (s == "irreducible") return Kind::irreducible;
    throw Error("document.kind", "unknown orbit kind '" + s + "'");
}

struct OrbitModel {
    Kind kind;

    explicit OrbitModel(Kind k) : kind(k) {}
    size_t size() const { return kind == Kind::central ? 1 : 2; }
    int dim() const { return kind == Kind::central ? 0 : kind == Kind::abelian ? 2 : 3; }
    int degree(int g) const { return g == 0 ? 0 : dim(); }
    std::string name(int g) const {
        if (kind == Kind::abelian) return g == 0 ? "s0" : "s2";
        return g == 0 ? "g0" : "g3";
    }
    int gen(const std::string& n) const {
        for (int g = 0; g < static_cast<int>(size()); ++g)
            if (name(g) == n) return g;
        throw Error("document.generator", "no generator '" + n + "' on a " + kind_name(kind) + " orbit");
    }
    std::optional<int> u(int g) const {
        if (kind == Kind::irreducible && g == 0) return 1;
        return std::nullopt;
    }
};

// Operator between orbit models: (source gen, target gen) -> coefficient.
using Op = std::map<std::pair<int, int>, Rat>;

inline void op_add(Op& a, const Op& b, const Rat& s = 1) {
    for (auto& [k, v] : b) {
        Rat& x = a[k];
        x += s * v;
        if (x == 0) a.erase(k);
    }
}

inline Op op_sum(const Op& a, const Op& b, const Rat& s = 1) {
    Op r = a;
    op_add(r, b, s);
    return r;
}

inline Op op_scaled(const Op& a, const Rat& s) { return op_sum({}, a, s); }

// g after f
inline Op op_then(const Op& f, const Op& g) {
    Op r;
    for (auto& [ab, x] : f)
        for (auto& [bc, y] : g)
            if (ab.second == bc.first) op_add(r, Op{{{ab.first, bc.second}, x * y}});
    return r;
}

inline Op op_identity(Kind k) {
    Op r;
    for (int g = 0; g < static_cast<int>(OrbitModel(k).size()); ++g) r[{g, g}] = 1;
    return r;
}

// x -> coefficient vector of op(x)
inline std::map<int, Rat> op_apply(const Op& op, int x) {
    std::map<int, Rat> r;
    for (auto& [k, v] : op)
        if (k.first == x) r[k.second] += v;
    return r;
}

inline long sign_of(long k) { return k % 2 == 0 ? 1 : -1; }

struct Object {
    std::string name;
    Kind kind;
    long grading = 0;
    OrbitModel model() const { return OrbitModel(kind); }
};

using BlockMap = std::map<std::pair<size_t, size_t>, Op>;

struct FlowCategory {
    long period = 8;
    std::vector<Object> objects;
    BlockMap blocks;

    size_t size() const { return objects.size(); }
    std::optional<size_t> find(const std::string& n) const {
        for (size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name == n) return i;
        return std::nullopt;
    }
    size_t index(const std::string& n) const {
        if (auto i = find(n)) return *i;
        throw Error("document.object", "no object named '" + n + "'");
    }
    size_t add(const std::string& n, Kind k, long grading) {
        if (find(n)) throw Error("document.object", "duplicate object '" + n + "'");
        objects.push_back({n, k, grading});
        return objects.size() - 1;
    }
    const Op& block(size_t a, size_t b) const {
        static const Op none;
        auto it = blocks.find({a, b});
        return it == blocks.end() ? none : it->second;
    }
    void set(size_t a, size_t b, Op op) {
        for (auto it = op.begin(); it != op.end();) it = it->second == 0 ? op.erase(it) : std::next(it);
        if (op.empty()) blocks.erase({a, b});
        else blocks[{a, b}] = std::move(op);
    }
    void set(const std::string& a, const std::string& b, Op op) { set(index(a), index(b), std::move(op)); }
    long rel(size_t a, size_t b) const { return objects[a].grading - objects[b].grading; }
    long reduce(long x) const { return period > 0 ? mod_floor(x, period) : x; }
    long degree(size_t a, size_t b) const { return reduce(rel(a, b) - 1); }
    bool operator==(const FlowCategory& o) const {
        if (period != o.period || blocks != o.blocks || objects.size() != o.objects.size()) return false;
        for (size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name != o.objects[i].name || objects[i].kind != o.objects[i].kind ||
                objects[i].grading != o.objects[i].grading)
                return false;
        return true;
    }
};

namespace detail {

inline std::string show_vec(const Object& o, const std::map<int, Rat>& v) {
    std::string s;
    for (auto& [g, c] : v) {
        if (c == 0) continue;
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*" + o.model().name(g);
    }
    return s.empty() ? "0" : s;
}

// Entries of op must shift internal degree by exactly deg.
inline std::optional<std::string> degree_witness(const Object& a, const Object& b, const Op& op, long deg) {
    for (auto& [k, v] : op) {
        if (k.first >= static_cast<int>(a.model().size()) || k.second >= static_cast<int>(b.model().size()) ||
            k.first < 0 || k.second < 0)
            return "generator index out of range";
        if (b.model().degree(k.second) - a.model().degree(k.first) != deg)
            return a.model().name(k.first) + " -> " + b.model().name(k.second) + " has degree " +
                   std::to_string(b.model().degree(k.second) - a.model().degree(k.first)) + ", expected " +
                   std::to_string(deg);
    }
    return std::nullopt;
}

// F(u x) = (-1)^deg u F(x)
inline std::optional<std::string> equivariance_witness(const Object& a, const Object& b, const Op& op, long deg) {
    auto ma = a.model(), mb = b.model();
    for (int x = 0; x < static_cast<int>(ma.size()); ++x) {
        std::map<int, Rat> lhs, rhs;
        if (auto ux = ma.u(x)) lhs = op_apply(op, *ux);
        for (auto& [y, c] : op_apply(op, x))
            if (auto uy = mb.u(y)) rhs[*uy] += sign_of(deg) * c;
        for (auto& m : {&lhs, &rhs})
            for (auto it = m->begin(); it != m->end();) it = it->second == 0 ? m->erase(it) : std::next(it);
        if (lhs != rhs)
            return "F(u " + ma.name(x) + ") = " + show_vec(b, lhs) + " but (-1)^" + std::to_string(deg) +
                   " u F(" + ma.name(x) + ") = " + show_vec(b, rhs);
    }
    return std::nullopt;
}

inline std::string show_op(const Object& a, const Object& b, const Op& op) {
    std::string s;
    for (auto& [k, v] : op) {
        if (!s.empty()) s += ", ";
        s += a.model().name(k.first) + " -> " + to_string(v) + "*" + b.model().name(k.second);
    }
    return s.empty() ? "0" : s;
}

}  // namespace detail

// Degree, submersion, equivariance, then AX1.
inline Report validate_flowcat(const FlowCategory& fc) {
    if (fc.period < 0 || fc.period % 2 != 0)
        return Report::fail("flowcat.period", "period must be 0 or even, got " + std::to_string(fc.period));
    for (auto& [ab, op] : fc.blocks) {
        auto [a, b] = ab;
        if (a >= fc.size() || b >= fc.size()) return Report::fail("flowcat.object", "block between unknown objects");
        const auto &A = fc.objects[a], &B = fc.objects[b];
        std::string where = "(" + A.name + ", " + B.name + ")";
        if (op.empty()) continue;
        if (fc.period == 0 && fc.rel(a, b) < 1)
            return Report::fail("flowcat.submersive", "nonzero block " + where + " has relative grading " +
                                                          std::to_string(fc.rel(a, b)) + " < 1");
        if (auto w = detail::degree_witness(A, B, op, fc.degree(a, b)))
            return Report::fail("flowcat.degree", "block " + where + ": " + *w);
        if (auto w = detail::equivariance_witness(A, B, op, fc.degree(a, b)))
            return Report::fail("flowcat.equivariance", "block " + where + ": " + *w);
    }
    // sum_g (-1)^{i(a,g)} F(g,b) o F(a,g) = 0
    for (size_t a = 0; a < fc.size(); ++a)
        for (size_t b = 0; b < fc.size(); ++b) {
            Op total;
            std::string via;
            for (size_t g = 0; g < fc.size(); ++g) {
                const Op &f = fc.block(a, g), &h = fc.block(g, b);
                if (f.empty() || h.empty()) continue;
                auto t = op_then(f, h);
                if (t.empty()) continue;
                op_add(total, t, sign_of(fc.rel(a, g)));
                via += (via.empty() ? "" : ", ") + fc.objects[g].name;
            }
            if (!total.empty())
                return Report::fail("flowcat.AX1", "relation fails for (" + fc.objects[a].name + ", " + fc.objects[b].name +
                                                       ") through {" + via + "}: residual " +
                                                       detail::show_op(fc.objects[a], fc.objects[b], total));
        }
    return Report::pass();
}

inline void require_valid(const FlowCategory& fc) {
    if (auto r = validate_flowcat(fc); !r) throw Error("invalid-flow-category", r.tag + ": " + r.detail);
}

// Generator layout of the flow complex: object-major.
struct Layout {
    std::vector<size_t> offset;
    size_t total = 0;

    explicit Layout(const FlowCategory& fc) {
        for (auto& o : fc.objects) {
            offset.push_back(total);
            total += o.model().size();
        }
    }
    size_t at(size_t obj, int g) const { return offset[obj] + static_cast<size_t>(g); }
};

inline std::vector<std::string> generator_names(const FlowCategory& fc) {
    std::vector<std::string> n;
    for (auto& o : fc.objects)
        for (int g = 0; g < static_cast<int>(o.model().size()); ++g) n.push_back(o.name + "." + o.model().name(g));
    return n;
}

inline std::vector<long> generator_degrees(const FlowCategory& fc) {
    std::vector<long> d;
    for (auto& o : fc.objects)
        for (int g = 0; g < static_cast<int>(o.model().size()); ++g) d.push_back(o.grading + o.model().degree(g));
    return d;
}

// d(phi) = sum (-1)^{dim phi} F(phi); u_CM(phi) = (-1)^{dim phi} u phi.
template <class T>
equivariant::EquivariantComplex<T> cm_complex(const FlowCategory& fc, const T& proto) {
    require_valid(fc);
    Layout L(fc);
    equivariant::EquivariantComplex<T> E;
    E.C = GradedComplex<T>(proto, fc.period, generator_names(fc), generator_degrees(fc));
    E.u = SparseMatrix<T>(L.total, L.total, proto);
    for (auto& [ab, op] : fc.blocks) {
        auto& A = fc.objects[ab.first];
        for (auto& [k, v] : op) {
            T c = from_rat(Rat(sign_of(A.model().degree(k.first))) * v, proto);
            E.C.d.add(L.at(ab.second, k.second), L.at(ab.first, k.first), c);
        }
    }
    for (size_t a = 0; a < fc.size(); ++a)
        if (auto ux = fc.objects[a].model().u(0)) E.u.set(L.at(a, *ux), L.at(a, 0), Alg<T>::one(proto));
    if (auto r = equivariant::check_u(E); !r) throw Error("internal." + r.tag, r.detail);
    return E;
}

// ---------------------------------------------------------------------------
// Bimodules: blocks M(X, Y') of degree i_M(X,Y') = i(X) - i'(Y') + shift.

struct Bimodule {
    FlowCategory source, target;
    long shift = 0;
    BlockMap blocks;

    const Op& block(size_t x, size_t y) const {
        static const Op none;
        auto it = blocks.find({x, y});
        return it == blocks.end() ? none : it->second;
    }
    void set(size_t x, size_t y, Op op) {
        for (auto it = op.begin(); it != op.end();) it = it->second == 0 ? op.erase(it) : std::next(it);
        if (op.empty()) blocks.erase({x, y});
        else blocks[{x, y}] = std::move(op);
    }
    void set(const std::string& x, const std::string& y, Op op) {
        set(source.index(x), target.index(y), std::move(op));
    }
    long rel(size_t x, size_t y) const { return source.objects[x].grading - target.objects[y].grading + shift; }
    long degree(size_t x, size_t y) const { return source.reduce(rel(x, y)); }
};

inline Bimodule identity(const FlowCategory& fc) {
    Bimodule M{fc, fc, 0, {}};
    for (size_t a = 0; a < fc.size(); ++a) M.set(a, a, op_identity(fc.objects[a].kind));
    return M;
}

// Relation component at (X, Y'), with sign convention
//   sum_Z M(Z,Y') F(X,Z) + sum_W' (-1)^{i_M(X,W')+1} F'(W',Y') M(X,W') = 0.
inline Op bimodule_residual(const Bimodule& M, size_t x, size_t y) {
    Op total;
    for (size_t z = 0; z < M.source.size(); ++z) {
        const Op &f = M.source.block(x, z), &m = M.block(z, y);
        if (!f.empty() && !m.empty()) op_add(total, op_then(f, m));
    }
    for (size_t w = 0; w < M.target.size(); ++w) {
        const Op &m = M.block(x, w), &f = M.target.block(w, y);
        if (!f.empty() && !m.empty()) op_add(total, op_then(m, f), sign_of(M.rel(x, w) + 1));
    }
    return total;
}

struct BimoduleFailure {
    size_t x, y;
    Op residual;
};

inline std::optional<BimoduleFailure> first_relation_failure(const Bimodule& M) {
    for (size_t x = 0; x < M.source.size(); ++x)
        for (size_t y = 0; y < M.target.size(); ++y)
            if (auto r = bimodule_residual(M, x, y); !r.empty()) return BimoduleFailure{x, y, r};
    return std::nullopt;
}

inline Report validate_bimodule_blocks(const Bimodule& M) {
    if (M.source.period != M.target.period)
        return Report::fail("bimodule.period", "source and target periods differ");
    for (auto& [xy, op] : M.blocks) {
        if (xy.first >= M.source.size() || xy.second >= M.target.size())
            return Report::fail("bimodule.object", "block between unknown objects");
        if (op.empty()) continue;
        const auto &X = M.source.objects[xy.first], &Y = M.target.objects[xy.second];
        std::string where = "(" + X.name + ", " + Y.name + ")";
        if (M.source.period == 0 && M.rel(xy.first, xy.second) < 0)
            return Report::fail("bimodule.submersive", "nonzero block " + where + " has negative degree");
        if (auto w = detail::degree_witness(X, Y, op, M.degree(xy.first, xy.second)))
            return Report::fail("bimodule.degree", "block " + where + ": " + *w);
        if (auto w = detail::equivariance_witness(X, Y, op, M.degree(xy.first, xy.second)))
            return Report::fail("bimodule.equivariance", "block " + where + ": " + *w);
    }
    return Report::pass();
}

inline Report validate_bimodule(const Bimodule& M) {
    if (auto r = validate_flowcat(M.source); !r) return Report::fail("bimodule.source." + r.tag, r.detail);
    if (auto r = validate_flowcat(M.target); !r) return Report::fail("bimodule.target." + r.tag, r.detail);
    if (auto r = validate_bimodule_blocks(M); !r) return r;
    if (auto f = first_relation_failure(M))
        return Report::fail("bimodule.relation", "relation fails at (" + M.source.objects[f->x].name + ", " +
                                                     M.target.objects[f->y].name + "): residual " +
                                                     detail::show_op(M.source.objects[f->x], M.target.objects[f->y],
                                                                     f->residual));
    return Report::pass();
}

// (N o M)(X, Z'') = sum_Y' N(Y', Z'') o M(X, Y')
inline Bimodule compose(const Bimodule& M, const Bimodule& N) {
    if (!(M.target == N.source)) throw Error("bimodule.compose", "target of the first bimodule is not the source of the second");
    Bimodule R{M.source, N.target, M.shift + N.shift, {}};
    for (auto& [xy, m] : M.blocks)
        for (size_t z = 0; z < N.target.size(); ++z) {
            const Op& n = N.block(xy.second, z);
            if (n.empty()) continue;
            Op acc = R.block(xy.first, z);
            op_add(acc, op_then(m, n));
            R.set(xy.first, z, acc);
        }
    return R;
}

inline bool same_blocks(const Bimodule& a, const Bimodule& b) {
    return a.source == b.source && a.target == b.target && a.shift == b.shift && a.blocks == b.blocks;
}

template <class T>
SparseMatrix<T> block_matrix(const FlowCategory& src, const FlowCategory& dst, const BlockMap& blocks, const T& proto,
                             bool signed_by_dim) {
    Layout Ls(src), Ld(dst);
    SparseMatrix<T> m(Ld.total, Ls.total, proto);
    for (auto& [xy, op] : blocks)
        for (auto& [k, v] : op) {
            Rat c = v;
            if (signed_by_dim) c *= sign_of(src.objects[xy.first].model().degree(k.first));
            m.add(Ld.at(xy.second, k.second), Ls.at(xy.first, k.first), from_rat(c, proto));
        }
    return m;
}

template <class T>
struct ChainMap {
    equivariant::EquivariantComplex<T> source, target;
    long degree = 0;
    SparseMatrix<T> phi;
};

namespace detail {

template <class T>
std::optional<std::string> first_difference(const Matrix<T>& a, const Matrix<T>& b, const std::vector<std::string>& rows,
                                            const std::vector<std::string>& cols) {
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j)) return cols[j] + " -> " + rows[i];
    return std::nullopt;
}

}  // namespace detail

// Phi(phi) = sum M(phi); verified d' Phi = Phi d and Phi u = u Phi exactly.
template <class T>
ChainMap<T> induced_map(const Bimodule& M, const T& proto) {
    if (auto r = validate_bimodule(M); !r) throw Error("invalid-bimodule", r.tag + ": " + r.detail);
    ChainMap<T> f{cm_complex(M.source, proto), cm_complex(M.target, proto), M.shift,
                  block_matrix(M.source, M.target, M.blocks, proto, false)};
    auto P = f.phi.dense();
    auto d = f.source.C.d.dense(), dp = f.target.C.d.dense();
    if (auto w = detail::first_difference(dp * P, P * d, f.target.C.names, f.source.C.names))
        throw Error("internal.chain-map", "d' Phi != Phi d at " + *w);
    auto u = f.source.u.dense(), up = f.target.u.dense();
    if (auto w = detail::first_difference(up * P, P * u, f.target.C.names, f.source.C.names))
        throw Error("internal.chain-map", "Phi does not commute with u at " + *w);
    return f;
}

// ---------------------------------------------------------------------------
// Homotopies: blocks H(X,Y') of degree i_M(X,Y') + 1.

struct Homotopy {
    Bimodule M0, M1;
    BlockMap blocks;

    const Op& block(size_t x, size_t y) const {
        static const Op none;
        auto it = blocks.find({x, y});
        return it == blocks.end() ? none : it->second;
    }
};

//  M1 - M0 + sum_Z (-1)^{i(X,Z)} H(Z,Y') F(X,Z) + sum_W' (-1)^{i_M(X,W')} F'(W',Y') H(X,W') = 0
inline Report validate_homotopy(const Homotopy& h) {
    for (auto* M : {&h.M0, &h.M1})
        if (auto r = validate_bimodule(*M); !r) return Report::fail("homotopy.bimodule." + r.tag, r.detail);
    const auto &A = h.M0, &B = h.M1;
    if (!(A.source == B.source) || !(A.target == B.target))
        return Report::fail("homotopy.endpoints", "bimodules have different source or target");
    if (A.shift != B.shift) return Report::fail("degree-mismatch", "bimodules have different relative degree");
    for (auto& [xy, op] : h.blocks) {
        if (xy.first >= A.source.size() || xy.second >= A.target.size())
            return Report::fail("homotopy.object", "block between unknown objects");
        if (op.empty()) continue;
        const auto &X = A.source.objects[xy.first], &Y = A.target.objects[xy.second];
        long deg = A.source.reduce(A.rel(xy.first, xy.second) + 1);
        if (auto w = detail::degree_witness(X, Y, op, deg))
            return Report::fail("degree-mismatch", "homotopy block (" + X.name + ", " + Y.name + "): " + *w);
        if (auto w = detail::equivariance_witness(X, Y, op, deg))
            return Report::fail("homotopy.equivariance", "block (" + X.name + ", " + Y.name + "): " + *w);
    }
    for (size_t x = 0; x < A.source.size(); ++x)
        for (size_t y = 0; y < A.target.size(); ++y) {
            Op total = op_sum(B.block(x, y), A.block(x, y), -1);
            for (size_t z = 0; z < A.source.size(); ++z) {
                const Op &f = A.source.block(x, z), &k = h.block(z, y);
                if (!f.empty() && !k.empty()) op_add(total, op_then(f, k), sign_of(A.source.rel(x, z)));
            }
            for (size_t w = 0; w < A.target.size(); ++w) {
                const Op &k = h.block(x, w), &f = A.target.block(w, y);
                if (!f.empty() && !k.empty()) op_add(total, op_then(k, f), sign_of(A.rel(x, w)));
            }
            if (!total.empty())
                return Report::fail("relation-violated", "homotopy relation fails at (" + A.source.objects[x].name + ", " +
                                                             A.target.objects[y].name + "): residual " +
                                                             detail::show_op(A.source.objects[x], A.target.objects[y], total));
        }
    return Report::pass();
}

// K(phi) = sum (-1)^{dim phi} H(phi); verified Phi1 - Phi0 = d'K + Kd exactly.
template <class T>
SparseMatrix<T> induced_homotopy(const Homotopy& h, const T& proto) {
    if (auto r = validate_homotopy(h); !r) throw Error(r.tag, r.detail);
    auto f0 = induced_map(h.M0, proto), f1 = induced_map(h.M1, proto);
    auto K = block_matrix(h.M0.source, h.M0.target, h.blocks, proto, true);
    auto k = K.dense();
    auto lhs = f1.phi.dense() - f0.phi.dense();
    auto rhs = f0.target.C.d.dense() * k + k * f0.source.C.d.dense();
    if (auto w = detail::first_difference(lhs, rhs, f0.target.C.names, f0.source.C.names))
        throw Error("internal.homotopy", "Phi1 - Phi0 != d'K + Kd at " + *w);
    return K;
}

}  // namespace instanton::flow
