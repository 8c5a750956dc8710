#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "instanton/exact/complex.hpp"

namespace instanton::strata {

struct Face {
    std::string name;
    long dim = 0;
    int orientation = 1;     // relative to the reference orientation of the incidences
    bool degenerate = false;
    bool trivial = false;
};

// Formal integer combination of faces, keyed by name.
using Chain = std::map<std::string, Int>;

inline void add_to(Chain& c, const std::string& f, const Int& k) {
    if (k == 0) return;
    Int& v = c[f];
    v += k;
    if (v == 0) c.erase(f);
}

inline std::string show(const Chain& c) {
    if (c.empty()) return "0";
    std::string s;
    for (auto& [f, k] : c) {
        if (s.empty()) s = k == 1 ? "" : k == -1 ? "-" : to_string(k) + "*";
        else s += k > 0 ? (k == 1 ? " + " : " + " + to_string(k) + "*") : (k == -1 ? " - " : " - " + to_string(Int(-k)) + "*");
        s += f;
    }
    return s;
}

class StratifiedChain {
public:
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(size_t i) const { return faces_[i]; }
    Face& face(size_t i) { return faces_[i]; }
    size_t size() const { return faces_.size(); }

    size_t add_face(Face f) {
        if (idx_.count(f.name)) throw Error("strata.face", "duplicate face name " + f.name);
        idx_[f.name] = faces_.size();
        faces_.push_back(std::move(f));
        return faces_.size() - 1;
    }
    bool has(const std::string& n) const { return idx_.count(n) > 0; }
    size_t index(const std::string& n) const {
        auto it = idx_.find(n);
        if (it == idx_.end()) throw Error("strata.face", "unknown face " + n);
        return it->second;
    }
    // Reference incidence of `lower` in the boundary of `upper`.
    void set_incidence(const std::string& upper, const std::string& lower, int sign) {
        inc_[{index(upper), index(lower)}] = sign;
    }
    const std::map<std::pair<size_t, size_t>, int>& incidences() const { return inc_; }

    int reference(size_t t, size_t s) const {
        auto it = inc_.find({t, s});
        return it == inc_.end() ? 0 : it->second;
    }
    bool covers(size_t t, size_t s) const { return inc_.count({t, s}) > 0; }
    // Incidence with both faces in their carried orientations.
    int effective(size_t t, size_t s) const { return faces_[t].orientation * faces_[s].orientation * reference(t, s); }

    std::vector<size_t> lower_covers(size_t t) const {
        std::vector<size_t> out;
        for (auto it = inc_.lower_bound({t, 0}); it != inc_.end() && it->first.first == t; ++it) out.push_back(it->first.second);
        return out;
    }
    std::vector<size_t> upper_covers(size_t s) const {
        std::vector<size_t> out;
        for (auto& [k, v] : inc_)
            if (k.second == s) out.push_back(k.first);
        return out;
    }

    long dim() const {
        long d = -1;
        for (auto& f : faces_) d = std::max(d, f.dim);
        return d;
    }

    // Collapse classes; faces not listed form singleton classes.
    std::vector<std::vector<std::string>> collapse;

    std::string representative(const std::string& f) const {
        for (auto& cls : collapse)
            if (std::find(cls.begin(), cls.end(), f) != cls.end()) return *std::min_element(cls.begin(), cls.end());
        return f;
    }

    // Sum of top-dimensional faces in their carried orientation.
    Chain fundamental() const {
        Chain c;
        long n = dim();
        for (auto& f : faces_)
            if (f.dim == n) add_to(c, f.name, 1);
        return c;
    }

    Chain boundary_of(const Chain& c) const {
        Chain out;
        for (auto& [f, k] : c) {
            size_t t = index(f);
            for (size_t s : lower_covers(t)) add_to(out, faces_[s].name, k * effective(t, s));
        }
        return out;
    }

    // Reduction to geometric chains: collapse classes, then drop degenerate
    // and trivial faces.
    Chain geometric(const Chain& c) const {
        Chain out;
        for (auto& [f, k] : c) {
            const Face& F = faces_[index(f)];
            if (F.degenerate || F.trivial) continue;
            add_to(out, representative(f), k);
        }
        return out;
    }

private:
    std::vector<Face> faces_;
    std::map<std::string, size_t> idx_;
    std::map<std::pair<size_t, size_t>, int> inc_;
};

// ---- validation ----

inline Report validate(const StratifiedChain& X) {
    for (auto& f : X.faces()) {
        if (f.dim < 0) return Report::fail("strata.face", f.name + ": negative dimension");
        if (f.orientation != 1 && f.orientation != -1) return Report::fail("strata.face", f.name + ": orientation must be +1 or -1");
    }
    for (auto& [k, v] : X.incidences()) {
        const Face &t = X.face(k.first), &s = X.face(k.second);
        if (t.dim != s.dim + 1)
            return Report::fail("strata.dimension", s.name + " < " + t.name + ": incidences need codimension one");
        if (v < -1 || v > 1) return Report::fail("strata.sign", s.name + " < " + t.name + ": sign outside {-1,0,1}");
    }
    long n = X.dim();
    for (size_t i = 0; i < X.size(); ++i)
        if (X.face(i).dim < n && X.upper_covers(i).empty())
            return Report::fail("strata.pure", X.face(i).name + " is maximal but not top-dimensional");

    // codimension two: exactly two intermediate faces, signs cancel
    for (size_t t = 0; t < X.size(); ++t) {
        std::map<size_t, std::vector<size_t>> mids;
        for (size_t m : X.lower_covers(t))
            for (size_t s : X.lower_covers(m)) mids[s].push_back(m);
        for (auto& [s, ms] : mids) {
            if (ms.size() != 2)
                return Report::fail("strata.diamond", X.face(s).name + " < " + X.face(t).name + ": " + std::to_string(ms.size()) +
                                                          " intermediate faces, expected 2");
            int sum = 0;
            for (size_t m : ms) sum += X.effective(t, m) * X.effective(m, s);
            if (sum != 0)
                return Report::fail("strata.del-squared", X.face(s).name + " < " + X.face(t).name + ": incidence signs do not cancel");
        }
    }

    if (n == 1) {
        int total = 0;
        for (size_t v = 0; v < X.size(); ++v) {
            if (X.face(v).dim != 0) continue;
            int count = 0;  // arcs approaching minus arcs leaving
            for (size_t e : X.upper_covers(v)) count += X.face(e).orientation * X.reference(e, v);
            if (count < -1 || count > 1)
                return Report::fail("strata.1d-sign", X.face(v).name + ": signed arc count " + std::to_string(count));
            total += count;
        }
        if (total != 0) return Report::fail("strata.1d-total", "vertex signs sum to " + std::to_string(total));
    }

    std::set<std::string> seen;
    for (auto& cls : X.collapse) {
        if (cls.empty()) return Report::fail("strata.collapse", "empty collapse class");
        for (auto& f : cls) {
            if (!X.has(f)) return Report::fail("strata.collapse", "collapse class names unknown face " + f);
            if (!seen.insert(f).second) return Report::fail("strata.collapse", f + " is in two collapse classes");
            if (X.face(X.index(f)).dim != X.face(X.index(cls[0])).dim)
                return Report::fail("strata.collapse", f + " and " + cls[0] + " differ in dimension");
        }
        Chain ref = X.geometric(X.boundary_of({{cls[0], 1}}));
        for (auto& f : cls)
            if (X.geometric(X.boundary_of({{f, 1}})) != ref)
                return Report::fail("strata.collapse", "boundaries of " + f + " and " + cls[0] + " differ by nondegenerate terms");
    }
    return Report::pass();
}

inline void require_valid(const StratifiedChain& X) {
    if (auto r = validate(X); !r) throw Error("invalid-chain", r.tag + ": " + r.detail);
}

// Up-set of each face is a cube poset (Boolean lattice, reverse inclusion).
inline Report cubical_above(const StratifiedChain& X) {
    for (size_t s = 0; s < X.size(); ++s) {
        std::map<size_t, long> level;
        std::vector<size_t> todo{s};
        level[s] = 0;
        while (!todo.empty()) {
            size_t u = todo.back();
            todo.pop_back();
            for (size_t t : X.upper_covers(u))
                if (!level.count(t)) level[t] = X.face(t).dim - X.face(s).dim, todo.push_back(t);
        }
        long k = 0;
        for (auto& [u, l] : level) k = std::max(k, l);
        if (level.size() != (size_t{1} << k))
            return Report::fail("strata.cubical", X.face(s).name + ": up-set has " + std::to_string(level.size()) +
                                                      " elements, a cube of rank " + std::to_string(k) + " has " +
                                                      std::to_string(1L << k));
        for (auto& [u, l] : level) {
            size_t down = 0, up = 0;
            for (size_t m : X.lower_covers(u)) down += level.count(m);
            for (size_t m : X.upper_covers(u)) up += level.count(m);
            if (static_cast<long>(down) != l || static_cast<long>(up) != k - l)
                return Report::fail("strata.cubical", X.face(s).name + ": up-set is not a cube at " + X.face(u).name);
        }
    }
    return Report::pass();
}

struct BoundaryResult {
    Chain raw;        // signed codimension-one faces
    Chain geometric;  // after collapse and dropping degenerate/trivial faces
    bool squares_to_zero = false;
};

inline BoundaryResult boundary(const StratifiedChain& X) {
    require_valid(X);
    BoundaryResult r;
    r.raw = X.boundary_of(X.fundamental());
    r.geometric = X.geometric(r.raw);
    r.squares_to_zero = X.boundary_of(r.raw).empty();
    return r;
}

// ---- product over a point ----

inline std::string product_name(const std::string& a, const std::string& b) { return a + "*" + b; }

inline StratifiedChain product(const StratifiedChain& X, const StratifiedChain& Y) {
    require_valid(X);
    require_valid(Y);
    StratifiedChain P;
    for (auto& f : X.faces())
        for (auto& g : Y.faces())
            P.add_face({product_name(f.name, g.name), f.dim + g.dim, f.orientation * g.orientation, f.degenerate || g.degenerate,
                        f.trivial || g.trivial});
    for (auto& [k, v] : X.incidences())
        for (auto& g : Y.faces())
            P.set_incidence(product_name(X.face(k.first).name, g.name), product_name(X.face(k.second).name, g.name), v);
    for (auto& f : X.faces())
        for (auto& [k, v] : Y.incidences()) {
            int sign = f.dim % 2 ? -v : v;
            P.set_incidence(product_name(f.name, Y.face(k.first).name), product_name(f.name, Y.face(k.second).name), sign);
        }
    auto classes = [](const StratifiedChain& Z) {
        std::vector<std::vector<std::string>> cls = Z.collapse;
        std::set<std::string> listed;
        for (auto& c : cls) listed.insert(c.begin(), c.end());
        for (auto& f : Z.faces())
            if (!listed.count(f.name)) cls.push_back({f.name});
        return cls;
    };
    for (auto& a : classes(X))
        for (auto& b : classes(Y)) {
            if (a.size() == 1 && b.size() == 1) continue;
            std::vector<std::string> c;
            for (auto& x : a)
                for (auto& y : b) c.push_back(product_name(x, y));
            P.collapse.push_back(c);
        }
    return P;
}

inline Chain cross(const Chain& a, const Chain& b) {
    Chain c;
    for (auto& [x, i] : a)
        for (auto& [y, j] : b) add_to(c, product_name(x, y), i * j);
    return c;
}

// d(X x Y) = dX x Y + (-1)^{dim X} X x dY
inline bool leibniz_holds(const StratifiedChain& X, const StratifiedChain& Y) {
    auto P = product(X, Y);
    Chain lhs = P.boundary_of(P.fundamental());
    Chain rhs = cross(X.boundary_of(X.fundamental()), Y.fundamental());
    int s = X.dim() % 2 ? -1 : 1;
    for (auto& [f, k] : cross(X.fundamental(), Y.boundary_of(Y.fundamental()))) add_to(rhs, f, s * k);
    return lhs == rhs;
}

// ---- truncation ----

// Faces entirely beyond the cut are removed; each straddling face f keeps
// its name (now meaning its truncated part) and gains the new face f|c.
struct Cut {
    std::vector<std::string> remove;
    std::vector<std::pair<std::string, std::string>> straddle;  // face, name of its cut face
};

inline StratifiedChain truncate(const StratifiedChain& X, const Cut& cut) {
    require_valid(X);
    std::set<size_t> removed;
    std::map<size_t, std::string> cutname;
    for (auto& f : cut.remove) removed.insert(X.index(f));
    for (auto& [f, c] : cut.straddle) {
        size_t i = X.index(f);
        if (removed.count(i)) throw Error("cut-overlaps-boundary", f + " is both removed and cut");
        if (X.face(i).dim == 0) throw Error("cut-overlaps-boundary", "the cut passes through the point " + f);
        if (X.has(c)) throw Error("cut-overlaps-boundary", "cut face " + c + " coincides with an existing face");
        cutname[i] = c;
    }
    for (size_t i = 0; i < X.size(); ++i) {
        bool kept = !removed.count(i) && !cutname.count(i);
        for (size_t s : X.lower_covers(i)) {
            if (kept && (removed.count(s) || cutname.count(s)))
                throw Error("cut-overlaps-boundary", X.face(i).name + " lies below the cut but its face " + X.face(s).name + " does not");
        }
        if (removed.count(i))
            for (size_t t : X.upper_covers(i))
                if (!removed.count(t) && !cutname.count(t))
                    throw Error("cut-overlaps-boundary", X.face(t).name + " contains the removed face " + X.face(i).name +
                                                             " but is not cut");
    }
    for (auto& [i, c] : cutname) {
        bool below = false, beyond = false;
        for (size_t s : X.lower_covers(i)) {
            below = below || !removed.count(s);
            beyond = beyond || removed.count(s) || cutname.count(s);
        }
        if (X.face(i).dim > 1 && !beyond)
            throw Error("cut-overlaps-boundary", X.face(i).name + " is marked as cut but nothing of its boundary is beyond the cut");
        (void)below;
    }

    StratifiedChain T;
    for (size_t i = 0; i < X.size(); ++i)
        if (!removed.count(i)) T.add_face(X.face(i));
    for (auto& [i, c] : cutname) {
        Face f = X.face(i);
        T.add_face({c, f.dim - 1, f.orientation, f.degenerate, f.trivial});
    }
    for (auto& [k, v] : X.incidences())
        if (!removed.count(k.first) && !removed.count(k.second)) T.set_incidence(X.face(k.first).name, X.face(k.second).name, v);
    for (auto& [i, c] : cutname) {
        T.set_incidence(X.face(i).name, c, X.face(i).dim % 2 ? 1 : -1);  // (-1)^{dim - 1}
        for (size_t s : X.lower_covers(i))
            if (cutname.count(s)) T.set_incidence(c, cutname[s], X.reference(i, s));
    }
    for (auto& cls : X.collapse) {
        std::vector<std::string> kept;
        for (auto& f : cls)
            if (!removed.count(X.index(f))) kept.push_back(f);
        if (kept.size() > 1) T.collapse.push_back(kept);
    }
    return T;
}

// dX_cut = (-1)^{dim X - 1} (cut face) + truncated old boundary
inline bool truncation_sign_holds(const StratifiedChain& X, const Cut& cut) {
    auto T = truncate(X, cut);
    Chain lhs = T.boundary_of(T.fundamental());
    Chain rhs;
    long n = X.dim();
    std::set<std::string> gone(cut.remove.begin(), cut.remove.end());
    for (auto& [f, k] : X.boundary_of(X.fundamental()))
        if (!gone.count(f)) add_to(rhs, f, k);
    for (auto& [f, c] : cut.straddle) {
        const Face& F = X.face(X.index(f));
        if (F.dim == n) add_to(rhs, c, F.orientation * (n % 2 ? 1 : -1));
    }
    return lhs == rhs;
}

// ---- real blowup along a transverse zero locus ----

struct ZeroFace {
    std::string name;
    long dim = 0;
    std::string inside;   // face of X whose interior contains it
};

struct ZeroLocus {
    long codim = 2;
    std::vector<ZeroFace> faces;
    std::vector<std::tuple<std::string, std::string, int>> incidences;  // upper, lower, sign
};

inline std::string sphere_name(const std::string& z) { return "S(" + z + ")"; }

inline StratifiedChain blowup(const StratifiedChain& X, const ZeroLocus& Z) {
    require_valid(X);
    if (Z.codim < 2 || Z.codim % 2) throw Error("bad-codimension", "zero locus codimension must be even and at least 2");
    StratifiedChain B;
    for (auto& f : X.faces()) B.add_face(f);
    for (auto& [k, v] : X.incidences()) B.set_incidence(X.face(k.first).name, X.face(k.second).name, v);
    B.collapse = X.collapse;
    std::map<std::string, const ZeroFace*> byname;
    for (auto& z : Z.faces) {
        const Face& F = X.face(X.index(z.inside));
        if (F.dim - z.dim != Z.codim)
            throw Error("bad-codimension", z.name + " has codimension " + std::to_string(F.dim - z.dim) + " in " + F.name +
                                               ", expected " + std::to_string(Z.codim));
        // fiber sphere collapses to z: degenerate over the base
        B.add_face({sphere_name(z.name), z.dim + Z.codim - 1, 1, true, false});
        B.set_incidence(F.name, sphere_name(z.name), z.dim % 2 ? 1 : -1);  // -(-1)^{dim z}
        byname[z.name] = &z;
    }
    for (auto& [u, l, s] : Z.incidences) {
        if (!byname.count(u) || !byname.count(l)) throw Error("bad-codimension", "zero locus incidence names an unknown face");
        B.set_incidence(sphere_name(u), sphere_name(l), s);
    }
    return B;
}

// dB = B(dX) - (-1)^{dim Z} Z x S(E), and B, X agree after collapse.
inline bool blowup_identity_holds(const StratifiedChain& X, const ZeroLocus& Z) {
    auto B = blowup(X, Z);
    Chain lhs = B.boundary_of(B.fundamental());
    Chain rhs = X.boundary_of(X.fundamental());
    long n = X.dim();
    for (auto& z : Z.faces) {
        if (X.face(X.index(z.inside)).dim != n) continue;
        add_to(rhs, sphere_name(z.name), X.face(X.index(z.inside)).orientation * (z.dim % 2 ? 1 : -1));
    }
    if (lhs != rhs) return false;
    return B.geometric(B.fundamental()) == X.geometric(X.fundamental()) && B.geometric(lhs) == X.geometric(X.boundary_of(X.fundamental()));
}

// ---- truncated geometric chain complex ----

inline GradedComplex<Int> gm_complex(const std::vector<StratifiedChain>& probes, long ambient) {
    std::vector<std::string> names;
    std::vector<long> deg;
    std::map<std::string, size_t> gen;
    for (auto& X : probes) {
        require_valid(X);
        for (auto& f : X.faces()) {
            if (f.degenerate || f.trivial || f.dim > ambient) continue;
            std::string r = X.representative(f.name);
            if (gen.count(r)) continue;
            gen[r] = names.size();
            names.push_back(r);
            deg.push_back(f.dim);
        }
    }
    GradedComplex<Int> C(Int(0), 0, names, deg);
    std::set<std::string> done;
    for (auto& X : probes)
        for (auto& f : X.faces()) {
            if (f.degenerate || f.trivial || f.dim > ambient || f.dim == 0) continue;
            std::string r = X.representative(f.name);
            if (!done.insert(r).second) continue;
            for (auto& [g, k] : X.geometric(X.boundary_of({{f.name, 1}}))) {
                auto it = gen.find(g);
                if (it != gen.end()) C.d.add(it->second, gen[r], k);
            }
        }
    return C;
}

}  // namespace instanton::strata
