#pragma once

// JSON documents for every input type.  Exact numbers travel as strings
// ("3/4", "-2"); plain JSON integers are accepted on input.  Group elements
// are written in the coordinates of the presentation's generators.

#include <json.hpp>

#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "instanton/flow/suspension.hpp"
#include "instanton/ledger/compose.hpp"
#include "instanton/strata/chain.hpp"

namespace instanton::io {

using json = nlohmann::json;

inline Error doc_error(const std::string& where, const std::string& what) {
    return Error("document.field", where + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw doc_error(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw doc_error(where, "missing field '" + key + "'");
    return *it;
}

inline const json* opt_field(const json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline const json& array_field(const json& j, const std::string& key, const std::string& where) {
    const json& a = field(j, key, where);
    if (!a.is_array()) throw doc_error(where, "'" + key + "' must be an array");
    return a;
}

inline std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw doc_error(where, "expected a string");
    return j.get<std::string>();
}

inline Rat as_rat(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return Rat(Int(j.get<uint64_t>()));
    if (j.is_number_integer()) return Rat(Int(j.get<int64_t>()));
    if (j.is_string()) {
        try {
            return parse_rat(j.get<std::string>());
        } catch (const Error& e) {
            throw doc_error(where, e.what());
        }
    }
    throw doc_error(where, "expected an exact number (string or integer)");
}

inline Int as_int(const json& j, const std::string& where) {
    Rat r = as_rat(j, where);
    if (denominator(r) != 1) throw doc_error(where, "expected an integer, got " + to_string(r));
    return numerator(r);
}

inline long as_long(const json& j, const std::string& where) {
    Int v = as_int(j, where);
    if (v > Int(std::numeric_limits<long>::max() / 4) || v < Int(std::numeric_limits<long>::min() / 4))
        throw doc_error(where, "integer out of range");
    return static_cast<long>(v);
}

inline bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw doc_error(where, "expected true or false");
    return j.get<bool>();
}

inline json num(const Rat& r) { return to_string(r); }
inline json num(const Int& r) { return to_string(r); }

inline json parse_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("document.syntax", where + ": " + e.what());
    }
}

inline json load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("usage.missing-file", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

// ---- canonical form ----

namespace detail {

inline bool numeral(const std::string& s) {
    try {
        parse_rat(s);
        return true;
    } catch (const Error&) {
        return false;
    }
}

}  // namespace detail

// Sorted keys (nlohmann objects are ordered maps), integers and exact
// numerals rewritten in lowest terms.
inline json canonical(const json& j) {
    if (j.is_object()) {
        json out = json::object();
        for (auto& [k, v] : j.items()) out[k] = canonical(v);
        return out;
    }
    if (j.is_array()) {
        json out = json::array();
        for (auto& v : j) out.push_back(canonical(v));
        return out;
    }
    if (j.is_number_integer()) return to_string(as_int(j, "number"));
    if (j.is_string() && detail::numeral(j.get<std::string>())) return to_string(parse_rat(j.get<std::string>()));
    return j;
}

inline std::string canonical_text(const json& j) { return canonical(j).dump(); }

// ---- flow categories ----

namespace detail {

inline flow::Op read_entries(const json& entries, const flow::OrbitModel& from, const flow::OrbitModel& to,
                             const std::string& where) {
    if (!entries.is_array()) throw doc_error(where, "'entries' must be an array");
    flow::Op op;
    for (auto& e : entries) {
        if (!e.is_array() || e.size() != 3) throw doc_error(where, "entry must be [gen_from, gen_to, coeff]");
        int a = from.gen(as_string(e[0], where));
        int b = to.gen(as_string(e[1], where));
        op[{a, b}] += as_rat(e[2], where);
    }
    return op;
}

inline json write_entries(const flow::Op& op, const flow::OrbitModel& from, const flow::OrbitModel& to) {
    json a = json::array();
    for (auto& [k, v] : op) a.push_back({from.name(k.first), to.name(k.second), num(v)});
    return a;
}

inline flow::BlockMap read_blocks(const json& j, const flow::FlowCategory& src, const flow::FlowCategory& dst,
                                  const std::string& where) {
    flow::BlockMap out;
    if (!j.is_array()) throw doc_error(where, "'blocks' must be an array");
    for (auto& b : j) {
        size_t x = src.index(as_string(field(b, "from", where), where));
        size_t y = dst.index(as_string(field(b, "to", where), where));
        std::string w = where + " block (" + src.objects[x].name + ", " + dst.objects[y].name + ")";
        if (out.count({x, y})) throw doc_error(w, "block listed twice");
        auto op = read_entries(field(b, "entries", w), src.objects[x].model(), dst.objects[y].model(), w);
        for (auto it = op.begin(); it != op.end();) it = it->second == 0 ? op.erase(it) : std::next(it);
        if (!op.empty()) out[{x, y}] = op;
    }
    return out;
}

inline json write_blocks(const flow::BlockMap& blocks, const flow::FlowCategory& src, const flow::FlowCategory& dst) {
    json a = json::array();
    for (auto& [xy, op] : blocks) {
        const auto &X = src.objects[xy.first], &Y = dst.objects[xy.second];
        a.push_back({{"from", X.name}, {"to", Y.name}, {"entries", write_entries(op, X.model(), Y.model())}});
    }
    return a;
}

}  // namespace detail

inline flow::FlowCategory read_flowcat(const json& j, const std::string& where = "flow category") {
    flow::FlowCategory fc;
    if (auto p = opt_field(j, "period")) fc.period = as_long(*p, where + " period");
    if (fc.period < 0) throw doc_error(where, "period must be non-negative");
    for (auto& o : array_field(j, "objects", where)) {
        auto name = as_string(field(o, "name", where), where + " object name");
        auto kind = flow::parse_kind(as_string(field(o, "kind", where), where + " object " + name));
        fc.add(name, kind, as_long(field(o, "grading", where), where + " object " + name));
    }
    if (auto b = opt_field(j, "blocks")) fc.blocks = detail::read_blocks(*b, fc, fc, where);
    return fc;
}

inline json write_flowcat(const flow::FlowCategory& fc) {
    json objs = json::array();
    for (auto& o : fc.objects) objs.push_back({{"name", o.name}, {"kind", flow::kind_name(o.kind)}, {"grading", o.grading}});
    return {{"period", fc.period}, {"objects", objs}, {"blocks", detail::write_blocks(fc.blocks, fc, fc)}};
}

inline flow::Bimodule read_bimodule(const json& j) {
    flow::Bimodule M;
    M.source = read_flowcat(field(j, "source", "bimodule"), "bimodule source");
    M.target = read_flowcat(field(j, "target", "bimodule"), "bimodule target");
    if (auto s = opt_field(j, "shift")) M.shift = as_long(*s, "bimodule shift");
    if (auto b = opt_field(j, "blocks")) M.blocks = detail::read_blocks(*b, M.source, M.target, "bimodule");
    return M;
}

inline json write_bimodule(const flow::Bimodule& M) {
    return {{"source", write_flowcat(M.source)},
            {"target", write_flowcat(M.target)},
            {"shift", M.shift},
            {"blocks", detail::write_blocks(M.blocks, M.source, M.target)}};
}

// B blocks start on the SO(3) model {g0, g3}, Z blocks on the S^2 model {s0, s2}.
inline flow::SectionData read_sections(const json& j, const flow::FlowCategory& fc) {
    flow::SectionData s;
    s.rho = as_string(field(j, "rho", "sections"), "sections rho");
    for (auto [key, m, kind] : {std::tuple{"B", &s.B, flow::Kind::irreducible}, std::tuple{"Z", &s.Z, flow::Kind::abelian}}) {
        auto a = opt_field(j, key);
        if (!a) continue;
        if (!a->is_array()) throw doc_error("sections", std::string("'") + key + "' must be an array");
        for (auto& b : *a) {
            auto to = as_string(field(b, "to", "sections"), "sections target");
            std::string w = std::string("sections ") + key + "(" + s.rho + ", " + to + ")";
            (*m)[to] = detail::read_entries(field(b, "entries", w), flow::OrbitModel(kind),
                                            fc.objects[fc.index(to)].model(), w);
        }
    }
    return s;
}

inline json write_sections(const flow::SectionData& s, const flow::FlowCategory& fc) {
    json out{{"rho", s.rho}, {"B", json::array()}, {"Z", json::array()}};
    for (auto [key, m, kind] : {std::tuple{"B", &s.B, flow::Kind::irreducible}, std::tuple{"Z", &s.Z, flow::Kind::abelian}})
        for (auto& [to, op] : *m)
            out[key].push_back(
                {{"to", to}, {"entries", detail::write_entries(op, flow::OrbitModel(kind), fc.objects[fc.index(to)].model())}});
    return out;
}

// ---- ledger sheets ----

namespace detail {

inline std::vector<Int> int_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw doc_error(where, "expected an array of integers");
    std::vector<Int> v;
    for (auto& x : j) v.push_back(as_int(x, where));
    return v;
}

inline json int_vector_json(const std::vector<Int>& v) {
    json a = json::array();
    for (auto& x : v) a.push_back(num(x));
    return a;
}

}  // namespace detail

// {"factors": [..], "free": n} or {"generators": n, "relations": [[..], ..]}
inline FinAbGroup read_group(const json& j, const std::string& where) {
    if (auto f = opt_field(j, "factors")) {
        size_t free = 0;
        if (auto fr = opt_field(j, "free")) free = static_cast<size_t>(as_long(*fr, where + " free"));
        return FinAbGroup::from_factors(detail::int_vector(*f, where + " factors"), free);
    }
    long n = as_long(field(j, "generators", where), where + " generators");
    if (n < 0) throw doc_error(where, "negative generator count");
    std::vector<std::vector<Int>> rel;
    if (auto r = opt_field(j, "relations")) {
        if (!r->is_array()) throw doc_error(where, "'relations' must be an array");
        for (auto& x : *r) rel.push_back(detail::int_vector(x, where + " relation"));
    }
    try {
        return FinAbGroup::from_presentation(static_cast<size_t>(n), rel);
    } catch (const Error& e) {
        throw doc_error(where, e.what());
    }
}

inline Elem read_elem(const FinAbGroup& G, const json& j, const std::string& where) {
    auto x = detail::int_vector(j, where);
    if (x.size() != G.generators())
        throw doc_error(where, "element has " + std::to_string(x.size()) + " coordinates, group has " +
                                   std::to_string(G.generators()) + " generators");
    return G.from_gens(x);
}

inline json write_elem(const FinAbGroup& G, const Elem& e) { return detail::int_vector_json(G.to_gens(e)); }

inline ledger::ThreeManifold read_manifold(const json& j, const std::string& where = "manifold") {
    ledger::ThreeManifold Y;
    if (auto n = opt_field(j, "name")) Y.name = as_string(*n, where + " name");
    std::string w = where + " " + Y.name;
    if (auto b = opt_field(j, "b1")) Y.b1 = as_long(*b, w + " b1");
    Y.H2 = read_group(field(j, "H2", w), w + " H2");
    Y.w = opt_field(j, "w") ? read_elem(Y.H2, j["w"], w + " w") : Y.H2.zero();
    if (auto a = opt_field(j, "abelian")) {
        if (!a->is_array()) throw doc_error(w, "'abelian' must be an array");
        for (auto& c : *a) {
            ledger::AbelianData d;
            d.name = as_string(field(c, "name", w), w + " abelian name");
            std::string cw = w + " class " + d.name;
            d.z1 = read_elem(Y.H2, field(c, "z1", cw), cw + " z1");
            d.z2 = read_elem(Y.H2, field(c, "z2", cw), cw + " z2");
            if (Y.H2.add(d.z1, d.z2) != Y.w) throw Error("sheet.abelian", cw + ": z1 + z2 != w");
            if (d.z1 == d.z2) throw Error("sheet.abelian", cw + ": z1 = z2 is a central class");
            if (auto h = opt_field(c, "h1_dim")) d.h1_dim = as_long(*h, cw + " h1_dim");
            if (d.h1_dim < 0 || d.h1_dim % 2) throw Error("sheet.h1-dim", cw + ": dim H^1 must be even and >= 0");
            if (auto r = opt_field(c, "rho")) d.rho = as_rat(*r, cw + " rho");
            Y.abelian.push_back(d);
        }
    }
    if (auto c = opt_field(j, "central")) {
        if (!c->is_array()) throw doc_error(w, "'central' must be an array");
        for (auto& x : *c) {
            auto n = as_string(field(x, "name", w), w + " central name");
            auto e = read_elem(Y.H2, field(x, "x", w), w + " central " + n);
            if (Y.H2.add(e, e) != Y.w) throw Error("sheet.central", w + ": central " + n + " does not satisfy 2x = w");
            Y.central_names.push_back({n, e});
        }
    }
    return Y;
}

inline ledger::Cobordism read_cobordism(const json& j) {
    ledger::Cobordism W;
    if (auto n = opt_field(j, "name")) W.name = as_string(*n, "cobordism name");
    std::string w = "cobordism " + W.name;
    if (auto b = opt_field(j, "b1")) W.b1 = as_long(*b, w + " b1");
    if (auto b = opt_field(j, "bplus")) W.bplus = as_long(*b, w + " bplus");
    if (auto c = opt_field(j, "chi")) W.chi = as_int(*c, w + " chi");
    if (auto s = opt_field(j, "sigma")) W.sigma = as_int(*s, w + " sigma");
    W.Y = read_manifold(field(j, "Y", w), w + " Y");
    W.Yp = read_manifold(field(j, "Yp", w), w + " Yp");
    W.H2W = read_group(field(j, "H2", w), w + " H2");
    W.c = opt_field(j, "c") ? read_elem(W.H2W, j["c"], w + " c") : W.H2W.zero();
    size_t n = W.H2W.generators();
    for (auto [key, dst] : {std::pair{"r", &W.r}, std::pair{"rp", &W.rp}}) {
        auto& a = array_field(j, key, w);
        for (auto& row : a) dst->push_back(detail::int_vector(row, w + " " + key));
    }
    W.Q = Matrix<Rat>(n, n);
    if (auto q = opt_field(j, "Q")) {
        if (!q->is_array() || q->size() != n) throw doc_error(w, "Q must have one row per H2 generator");
        for (size_t i = 0; i < n; ++i) {
            if (!(*q)[i].is_array() || (*q)[i].size() != n) throw doc_error(w, "Q must be square");
            for (size_t k = 0; k < n; ++k) W.Q(i, k) = as_rat((*q)[i][k], w + " Q");
        }
    }
    if (auto r = W.check(); !r) throw Error(r.tag, w + ": " + r.detail);
    return W;
}

// {"sigma": {"class": "value", ..}} or the bare map.
inline ledger::Chamber read_chamber(const json& j, const std::string& where = "signature data") {
    const json& m = opt_field(j, "sigma") ? j["sigma"] : j;
    if (!m.is_object()) throw doc_error(where, "expected a map from class names to even integers");
    ledger::Chamber s;
    for (auto& [k, v] : m.items()) s[k] = as_int(v, where + " " + k);
    return s;
}

inline json write_chamber(const ledger::Chamber& s) {
    json m = json::object();
    for (auto& [k, v] : s) m[k] = num(v);
    return {{"sigma", m}};
}

// ---- stratified chains ----

inline strata::StratifiedChain read_chain(const json& j, const std::string& where = "stratified chain") {
    strata::StratifiedChain X;
    std::map<std::string, std::set<std::string>> flags;
    if (auto f = opt_field(j, "flags")) {
        if (!f->is_object()) throw doc_error(where, "'flags' must map face names to flag lists");
        for (auto& [k, v] : f->items()) {
            if (!v.is_array()) throw doc_error(where, "flags of " + k + " must be an array");
            for (auto& x : v) {
                auto s = as_string(x, where + " flag");
                if (s != "degenerate" && s != "trivial") throw doc_error(where, "unknown flag '" + s + "'");
                flags[k].insert(s);
            }
        }
    }
    for (auto& f : array_field(j, "faces", where)) {
        strata::Face F;
        F.name = as_string(field(f, "name", where), where + " face name");
        F.dim = as_long(field(f, "dim", where), where + " face " + F.name);
        if (F.dim < 0) throw doc_error(where, "face " + F.name + " has negative dimension");
        if (auto o = opt_field(f, "orientation")) F.orientation = static_cast<int>(as_long(*o, where + " orientation"));
        if (F.orientation != 1 && F.orientation != -1) throw doc_error(where, "orientation of " + F.name + " must be +1 or -1");
        F.degenerate = flags[F.name].count("degenerate") > 0;
        F.trivial = flags[F.name].count("trivial") > 0;
        flags.erase(F.name);
        X.add_face(F);
    }
    if (!flags.empty()) throw doc_error(where, "flags for unknown face " + flags.begin()->first);
    if (auto inc = opt_field(j, "incidences")) {
        if (!inc->is_array()) throw doc_error(where, "'incidences' must be an array");
        for (auto& t : *inc) {
            if (!t.is_array() || t.size() != 3) throw doc_error(where, "incidence must be [upper, lower, sign]");
            auto u = as_string(t[0], where), l = as_string(t[1], where);
            long s = as_long(t[2], where + " incidence sign");
            if (s < -1 || s > 1) throw doc_error(where, "incidence sign must be -1, 0 or 1");
            X.set_incidence(u, l, static_cast<int>(s));
        }
    }
    if (auto c = opt_field(j, "collapse_classes")) {
        if (!c->is_array()) throw doc_error(where, "'collapse_classes' must be an array");
        for (auto& cls : *c) {
            if (!cls.is_array()) throw doc_error(where, "collapse class must be an array of names");
            std::vector<std::string> v;
            for (auto& n : cls) {
                v.push_back(as_string(n, where + " collapse class"));
                X.index(v.back());
            }
            X.collapse.push_back(v);
        }
    }
    return X;
}

inline json write_chain(const strata::StratifiedChain& X) {
    json faces = json::array(), inc = json::array(), flags = json::object(), coll = json::array();
    for (auto& f : X.faces()) {
        faces.push_back({{"name", f.name}, {"dim", f.dim}, {"orientation", f.orientation}});
        json fl = json::array();
        if (f.degenerate) fl.push_back("degenerate");
        if (f.trivial) fl.push_back("trivial");
        if (!fl.empty()) flags[f.name] = fl;
    }
    for (auto& [k, v] : X.incidences()) inc.push_back({X.face(k.first).name, X.face(k.second).name, v});
    for (auto& c : X.collapse) coll.push_back(c);
    return {{"faces", faces}, {"incidences", inc}, {"flags", flags}, {"collapse_classes", coll}};
}

inline strata::Cut read_cut(const json& j) {
    strata::Cut c;
    if (auto r = opt_field(j, "remove"))
        for (auto& x : *r) c.remove.push_back(as_string(x, "cut remove"));
    if (auto s = opt_field(j, "straddle"))
        for (auto& x : *s) {
            if (!x.is_array() || x.size() != 2) throw doc_error("cut", "straddle entry must be [face, cut_face]");
            c.straddle.push_back({as_string(x[0], "cut"), as_string(x[1], "cut")});
        }
    return c;
}

inline strata::ZeroLocus read_zero_locus(const json& j) {
    strata::ZeroLocus Z;
    if (auto c = opt_field(j, "codim")) Z.codim = as_long(*c, "zero locus codim");
    for (auto& f : array_field(j, "faces", "zero locus"))
        Z.faces.push_back({as_string(field(f, "name", "zero locus"), "zero locus"),
                           as_long(field(f, "dim", "zero locus"), "zero locus dim"),
                           as_string(field(f, "inside", "zero locus"), "zero locus")});
    if (auto inc = opt_field(j, "incidences"))
        for (auto& t : *inc) {
            if (!t.is_array() || t.size() != 3) throw doc_error("zero locus", "incidence must be [upper, lower, sign]");
            Z.incidences.emplace_back(as_string(t[0], "zero locus"), as_string(t[1], "zero locus"),
                                      static_cast<int>(as_long(t[2], "zero locus sign")));
        }
    return Z;
}

}  // namespace instanton::io
