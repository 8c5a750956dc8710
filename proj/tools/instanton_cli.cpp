#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <numeric>
#include <functional>
#include <iostream>
#include <thread>

#include "instanton/casson/casson.hpp"
#include "instanton/equivariant/triple.hpp"
#include "instanton/flow/wallcross.hpp"
#include "instanton/io/cache.hpp"
#include "instanton/io/document.hpp"

#ifndef INSTANTON_VERSION
#define INSTANTON_VERSION "dev"
#endif

using namespace instanton;
using io::json;

namespace {

// ---- reports ----

struct Output {
    int status = 0;
    std::vector<std::string> cols;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> notes;
    std::optional<json> doc;     // replaces the generic document rendering
    std::optional<std::string> bare;  // single-value table output

    void row(std::vector<std::string> r) { rows.push_back(std::move(r)); }
    void note(const std::string& k, const std::string& v) { notes.emplace_back(k, v); }
};

std::string cell(std::string s) {
    for (auto& c : s)
        if (c == '\t' || c == '\n') c = ' ';
    return s;
}

std::string render_table(const Output& o) {
    if (o.bare) return *o.bare + "\n";
    std::string s;
    for (size_t i = 0; i < o.cols.size(); ++i) s += (i ? "\t" : "") + cell(o.cols[i]);
    s += "\n";
    for (auto& r : o.rows) {
        for (size_t i = 0; i < r.size(); ++i) s += (i ? "\t" : "") + cell(r[i]);
        s += "\n";
    }
    for (auto& [k, v] : o.notes) s += "# " + cell(k) + "\t" + cell(v) + "\n";
    return s;
}

std::string render_document(const Output& o) {
    if (o.doc) return o.doc->dump(2) + "\n";
    json rows = json::array();
    for (auto& r : o.rows) {
        json x = json::object();
        for (size_t i = 0; i < r.size() && i < o.cols.size(); ++i) x[o.cols[i]] = r[i];
        rows.push_back(x);
    }
    json summary = json::object();
    for (auto& [k, v] : o.notes) summary[k] = v;
    json d{{"status", o.status == 0 ? "ok" : "fail"}, {"columns", o.cols}, {"rows", rows}, {"summary", summary}};
    return d.dump(2) + "\n";
}

Output failure(const std::string& tag, const std::string& detail) {
    Output o;
    o.status = 1;
    o.cols = {"status", "tag", "detail"};
    o.row({"fail", tag, detail});
    return o;
}

Output check_result(const std::string& what, const Report& r) {
    Output o;
    o.cols = {"check", "status", "tag", "detail"};
    o.row({what, r ? "pass" : "fail", r.tag, r.detail});
    o.status = r ? 0 : 1;
    return o;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

// ---- coefficients ----

Ring parse_coeff(const std::string& s) {
    if (s == "fp:2") return {Ring::Kind::prime_field, 2, Ring::Kind::rationals, 0};
    return parse_ring(s);
}

template <class F>
auto with_ring(const Ring& R, F&& f) {
    switch (R.kind) {
        case Ring::Kind::integers: return f(Int(0));
        case Ring::Kind::prime_field: return f(Fp(0, R.p));
        default: return f(Rat(0));
    }
}

void require_field(const Ring& R, const std::string& cmd) {
    if (!R.is_field()) throw Error("usage.coefficients", cmd + " needs field coefficients (q or fp:P)");
}

template <class T>
void homology_rows(Output& o, const std::vector<HomologyGroup<T>>& H) {
    o.cols = {"grading", "rank", "invariant_factors"};
    for (auto& h : H) {
        std::string t;
        for (auto& f : h.torsion) t += (t.empty() ? "" : ",") + Alg<T>::str(f);
        o.row({std::to_string(h.grading), std::to_string(h.free), t.empty() ? "-" : t});
    }
}

// ---- group elements ----

std::string elem_str(const FinAbGroup& G, const Elem& e) {
    std::string s = "(";
    auto x = G.to_gens(e);
    for (size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + to_string(x[i]);
    return s + ")";
}

Elem parse_elem_arg(const FinAbGroup& G, const std::string& s) {
    json a = json::array();
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) a.push_back(part);
    if (s.empty()) a = json::array();
    return io::read_elem(G, a, "element '" + s + "'");
}

Elem resolve_central(const ledger::ThreeManifold& Y, const std::string& s) {
    for (auto& x : Y.centrals())
        if (Y.central_class(x).name == s) return x;
    Elem e = parse_elem_arg(Y.H2, s);
    if (Y.H2.add(e, e) != Y.w) throw Error("sheet.central", s + " is not a central class of " + Y.name + " (2x != w)");
    return e;
}

std::string chamber_str(const ledger::Chamber& s) {
    std::string out;
    for (auto& [k, v] : s) out += (out.empty() ? "" : ",") + k + "=" + to_string(v);
    return out.empty() ? "-" : out;
}

// ---- request plumbing ----

struct Request {
    std::string cmd;
    json args = json::object();
    std::map<std::string, std::string> paths;  // role -> file
    std::map<std::string, json> docs;           // role -> parsed document
    std::function<Output(const Request&)> run;

    const json& doc(const std::string& role) const { return docs.at(role); }
    bool has(const std::string& role) const { return docs.count(role) > 0; }
};

std::optional<long> bound_arg(const Request& r) {
    if (r.args.contains("bound") && !r.args["bound"].is_null()) return r.args["bound"].get<long>();
    return std::nullopt;
}

std::vector<ledger::Record> records_of(const ledger::Cobordism& W, std::optional<long> bound, Output* o = nullptr) {
    auto e = ledger::enum_reducibles_4d(W, bound);
    if (o && e.saturated) o->note("warning", "some records touch the search bound; enlarge --bound");
    return e.records;
}

// ---- casson ----

unsigned g_threads = 1;  // sweep workers; never part of the cache key

Output run_dedekind(const Request& r) {
    int64_t a = r.args["P"], b = r.args["Q"];
    Rat s = casson::dedekind_s(a, b);
    Output o;
    o.bare = to_string(s);
    o.doc = json{{"P", a}, {"Q", b}, {"s", to_string(s)}};
    return o;
}

Output run_lens(const Request& r) {
    auto bundle = casson::parse_bundle(r.args["bundle"]);
    int prec = r.args["prec"];
    std::vector<std::pair<int64_t, int64_t>> jobs;
    if (r.args["sweep"].is_null()) {
        if (r.args["p"].is_null() || r.args["q"].is_null()) throw Error("usage.arguments", "give P Q or --sweep MAXP");
        jobs.push_back({r.args["p"], r.args["q"]});
    } else {
        int64_t maxp = r.args["sweep"];
        for (int64_t p = 2; p <= maxp; ++p) {
            if (bundle == casson::Bundle::odd && p % 2) continue;
            for (int64_t q = 1; q < p; ++q)
                if (std::gcd(p, q) == 1) jobs.push_back({p, q});
        }
    }
    std::vector<std::optional<casson::LensResult>> res(jobs.size());
    std::vector<std::string> errs(jobs.size());
    unsigned nt = std::max(1u, g_threads);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next++) < jobs.size();) {
            try {
                res[i] = casson::lambda_I_lens(jobs[i].first, jobs[i].second, bundle, prec);
            } catch (const Error& e) {
                errs[i] = e.tag + ": " + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<size_t>(nt, jobs.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    Output o;
    o.cols = {"p", "q", "bundle", "lambda_I", "s(q;p)", "residual", "pass"};
    size_t failed = 0;
    for (size_t i = 0; i < jobs.size(); ++i) {
        if (!res[i]) {
            if (jobs.size() == 1) {
                auto colon = errs[i].find(':');
                return failure(errs[i].substr(0, colon), errs[i].substr(colon + 2));
            }
            ++failed;
            o.row({std::to_string(jobs[i].first), std::to_string(jobs[i].second), casson::bundle_name(bundle), "-", "-", "-",
                   "fail"});
            continue;
        }
        auto& L = *res[i];
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", L.residual);
        o.row({std::to_string(L.p), std::to_string(L.q), casson::bundle_name(L.bundle), L.lambda, to_string(L.s), buf,
               L.pass ? "pass" : "fail"});
        if (!L.pass) ++failed;
    }
    o.note("rows", std::to_string(jobs.size()));
    o.note("failed", std::to_string(failed));
    o.status = failed ? 1 : 0;
    return o;
}

// ---- ledger ----

Output run_enum3d(const Request& r) {
    auto Y = io::read_manifold(r.doc("Y"));
    auto e = ledger::enum_reducibles_3d(Y);
    Output o;
    o.cols = {"kind", "name", "z1", "z2", "h1_dim", "rho"};
    for (auto& x : e.central) o.row({"central", Y.central_class(x).name, elem_str(Y.H2, x), elem_str(Y.H2, x), "-", "-"});
    for (auto& [a, b] : e.abelian) {
        auto c = Y.abelian_class(a, b);
        auto d = Y.data(a, b);
        o.row({"abelian", c.name, elem_str(Y.H2, a), elem_str(Y.H2, b), d ? std::to_string(d->h1_dim) : "-",
               d && d->rho ? to_string(*d->rho) : "-"});
    }
    o.note("central", std::to_string(e.central.size()));
    o.note("abelian", std::to_string(e.abelian.size()));
    return o;
}

Output run_enum4d(const Request& r) {
    auto W = io::read_cobordism(r.doc("W"));
    auto e = ledger::enum_reducibles_4d(W, bound_arg(r));
    Output o;
    o.cols = {"record", "kind", "x", "y", "in", "out", "square", "energy", "pseudocentral"};
    size_t i = 0, central = 0;
    for (auto& L : e.records) {
        central += L.central;
        o.row({std::to_string(i++), L.central ? "central" : "abelian", elem_str(W.H2W, L.x), elem_str(W.H2W, L.y), L.in.name,
               L.out.name, to_string(L.square), to_string(L.energy()), yes(L.pseudocentral())});
    }
    o.note("central", std::to_string(central));
    o.note("abelian", std::to_string(e.records.size() - central));
    o.note("saturated", yes(e.saturated));
    return o;
}

Output run_normal_index(const Request& r) {
    auto W = io::read_cobordism(r.doc("W"));
    auto s = io::read_chamber(r.doc("sigma")), sp = io::read_chamber(r.doc("sigma-out"));
    if (auto v = ledger::validate_sigma(W.Y, s); !v) throw Error(v.tag, W.Y.name + ": " + v.detail);
    if (auto v = ledger::validate_sigma(W.Yp, sp); !v) throw Error(v.tag, W.Yp.name + ": " + v.detail);
    Output o;
    auto recs = records_of(W, bound_arg(r), &o);
    o.cols = {"record", "label", "in", "out", "normal_index", "b1-b+"};
    std::vector<size_t> which;
    if (r.args["record"].is_null()) {
        for (size_t i = 0; i < recs.size(); ++i) which.push_back(i);
    } else {
        size_t k = r.args["record"];
        if (k >= recs.size()) throw Error("usage.record", "record " + std::to_string(k) + " out of range (" +
                                                              std::to_string(recs.size()) + " records)");
        which.push_back(k);
    }
    for (size_t i : which) {
        auto& L = recs[i];
        o.row({std::to_string(i), L.label(W.H2W), L.in.name, L.out.name, to_string(ledger::normal_index(L, W, s, sp)),
               std::to_string(W.B())});
    }
    return o;
}

void classification_rows(Output& o, const ledger::Cobordism& W, const std::vector<ledger::Record>& recs,
                         const ledger::Classification& c) {
    o.cols = {"record", "reducible", "in", "out", "label", "normal_index"};
    for (auto& lab : c.labels)
        o.row({std::to_string(lab.record), recs[lab.record].label(W.H2W), recs[lab.record].in.name, recs[lab.record].out.name,
               lab.label, lab.index ? to_string(*lab.index) : "-"});
    o.note("taxonomy", ledger::taxonomy_name(c.taxonomy));
    o.note("side_condition", yes(c.side_condition));
    if (!c.reason.empty()) o.note("reason", c.reason);
}

Output run_classify(const Request& r) {
    auto W = io::read_cobordism(r.doc("W"));
    auto s = io::read_chamber(r.doc("sigma")), sp = io::read_chamber(r.doc("sigma-out"));
    Output o;
    auto recs = records_of(W, bound_arg(r), &o);
    classification_rows(o, W, recs, ledger::classify(W, s, sp, recs));
    return o;
}

Output run_shift_search(const Request& r) {
    auto W = io::read_cobordism(r.doc("W"));
    auto s = io::read_chamber(r.doc("sigma")), sp = io::read_chamber(r.doc("sigma-out"));
    Output o;
    auto recs = records_of(W, bound_arg(r), &o);
    auto res = ledger::shift_search(W, recs, s, sp);
    classification_rows(o, W, recs, res.after);
    o.note("n", to_string(res.n));
    o.note("f", to_string(res.f));
    o.note("f_out", to_string(res.fp));
    o.note("sigma", chamber_str(res.sigma));
    o.note("sigma_out", chamber_str(res.sigma_p));
    o.note("certified", yes(res.certified));
    if (!res.detail.empty()) o.note("detail", res.detail);
    o.status = res.certified ? 0 : 1;
    return o;
}

Output run_compose(const Request& r) {
    auto W1 = io::read_cobordism(r.doc("W1")), W2 = io::read_cobordism(r.doc("W2"));
    auto s0 = io::read_chamber(r.doc("sigma0")), s1 = io::read_chamber(r.doc("sigma1")), s2 = io::read_chamber(r.doc("sigma2"));
    Output o;
    auto R1 = records_of(W1, bound_arg(r), &o), R2 = records_of(W2, bound_arg(r), &o);
    auto res = ledger::compose_shift(W1, R1, W2, R2, s0, s1, s2, ledger::parse_hypothesis(r.args["hypothesis"]));
    o.cols = {"class", "lo", "hi", "f1", "a"};
    for (auto& m : res.middle)
        o.row({m.at, m.lo ? to_string(*m.lo) : "-inf", m.hi ? to_string(*m.hi) : "+inf", to_string(m.f1), std::to_string(m.a)});
    o.note("f0", to_string(res.f0));
    o.note("f2", to_string(res.f2));
    o.note("sigma0", chamber_str(res.sigma0));
    o.note("sigma1_plus", chamber_str(res.sigma1_plus));
    o.note("sigma1_minus", chamber_str(res.sigma1_minus));
    o.note("sigma2", chamber_str(res.sigma2));
    o.note("taxonomy_W1", ledger::taxonomy_name(res.c1.taxonomy));
    o.note("taxonomy_W2", ledger::taxonomy_name(res.c2.taxonomy));
    o.note("taxonomy_composite", ledger::taxonomy_name(res.c12.taxonomy));
    o.note("additivity_checked", std::to_string(res.additivity_checked));
    o.note("certified", yes(res.certified));
    if (!res.detail.empty()) o.note("detail", res.detail);
    o.status = res.certified ? 0 : 1;
    return o;
}

Output run_pseudocount(const Request& r) {
    auto W = io::read_cobordism(r.doc("W"));
    auto theta = resolve_central(W.Y, r.args["theta"]);
    auto thetap = resolve_central(W.Yp, r.args["theta-out"]);
    auto c = ledger::pseudocentral_count(W, theta, thetap);
    Output o;
    o.cols = {"y", "y'", "kind"};
    for (auto& [y, yp] : c.listing) o.row({elem_str(W.H2W, y), elem_str(W.H2W, yp), y == yp ? "central" : "pseudocentral"});
    o.note("pairs", std::to_string(c.pairs));
    o.note("central", std::to_string(c.central));
    o.note("pseudocentral", std::to_string(c.pseudocentral));
    o.note("identity", yes(c.identity));
    o.status = c.identity ? 0 : 1;
    return o;
}

// ---- flow ----

flow::SectionData sections_for(const Request& r, const flow::FlowCategory& fc) {
    std::string rho = r.args["rho"];
    bool dflt = r.args.value("default", false);
    if (r.has("sections") == dflt) throw Error("usage.sections", "give exactly one of --sections FILE or --default");
    if (dflt) return flow::default_sections(fc, rho);
    auto s = io::read_sections(r.doc("sections"), fc);
    if (s.rho != rho) throw Error("usage.sections", "sections are for '" + s.rho + "', not '" + rho + "'");
    return s;
}

Output run_flow_validate(const Request& r) { return check_result("flowcat", flow::validate_flowcat(io::read_flowcat(r.doc("C")))); }

Output run_flow_homology(const Request& r) {
    auto fc = io::read_flowcat(r.doc("C"));
    auto R = parse_coeff(r.args["coeff"]);
    Output o;
    with_ring(R, [&](auto proto) {
        auto E = flow::cm_complex(fc, proto);
        homology_rows(o, homology(E.C));
    });
    o.note("ring", R.name());
    o.note("generators", std::to_string(flow::generator_names(fc).size()));
    return o;
}

Output run_flow_irreducible(const Request& r) {
    auto fc = io::read_flowcat(r.doc("C"));
    auto R = parse_coeff(r.args["coeff"]);
    Output o;
    with_ring(R, [&](auto proto) {
        auto I = equivariant::irreducible_complex(fc, proto);
        auto H = homology(I);
        homology_rows(o, H);
        auto iso = equivariant::verify_floer_iso(fc, proto);
        o.note("floer_iso", iso ? "pass" : "fail " + iso.tag + ": " + iso.detail);
        if (fc.period % 2 == 0) o.note("euler", to_string(equivariant::euler_char(H, fc.period)));
        o.status = iso ? 0 : 1;
    });
    o.note("ring", R.name());
    return o;
}

Output run_flow_equivariant(const Request& r) {
    auto fc = io::read_flowcat(r.doc("C"));
    auto R = parse_coeff(r.args["coeff"]);
    require_field(R, "flow equivariant");
    if (R.kind == Ring::Kind::prime_field && R.p == 2) throw Error("usage.coefficients", "equivariant homology needs char != 2");
    Output o;
    with_ring(R, [&](auto proto) {
        using K = decltype(proto);
        if constexpr (Alg<K>::is_field) {
            auto E = flow::cm_complex(fc, proto);
            auto T = equivariant::equivariant_triple(E, R.name());
            o.cols = {"grading", "I-", "Iinf", "I+", "rank_i", "rank_p", "rank_delta"};
            for (auto& x : T.rows)
                o.row({std::to_string(x.grading), std::to_string(x.minus), std::to_string(x.infty), std::to_string(x.plus),
                       std::to_string(x.rank_i), std::to_string(x.rank_p), std::to_string(x.rank_delta)});
            auto mod = [](const equivariant::RUModule& m) {
                std::string s = "free " + std::to_string(m.free);
                for (auto& t : m.torsion) s += "; " + t;
                return s;
            };
            o.note("I-", mod(T.minus));
            o.note("Iinf", mod(T.infty));
            o.note("I+", mod(T.plus));
            o.note("graded", yes(T.graded));
            o.note("exact", yes(T.exact));
            o.note("composites_zero", yes(T.composites_zero));
            o.note("tower_injective", yes(T.tower_injective));
            if (!T.detail.empty()) o.note("detail", T.detail);
            if (fc.period % 2 == 0) {
                auto P = equivariant::e1_page(E, fc);
                o.note("chi_E1", to_string(P.chi_e1));
                o.note("chi_E2", to_string(P.chi_e2));
                o.note("chi", to_string(P.chi_hm));
            }
            o.status = T.exact && T.composites_zero ? 0 : 1;
        }
    });
    o.note("ring", R.name());
    return o;
}

Output run_flow_suspend(const Request& r) {
    auto fc = io::read_flowcat(r.doc("C"));
    auto s = sections_for(r, fc);
    auto S = flow::suspend(fc, s);
    Output o;
    o.cols = {"name", "kind", "grading"};
    for (auto& x : S.objects) o.row({x.name, flow::kind_name(x.kind), std::to_string(x.grading)});
    o.note("blocks", std::to_string(S.blocks.size()));
    o.note("valid", flow::validate_flowcat(S) ? "yes" : "no");
    o.doc = io::write_flowcat(S);
    return o;
}

Output run_flow_wallcross(const Request& r) {
    auto fc = io::read_flowcat(r.doc("C"));
    auto s = sections_for(r, fc);
    auto R = parse_coeff(r.args["coeff"]);
    require_field(R, "flow wallcross");
    Output o;
    with_ring(R, [&](auto proto) {
        using K = decltype(proto);
        if constexpr (Alg<K>::is_field) {
            auto W = flow::wallcross(fc, s, proto);
            o.cols = {"grading", "I_before", "I_after", "quotient", "rank_incl", "rank_quot", "rank_conn"};
            for (auto& x : W.rows)
                o.row({std::to_string(x.grading), std::to_string(x.h0), std::to_string(x.h1), std::to_string(x.q),
                       std::to_string(x.rank_i), std::to_string(x.rank_q), std::to_string(x.rank_conn)});
            o.note("rho", W.rho);
            o.note("rho_grading", std::to_string(W.rho_grading));
            o.note("quotient_grading", std::to_string(W.rho_grading - 1));
            for (auto& [b, n] : W.V2) o.note("V2[" + b + "]", to_string(n));
            o.note("exact", yes(W.exact));
            if (!W.detail.empty()) o.note("detail", W.detail);
            o.note("chi_before", to_string(W.chi0));
            o.note("chi_after", to_string(W.chi1));
            o.note("chi_drop", to_string(Int(W.chi0 - W.chi1)));
            o.status = W.exact ? 0 : 1;
        }
    });
    o.note("ring", R.name());
    return o;
}

Output run_flow_bimodule(const Request& r) {
    auto M = io::read_bimodule(r.doc("M"));
    bool apply = r.args.value("apply", false);
    if (!apply) return check_result("bimodule", flow::validate_bimodule(M));
    auto R = parse_coeff(r.args["coeff"]);
    require_field(R, "flow bimodule --apply");
    Output o;
    with_ring(R, [&](auto proto) {
        using K = decltype(proto);
        if constexpr (Alg<K>::is_field) {
            auto f = flow::induced_map(M, proto);
            auto P = f.phi.dense();
            const auto &A = f.source.C, &B = f.target.C;
            o.cols = {"grading", "source_rank", "target_grading", "target_rank", "map_rank"};
            bool iso = true;
            std::set<long> ks;
            for (long k : A.gradings()) ks.insert(k);
            for (long k : B.gradings()) ks.insert(A.key(k + M.shift));
            for (long k : ks) {
                long kt = B.key(k - M.shift);
                size_t a = equivariant::homology_dim(A, k), b = equivariant::homology_dim(B, kt);
                size_t rk = equivariant::induced_rank(P, A, k, B, kt);
                iso = iso && a == rk && b == rk;
                o.row({std::to_string(k), std::to_string(a), std::to_string(kt), std::to_string(b), std::to_string(rk)});
            }
            o.note("chain_map", "yes");
            o.note("quasi_isomorphism", yes(iso));
        }
    });
    o.note("ring", R.name());
    return o;
}

// ---- strata ----

strata::StratifiedChain chain_arg(const Request& r, const std::string& role) {
    return io::read_chain(r.doc(role), role == "X" ? "stratified chain" : role);
}

void require_valid_chain(const strata::StratifiedChain& X, const std::string& what) {
    if (auto v = strata::validate(X); !v) throw Error(v.tag, what + ": " + v.detail);
}

void face_rows(Output& o, const strata::StratifiedChain& X) {
    o.cols = {"face", "dim", "orientation", "flags"};
    for (auto& f : X.faces()) {
        std::string fl = f.degenerate ? "degenerate" : "";
        if (f.trivial) fl += fl.empty() ? "trivial" : ",trivial";
        o.row({f.name, std::to_string(f.dim), std::to_string(f.orientation), fl.empty() ? "-" : fl});
    }
    o.doc = io::write_chain(X);
}

Output run_strata_validate(const Request& r) {
    auto X = chain_arg(r, "X");
    auto v = strata::validate(X);
    auto out = check_result("strata", v);
    if (v && r.args.value("cubical", false)) {
        auto c = strata::cubical_above(X);
        out.row({"cubical-above", c ? "pass" : "fail", c.tag, c.detail});
        if (!c) out.status = 1;
    }
    return out;
}

Output run_strata_boundary(const Request& r) {
    auto X = chain_arg(r, "X");
    require_valid_chain(X, "input");
    auto b = strata::boundary(X);
    Output o;
    o.cols = {"face", "raw", "geometric"};
    std::set<std::string> names;
    for (auto& [f, k] : b.raw) names.insert(f);
    for (auto& [f, k] : b.geometric) names.insert(f);
    for (auto& n : names) {
        auto a = b.raw.find(n), g = b.geometric.find(n);
        o.row({n, a == b.raw.end() ? "0" : to_string(a->second), g == b.geometric.end() ? "0" : to_string(g->second)});
    }
    o.note("boundary", strata::show(b.raw));
    o.note("squares_to_zero", yes(b.squares_to_zero));
    o.status = b.squares_to_zero ? 0 : 1;
    return o;
}

Output run_strata_product(const Request& r) {
    auto X = chain_arg(r, "X"), Y = chain_arg(r, "with");
    require_valid_chain(X, "first factor");
    require_valid_chain(Y, "second factor");
    auto P = strata::product(X, Y);
    Output o;
    face_rows(o, P);
    bool lb = strata::leibniz_holds(X, Y);
    auto v = strata::validate(P);
    o.note("leibniz", yes(lb));
    o.note("valid", v ? "yes" : "no " + v.tag);
    o.status = lb && v ? 0 : 1;
    return o;
}

Output run_strata_truncate(const Request& r) {
    auto X = chain_arg(r, "X");
    auto cut = io::read_cut(r.doc("cut"));
    auto T = strata::truncate(X, cut);
    Output o;
    face_rows(o, T);
    bool ok = strata::truncation_sign_holds(X, cut);
    o.note("sign_identity", yes(ok));
    o.status = ok ? 0 : 1;
    return o;
}

Output run_strata_blowup(const Request& r) {
    auto X = chain_arg(r, "X");
    auto Z = io::read_zero_locus(r.doc("zero"));
    auto B = strata::blowup(X, Z);
    Output o;
    face_rows(o, B);
    bool ok = strata::blowup_identity_holds(X, Z);
    o.note("blowup_identity", yes(ok));
    o.status = ok ? 0 : 1;
    return o;
}

Output run_strata_homology(const Request& r) {
    std::vector<strata::StratifiedChain> probes{chain_arg(r, "X")};
    for (size_t i = 0; r.has("probe" + std::to_string(i)); ++i) probes.push_back(chain_arg(r, "probe" + std::to_string(i)));
    long ambient = r.args["ambient"].is_null() ? probes[0].dim() : r.args["ambient"].get<long>();
    for (auto& p : probes) ambient = r.args["ambient"].is_null() ? std::max(ambient, p.dim()) : ambient;
    auto C = strata::gm_complex(probes, ambient);
    Output o;
    auto H = homology(C);
    homology_rows(o, H);
    o.note("ambient", std::to_string(ambient));
    o.note("generators", std::to_string(C.size()));
    return o;
}

// ---- chambers ----

Output run_chamber_path(const Request& r) {
    auto s0 = io::read_chamber(r.doc("S0")), s1 = io::read_chamber(r.doc("S1"));
    auto path = ledger::chamber_path(s0, s1);
    Output o;
    o.cols = {"step", "class", "direction", "sigma"};
    std::optional<std::vector<flow::ChamberStep>> chi;
    if (r.has("flow")) {
        o.cols.push_back("chi");
        std::vector<std::string> classes;
        for (auto& st : path) {
            if (st.direction < 0)
                throw Error("chamber.downward", "step at " + st.at + " lowers sigma; the flow ledger only crosses walls upward");
            classes.push_back(st.at);
        }
        auto fc = io::read_flowcat(r.doc("flow"));
        auto R = parse_coeff(r.args["coeff"]);
        require_field(R, "chamber path --flow");
        chi = with_ring(R, [&](auto proto) { return flow::chamber_ledger(fc, classes, proto); });
    }
    auto add = [&](size_t i, std::vector<std::string> row) {
        if (chi) row.push_back(to_string((*chi)[i].chi));
        o.row(std::move(row));
    };
    add(0, {"0", "-", "-", chamber_str(s0)});
    for (size_t i = 0; i < path.size(); ++i)
        add(i + 1, {std::to_string(i + 1), path[i].at, path[i].direction > 0 ? "+4" : "-4", chamber_str(path[i].to)});
    Int total = 0;
    for (auto& [k, v] : s1) total += v - s0.at(k);
    o.note("steps", std::to_string(path.size()));
    o.note("quarter_sum", to_string(Rat(total, 4)));
    if (chi) {
        Int drop = chi->front().chi - chi->back().chi;
        o.note("chi_drop", to_string(drop));
        bool ok = Rat(drop) == Rat(total, 4);
        o.note("drop_matches_quarter_sum", yes(ok));
        o.status = ok ? 0 : 1;
    }
    return o;
}

// ---- driver ----

int exit_for(const std::string& tag) { return tag.rfind("usage.", 0) == 0 || tag.rfind("ring.", 0) == 0 ? 2 : 1; }

std::optional<std::string> env(const char* k) {
    const char* v = std::getenv(k);
    return v && *v ? std::optional<std::string>(v) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact computations for instanton Floer bookkeeping"};
    app.set_version_flag("--version", INSTANTON_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "table", cache_dir;
    bool no_cache = false;
    app.add_option("--format", format, "table (TSV) or document (JSON)")->check(CLI::IsMember({"table", "document"}));
    app.add_option("--cache", cache_dir, "cache directory (overrides INSTANTON_CACHE)");
    app.add_flag("--no-cache", no_cache, "bypass the result cache");

    Request req;
    // option storage
    int64_t P = 0, Q = 0;
    std::optional<int64_t> lp, lq, sweep;
    std::string bundle = "trivial", coeff = "q", rho, hypothesis = "proof", theta, theta_out;
    int prec = 20;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::optional<long> bound, record, ambient;
    bool dflt = false, check = false, apply = false, cubical = false;
    std::map<std::string, std::string> files;
    std::vector<std::string> probes;

    auto file = [&](CLI::App* sc, const std::string& name, const std::string& role, const std::string& help, bool required) {
        auto* o = sc->add_option(name, files[role], help);
        if (required) o->required();
        return o;
    };
    auto on = [&](CLI::App* sc, const std::string& cmd, std::function<Output(const Request&)> fn,
                  std::function<void(json&)> args) {
        sc->callback([&req, cmd, fn, args] {
            req.cmd = cmd;
            req.run = fn;
            args(req.args);
        });
    };

    auto* ded = app.add_subcommand("dedekind", "Dedekind sum s(P;Q)");
    ded->add_option("P", P)->required();
    ded->add_option("Q", Q)->required();
    on(ded, "dedekind", run_dedekind, [&](json& a) { a = {{"P", P}, {"Q", Q}}; });

    auto* lens = app.add_subcommand("lens-casson", "lambda_I of lens spaces against s(q;p)");
    lens->add_option("P", lp);
    lens->add_option("Q", lq);
    lens->add_option("--bundle", bundle)->check(CLI::IsMember({"trivial", "odd"}));
    lens->add_option("--prec", prec, "significant digits")->check(CLI::Range(4, 150));
    lens->add_option("--sweep", sweep, "all coprime 1 <= q < p <= MAXP")->check(CLI::Range(int64_t(2), int64_t(100000)));
    lens->add_option("--threads", threads);
    on(lens, "lens-casson", run_lens, [&](json& a) {
        a = {{"p", lp ? json(*lp) : json()}, {"q", lq ? json(*lq) : json()}, {"bundle", bundle}, {"prec", prec},
             {"sweep", sweep ? json(*sweep) : json()}};
    });

    auto* e3 = app.add_subcommand("enum3d", "reducibles on a rational homology sphere");
    file(e3, "Y", "Y", "three-manifold sheet", true);
    on(e3, "enum3d", run_enum3d, [](json&) {});

    auto bound_opt = [&](CLI::App* sc) { sc->add_option("--bound", bound, "search box for free H^2 coordinates"); };
    auto bound_json = [&](json& a) { a["bound"] = bound ? json(*bound) : json(); };

    auto* e4 = app.add_subcommand("enum4d", "reducibles on a cobordism");
    file(e4, "W", "W", "cobordism sheet", true);
    bound_opt(e4);
    on(e4, "enum4d", run_enum4d, bound_json);

    auto sigmas = [&](CLI::App* sc) {
        file(sc, "--sigma", "sigma", "signature data on Y", true);
        file(sc, "--sigma-out", "sigma-out", "signature data on Y'", true);
    };

    auto* ni = app.add_subcommand("normal-index", "normal index of reducible records");
    file(ni, "W", "W", "cobordism sheet", true);
    ni->add_option("--record", record, "record number from enum4d (default: all)");
    sigmas(ni);
    bound_opt(ni);
    on(ni, "normal-index", run_normal_index, [&](json& a) {
        bound_json(a);
        a["record"] = record ? json(*record) : json();
    });

    auto* cl = app.add_subcommand("classify", "obstruction taxonomy");
    file(cl, "W", "W", "cobordism sheet", true);
    sigmas(cl);
    bound_opt(cl);
    on(cl, "classify", run_classify, bound_json);

    auto* ss = app.add_subcommand("shift-search", "constant shifts making W pseudo-unobstructed");
    file(ss, "W", "W", "cobordism sheet", true);
    sigmas(ss);
    bound_opt(ss);
    on(ss, "shift-search", run_shift_search, bound_json);

    auto* cs = app.add_subcommand("compose-shift", "shifts for a composite W1 then W2");
    file(cs, "W1", "W1", "first cobordism", true);
    file(cs, "W2", "W2", "second cobordism", true);
    file(cs, "--sigma0", "sigma0", "signature data on the incoming end", true);
    file(cs, "--sigma1", "sigma1", "signature data on the middle", true);
    file(cs, "--sigma2", "sigma2", "signature data on the outgoing end", true);
    cs->add_option("--hypothesis", hypothesis)->check(CLI::IsMember({"proof", "statement"}));
    bound_opt(cs);
    on(cs, "compose-shift", run_compose, [&](json& a) {
        bound_json(a);
        a["hypothesis"] = hypothesis;
    });

    auto* pc = app.add_subcommand("pseudocount", "pseudocentral count over central classes");
    file(pc, "W", "W", "cobordism sheet", true);
    pc->add_option("--theta", theta, "central class on Y (name or generator coordinates)")->required();
    pc->add_option("--theta-out", theta_out, "central class on Y'")->required();
    on(pc, "pseudocount", run_pseudocount, [&](json& a) { a = {{"theta", theta}, {"theta-out", theta_out}}; });

    auto* fl = app.add_subcommand("flow", "flow categories");
    fl->require_subcommand(1);
    auto coeff_opt = [&](CLI::App* sc) { sc->add_option("--coeff", coeff, "q, z or fp:P"); };
    for (auto [name, fn, help] :
         {std::tuple{"validate", run_flow_validate, "check the flow-category axioms"},
          std::tuple{"homology", run_flow_homology, "homology of the flow complex"},
          std::tuple{"equivariant", run_flow_equivariant, "I-, I^inf, I+ and their triangle"},
          std::tuple{"irreducible", run_flow_irreducible, "irreducible complex and its identification with u CM[-3]"}}) {
        auto* sc = fl->add_subcommand(name, help);
        file(sc, "C", "C", "flow category document", true);
        coeff_opt(sc);
        std::string cmd = std::string("flow ") + name;
        bool uses_coeff = std::string(name) != "validate";
        on(sc, cmd, fn, [&, uses_coeff](json& a) {
            if (uses_coeff) a["coeff"] = coeff;
        });
    }
    auto rho_opts = [&](CLI::App* sc) {
        sc->add_option("--rho", rho, "abelian object to suspend")->required();
        file(sc, "--sections", "sections", "section data document", false);
        sc->add_flag("--default", dflt, "default sections (B = n id, Z = 0)");
    };
    auto* fs = fl->add_subcommand("suspend", "suspend at an abelian object");
    file(fs, "C", "C", "flow category document", true);
    rho_opts(fs);
    on(fs, "flow suspend", run_flow_suspend, [&](json& a) { a = {{"rho", rho}, {"default", dflt}}; });
    auto* fw = fl->add_subcommand("wallcross", "wall-crossing triangle at an abelian object");
    file(fw, "C", "C", "flow category document", true);
    rho_opts(fw);
    coeff_opt(fw);
    on(fw, "flow wallcross", run_flow_wallcross, [&](json& a) { a = {{"rho", rho}, {"default", dflt}, {"coeff", coeff}}; });
    auto* fb = fl->add_subcommand("bimodule", "check a bimodule or apply its chain map");
    file(fb, "M", "M", "bimodule document", true);
    auto* g = fb->add_option_group("mode");
    g->add_flag("--check", check, "validate the bimodule relations");
    g->add_flag("--apply", apply, "induced map on homology");
    g->require_option(1);
    coeff_opt(fb);
    on(fb, "flow bimodule", run_flow_bimodule, [&](json& a) { a = {{"apply", apply}, {"coeff", coeff}}; });

    auto* st = app.add_subcommand("strata", "stratified chains");
    st->require_subcommand(1);
    auto* sv = st->add_subcommand("validate", "boundary-square and vertex-sign checks");
    file(sv, "X", "X", "stratified chain document", true);
    sv->add_flag("--cubical", cubical, "also check the cubical-above property");
    on(sv, "strata validate", run_strata_validate, [&](json& a) { a["cubical"] = cubical; });
    auto* sb = st->add_subcommand("boundary", "signed boundary of the fundamental chain");
    file(sb, "X", "X", "stratified chain document", true);
    on(sb, "strata boundary", run_strata_boundary, [](json&) {});
    auto* sp = st->add_subcommand("product", "product with a second chain");
    file(sp, "X", "X", "first factor", true);
    file(sp, "--with", "with", "second factor", true);
    on(sp, "strata product", run_strata_product, [](json&) {});
    auto* stt = st->add_subcommand("truncate", "truncation along a cut");
    file(stt, "X", "X", "stratified chain document", true);
    file(stt, "--cut", "cut", "cut document", true);
    on(stt, "strata truncate", run_strata_truncate, [](json&) {});
    auto* sbl = st->add_subcommand("blowup", "real blowup along a zero locus");
    file(sbl, "X", "X", "stratified chain document", true);
    file(sbl, "--zero", "zero", "zero-locus document", true);
    on(sbl, "strata blowup", run_strata_blowup, [](json&) {});
    auto* sh = st->add_subcommand("homology", "homology of the truncated geometric chain complex");
    file(sh, "X", "X", "stratified chain document", true);
    sh->add_option("--probe", probes, "further chains in the same complex");
    sh->add_option("--ambient", ambient, "ambient dimension (default: top face dimension)");
    on(sh, "strata homology", run_strata_homology, [&](json& a) { a["ambient"] = ambient ? json(*ambient) : json(); });

    auto* ch = app.add_subcommand("chamber", "signature-data chambers");
    ch->require_subcommand(1);
    auto* cp = ch->add_subcommand("path", "adjacent steps from S0 to S1");
    file(cp, "S0", "S0", "initial signature data", true);
    file(cp, "S1", "S1", "final signature data", true);
    file(cp, "--flow", "flow", "flow category to suspend along the path", false);
    coeff_opt(cp);
    on(cp, "chamber path", run_chamber_path, [&](json& a) { a["coeff"] = coeff; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    g_threads = threads;
    for (auto& [role, path] : files)
        if (!path.empty()) req.paths[role] = path;
    for (size_t i = 0; i < probes.size(); ++i) req.paths["probe" + std::to_string(i)] = probes[i];

    auto emit = [&](const Output& o) {
        std::cout << (format == "document" ? render_document(o) : render_table(o));
        return o.status;
    };
    auto fail = [&](const std::string& tag, const std::string& detail) {
        std::cerr << "instanton: [" << tag << "] " << detail << "\n";
        emit(failure(tag, detail));
        return exit_for(tag);
    };

    json docs = json::object();
    try {
        for (auto& [role, path] : req.paths) {
            req.docs[role] = io::load(path);
            docs[role] = io::canonical(req.docs[role]);
        }
    } catch (const Error& e) {
        return fail(e.tag, e.what());
    }

    std::optional<io::Cache> cache;
    if (!no_cache) {
        auto root = !cache_dir.empty() ? std::optional<std::string>(cache_dir) : env("INSTANTON_CACHE");
        if (root) cache.emplace(*root, INSTANTON_VERSION);
    }
    json key{{"cmd", req.cmd}, {"args", io::canonical(req.args)}, {"docs", docs}, {"format", format}};
    std::string request = key.dump();
    auto warn = [&] {
        if (cache)
            for (auto& w : cache->warnings()) std::cerr << "instanton: warning: " << w << "\n";
    };

    if (cache)
        if (auto hit = cache->get(request)) {
            std::cout << hit->output;
            warn();
            return hit->status;
        }

    Output out;
    try {
        out = req.run(req);
    } catch (const Error& e) {
        if (exit_for(e.tag) == 2) return fail(e.tag, e.what());
        std::cerr << "instanton: [" << e.tag << "] " << e.what() << "\n";
        out = failure(e.tag, e.what());
    } catch (const std::exception& e) {
        std::cerr << "instanton: [internal] " << e.what() << "\n";
        out = failure("internal", e.what());
    }
    std::string text = format == "document" ? render_document(out) : render_table(out);
    if (cache) cache->put(request, {out.status, text});
    std::cout << text;
    warn();
    return out.status;
}
