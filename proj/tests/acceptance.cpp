// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [FIXTURE_DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <set>

#include "instanton/casson/casson.hpp"
#include "instanton/io/document.hpp"
#include "instanton/strata/chain.hpp"
#include "support/group_oracle.hpp"
#include "support/random_flow.hpp"
#include "support/random_orbits.hpp"
#include "support/random_sheets.hpp"

using namespace instanton;
namespace fs = std::filesystem;

namespace {

// counts checks and keeps the first failure
struct Tally {
    size_t checks = 0;
    std::string first;
    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && first.empty()) first = what;
    }
    bool ok() const { return first.empty(); }
};

struct Outcome {
    bool ok;
    std::string detail;
};

Outcome verdict(const Tally& t, const std::string& summary) {
    return {t.ok(), t.ok() ? summary : t.first};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- fixtures ----

struct Fixtures {
    std::vector<std::pair<std::string, flow::FlowCategory>> flows;
    std::vector<std::pair<std::string, strata::StratifiedChain>> chains;
    std::map<std::string, io::json> raw;
};

// deliberately broken inputs; they must be rejected, not processed
const std::set<std::string> broken = {"malformed", "theta-graph-bad"};

Fixtures load_fixtures(const fs::path& dir) {
    Fixtures F;
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".doc") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (auto& p : files) {
        auto stem = p.stem().string();
        auto j = io::load(p.string());
        F.raw[stem] = j;
        if (broken.count(stem)) continue;
        if (j.contains("objects")) F.flows.push_back({stem, io::read_flowcat(j)});
        else if (j.contains("faces")) F.chains.push_back({stem, io::read_chain(j)});
    }
    return F;
}

const strata::StratifiedChain& chain_named(const Fixtures& F, const std::string& n) {
    for (auto& [k, X] : F.chains)
        if (k == n) return X;
    throw Error("acceptance.fixture", "missing chain fixture " + n);
}

const flow::FlowCategory& flow_named(const Fixtures& F, const std::string& n) {
    for (auto& [k, fc] : F.flows)
        if (k == n) return fc;
    throw Error("acceptance.fixture", "missing flow fixture " + n);
}

// ---- independent oracles ----

// s(q;p) as the literal sawtooth sum
Rat sawtooth_oracle(int64_t q, int64_t p) {
    auto saw = [](Rat x) {
        Int f = numerator(x) / denominator(x);
        if (x < 0 && Rat(f) != x) f -= 1;
        Rat frac = x - Rat(f);
        return frac == 0 ? Rat(0) : frac - Rat(1, 2);
    };
    Rat s = 0;
    for (int64_t k = 1; k < p; ++k) s += saw(Rat(k, p)) * saw(Rat(k * q, p));
    return s;
}

ledger::Cobordism cylinder(const ledger::ThreeManifold& Y) {
    ledger::Cobordism W;
    W.Y = W.Yp = Y;
    W.H2W = Y.H2;
    size_t n = Y.H2.generators();
    W.r.assign(n, std::vector<Int>(n, 0));
    for (size_t i = 0; i < n; ++i) W.r[i][i] = 1;
    W.rp = W.r;
    W.c = Y.w;
    W.Q = Matrix<Rat>(n, n);
    return W;
}

// W with both ends S^3 and H^2(W) = the given finite group
ledger::Cobordism over_spheres(const FinAbGroup& G, const Elem& c) {
    ledger::Cobordism W;
    W.Y.H2 = W.Yp.H2 = FinAbGroup::from_factors({});
    W.Y.w = W.Yp.w = {};
    W.H2W = G;
    size_t n = G.generators();
    W.r = W.rp = std::vector<std::vector<Int>>(n);
    W.c = c;
    W.Q = Matrix<Rat>(n, n);
    return W;
}

std::string pq(int64_t p, int64_t q) { return "L(" + std::to_string(p) + "," + std::to_string(q) + ")"; }

// ---------------------------------------------------------------------------

Outcome lens_casson() {
    Tally t;
    auto t0 = std::chrono::steady_clock::now();
    size_t cases = 0;
    for (int64_t p = 2; p <= 50; ++p)
        for (int64_t q = 1; q < p; ++q) {
            if (std::gcd(p, q) != 1) continue;
            double s = sawtooth_oracle(q, p).convert_to<double>();
            for (auto b : {casson::Bundle::trivial, casson::Bundle::odd}) {
                if (b == casson::Bundle::odd && p % 2) continue;
                auto r = casson::lambda_I_lens(p, q, b, 16);
                ++cases;
                t.expect(r.pass && std::fabs(r.lambda_approx - s) < 1e-9,
                         pq(p, q) + " " + casson::bundle_name(b) + ": lambda " + r.lambda + " vs s = " + std::to_string(s));
            }
        }
    double secs = seconds_since(t0);
    t.expect(secs < 10, "sweep took " + std::to_string(secs) + " s");
    return verdict(t, std::to_string(cases) + " lens cases within 1e-9, " + std::to_string(secs).substr(0, 5) + " s");
}

Outcome reciprocity() {
    Tally t;
    auto t0 = std::chrono::steady_clock::now();
    size_t pairs = 0;
    for (int64_t p = 1; p <= 200; ++p)
        for (int64_t q = 1; q <= 200; ++q) {
            if (std::gcd(p, q) != 1) continue;
            Rat lhs = casson::dedekind_s(p, q) + casson::dedekind_s(q, p);
            Rat rhs = Rat(p * p + q * q + 1, 12 * p * q) - Rat(1, 4);
            ++pairs;
            t.expect(lhs == rhs, "s(" + std::to_string(p) + ";" + std::to_string(q) + ") breaks reciprocity");
        }
    double secs = seconds_since(t0);
    t.expect(secs < 5, "reciprocity took " + std::to_string(secs) + " s");
    // the library sum against the literal sawtooth sum on a smaller range
    for (int64_t p = 1; p <= 40; ++p)
        for (int64_t q = 1; q < 2 * p; ++q)
            if (std::gcd(p, q) == 1) t.expect(casson::dedekind_s(q, p) == sawtooth_oracle(q, p), "sawtooth mismatch");
    return verdict(t, std::to_string(pairs) + " coprime pairs exact, " + std::to_string(secs).substr(0, 5) + " s");
}

Outcome enumeration() {
    Tally t;
    std::mt19937 rng(500);
    std::vector<std::vector<long>> cs;
    groups::chains(500, {}, 1, cs);
    size_t instances = 0;
    for (auto& d : cs) {
        groups::Tuples T{d};
        auto S = groups::scramble(d.empty() ? std::vector<long>{} : d, rng);
        long order = std::accumulate(d.begin(), d.end(), 1L, std::multiplies<long>());
        std::vector<std::vector<long>> ws;
        if (order <= 64) {
            ws = T.all();
        } else {
            ws.push_back(std::vector<long>(d.size(), 0));
            for (int k = 0; k < 4; ++k) {
                std::vector<long> w(d.size());
                for (size_t i = 0; i < d.size(); ++i) w[i] = static_cast<long>(rng() % d[i]);
                ws.push_back(w);
            }
        }
        for (auto& w : ws) {
            ledger::ThreeManifold Y;
            Y.H2 = S.G;
            Y.w = d.empty() ? S.G.zero() : groups::transport(S, w);
            auto got = ledger::enum_reducibles_3d(Y);
            auto [c, a] = groups::oracle_counts(T, w);
            ++instances;
            std::string g = "Z/";
            for (long m : d) g += std::to_string(m) + " ";
            t.expect(static_cast<long>(got.central.size()) == c && static_cast<long>(got.abelian.size()) == a,
                     "group " + g + "count mismatch");
        }
    }
    return verdict(t, std::to_string(cs.size()) + " groups of order <= 500, " + std::to_string(instances) + " (Y,w) exact");
}

Outcome normal_index_suite(const Fixtures& F) {
    Tally t;
    std::mt19937 rng(4004);
    // cylinder and adjacent chambers
    size_t cyl = 0;
    for (int k = 0; k < 200; ++k) {
        auto A = sheets::random_manifold(rng, "Y");
        auto W = cylinder(A.Y);
        for (auto& r : ledger::enum_reducibles_4d(W).records) {
            if (r.central) continue;
            t.expect(ledger::normal_index(r, W, A.sigma, A.sigma) == 0, "cylinder index not 0");
            auto lower = A.sigma;
            lower[r.in.name] -= 4;
            t.expect(ledger::normal_index(r, W, A.sigma, lower) == -2, "adjacent index not -2");
            ++cyl;
        }
    }
    // pseudocentral: 2(b1 - b+ - 1)
    size_t pseudo = 0;
    for (long b1 = 0; b1 <= 3; ++b1)
        for (long bp = 0; bp <= b1; ++bp)
            for (Int m : {3, 5, 7}) {
                auto W = over_spheres(FinAbGroup::from_factors({m}), {0});
                W.b1 = b1;
                W.bplus = bp;
                for (auto& r : ledger::enum_reducibles_4d(W).records) {
                    if (!r.pseudocentral()) continue;
                    t.expect(ledger::normal_index(r, W, {}, {}) == 2 * (b1 - bp - 1), "pseudocentral index");
                    ++pseudo;
                }
            }
    auto Wf = io::read_cobordism(F.raw.at("pseudocentral-z3"));
    for (auto& r : ledger::enum_reducibles_4d(Wf).records)
        if (r.pseudocentral()) t.expect(ledger::normal_index(r, Wf, {}, {}) == -2, "pseudocentral fixture index");

    // shift identity on 500 random sheets
    size_t recs = 0;
    for (int k = 0; k < 500; ++k) {
        auto A = sheets::random_manifold(rng, "Y");
        auto B = sheets::random_manifold(rng, "Y'");
        auto W = sheets::random_cobordism(rng, A.Y, B.Y, "W");
        ledger::Chamber f, fp, s1 = A.sigma, s1p = B.sigma;
        for (auto& [c, v] : s1) v += (f[c] = 4 * std::uniform_int_distribution<int>(-3, 3)(rng));
        for (auto& [c, v] : s1p) v += (fp[c] = 4 * std::uniform_int_distribution<int>(-3, 3)(rng));
        for (auto& r : ledger::enum_reducibles_4d(W, 1).records) {
            if (r.central) continue;
            Int lhs = ledger::normal_index(r, W, s1, s1p) - ledger::normal_index(r, W, A.sigma, B.sigma);
            Int rhs = ((r.out.central ? Int(0) : fp[r.out.name]) - (r.in.central ? Int(0) : f[r.in.name])) / 2;
            t.expect(lhs == rhs, "shift identity fails on sheet " + std::to_string(k));
            ++recs;
        }
    }
    t.expect(cyl > 100 && pseudo > 10 && recs > 500, "too few records exercised");
    return verdict(t, std::to_string(cyl) + " cylinder, " + std::to_string(pseudo) + " pseudocentral, " +
                          std::to_string(recs) + " shifted records over 500 sheets");
}

Outcome shifts() {
    Tally t;
    std::mt19937 rng(5005);
    for (int k = 0; k < 500; ++k) {
        auto A = sheets::random_manifold(rng, "Y");
        auto B = sheets::random_manifold(rng, "Y'");
        auto W = sheets::random_cobordism(rng, A.Y, B.Y, "W");
        auto recs = ledger::enum_reducibles_4d(W, 2).records;
        auto r = ledger::shift_search(W, recs, A.sigma, B.sigma);
        t.expect(r.certified, "shift_search not certified: " + r.detail);
        // least n from the defining inequality, and the postcondition after shifting
        Int n = 0;
        for (auto& L : recs) {
            if (L.central || L.pseudocentral() || L.square > 0) continue;
            Int N = ledger::normal_index(L, W, A.sigma, B.sigma);
            while (N - W.B() < -2 * n) ++n;
            t.expect(ledger::normal_index(L, W, r.sigma, r.sigma_p) - W.B() >= 0, "shifted record still obstructed");
        }
        t.expect(r.n == n && r.f == -4 * n && r.fp == 4 * n, "shift amount differs from the scan");
    }
    size_t middles = 0;
    for (int k = 0; k < 500; ++k) {
        auto A = sheets::random_manifold(rng, "Y0", 6);
        auto B = sheets::random_manifold(rng, "Y1", 6);
        auto C = sheets::random_manifold(rng, "Y2", 6);
        auto W1 = sheets::random_cobordism(rng, A.Y, B.Y, "W1");
        auto W2 = sheets::random_cobordism(rng, B.Y, C.Y, "W2");
        auto R1 = ledger::enum_reducibles_4d(W1, 1).records, R2 = ledger::enum_reducibles_4d(W2, 1).records;
        auto res = ledger::compose_shift(W1, R1, W2, R2, A.sigma, B.sigma, C.sigma);
        t.expect(res.certified, "compose_shift not certified: " + res.detail);
        for (auto& m : res.middle) {
            Int gap = res.sigma1_plus.at(m.at) - res.sigma1_minus.at(m.at);
            t.expect(m.f1 % 4 == 0 && gap >= 0 && gap <= 4, "middle shift malformed at " + m.at);
            if (m.lo) t.expect(m.f1 >= *m.lo, "f1 below its interval");
            if (m.hi) t.expect(m.f1 <= *m.hi, "f1 above its interval");
            ++middles;
        }
        t.expect(bool(ledger::validate_sigma(B.Y, res.sigma1_plus)) && bool(ledger::validate_sigma(B.Y, res.sigma1_minus)),
                 "middle chambers violate mod 4");
    }
    return verdict(t, "500 shift searches and 500 composites certified, " + std::to_string(middles) + " middle intervals");
}

Outcome pseudocentral(const Fixtures& F) {
    Tally t;
    size_t cases = 0;
    // every finite group of order <= 200 over S^3 ends, each c
    std::vector<std::vector<long>> cs;
    groups::chains(200, {}, 1, cs);
    std::mt19937 rng(6006);
    for (auto& d : cs) {
        groups::Tuples T{d};
        std::vector<Int> f(d.begin(), d.end());
        auto G = FinAbGroup::from_factors(f);
        std::vector<std::vector<long>> cvals{std::vector<long>(d.size(), 0)};
        for (int k = 0; k < 2; ++k) {
            std::vector<long> c(d.size());
            for (size_t i = 0; i < d.size(); ++i) c[i] = static_cast<long>(rng() % d[i]);
            cvals.push_back(c);
        }
        for (auto& c : cvals) {
            Elem ce(c.begin(), c.end());
            auto W = over_spheres(G, ce);
            auto p = ledger::pseudocentral_count(W, {}, {});
            auto [fixed, moved] = groups::oracle_counts(T, c);
            long order = std::accumulate(d.begin(), d.end(), 1L, std::multiplies<long>());
            ++cases;
            t.expect(p.identity && p.pairs == p.central + 2 * p.pseudocentral, "identity flag or arithmetic");
            t.expect(static_cast<long>(p.pairs) == order && static_cast<long>(p.central) == fixed &&
                         static_cast<long>(p.pseudocentral) == moved,
                     "count differs from the tuple oracle");
        }
    }
    // random sheets with finite H^2(W), against the record enumeration
    for (int k = 0; k < 300; ++k) {
        auto A = sheets::random_manifold(rng, "Y");
        auto B = sheets::random_manifold(rng, "Y'");
        auto W = sheets::random_cobordism(rng, A.Y, B.Y, "W");
        if (!W.H2W.finite() || W.H2W.order() > 200) continue;
        auto recs = ledger::enum_reducibles_4d(W).records;
        for (auto& th : A.Y.centrals())
            for (auto& thp : B.Y.centrals()) {
                auto p = ledger::pseudocentral_count(W, th, thp);
                size_t central = 0, pseudo = 0;
                for (auto& r : recs) {
                    if (!r.in.central || !r.out.central || r.in.a != th || r.out.a != thp) continue;
                    if (r.central) ++central;
                    else ++pseudo;
                }
                ++cases;
                t.expect(p.identity && p.central == central && p.pseudocentral == pseudo, "record count mismatch");
            }
    }
    auto Wf = io::read_cobordism(F.raw.at("pseudocentral-z3"));
    auto p = ledger::pseudocentral_count(Wf, {}, {});
    t.expect(p.pairs == 3 && p.central == 1 && p.pseudocentral == 1, "Z/3 fixture");
    return verdict(t, std::to_string(cases + 1) + " cobordisms with |H2(W)| <= 200 exact");
}

Outcome flow_complex(const Fixtures& F) {
    Tally t;
    std::mt19937 rng(7007);
    for (int k = 0; k < 200; ++k) {
        auto fc = flowgen::random_category(rng);
        t.expect(bool(flow::validate_flowcat(fc)), "generator produced an invalid category");
        auto E = flow::cm_complex(fc, Rat(0));
        t.expect(E.C.d.dense() == flowgen::oracle_d(fc), "differential differs from the generator table");
        t.expect(flowgen::oracle_square_zero(fc) && bool(check_complex(E.C)), "d^2 != 0 on trial " + std::to_string(k));
    }
    for (auto& [name, fc] : F.flows)
        t.expect(flowgen::oracle_square_zero(fc) && bool(check_complex(flow::cm_complex(fc, Rat(0)).C)), "d^2 != 0 on " + name);

    std::uniform_int_distribution<int> pick(0, 1 << 20), factor(-2, 3);
    size_t violating = 0;
    for (int k = 0; k < 200; ++k) {
        auto fc = flowgen::random_category(rng);
        for (int m = 0; m < 6; ++m) {
            auto mut = fc;
            if (m % 2 == 0 && !fc.blocks.empty()) {
                auto it = std::next(mut.blocks.begin(), pick(rng) % mut.blocks.size());
                int f = factor(rng);
                if (f == 1) f = 2;
                mut.set(it->first.first, it->first.second, flow::op_scaled(it->second, f));
            } else {
                size_t a = pick(rng) % fc.size(), b = pick(rng) % fc.size();
                if (fc.rel(a, b) < 1) continue;
                auto op = flowgen::random_op(fc.objects[a], fc.objects[b], fc.degree(a, b), fc.period, rng);
                auto trial = mut;
                trial.set(a, b, flow::op_sum(mut.block(a, b), op));
                auto r = flow::validate_flowcat(trial);
                if (!r && r.tag != "flowcat.AX1") continue;
                mut = trial;
            }
            auto r = flow::validate_flowcat(mut);
            if (!flowgen::oracle_square_zero(mut)) {
                ++violating;
                t.expect(!r && r.tag == "flowcat.AX1", "AX1 violation accepted");
            } else {
                t.expect(bool(r), "valid mutation rejected: " + r.detail);
            }
        }
    }
    try {
        io::read_flowcat(F.raw.at("malformed"));
        t.expect(false, "malformed fixture accepted");
    } catch (const Error&) {
    }
    t.expect(violating > 50, "too few AX1 violations generated");
    return verdict(t, "200 random + " + std::to_string(F.flows.size()) + " fixture categories with d^2 = 0; " +
                          std::to_string(violating) + " AX1 mutations rejected");
}

// Suspend at every abelian object that default sections fit.
template <class Fn>
void for_each_suspendable(const flow::FlowCategory& fc, Fn fn) {
    for (size_t r = 0; r < fc.size(); ++r)
        if (fc.objects[r].kind == flow::Kind::abelian && flowgen::defaults_apply(fc, r) && flowgen::oracle_default_ok(fc, r))
            fn(r, flow::default_sections(fc, fc.objects[r].name));
}

Outcome suspension(const Fixtures& F) {
    Tally t;
    size_t suspended = 0;
    auto check = [&](const std::string& name, const flow::FlowCategory& fc, const flow::SectionData& s) {
        auto S = flow::suspend(fc, s);
        t.expect(bool(flow::validate_flowcat(S)) && flowgen::oracle_square_zero(S), "suspension invalid: " + name);
        auto M = flow::sigma_rho(fc, s);
        t.expect(bool(flow::validate_bimodule(M)), "sigma_rho not a bimodule: " + name);
        t.expect(flowgen::oracle_ranks(fc) == flowgen::oracle_ranks(M.target), "rank change under suspension: " + name);
        t.expect(flowgen::oracle_cone_acyclic(flow::induced_map(M, Rat(0)).phi.dense(), fc, M.target),
                 "sigma_rho not a quasi-isomorphism: " + name);
        ++suspended;
    };
    for (auto& [name, fc] : F.flows) for_each_suspendable(fc, [&](size_t, const flow::SectionData& s) { check(name, fc, s); });
    {
        auto& fc = flow_named(F, "rho-plus-beta");
        check("sections-rho", fc, io::read_sections(F.raw.at("sections-rho"), fc));
    }
    size_t fixtures = suspended;
    std::mt19937 rng(8008);
    for (int k = 0; k < 600 && suspended < fixtures + 200; ++k) {
        auto fc = flowgen::random_category(rng);
        for_each_suspendable(fc, [&](size_t, const flow::SectionData& s) { check("random " + std::to_string(k), fc, s); });
    }

    // W-hat o Sigma = W, block by block
    size_t lifts = 0;
    for (Rat c : {Rat(1), Rat(-1), Rat(2), Rat(3)})
        for (Rat b : {Rat(1), Rat(-2), Rat(3)}) {
            Rat k = c * b;
            flow::FlowCategory C, Cp;
            C.add("rho", flow::Kind::abelian, 0);
            Cp.add("gamma'", flow::Kind::irreducible, -1);
            Cp.add("alpha'", flow::Kind::abelian, -2);
            Cp.set("gamma'", "alpha'", {{{0, 0}, c}});
            flow::Bimodule w{C, Cp, 0, {}};
            w.set("rho", "gamma'", {{{1, 1}, b}});
            w.set("rho", "alpha'", {{{0, 1}, k / 2}});
            t.expect(bool(flow::validate_bimodule(w)), "W fixture invalid");
            auto s = flow::default_sections(C, "rho");
            flow::BimoduleSections ws{{{"gamma'", flowgen::irr_id(b)}},
                                      {{"alpha'", flow::op_scaled(flow::op_identity(flow::Kind::abelian), k)}}};
            auto Wh = flow::lift_Wplus(w, s, ws);
            t.expect(bool(flow::validate_bimodule(Wh)), "lifted bimodule invalid");
            t.expect(flow::same_blocks(flow::compose(flow::sigma_rho(C, s), Wh), w), "W-hat o Sigma != W");
            ++lifts;
        }
    for (int k = 0; k < 50; ++k) {
        // irreducible squares carried identically, rho mapping nowhere
        flow::FlowCategory X;
        flowgen::add_square(X, "a", 2 * std::uniform_int_distribution<int>(-2, 2)(rng), rng);
        if (k % 2) flowgen::add_square(X, "b", std::uniform_int_distribution<int>(-3, 3)(rng), rng);
        auto C = X;
        C.add("rho", flow::Kind::abelian, 2 * std::uniform_int_distribution<int>(-3, 3)(rng));
        flow::Bimodule w{C, X, 0, {}};
        for (auto& o : X.objects) w.set(o.name, o.name, flowgen::irr_id(1));
        t.expect(bool(flow::validate_bimodule(w)), "identity extension invalid");
        auto s = flow::default_sections(C, "rho");
        auto Wh = flow::lift_Wplus(w, s, {});
        t.expect(flow::same_blocks(flow::compose(flow::sigma_rho(C, s), Wh), w), "W-hat o Sigma != W (extension)");
        ++lifts;
    }
    return verdict(t, std::to_string(fixtures) + " fixture and " + std::to_string(suspended - fixtures) +
                          " random suspensions; " + std::to_string(lifts) + " lifts block-exact");
}

// over Z when every coefficient is integral, else over Q
Report floer_iso(const flow::FlowCategory& fc) {
    for (auto& [ab, op] : fc.blocks)
        for (auto& [g, v] : op)
            if (denominator(v) != 1) return equivariant::verify_floer_iso(fc, Rat(0));
    return equivariant::verify_floer_iso(fc, Int(0));
}

Outcome wall_crossing(const Fixtures& F) {
    Tally t;
    std::mt19937 rng(9009);
    size_t iso = 0, triangles = 0, steps = 0;
    for (auto& [name, fc] : F.flows) {
        auto r = floer_iso(fc);
        t.expect(bool(r), "floer iso fails on " + name + ": " + r.detail);
        ++iso;
        for_each_suspendable(fc, [&](size_t, const flow::SectionData& s) {
            auto W = flow::wallcross(fc, s, Rat(0));
            t.expect(W.exact, "triangle not exact on " + name + ": " + W.detail);
            ++triangles;
        });
    }
    {
        auto& fc = flow_named(F, "rho-plus-beta");
        auto s = io::read_sections(F.raw.at("sections-rho"), fc);
        for (auto W : {flow::wallcross(fc, s, Rat(0)).exact, flow::wallcross(fc, s, Fp(0, 3)).exact}) {
            t.expect(W, "rho-plus-beta with supplied sections");
            ++triangles;
        }
    }
    for (int k = 0; k < 200; ++k) {
        auto fc = flowgen::random_category(rng);
        t.expect(bool(floer_iso(fc)), "floer iso fails on random " + std::to_string(k));
        ++iso;
        for_each_suspendable(fc, [&](size_t r, const flow::SectionData& s) {
            auto W = flow::wallcross(fc, s, Rat(0));
            t.expect(W.exact, "random triangle not exact: " + W.detail);
            if (mod_floor(fc.objects[r].grading, 2) == 0) t.expect(W.chi0 - W.chi1 == 1, "chi drop != 1 across one wall");
            ++triangles;
        });
    }

    // the three-walls fixture along the path between its two chambers
    auto ledger_check = [&](const flow::FlowCategory& fc, const ledger::Chamber& s0, const ledger::Chamber& s1,
                            const std::string& what) {
        std::vector<std::string> classes;
        for (auto& st : ledger::chamber_path(s0, s1)) {
            t.expect(st.direction > 0, what + ": downward step");
            classes.push_back(st.at);
        }
        auto L = flow::chamber_ledger(fc, classes, Rat(0));
        for (size_t i = 1; i < L.size(); ++i) t.expect(L[i - 1].chi - L[i].chi == 1, what + ": step drop != 1");
        Int dsig = 0;
        for (auto& [c, v] : s1) dsig += v - s0.at(c);
        t.expect(4 * (L.front().chi - L.back().chi) == dsig, what + ": cumulative drop != sum/4");
        steps += classes.size();
    };
    ledger_check(flow_named(F, "three-walls"), io::read_chamber(F.raw.at("walls-s0")), io::read_chamber(F.raw.at("walls-s1")),
                 "three-walls");
    for (int k = 0; k < 60; ++k) {
        flow::FlowCategory fc;
        int walls = std::uniform_int_distribution<int>(1, 4)(rng);
        ledger::Chamber s0, s1;
        for (int i = 0; i < walls; ++i) {
            auto r = "rho" + std::to_string(i), b = "beta" + std::to_string(i);
            long g = 2 * std::uniform_int_distribution<int>(-3, 3)(rng);
            fc.add(r, flow::Kind::abelian, g);
            fc.add(b, flow::Kind::irreducible, g - 2);
            int n = std::uniform_int_distribution<int>(0, 3)(rng);
            if (n) fc.set(r, b, {{{1, 1}, n}});
            s0[r] = 4 * std::uniform_int_distribution<int>(-2, 2)(rng) + 2 * (i % 2);
            s1[r] = s0[r] + 4 * std::uniform_int_distribution<int>(0, 2)(rng);
        }
        ledger_check(fc, s0, s1, "random walls " + std::to_string(k));
    }
    return verdict(t, std::to_string(iso) + " floer isos, " + std::to_string(triangles) + " exact triangles, " +
                          std::to_string(steps) + " chamber steps each dropping chi by 1");
}

template <class K>
void check_triple(Tally& t, const flow::FlowCategory& fc, const K& proto, const std::string& ring, const std::string& what) {
    auto E = flow::cm_complex(fc, proto);
    auto T = equivariant::equivariant_triple(E, ring);
    t.expect(T.exact && T.composites_zero, what + " over " + ring + ": " + T.detail);
    if (T.graded)
        for (auto& r : T.rows) t.expect(r.infty == orbitgen::oracle_infty(E, r.grading), what + ": I^inf rank differs");
}

Outcome equivariant_suite(const Fixtures& F) {
    Tally t;
    size_t n = 0;
    for (auto& [name, fc] : F.flows) {
        check_triple(t, fc, Rat(0), "q", name);
        check_triple(t, fc, Fp(0, 3), "fp:3", name);
        ++n;
    }
    std::mt19937 rng(1010);
    for (int k = 0; k < 100; ++k) {
        auto fc = orbitgen::orbit_category(rng, false);
        check_triple(t, fc, Rat(0), "q", "random " + std::to_string(k));
        check_triple(t, fc, Fp(0, 5), "fp:5", "random " + std::to_string(k));
        ++n;
    }
    // point orbit: I^- is R[U] on a generator in degree 0
    auto P = equivariant::equivariant_triple(flow::cm_complex(flow_named(F, "point-orbit"), Rat(0)), "q");
    t.expect(P.minus.free == 1 && P.minus.torsion.empty() && P.infty.free == 1 && P.plus.free == 1, "point tower");
    for (auto& r : P.rows) {
        bool four = mod_floor(r.grading, 4) == 0;
        t.expect(r.minus == (four && r.grading <= 0 ? 1u : 0u) && r.infty == (four ? 1u : 0u) &&
                     r.plus == (four && r.grading >= 0 ? 1u : 0u),
                 "point tower rank in grading " + std::to_string(r.grading));
    }
    // free orbits: I^inf vanishes
    for (int k = 0; k < 60; ++k) {
        auto fc = orbitgen::orbit_category(rng, true);
        auto T = equivariant::equivariant_triple(flow::cm_complex(fc, Rat(0)), "q");
        t.expect(T.infty.free == 0 && T.infty.torsion.empty(), "free orbit with I^inf != 0");
        for (auto& r : T.rows) t.expect(r.infty == 0, "free orbit with I^inf != 0 in a grading");
    }
    return verdict(t, std::to_string(n) + " categories exact in every grading; point tower and free-orbit vanishing");
}

// d^2 = 0 face by face from the reference incidences alone
bool oracle_boundary_squared(const strata::StratifiedChain& X) {
    for (size_t a = 0; a < X.size(); ++a)
        for (size_t c = 0; c < X.size(); ++c) {
            if (X.face(c).dim != X.face(a).dim - 2) continue;
            long s = 0;
            for (size_t b = 0; b < X.size(); ++b)
                if (X.covers(a, b) && X.covers(b, c)) s += X.reference(a, b) * X.reference(b, c);
            if (s) return false;
        }
    return true;
}

Outcome strata_suite(const Fixtures& F) {
    Tally t;
    for (auto& [name, X] : F.chains) {
        auto r = strata::validate(X);
        t.expect(bool(r), name + " invalid: " + r.detail);
        t.expect(strata::boundary(X).squares_to_zero && oracle_boundary_squared(X), "d^2 != 0 on " + name);
    }
    auto bad = io::read_chain(F.raw.at("theta-graph-bad"));
    t.expect(strata::validate(bad).tag == "strata.1d-sign", "bad theta graph not rejected");

    // all eight orientations of the theta graph edges
    auto theta = chain_named(F, "theta-graph");
    int accepted = 0;
    for (int m = 0; m < 8; ++m) {
        auto X = theta;
        int bit = 0;
        for (size_t i = 0; i < X.size(); ++i)
            if (X.face(i).dim == 1) X.face(i).orientation = (m >> bit++) & 1 ? -1 : 1;
        accepted += bool(strata::validate(X));
    }
    t.expect(accepted == 6, "theta graph accepts " + std::to_string(accepted) + " of 8");

    size_t products = 0;
    for (auto& [a, X] : F.chains)
        for (auto& [b, Y] : F.chains) {
            if (X.size() * Y.size() > 80) continue;
            t.expect(strata::leibniz_holds(X, Y), "Leibniz fails for " + a + " x " + b);
            ++products;
        }
    auto cut = io::read_cut(F.raw.at("cut-interval"));
    t.expect(strata::truncation_sign_holds(chain_named(F, "interval"), cut), "truncation sign");
    auto zero = io::read_zero_locus(F.raw.at("zero-disk-center"));
    auto& disk = chain_named(F, "disk");
    t.expect(strata::blowup_identity_holds(disk, zero), "blowup identity");

    // singular homology of the standard spaces, free ranks by degree
    std::map<std::string, std::map<long, size_t>> known = {
        {"point", {{0, 1}}}, {"circle", {{0, 1}, {1, 1}}}, {"sphere", {{0, 1}, {2, 1}}}, {"torus", {{0, 1}, {1, 2}, {2, 1}}}};
    for (auto& [name, want] : known) {
        auto& X = chain_named(F, name);
        std::map<long, size_t> got;
        bool torsion = false;
        for (auto& h : homology(strata::gm_complex({X}, X.dim()))) {
            if (h.free) got[h.grading] = h.free;
            torsion |= !h.torsion.empty();
        }
        t.expect(got == want && !torsion, "homology of " + name);
    }
    return verdict(t, std::to_string(F.chains.size()) + " chains with d^2 = 0; theta 6/8; " + std::to_string(products) +
                          " products, truncation, blowup; pt/S1/S2/T2 homology");
}

}  // namespace

int main(int argc, char** argv) {
    fs::path dir = argc > 1 ? argv[1] : "fixtures";
    Fixtures F;
    try {
        F = load_fixtures(dir);
    } catch (const std::exception& e) {
        std::printf("cannot load fixtures from %s: %s\n", dir.c_str(), e.what());
        return 1;
    }
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"lens-casson", lens_casson},
        {"dedekind-reciprocity", reciprocity},
        {"reducible-enumeration", enumeration},
        {"normal-index", [&] { return normal_index_suite(F); }},
        {"shift-and-compose", shifts},
        {"pseudocentral-count", [&] { return pseudocentral(F); }},
        {"flow-complex", [&] { return flow_complex(F); }},
        {"suspension", [&] { return suspension(F); }},
        {"wall-crossing", [&] { return wall_crossing(F); }},
        {"equivariant-triple", [&] { return equivariant_suite(F); }},
        {"strata", [&] { return strata_suite(F); }},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.ok;
        std::printf("%s %2zu %-22s %6.2fs  %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
