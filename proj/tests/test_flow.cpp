#include <gtest/gtest.h>

#include <random>

#include "support/random_flow.hpp"

using namespace instanton;
using namespace instanton::flow;
using namespace flowgen;

namespace {

FlowCategory lone_rho(long k = 0) {
    FlowCategory fc;
    fc.add("rho", Kind::abelian, k);
    return fc;
}

FlowCategory rho_beta(Rat n) {
    FlowCategory fc;
    fc.add("rho", Kind::abelian, 0);
    fc.add("beta", Kind::irreducible, -2);
    if (n != 0) fc.set("rho", "beta", {{{1, 1}, n}});
    return fc;
}

FlowCategory cancelling_pair(Rat c = 1) {
    FlowCategory fc;
    fc.add("alpha", Kind::irreducible, 1);
    fc.add("beta", Kind::irreducible, 0);
    fc.set("alpha", "beta", irr_id(c));
    return fc;
}

}  // namespace

// ---------------------------------------------------------------------------
// validate_flowcat

TEST(FlowValidate, SingleIrreducibleIsValid) {
    FlowCategory fc;
    fc.add("alpha", Kind::irreducible, 0);
    EXPECT_TRUE(validate_flowcat(fc));
}

TEST(FlowValidate, CancellingPairIsValid) { EXPECT_TRUE(validate_flowcat(cancelling_pair())); }

TEST(FlowValidate, EquivarianceWitness) {
    auto fc = cancelling_pair();
    fc.set("alpha", "beta", {{{0, 0}, 1}, {{1, 1}, 2}});
    auto r = validate_flowcat(fc);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.tag, "flowcat.equivariance");
    EXPECT_NE(r.detail.find("u g0"), std::string::npos);
}

TEST(FlowValidate, DegreeAndSubmersion) {
    auto fc = cancelling_pair();
    fc.set("alpha", "beta", {{{0, 1}, 1}});
    EXPECT_EQ(validate_flowcat(fc).tag, "flowcat.degree");
    FlowCategory z = cancelling_pair();
    z.period = 0;
    z.set("beta", "alpha", {{{1, 0}, 1}});
    EXPECT_EQ(validate_flowcat(z).tag, "flowcat.submersive");
    z.period = 3;
    EXPECT_EQ(validate_flowcat(z).tag, "flowcat.period");
}

TEST(FlowValidate, AX1NamesTheTriple) {
    FlowCategory fc;
    fc.add("a", Kind::irreducible, 2);
    fc.add("b", Kind::irreducible, 1);
    fc.add("c", Kind::irreducible, 0);
    fc.set("a", "b", irr_id(1));
    fc.set("b", "c", irr_id(1));
    auto r = validate_flowcat(fc);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.tag, "flowcat.AX1");
    EXPECT_NE(r.detail.find("(a, c)"), std::string::npos);
    EXPECT_NE(r.detail.find("{b}"), std::string::npos);
}

// ---------------------------------------------------------------------------
// cm_complex

TEST(FlowComplex, SingleIrreducible) {
    FlowCategory fc;
    fc.add("alpha", Kind::irreducible, 0);
    auto H = homology(cm_complex(fc, Rat(0)).C);
    ASSERT_EQ(H.size(), 2u);
    EXPECT_EQ(H[0].grading, 0);
    EXPECT_EQ(H[0].free, 1u);
    EXPECT_EQ(H[1].grading, 3);
    EXPECT_EQ(H[1].free, 1u);
}

TEST(FlowComplex, CancellingPairAcyclic) {
    auto E = cm_complex(cancelling_pair(), Int(0));
    for (auto& h : homology(E.C)) EXPECT_TRUE(h.zero());
    // d(alpha.g3) = -beta.g3 by the dimension sign
    EXPECT_EQ(E.C.d.get(3, 1), Int(-1));
    EXPECT_EQ(E.C.d.get(2, 0), Int(1));
}

TEST(FlowComplex, IrreducibleToCentralTorsion) {
    FlowCategory fc;
    fc.add("theta", Kind::central, 0);
    fc.add("alpha", Kind::irreducible, 1);
    fc.set("alpha", "theta", {{{0, 0}, 2}});
    auto HZ = homology(cm_complex(fc, Int(0)).C);
    auto HQ = homology(cm_complex(fc, Rat(0)).C);
    ASSERT_EQ(HZ[0].grading, 0);
    EXPECT_EQ(HZ[0].free, 0u);
    ASSERT_EQ(HZ[0].torsion.size(), 1u);
    EXPECT_EQ(HZ[0].torsion[0], Int(2));
    EXPECT_TRUE(HQ[0].zero());
    // alpha.g3 survives in grading 4
    EXPECT_EQ(oracle_ranks(fc), (std::map<long, size_t>{{4, 1}}));
}

TEST(FlowComplex, InvalidCategoryRejected) {
    auto fc = cancelling_pair();
    fc.set("alpha", "beta", {{{0, 0}, 1}, {{1, 1}, 2}});
    try {
        cm_complex(fc, Rat(0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.tag, "invalid-flow-category");
    }
}

TEST(FlowComplex, RandomCategoriesSquareToZero) {
    std::mt19937 rng(20240601);
    int nontrivial = 0;
    for (int t = 0; t < 200; ++t) {
        auto fc = random_category(rng);
        ASSERT_TRUE(validate_flowcat(fc)) << validate_flowcat(fc).detail;
        auto E = cm_complex(fc, Rat(0));
        EXPECT_TRUE(check_complex(E.C)) << "trial " << t;
        EXPECT_TRUE(equivariant::check_u(E)) << "trial " << t;
        EXPECT_TRUE(E.C.d.dense() == oracle_d(fc)) << "trial " << t;
        EXPECT_TRUE(oracle_square_zero(fc));
        EXPECT_EQ(total_rank(homology(E.C)), [&] {
            long s = 0;
            for (auto& [k, v] : oracle_ranks(fc)) s += static_cast<long>(v);
            return s;
        }());
        if (fc.blocks.size() >= 3) ++nontrivial;
    }
    EXPECT_GT(nontrivial, 100);
}

TEST(FlowComplex, EveryAX1MutationRejected) {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> pick(0, 1 << 20), factor(-2, 3);
    int violating = 0, accepted = 0;
    for (int t = 0; t < 200; ++t) {
        auto fc = random_category(rng);
        for (int m = 0; m < 6; ++m) {
            auto mut = fc;
            if (m % 2 == 0 && !fc.blocks.empty()) {
                auto it = std::next(mut.blocks.begin(), pick(rng) % mut.blocks.size());
                int f = factor(rng);
                if (f == 1) f = 2;
                mut.set(it->first.first, it->first.second, op_scaled(it->second, f));
            } else {
                size_t a = pick(rng) % fc.size(), b = pick(rng) % fc.size();
                if (fc.rel(a, b) < 1) continue;
                auto op = random_op(fc.objects[a], fc.objects[b], fc.degree(a, b), fc.period, rng);
                // keep only equivariant additions so that AX1 is the only thing at stake
                auto trial = mut;
                trial.set(a, b, op_sum(mut.block(a, b), op));
                auto r = validate_flowcat(trial);
                if (!r && r.tag != "flowcat.AX1") continue;
                mut = trial;
            }
            bool zero = oracle_square_zero(mut);
            auto r = validate_flowcat(mut);
            if (!zero) {
                ++violating;
                EXPECT_FALSE(r);
                EXPECT_EQ(r.tag, "flowcat.AX1");
            } else {
                ++accepted;
                EXPECT_TRUE(r) << r.detail;
            }
        }
    }
    EXPECT_GT(violating, 50);
    EXPECT_GT(accepted, 50);
}

// ---------------------------------------------------------------------------
// bimodules

TEST(Bimodule, IdentityInducesIdentity) {
    std::mt19937 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto fc = random_category(rng);
        auto f = induced_map(identity(fc), Rat(0));
        auto P = f.phi.dense();
        for (size_t i = 0; i < P.rows(); ++i)
            for (size_t j = 0; j < P.cols(); ++j) EXPECT_EQ(P(i, j), Rat(i == j ? 1 : 0));
    }
}

TEST(Bimodule, RelationSignsOnCancellingPair) {
    auto C = cancelling_pair();
    Bimodule M{C, C, 0, {}};
    M.set("alpha", "alpha", irr_id(1));
    M.set("beta", "beta", irr_id(-1));
    auto r = validate_bimodule(M);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.tag, "bimodule.relation");
    M.set("beta", "beta", irr_id(1));
    EXPECT_TRUE(validate_bimodule(M));
}

TEST(Bimodule, SigmaOnLoneRho) {
    auto fc = lone_rho();
    auto s = default_sections(fc, "rho");
    auto M = sigma_rho(fc, s);
    auto f = induced_map(M, Rat(0));
    // rho.s0, rho.s2 -> S.g0, S.g3, rho'.s0, rho'.s2
    auto P = f.phi.dense();
    ASSERT_EQ(P.rows(), 4u);
    EXPECT_EQ(P(1, 1), Rat(1));        // s2 -> g3
    EXPECT_EQ(P(3, 0), Rat(1, 2));     // s0 -> kappa s2'
    EXPECT_EQ(P(0, 0), Rat(0));
    EXPECT_EQ(P(2, 0), Rat(0));
    // both sides Q + Q[2], map iso
    EXPECT_EQ(oracle_ranks(fc), (std::map<long, size_t>{{0, 1}, {2, 1}}));
    EXPECT_EQ(oracle_ranks(M.target), oracle_ranks(fc));
    EXPECT_TRUE(oracle_cone_acyclic(P, fc, M.target));
}

TEST(Bimodule, CompositeInducesProduct) {
    // C = rho -> beta (n = 1); Sigma then W_hat then 3 * identity
    FlowCategory C;
    C.add("rho", Kind::abelian, 0);
    C.add("beta", Kind::irreducible, -2);
    C.set("rho", "beta", {{{1, 1}, 1}});
    auto s = default_sections(C, "rho");
    auto Sg = sigma_rho(C, s);
    auto S = Sg.target;
    auto Id3 = identity(S);
    for (auto& [k, op] : Id3.blocks) op = op_scaled(op, 3);
    ASSERT_TRUE(validate_bimodule(Id3));
    auto MN = compose(Sg, Id3);
    auto f = induced_map(Sg, Rat(0)), g = induced_map(Id3, Rat(0)), h = induced_map(MN, Rat(0));
    EXPECT_TRUE(h.phi.dense() == g.phi.dense() * f.phi.dense());
}

TEST(Bimodule, IdentityAndAssociativityLaws) {
    std::mt19937 rng(31);
    int checked = 0;
    for (int t = 0; t < 300 && checked < 40; ++t) {
        auto fc = random_category(rng);
        std::vector<size_t> abel;
        for (size_t a = 0; a < fc.size(); ++a)
            if (fc.objects[a].kind == Kind::abelian && defaults_apply(fc, a) && oracle_default_ok(fc, a))
                abel.push_back(a);
        if (abel.size() < 2) continue;
        auto s1 = default_sections(fc, fc.objects[abel[0]].name);
        auto M1 = sigma_rho(fc, s1);
        auto n2 = fc.objects[abel[1]].name;
        if (!defaults_apply(M1.target, M1.target.index(n2)) || !oracle_default_ok(M1.target, M1.target.index(n2))) continue;
        auto M2 = sigma_rho(M1.target, default_sections(M1.target, n2));
        auto M3 = identity(M2.target);
        for (auto& [k, op] : M3.blocks) op = op_scaled(op, -2);
        EXPECT_TRUE(same_blocks(compose(identity(fc), M1), M1));
        EXPECT_TRUE(same_blocks(compose(M1, identity(M1.target)), M1));
        auto left = compose(compose(M1, M2), M3), right = compose(M1, compose(M2, M3));
        EXPECT_TRUE(same_blocks(left, right));
        EXPECT_TRUE(validate_bimodule(left)) << validate_bimodule(left).detail;
        ++checked;
    }
    EXPECT_GE(checked, 10);
}

// ---------------------------------------------------------------------------
// homotopies

namespace {

// solve A x = b over Q; nullopt if inconsistent
std::optional<std::vector<Rat>> solve(const Matrix<Rat>& A, const std::vector<Rat>& b) {
    Matrix<Rat> aug(A.rows(), A.cols() + 1, Rat(0));
    for (size_t i = 0; i < A.rows(); ++i) {
        for (size_t j = 0; j < A.cols(); ++j) aug(i, j) = A(i, j);
        aug(i, A.cols()) = b[i];
    }
    auto e = rref(aug);
    std::vector<Rat> x(A.cols(), Rat(0));
    for (size_t r = 0; r < e.pivots.size(); ++r) {
        if (e.pivots[r] == A.cols()) return std::nullopt;
        x[e.pivots[r]] = e.R(r, A.cols());
    }
    return x;
}

}  // namespace

TEST(Homotopy, ZeroBetweenEqualBimodules) {
    auto C = cancelling_pair();
    Homotopy h{identity(C), identity(C), {}};
    EXPECT_TRUE(validate_homotopy(h));
    auto K = induced_homotopy(h, Rat(0));
    EXPECT_TRUE(K.entries().empty());
}

TEST(Homotopy, RescaledCancellingPair) {
    // Phi1 - Phi0 = (lambda - 1) id on an acyclic complex; solve d K + K d = that for K
    auto C = cancelling_pair();
    Rat lambda = 3;
    auto M0 = identity(C), M1 = identity(C);
    for (auto& [k, op] : M1.blocks) op = op_scaled(op, lambda);
    ASSERT_TRUE(validate_bimodule(M1));
    // unknowns: K entries from generator j to i with deg_i = deg_j + 1
    auto G = oracle_gens(C);
    auto d = oracle_d(C);
    std::vector<std::pair<size_t, size_t>> unk;
    for (size_t j = 0; j < G.size(); ++j)
        for (size_t i = 0; i < G.size(); ++i)
            if (G[i].deg == G[j].deg + 1) unk.push_back({i, j});
    size_t n = G.size();
    Matrix<Rat> A(n * n, unk.size(), Rat(0));
    std::vector<Rat> b(n * n, Rat(0));
    for (size_t u = 0; u < unk.size(); ++u) {
        auto [ki, kj] = unk[u];
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Rat v = 0;
                if (kj == j) v += d(i, ki);   // (d K)(i, j)
                if (ki == i) v += d(kj, j);   // (K d)(i, j)
                A(i * n + j, u) += v;
            }
    }
    for (size_t i = 0; i < n; ++i) b[i * n + i] = lambda - 1;
    auto x = solve(A, b);
    ASSERT_TRUE(x.has_value());
    // translate K back into blocks: H = (-1)^{dim} K
    Homotopy h{M0, M1, {}};
    for (size_t u = 0; u < unk.size(); ++u) {
        if ((*x)[u] == 0) continue;
        auto [ki, kj] = unk[u];
        Rat v = (G[kj].dim % 2 ? -1 : 1) * (*x)[u];
        h.blocks[{G[kj].obj, G[ki].obj}][{G[kj].g, G[ki].g}] = v;
    }
    auto r = validate_homotopy(h);
    ASSERT_TRUE(r) << r.detail;
    auto K = induced_homotopy(h, Rat(0)).dense();
    auto lhs = d * K + K * d;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) EXPECT_EQ(lhs(i, j), Rat(i == j ? 2 : 0));
    // perturb: relation must fail
    h.blocks.begin()->second.begin()->second += 1;
    auto bad = validate_homotopy(h);
    EXPECT_FALSE(bad);
}

TEST(Homotopy, WrongDegree) {
    auto C = cancelling_pair();
    Homotopy h{identity(C), identity(C), {}};
    h.blocks[{0, 0}] = irr_id(1);
    EXPECT_EQ(validate_homotopy(h).tag, "degree-mismatch");
    Homotopy s{identity(C), identity(C), {}};
    s.M1.shift = 8;
    EXPECT_EQ(validate_homotopy(s).tag, "degree-mismatch");
}

// ---------------------------------------------------------------------------
// suspension

TEST(Suspend, LoneRho) {
    auto S = suspend(lone_rho(), default_sections(lone_rho(), "rho"));
    ASSERT_EQ(S.size(), 2u);
    EXPECT_EQ(S.objects[0].name, "S[rho]");
    EXPECT_EQ(S.objects[0].kind, Kind::irreducible);
    EXPECT_EQ(S.objects[0].grading, -1);
    EXPECT_EQ(S.objects[1].name, "rho'");
    EXPECT_EQ(S.objects[1].kind, Kind::abelian);
    EXPECT_EQ(S.objects[1].grading, -2);
    ASSERT_EQ(S.blocks.size(), 1u);
    EXPECT_EQ(S.block(0, 1), (Op{{{0, 0}, 1}}));
    // cone of C(SO(3))[-1] -> C(S^2)[-2]: g0 cancels s0
    EXPECT_EQ(oracle_ranks(S), (std::map<long, size_t>{{0, 1}, {2, 1}}));
}

TEST(Suspend, RhoBetaWithCount) {
    for (Rat n : {Rat(1), Rat(2), Rat(-3)}) {
        auto fc = rho_beta(n);
        auto s = default_sections(fc, "rho");
        auto S = suspend(fc, s);
        EXPECT_TRUE(validate_flowcat(S));
        auto W = wallcross(fc, s, Rat(0));
        ASSERT_EQ(W.V2.size(), 1u);
        EXPECT_EQ(W.V2.at("beta"), n);
    }
}

TEST(Suspend, IncompatibleSections) {
    auto fc = rho_beta(2);
    SectionData s{"rho", {{"beta", irr_id(3)}}, {}};
    try {
        suspend(fc, s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.tag, "section-incompatible");
    }
    try {
        suspend(rho_beta(1), default_sections(rho_beta(1), "beta"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.tag, "not-abelian");
    }
}

TEST(Suspend, DefaultSectionsShape) {
    auto s = default_sections(rho_beta(2), "rho");
    EXPECT_TRUE(s.Z.empty());
    ASSERT_EQ(s.B.size(), 1u);
    EXPECT_EQ(s.B.at("beta"), irr_id(2));
    EXPECT_TRUE(default_sections(lone_rho(), "rho").B.empty());
    FlowCategory hi;
    hi.add("rho", Kind::abelian, 0);
    hi.add("beta", Kind::irreducible, -4);
    hi.set("rho", "beta", {{{0, 1}, 1}});  // s0 -> g3, fiber degree 3
    ASSERT_TRUE(validate_flowcat(hi));
    try {
        default_sections(hi, "rho");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.tag, "higher-block-present");
    }
}

TEST(Suspend, RandomInputsValidate) {
    std::mt19937 rng(404);
    int built = 0, refused = 0;
    for (int t = 0; t < 400 && built < 200; ++t) {
        auto fc = random_category(rng);
        for (size_t r = 0; r < fc.size(); ++r) {
            if (fc.objects[r].kind != Kind::abelian || !defaults_apply(fc, r)) continue;
            auto s = default_sections(fc, fc.objects[r].name);
            if (oracle_default_ok(fc, r)) {
                auto S = suspend(fc, s);
                EXPECT_TRUE(validate_flowcat(S));
                EXPECT_TRUE(oracle_square_zero(S));
                EXPECT_EQ(S.size(), fc.size() + 1);
                ++built;
            } else {
                try {
                    suspend(fc, s);
                    ADD_FAILURE() << "expected section-incompatible";
                } catch (const Error& e) {
                    EXPECT_EQ(e.tag, "section-incompatible");
                }
                ++refused;
            }
        }
    }
    EXPECT_GE(built, 200);
    EXPECT_GT(refused, 0);
}

TEST(Sigma, QuasiIsomorphismOnRandomInputs) {
    std::mt19937 rng(909);
    int checked = 0;
    for (int t = 0; t < 400 && checked < 100; ++t) {
        auto fc = random_category(rng);
        for (size_t r = 0; r < fc.size(); ++r) {
            if (fc.objects[r].kind != Kind::abelian || !defaults_apply(fc, r) || !oracle_default_ok(fc, r)) continue;
            auto M = sigma_rho(fc, default_sections(fc, fc.objects[r].name));
            EXPECT_TRUE(validate_bimodule(M));
            auto f = induced_map(M, Rat(0));
            EXPECT_EQ(oracle_ranks(fc), oracle_ranks(M.target));
            EXPECT_TRUE(oracle_cone_acyclic(f.phi.dense(), fc, M.target));
            ++checked;
        }
    }
    EXPECT_GE(checked, 100);
}

TEST(Sigma, DisjointIrreducibleAndSingleBlock) {
    auto fc = lone_rho();
    fc.add("alpha", Kind::irreducible, 4);
    auto M = sigma_rho(fc, default_sections(fc, "rho"));
    EXPECT_TRUE(oracle_cone_acyclic(induced_map(M, Rat(0)).phi.dense(), fc, M.target));
    EXPECT_EQ(oracle_ranks(fc), (std::map<long, size_t>{{0, 1}, {2, 1}, {4, 1}, {7, 1}}));
    auto g = rho_beta(1);
    auto N = sigma_rho(g, default_sections(g, "rho"));
    EXPECT_EQ(oracle_ranks(g), oracle_ranks(N.target));
    EXPECT_TRUE(oracle_cone_acyclic(induced_map(N, Rat(0)).phi.dense(), g, N.target));
}

// ---------------------------------------------------------------------------
// W_hat

namespace {

// C = {rho}; C' = {gamma' -> alpha'}, gamma'.g0 -> c alpha'.s0
Bimodule wplus_fixture(Rat c, Rat b, Rat k) {
    FlowCategory C = lone_rho(), Cp;
    Cp.add("gamma'", Kind::irreducible, -1);
    Cp.add("alpha'", Kind::abelian, -2);
    Cp.set("gamma'", "alpha'", {{{0, 0}, c}});
    Bimodule w{C, Cp, 0, {}};
    w.set("rho", "gamma'", {{{1, 1}, b}});
    w.set("rho", "alpha'", {{{0, 1}, k / 2}});
    return w;
}

}  // namespace

TEST(Wplus, TrivialExtension) {
    FlowCategory C = lone_rho();
    C.add("alpha", Kind::irreducible, 3);
    FlowCategory Cp;
    Cp.add("alpha", Kind::irreducible, 3);
    Bimodule w{C, Cp, 0, {}};
    w.set("alpha", "alpha", irr_id(1));
    ASSERT_TRUE(validate_bimodule(w));
    auto s = default_sections(C, "rho");
    auto W = lift_Wplus(w, s, {});
    EXPECT_EQ(W.blocks.size(), 1u);
    EXPECT_TRUE(same_blocks(compose(sigma_rho(C, s), W), w));
}

TEST(Wplus, ZeroLocusCount) {
    Rat c = 1, b = 2, k = 2;
    auto w = wplus_fixture(c, b, k);
    ASSERT_TRUE(validate_bimodule(w)) << validate_bimodule(w).detail;
    auto s = default_sections(w.source, "rho");
    BimoduleSections ws{{{"gamma'", irr_id(b)}}, {{"alpha'", op_identity(Kind::abelian)}}};
    for (auto& [n, op] : ws.Z) op = op_scaled(op, k);
    auto W = lift_Wplus(w, s, ws);
    EXPECT_TRUE(validate_bimodule(W));
    EXPECT_EQ(W.block(W.source.index("rho'"), W.target.index("alpha'")), op_scaled(op_identity(Kind::abelian), k));
    // block-by-block composite by hand: (rho, gamma') = B P, (rho, alpha') = Z H
    auto comp = compose(sigma_rho(w.source, s), W);
    EXPECT_EQ(comp.block(0, 0), (Op{{{1, 1}, b}}));
    EXPECT_EQ(comp.block(0, 1), (Op{{{0, 1}, k / 2}}));
    EXPECT_TRUE(same_blocks(comp, w));
}

TEST(Wplus, IncompatibleBoundary) {
    Rat c = 1, b = 2, k = 3;
    auto w = wplus_fixture(c, b, k);
    ASSERT_TRUE(validate_bimodule(w));
    auto s = default_sections(w.source, "rho");
    BimoduleSections ws{{{"gamma'", irr_id(b)}}, {{"alpha'", op_scaled(op_identity(Kind::abelian), k)}}};
    try {
        lift_Wplus(w, s, ws);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.tag, "section-incompatible");
        EXPECT_NE(std::string(e.what()).find("boundary"), std::string::npos);
    }
    // collapse mismatch
    BimoduleSections bad{{{"gamma'", irr_id(b + 1)}}, {{"alpha'", op_scaled(op_identity(Kind::abelian), k)}}};
    EXPECT_THROW(lift_Wplus(w, s, bad), Error);
}

// ---------------------------------------------------------------------------
// W_-

namespace {

WminusInput cylinder(Rat nbb) {
    WminusInput in;
    in.source.add("rho", Kind::abelian, 0);
    in.source.add("beta", Kind::irreducible, -2);
    in.source.set("rho", "beta", {{{1, 1}, 2}});
    in.target.add("rho", Kind::abelian, 2);
    in.target.add("beta", Kind::irreducible, -2);
    in.target.set("rho", "beta", {{{0, 1}, 1}});
    in.rho = in.rho_p = "rho";
    in.target_sections = {"rho", {}, {{"beta", {{{1, 1}, 2}}}}};
    in.N[{"beta", "beta"}] = irr_id(nbb);
    return in;
}

}  // namespace

TEST(Wminus, Minimal) {
    WminusInput in;
    in.source = lone_rho(0);
    in.target = lone_rho(2);
    in.rho = in.rho_p = "rho";
    in.target_sections = default_sections(in.target, "rho");
    auto W = build_Wminus(in);
    ASSERT_EQ(W.blocks.size(), 1u);
    EXPECT_EQ(W.block(0, W.target.index("rho'")), op_identity(Kind::abelian));
    EXPECT_TRUE(validate_bimodule(W));
}

TEST(Wminus, CylinderFixture) {
    auto in = cylinder(1);
    auto W = build_Wminus(in);
    EXPECT_TRUE(validate_bimodule(W));
    EXPECT_EQ(W.rel(W.source.index("rho"), W.target.index("rho'")), 0);
    EXPECT_EQ(in.source.objects[0].grading - in.target.objects[0].grading + in.shift, -2);
    induced_map(W, Rat(0));
    auto X = wallcross(in.target, in.target_sections, Rat(0));
    EXPECT_TRUE(X.exact) << X.detail;
}

TEST(Wminus, CaseTags) {
    try {
        build_Wminus(cylinder(2));
        FAIL();
    } catch (const WminusFailure& e) {
        EXPECT_EQ(e.tag, "relation-violated");
        EXPECT_EQ(e.case_tag, 'r');
    }
    WminusInput in;
    for (auto* C : {&in.source, &in.target}) {
        C->add("alpha", Kind::irreducible, 1);
        C->add("beta", Kind::irreducible, 0);
        C->set("alpha", "beta", irr_id(1));
    }
    in.source.add("rho", Kind::abelian, 0);
    in.target.add("rho", Kind::abelian, 2);
    in.rho = in.rho_p = "rho";
    in.target_sections = default_sections(in.target, "rho");
    in.N[{"alpha", "alpha"}] = irr_id(1);
    in.N[{"beta", "beta"}] = irr_id(1);
    EXPECT_TRUE(validate_bimodule(build_Wminus(in)));
    in.N[{"beta", "beta"}] = irr_id(-1);
    try {
        build_Wminus(in);
        FAIL();
    } catch (const WminusFailure& e) {
        EXPECT_EQ(e.case_tag, 'c');
    }
    in.N[{"beta", "beta"}] = irr_id(1);
    in.shift = 2;
    EXPECT_THROW(build_Wminus(in), Error);
}

// ---------------------------------------------------------------------------
// wall crossing

TEST(Wallcross, LoneRho) {
    auto fc = lone_rho();
    auto W = wallcross(fc, default_sections(fc, "rho"), Rat(0));
    EXPECT_TRUE(W.exact) << W.detail;
    EXPECT_TRUE(W.I0.empty());
    ASSERT_EQ(W.I1.size(), 1u);
    EXPECT_EQ(W.I1[0].grading, 7);
    EXPECT_EQ(W.I1[0].free, 1u);
    EXPECT_EQ(W.chi0, W.chi1 + 1);
}

TEST(Wallcross, CountOneKillsBeta) {
    auto fc = rho_beta(1);
    auto W = wallcross(fc, default_sections(fc, "rho"), Rat(0));
    EXPECT_TRUE(W.exact);
    EXPECT_EQ(total_rank(W.I0), 1);
    EXPECT_EQ(total_rank(W.I1), 0);
    EXPECT_EQ(W.chi0, 1);
    EXPECT_EQ(W.chi1, 0);
}

TEST(Wallcross, CountZeroSplits) {
    auto fc = rho_beta(0);
    auto W = wallcross(fc, default_sections(fc, "rho"), Rat(0));
    EXPECT_TRUE(W.exact);
    EXPECT_TRUE(W.V2.empty());
    EXPECT_EQ(total_rank(W.I1), total_rank(W.I0) + 1);
    EXPECT_EQ(W.chi0, W.chi1 + 1);
}

TEST(Wallcross, OverFiniteField) {
    auto fc = rho_beta(3);
    auto W = wallcross(fc, default_sections(fc, "rho"), Fp(0, 3));
    EXPECT_TRUE(W.exact);
    // n = 3 vanishes mod 3: split cone
    EXPECT_EQ(total_rank(W.I1), 2);
    auto V = wallcross(fc, default_sections(fc, "rho"), Fp(0, 5));
    EXPECT_EQ(total_rank(V.I1), 0);
}

TEST(Wallcross, RandomTriangles) {
    std::mt19937 rng(1234);
    int checked = 0;
    for (int t = 0; t < 400 && checked < 80; ++t) {
        auto fc = random_category(rng);
        for (size_t r = 0; r < fc.size(); ++r) {
            if (fc.objects[r].kind != Kind::abelian || !defaults_apply(fc, r) || !oracle_default_ok(fc, r)) continue;
            auto W = wallcross(fc, default_sections(fc, fc.objects[r].name), Rat(0));
            EXPECT_TRUE(W.exact) << W.detail;
            long drop = mod_floor(fc.objects[r].grading, 2) == 0 ? 1 : -1;
            EXPECT_EQ(W.chi0 - W.chi1, Int(drop));
            ++checked;
        }
    }
    EXPECT_GE(checked, 50);
}
