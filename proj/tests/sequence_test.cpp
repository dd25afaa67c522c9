#include "roughlab/sequence.hpp"

#include <gtest/gtest.h>

using namespace roughlab;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return make_rational(p, d); }

const ExpRational n = ExpRational::var();
const ExpRational& j = n;  // family values use the same variable slot

Target point_target(const Rational& y) { return {"Y", degenerate(y), {}}; }

Target law_target(std::vector<Atom> atoms) { return {"Y", make_dist(ValueSpace::real_line(), std::move(atoms)), {}}; }

PiecewiseSequence sharpness() {
    return PiecewiseSequence({{IndexSet::powers(2), {{ExpRational(-5), q(1, 2)}, {ExpRational(5), q(1, 2)}}, {}},
                              {~IndexSet::powers(2), {{ExpRational(0), 1 - 1 / n}, {ExpRational(1), 1 / n}}, {}}},
                             std::nullopt);
}

PiecewiseSequence growing_atom() {
    auto pn = ExpRational::geometric(q(1, 2));
    return PiecewiseSequence({{~IndexSet::poly_image(1, 2), {{ExpRational(0), 1 - pn}, {ExpRational::geometric(2), pn}}, {}},
                              {IndexSet::poly_image(1, 2), {}, q(1, 2)}},
                             std::nullopt);
}

PiecewiseSequence dyadic_family() {
    return PiecewiseSequence({}, Family{{{1 / j, 1 - 1 / (n * n)}, {1 / (j + 1), 1 / (n * n)}}});
}

PiecewiseSequence weak_example() {
    auto A = IndexSet::arith_prog(2, 1);
    return PiecewiseSequence({{A, {{ExpRational(-2), (n * n - 1) / (2 * n * n)}, {ExpRational(1), (n * n + 1) / (2 * n * n)}}, {}},
                              {~A, {{ExpRational(-1), 1 / n}, {n * n, 1 - 1 / n}}, {}}},
                             std::nullopt);
}

// Every region of a model as (view, representative indices in it).
void check_agreement(const PiecewiseSequence& s, const Target& t, const std::vector<Rational>& thresholds, Nat N) {
    for (const auto& thr : thresholds) {
        for (Rel rel : {Rel::Greater, Rel::GreaterEq, Rel::Less, Rel::LessEq}) {
            std::vector<SymbolicProb> fixed;
            for (std::size_t i = 0; i < s.pieces().size(); ++i) fixed.push_back(distance_prob_fn(piece_view(s, t, i), rel, thr));
            std::map<Nat, SymbolicProb> fam;
            for (Nat x = 1; x <= N; ++x) {
                auto loc = s.locate(x);
                const SymbolicProb* sp;
                if (loc.piece) {
                    sp = &fixed[*loc.piece];
                } else {
                    if (!fam.count(loc.j)) fam.emplace(loc.j, distance_prob_fn(family_view(s, t, loc.j), rel, thr));
                    sp = &fam.at(loc.j);
                }
                if (x < sp->from) continue;
                ASSERT_EQ(sp->fn.eval(x), distance_prob_at(s, t, x, rel, thr)) << "n=" << x << " t=" << to_string(thr);
            }
        }
    }
}

}  // namespace

TEST(LawAt, SpecExamples) {
    auto s = sharpness();
    EXPECT_EQ(s.law_at(8), make_dist(ValueSpace::real_line(), {{Rational(-5), q(1, 2)}, {Rational(5), q(1, 2)}}));
    EXPECT_EQ(s.law_at(6), make_dist(ValueSpace::real_line(), {{Rational(0), q(5, 6)}, {Rational(1), q(1, 6)}}));
    auto f = dyadic_family();
    EXPECT_EQ(f.law_at(12), make_dist(ValueSpace::real_line(), {{q(1, 3), q(143, 144)}, {q(1, 4), q(1, 144)}}));
}

TEST(LawAt, BinomialPiece) {
    auto s = growing_atom();
    auto law = s.law_at(4);
    EXPECT_EQ(law.prob_of(Rational(2)), q(6, 16));
    EXPECT_EQ(s.law_at(5), make_dist(ValueSpace::real_line(), {{Rational(0), q(31, 32)}, {Rational(32), q(1, 32)}}));
}

TEST(LawAt, MassNormalisation) {
    for (const auto& s : {sharpness(), growing_atom(), dyadic_family(), weak_example()})
        for (Nat x = 1; x <= 200; ++x) {
            Rational total = 0;
            const auto law = s.law_at(x);
            for (const auto& a : law.atoms()) total += a.prob;
            ASSERT_EQ(total, 1);
        }
}

TEST(Model, SemanticErrors) {
    try {
        PiecewiseSequence({{IndexSet::full(), {{ExpRational(0), q(1, 2)}, {ExpRational(1), q(1, 3)}}, {}}}, std::nullopt);
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("5/6"), std::string::npos);
    }
    EXPECT_THROW(PiecewiseSequence({{IndexSet::arith_prog(2, 1), {{ExpRational(0), 1}}, {}}}, std::nullopt), ModelError);
    EXPECT_THROW(PiecewiseSequence({{IndexSet::full(), {{ExpRational(0), 1}}, {}}, {IndexSet::dyadic(0), {{ExpRational(0), 1}}, {}}},
                                   std::nullopt),
                 ModelError);
    // 2 - 1/n leaves [0,1] at every n
    EXPECT_THROW(PiecewiseSequence({{IndexSet::full(), {{ExpRational(0), 2 - 1 / n}, {ExpRational(1), 1 / n - 1}}, {}}},
                                   std::nullopt),
                 ModelError);
}

TEST(Exceedance, SpecExamples) {
    auto s = growing_atom();
    auto v = piece_view(s, point_target(0), 0);
    for (auto eps : {q(1, 2), q(1, 10), q(9, 10)}) {
        auto e = exceedance_fn(v, 0, eps);
        EXPECT_EQ(e.fn, ExpRational::geometric(q(1, 2)));
        EXPECT_EQ(e.from, 1u);
    }
    auto c = PiecewiseSequence({{IndexSet::full(), {{ExpRational(3), 1}}, {}}}, std::nullopt);
    EXPECT_EQ(exceedance_fn(piece_view(c, point_target(3), 0), 0, q(1, 5)).fn, ExpRational(0));

    auto sh = sharpness();
    auto e = exceedance_fn(piece_view(sh, point_target(q(1, 4)), 1), q(1, 4), q(1, 4));
    EXPECT_EQ(e.fn, 1 / n);
    for (Nat x = 2; x <= 100; ++x)
        if (!IndexSet::powers(2).contains(x)) EXPECT_EQ(distance_prob_at(sh, point_target(q(1, 4)), x, Rel::Greater, q(1, 2)), q(1, x));
}

TEST(Profile, SpecExamples) {
    auto w = weak_example();
    auto bern = law_target({{Rational(0), q(1, 2)}, {Rational(1), q(1, 2)}});
    EXPECT_EQ(limiting_mass_profile(piece_view(w, bern, 0), 1).c_plus, q(1, 2));
    EXPECT_EQ(limiting_mass_profile(piece_view(w, bern, 1), 1).c_plus, 0);

    auto c = PiecewiseSequence({{IndexSet::full(), {{ExpRational(0), q(1, 3)}, {ExpRational(2), q(2, 3)}}, {}}}, std::nullopt);
    Target diag{"Y", make_dist(ValueSpace::real_line(), {{Rational(0), q(1, 3)}, {Rational(2), q(2, 3)}}),
                {CouplingSpec::Kind::Diagonal, {}, {}}};
    for (auto r : {q(0), q(1, 2), q(3)}) EXPECT_EQ(limiting_mass_profile(piece_view(c, diag, 0), r).c_plus, 1);

    auto f = dyadic_family();
    for (Nat jj = 1; jj <= 6; ++jj) {
        auto m = limiting_mass_profile(family_view(f, point_target(0), jj), 0);
        EXPECT_EQ(m.c_plus, 0);
        EXPECT_EQ(m.c(q(1, jj) + q(1, 1000)), 1);
        EXPECT_EQ(m.c(q(1, jj)), 0);  // atom 1/j sits exactly at the boundary and is constant in n
        EXPECT_EQ(m.min_gap(), q(1, jj + 1));
    }
}

TEST(Profile, MonotoneInEps) {
    auto w = weak_example();
    auto bern = law_target({{Rational(0), q(1, 2)}, {Rational(1), q(1, 2)}});
    for (std::size_t i = 0; i < 2; ++i)
        for (auto r : {q(0), q(1, 2), q(1), q(2)}) {
            auto m = limiting_mass_profile(piece_view(w, bern, i), r);
            Rational prev = -1;
            for (int k = 1; k <= 400; ++k) {
                Rational c = m.c(q(k, 100));
                EXPECT_GE(c, prev);
                prev = c;
            }
            if (auto g = m.min_gap()) EXPECT_EQ(m.c(*g / 2), m.c_plus);
            else EXPECT_EQ(m.c(q(1, 1000000)), m.c_plus);
        }
}

TEST(Profile, DistanceApproachDirections) {
    // values 1 + 1/n approach distance 1 from above against y = 0
    auto s = PiecewiseSequence({{IndexSet::full(), {{1 + 1 / n, q(1, 2)}, {1 - 1 / (n + 1), q(1, 2)}}, {}}}, std::nullopt);
    auto m = limiting_mass_profile(piece_view(s, point_target(0), 0), 0);
    EXPECT_EQ(m.c(1), q(1, 2));  // only the atom approaching from below counts at r + eps = 1
    EXPECT_EQ(m.c_plus, 0);
    auto m1 = limiting_mass_profile(piece_view(s, point_target(0), 0), 1);
    EXPECT_EQ(m1.c_plus, 1);
}

TEST(Agreement, SymbolicEqualsPointwise) {
    check_agreement(sharpness(), point_target(q(1, 4)), {q(1, 4), q(1, 2), q(3, 4), q(5)}, 1000);
    check_agreement(sharpness(), point_target(-q(1, 4)), {q(1, 2), q(21, 4)}, 1000);
    check_agreement(dyadic_family(), point_target(0), {q(1, 3), q(1, 10), q(1, 2)}, 1000);
    auto bern = law_target({{Rational(0), q(1, 2)}, {Rational(1), q(1, 2)}});
    check_agreement(weak_example(), bern, {q(3, 2), q(1), q(2), q(5, 2)}, 1000);
    auto z = law_target({{Rational(0), q(1, 2)}, {Rational(2), q(1, 2)}});
    check_agreement(growing_atom(), z, {q(3, 2), q(2)}, 120);
    check_agreement(growing_atom(), point_target(1), {q(3, 2), q(2)}, 120);
}

TEST(Agreement, JointTableCoupling) {
    // X_n on {0, n} uniform, Y fair on {0,1}, all four cells equal
    auto s = PiecewiseSequence({{IndexSet::full(), {{ExpRational(0), q(1, 2)}, {n, q(1, 2)}}, {}}}, std::nullopt);
    JointTable tab{{q(1, 4), q(1, 4)}, {q(1, 4), q(1, 4)}};
    Target t{"Y", make_dist(ValueSpace::real_line(), {{Rational(0), q(1, 2)}, {Rational(1), q(1, 2)}}),
             {CouplingSpec::Kind::Joint, {tab}, {}}};
    check_agreement(s, t, {q(1, 2), q(3, 2)}, 200);
    EXPECT_EQ(distance_prob_fn(piece_view(s, t, 0), Rel::Less, q(1, 2)).fn, ExpRational(q(1, 4)));

    JointTable bad{{q(1, 2), 0}, {q(1, 4), q(1, 4)}};
    Target tb{"Y", t.law, {CouplingSpec::Kind::Joint, {bad}, {}}};
    EXPECT_THROW(piece_view(s, tb, 0), ModelError);
}
