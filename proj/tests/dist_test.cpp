#include "roughlab/dist_json.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace roughlab;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return make_rational(p, d); }

const ValueSpace R = ValueSpace::real_line();

}  // namespace

TEST(Rational, ParseAndPrint) {
    EXPECT_EQ(parse_rational("6/8"), q(3, 4));
    EXPECT_EQ(to_string(parse_rational("-10/4")), "-5/2");
    EXPECT_EQ(to_string(parse_rational("7")), "7");
    EXPECT_THROW(parse_rational("0.5"), std::invalid_argument);
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("1/-2"), std::invalid_argument);
    EXPECT_EQ(roughlab::pow(q(2, 3), -2), q(9, 4));
    EXPECT_EQ(roughlab::floor(q(-3, 2)), -2);
    EXPECT_EQ(roughlab::ceil(q(3, 2)), 2);
}

TEST(MakeDist, BernoulliHalf) {
    auto p = q(1, 2);
    auto d = make_dist(R, {{Rational(0), 1 - p}, {Rational(1), p}});
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.prob_of(Rational(0)), q(1, 2));
    EXPECT_EQ(d.prob_of(Rational(1)), q(1, 2));
}

TEST(MakeDist, DegenerateLaw) {
    auto d = make_dist(R, {{q(1, 4), Rational(1)}});
    EXPECT_TRUE(d.is_degenerate());
    EXPECT_EQ(d.prob_of(q(1, 4)), 1);
}

TEST(MakeDist, MergesDuplicateAtoms) {
    auto d = make_dist(R, {{Rational(3), q(1, 2)}, {Rational(3), q(1, 2)}});
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.atoms()[0].prob, 1);
}

TEST(MakeDist, SortsAndDropsZeroMass) {
    auto d = make_dist(R, {{Rational(5), q(1, 3)}, {Rational(-1), q(2, 3)}, {Rational(9), Rational(0)}});
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(std::get<Rational>(d.atoms()[0].value), -1);
}

TEST(MakeDist, Errors) {
    try {
        make_dist(R, {{Rational(0), q(1, 2)}, {Rational(1), q(1, 3)}});
        FAIL();
    } catch (const MassNotOneError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::MassNotOne);
        EXPECT_EQ(e.deficit(), q(1, 6));
    }
    try {
        make_dist(R, {{Rational(0), q(3, 2)}, {Rational(1), q(-1, 2)}});
        FAIL();
    } catch (const DistError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::NegativeMass);
    }
    try {
        make_dist(R, {{Point{std::string("a")}, Rational(1)}});
        FAIL();
    } catch (const DistError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::PointNotInSpace);
    }
}

TEST(ValueSpace, FinitePointsValidation) {
    auto s = ValueSpace::finite_points({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
    EXPECT_EQ(s.distance(std::string("a"), std::string("c")), 2);
    EXPECT_THROW(ValueSpace::finite_points({"a", "b"}, {{0, 1}, {2, 0}}), DistError);
    EXPECT_THROW(ValueSpace::finite_points({"a", "b", "c"}, {{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}), DistError);
    EXPECT_THROW(ValueSpace::finite_points({"a"}, {{1}}), DistError);
}

TEST(ProductCoupling, HalfTimesHalf) {
    auto b = bernoulli(q(1, 2));
    auto c = product_coupling(b, b);
    ASSERT_EQ(c.table().size(), 4u);
    for (const auto& cell : c.table()) EXPECT_EQ(cell.prob, q(1, 4));
}

TEST(ProductCoupling, DegenerateFactor) {
    auto y = make_dist(R, {{Rational(1), q(1, 3)}, {Rational(4), q(2, 3)}});
    auto c = product_coupling(degenerate(Rational(7)), y);
    ASSERT_EQ(c.table().size(), 2u);
    for (const auto& cell : c.table()) {
        EXPECT_EQ(cell.x, Point{Rational(7)});
        EXPECT_EQ(cell.prob, y.prob_of(cell.y));
    }
}

TEST(ProductCoupling, ThreeByTwo) {
    auto x = make_dist(R, {{Rational(0), q(1, 3)}, {Rational(1), q(1, 3)}, {Rational(2), q(1, 3)}});
    auto c = product_coupling(x, bernoulli(q(1, 2)));
    ASSERT_EQ(c.table().size(), 6u);
    for (const auto& cell : c.table()) EXPECT_EQ(cell.prob, q(1, 6));
}

TEST(ProductCoupling, SpaceMismatch) {
    auto s = ValueSpace::finite_points({"a", "b"}, {{0, 1}, {1, 0}});
    try {
        product_coupling(bernoulli(q(1, 2)), degenerate(std::string("a"), s));
        FAIL();
    } catch (const DistError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::SpaceMismatch);
    }
}

TEST(ExplicitCoupling, MarginalsChecked) {
    auto b = bernoulli(q(1, 2));
    std::vector<JointAtom> bad{{Rational(0), Rational(0), q(1, 2)}, {Rational(0), Rational(1), q(1, 2)}};
    try {
        explicit_coupling(b, b, bad);
        FAIL();
    } catch (const DistError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::MarginalMismatch);
    }
}

TEST(DistanceLaw, OppositeDegenerates) {
    auto r = q(1, 4);
    auto law = distance_law(product_coupling(degenerate(r), degenerate(Rational(-r))));
    ASSERT_EQ(law.size(), 1u);
    EXPECT_EQ(law.prob_of(2 * r), 1);
}

TEST(DistanceLaw, GrowingAtomAgainstFairZeroTwo) {
    // X_n on {0, 2^n} with the limiting weights, Z fair on {0, 2}.
    const int n = 10;
    auto p = q(1, 2);
    auto pn = roughlab::pow(p, n);
    auto x = make_dist(R, {{Rational(0), 1 - pn}, {Rational(1 << n), pn}});
    auto z = make_dist(R, {{Rational(0), q(1, 2)}, {Rational(2), q(1, 2)}});
    auto law = distance_law(product_coupling(x, z));
    Rational above = 0;
    for (const auto& a : law.atoms())
        if (std::get<Rational>(a.value) > q(3, 2)) above += a.prob;
    // (0,2) carries (1 - p^n)/2 and both cells at 2^n carry p^n.
    EXPECT_EQ(above, (1 - pn) / 2 + pn);
}

TEST(DistanceLaw, DiagonalIsPointMassAtZero) {
    auto x = make_dist(R, {{Rational(-2), q(1, 5)}, {Rational(3), q(4, 5)}});
    auto law = distance_law(diagonal_coupling(x));
    ASSERT_EQ(law.size(), 1u);
    EXPECT_EQ(law.prob_of(Rational(0)), 1);
}

TEST(DistanceLaw, RandomisedInvariants) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> val(-4, 4), w(1, 6), k(1, 4);
    for (int trial = 0; trial < 300; ++trial) {
        auto random_law = [&] {
            int m = k(rng);
            std::vector<int> ws(m);
            int total = 0;
            for (auto& x : ws) total += (x = w(rng));
            std::vector<Atom> atoms;
            for (int i = 0; i < m; ++i) atoms.push_back({Rational(val(rng)), q(ws[i], total)});
            return make_dist(R, atoms);
        };
        auto x = random_law();
        auto y = random_law();
        auto a = distance_law(product_coupling(x, y));
        auto b = distance_law(product_coupling(y, x));
        EXPECT_EQ(a, b);
        Rational total = 0;
        for (const auto& atom : a.atoms()) total += atom.prob;
        EXPECT_EQ(total, 1);
    }
}

TEST(DistJson, CanonicalForm) {
    auto d = make_dist(R, {{Rational(2), q(1, 3)}, {q(-1, 2), q(2, 3)}});
    auto j = dist_to_json(d);
    EXPECT_EQ(j.dump(), R"({"atoms":[["-1/2","2/3"],["2","1/3"]],"space":"real"})");
    EXPECT_EQ(dist_from_json(j), d);

    auto s = ValueSpace::finite_points({"a", "b"}, {{0, 1}, {1, 0}});
    auto f = make_dist(s, {{std::string("b"), q(1, 4)}, {std::string("a"), q(3, 4)}});
    EXPECT_EQ(dist_from_json(dist_to_json(f)), f);
}
