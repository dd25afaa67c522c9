#include "roughlab/kyfan.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace roughlab;

namespace {

Rational q(std::int64_t p, std::int64_t d = 1) { return make_rational(p, d); }

const ValueSpace R = ValueSpace::real_line();

// Independent oracle: rho is always a support point, a tail value, or 0, so
// the least feasible member of that candidate set (tails evaluated directly)
// is the infimum. A dense grid on [0,1] must not beat it.
Rational oracle_rho(const std::vector<std::pair<Rational, Rational>>& law) {
    auto tail = [&](const Rational& e) {
        Rational t = 0;
        for (const auto& [v, p] : law)
            if (v > e) t += p;
        return t;
    };
    std::set<Rational> candidates{Rational(0), Rational(1)};
    for (const auto& [v, p] : law) {
        candidates.insert(v);
        candidates.insert(tail(v));
    }
    for (int k = 0; k <= 1000; ++k) candidates.insert(q(k, 1000));
    for (const auto& c : candidates)
        if (c >= 0 && tail(c) <= c) return c;
    return Rational(1);
}

FiniteDist law_of(const std::vector<std::pair<Rational, Rational>>& atoms) {
    std::vector<Atom> a;
    for (const auto& [v, p] : atoms) a.push_back({v, p});
    return make_dist(R, a);
}

}  // namespace

TEST(KyFanOfLaw, PointMassBelowOne) {
    auto r = q(1, 4);
    auto res = kyfan_of_law(law_of({{2 * r, 1}}));
    EXPECT_EQ(res.rho, q(1, 2));
    EXPECT_EQ(res.attained_tail, 0);
}

TEST(KyFanOfLaw, IdenticalVariables) { EXPECT_EQ(kyfan_of_law(law_of({{0, 1}})).rho, 0); }

TEST(KyFanOfLaw, TwoAtomsAgainstOracle) {
    std::vector<std::pair<Rational, Rational>> atoms{{q(1, 10), q(1, 2)}, {q(9, 10), q(1, 2)}};
    auto expected = oracle_rho(atoms);
    ASSERT_EQ(expected, q(1, 2));
    EXPECT_EQ(kyfan_of_law(law_of(atoms)).rho, expected);
}

TEST(KyFanOfLaw, FarAtomCapsAtOne) {
    EXPECT_EQ(kyfan_of_law(law_of({{5, 1}})).rho, 1);
    EXPECT_EQ(kyfan_of_law(law_of({{1, 1}})).rho, 1);
}

TEST(KyFanOfLaw, NegativeSupportRejected) {
    try {
        kyfan_of_law(law_of({{-1, 1}}));
        FAIL();
    } catch (const DistError& e) {
        EXPECT_EQ(e.kind(), DistErrorKind::NegativeSupport);
    }
}

TEST(KyFanBetween, Examples) {
    auto r = q(1, 4);
    auto x = degenerate(r), y = degenerate(Rational(-r));
    EXPECT_EQ(kyfan_between(x, y, product_coupling(x, y)).rho, 2 * r);

    auto z = make_dist(R, {{Rational(-1), q(1, 3)}, {Rational(2), q(2, 3)}});
    EXPECT_EQ(kyfan_between(z, z, diagonal_coupling(z)).rho, 0);

    auto b = bernoulli(q(1, 2));
    auto zero = degenerate(Rational(0));
    ASSERT_EQ(oracle_rho({{0, q(1, 2)}, {1, q(1, 2)}}), q(1, 2));
    EXPECT_EQ(kyfan_between(b, zero, product_coupling(b, zero)).rho, q(1, 2));
}

TEST(KyFanOfLaw, RandomLawsMatchOracleAndContract) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> num(0, 30), w(0, 5), k(1, 5);
    for (int trial = 0; trial < 500; ++trial) {
        int m = k(rng);
        std::vector<int> ws(m);
        int total = 0;
        for (auto& x : ws) total += (x = w(rng));
        if (total == 0) {
            ws[0] = 1;
            total = 1;
        }
        std::vector<std::pair<Rational, Rational>> atoms;
        for (int i = 0; i < m; ++i) atoms.push_back({q(num(rng), 20), q(ws[i], total)});
        auto law = law_of(atoms);
        auto res = kyfan_of_law(law);

        EXPECT_EQ(res.rho, oracle_rho(atoms));
        EXPECT_GE(res.rho, 0);
        EXPECT_LE(res.rho, 1);
        EXPECT_EQ(res.attained_tail, tail_above(law, res.rho));
        EXPECT_LE(res.attained_tail, res.rho);
        // minimality at every breakpoint below rho
        for (const auto& [v, p] : atoms)
            if (v > 0 && v < res.rho) EXPECT_GT(tail_above(law, v), v);
        EXPECT_EQ(res.rho == 0, law.prob_of(Rational(0)) == 1);
    }
}

TEST(KyFanBetween, SymmetryAndTriangleOnSharedJoints) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> val(-6, 6), w(0, 4), cells(1, 6);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int m = cells(rng);
        std::vector<std::array<Rational, 3>> pts;
        std::vector<int> ws;
        int total = 0;
        for (int i = 0; i < m; ++i) {
            pts.push_back({q(val(rng), 4), q(val(rng), 4), q(val(rng), 4)});
            ws.push_back(w(rng));
            total += ws.back();
        }
        if (total == 0) {
            ws[0] = 1;
            total = 1;
        }
        auto project = [&](int a, int b) {
            std::vector<Atom> ma, mb;
            std::vector<JointAtom> joint;
            for (int i = 0; i < m; ++i) {
                auto p = q(ws[i], total);
                ma.push_back({pts[i][a], p});
                mb.push_back({pts[i][b], p});
                joint.push_back({pts[i][a], pts[i][b], p});
            }
            auto da = make_dist(R, ma), db = make_dist(R, mb);
            return explicit_coupling(da, db, joint);
        };
        auto xy = project(0, 1), yz = project(1, 2), xz = project(0, 2);
        auto rxy = kyfan_between(xy).rho, ryz = kyfan_between(yz).rho, rxz = kyfan_between(xz).rho;
        EXPECT_LE(rxz, rxy + ryz);
        EXPECT_EQ(kyfan_between(transpose(xy)).rho, rxy);
        ++checked;
    }
    EXPECT_EQ(checked, 1000);
}
