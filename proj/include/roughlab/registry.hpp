#pragma once

// Reproduction registry: worked examples as embedded documents plus the exact
// values each one must produce. Every expected value records where it comes
// from (see Basis).

#include "roughlab/runner.hpp"

#include <functional>

namespace roughlab {

enum class Basis {
    WorkedExample,      // stated in a worked example
    Immediate,          // follows at once from the definitions
    IndependentOracle,  // recomputed by a separate route
};

inline const char* basis_name(Basis b) {
    switch (b) {
    case Basis::WorkedExample: return "worked-example";
    case Basis::Immediate: return "immediate";
    case Basis::IndependentOracle: return "independent-oracle";
    }
    return "?";
}

struct Expectation {
    std::string key;
    std::string expected;
    Basis basis;
};

using Computed = std::map<std::string, std::string>;

struct RegistryEntry {
    std::string id;
    std::string source;
    std::vector<Expectation> expected;
    std::function<Computed(const dsl::SpecDocument&)> compute;
};

struct UnknownRegistryId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace registry_detail {

inline Target point(const Rational& y, std::string name) { return {std::move(name), degenerate(y), {}}; }

inline std::string yn(Answer a) { return to_string(a); }

inline std::string pow2_neg(int k) { return "1/" + std::to_string(Nat{1} << k); }

inline const char* kSharpness = R"(# powers of two oscillate, elsewhere 0 with a vanishing chance of 1
ideal summable
sequence {
  piece powers(2) {
    atom value -5 prob 1/2
    atom value 5 prob 1/2
  }
  piece ~powers(2) {
    atom value 0 prob 1 - 1/n
    atom value 1 prob 1/n
  }
}
target X {
  atom value 1/4 prob 1
}
query limit r 1/4
query diameter r 1/4 {
  candidate independent {
    atom value 1/4 prob 1
  }
  candidate independent {
    atom value -1/4 prob 1
  }
}
)";

inline const char* kGrowingAtom = R"(# off the squares: 2^n with chance (1/2)^n, else 0; squares: Binomial(n, 1/2)
ideal density
sequence {
  piece ~poly(1,2) {
    atom value 0 prob 1 - (1/2)^n
    atom value 2^n prob (1/2)^n
  }
  piece poly(1,2) binomial 1/2
}
target X {
  atom value 0 prob 1
}
query limit r 0
query sandwich r 1 {
  candidate independent {
    atom value 1 prob 1
  }
  candidate independent {
    atom value 0 prob 1/2
    atom value 2 prob 1/2
  }
}
)";

inline const char* kDyadicFamily = R"(# members of the dyadic family sit near 1/j
ideal density
sequence {
  family dyadic(j) {
    atom value 1/j prob 1 - 1/n^2
    atom value 1/(j+1) prob 1/n^2
  }
}
target Z {
  atom value 0 prob 1
}
query cluster r 0
)";

inline const char* kWeakNotStrong = R"(ideal density
sequence {
  piece ap(2,1) {
    atom value -2 prob (n^2 - 1)/(2*n^2)
    atom value 1 prob (n^2 + 1)/(2*n^2)
  }
  piece ~ap(2,1) {
    atom value n^2 prob 1 - 1/n
    atom value -1 prob 1/n
  }
}
target Y {
  atom value 0 prob 1/2
  atom value 1 prob 1/2
}
coupling independent
query cluster r 1
)";

/// Odd indices carry atoms 2^-k with mass 2^-k for k < K; the remaining
/// mass 2^-(K-1) sits on 2^-K.
inline std::string atom_ladder_source(int K = 20) {
    std::string s = "# odd n: a ladder of atoms 2^-k; even n: escaping atoms\nideal density\nsequence {\n  piece ap(2,1) {\n";
    for (int k = 1; k <= K; ++k)
        s += "    atom value 1/2^" + std::to_string(k) + " prob 1/2^" + std::to_string(k < K ? k : K - 1) + "\n";
    s += "  }\n  piece ~ap(2,1) {\n    atom value -n^3 prob 1/3\n    atom value n^2 prob 2/3\n  }\n}\n";
    s += "target Z {\n  atom value 0 prob 1\n}\nquery cluster r 0\n";
    return s;
}

inline const char* kKyFanEquivalence = R"(# 0 except for a vanishing chance of n
ideal fin
sequence {
  piece full {
    atom value 0 prob 1 - 1/n
    atom value n prob 1/n
  }
}
target X {
  atom value 0 prob 1
}
query metric
query limit r 0
)";

inline Computed sharpness_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    auto I = dsl::make_ideal(*doc.ideal);
    Rational r(1, 4);
    auto xs = point(r, "X*"), ys = point(-r, "Y*");
    auto diam = diameter_probe(s, r, I, {xs, ys});
    auto three = diameter_probe(s, r, I, {xs, ys, point(0, "0")});
    return {{"lim X*=1/4 at r=1/4", yn(check_rough_limit(s, xs, r, I).answer)},
            {"lim Y*=-1/4 at r=1/4", yn(check_rough_limit(s, ys, r, I).answer)},
            {"rho(X*, Y*)", to_string(kyfan_between(product_coupling(xs.law, ys.law)).rho)},
            {"diameter max rho", to_string(diam.max_rho)},
            {"diameter bound min(1, 2r)", to_string(diam.bound)},
            {"diameter of {r, -r, 0}", to_string(three.max_rho)}};
}

inline Computed growing_atom_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    auto I = dsl::make_ideal(*doc.ideal);
    auto one = point(1, "Y*"), x0 = point(0, "X*");
    Target z{"Z", make_dist(ValueSpace::real_line(), {{Rational(0), Rational(1, 2)}, {Rational(2), Rational(1, 2)}}), {}};
    auto ex = exceedance_fn(piece_view(s, one, 0), 1, Rational(1, 2));
    auto vz = check_rough_limit(s, z, 1, I);
    auto sw = sandwich_probe(s, x0, 1, I, {{"Y*", one.law, false}, {"Z", z.law, false}});
    return {{"lim X*=0 at r=0", yn(check_rough_limit(s, x0, 0, I).answer)},
            {"exceedance vs Y*=1 off squares (r=1, eps=1/2)",
             ex.fn == ExpRational::geometric(Rational(1, 2)) ? "p^n" : ex.fn.to_string("n")},
            {"lim Y*=1 at r=1", yn(check_rough_limit(s, one, 1, I).answer)},
            {"lim Z at r=1", yn(vz.answer)},
            {"Z witness exceedance", vz.witness.is_null() ? "none" : vz.witness["exceedance_limit"].get<std::string>()},
            {"theta_bar(X*) contains Y*", yn(sw.rows[0].theta)},
            {"closed ball contains Z", yn(sw.rows[1].ball)}};
}

inline Computed dyadic_family_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    auto I = dsl::make_ideal(*doc.ideal);
    auto rep = classify_cluster(s, *doc.target, 0, I);
    std::string dens = "2^-j for j=1..20", tail = dens;
    for (Nat j = 1; j <= 20; ++j) {
        auto d = natural_density(s.family_region(j));
        Rational want = roughlab::pow(Rational(1, 2), static_cast<std::int64_t>(j));
        if (!d.is_exact() || d.value() != want) {
            dens = "mismatch at j=" + std::to_string(j);
            break;
        }
    }
    for (Nat j = 1; j <= 20; ++j) {
        auto b = tail_union_upper_density(dyadic_family_densities(), j);
        if (b.upper != roughlab::pow(Rational(1, 2), static_cast<std::int64_t>(j))) {
            tail = "mismatch at j=" + std::to_string(j);
            break;
        }
    }
    std::vector<Target> ys;
    for (int k = 1; k <= 8; ++k) ys.push_back(point(Rational(1, k), "Y_" + std::to_string(k)));
    auto cl = closedness_probe(s, 0, I, ys, *doc.target);
    return {{"strong_cluster Z=0 at r=0", yn(rep.strong_cluster.answer)},
            {"limit_point Z=0 at r=0", yn(rep.limit_point.answer)},
            {"weak_cluster Z=0 at r=0", yn(rep.weak_cluster.answer)},
            {"density of A_j", dens},
            {"tail union upper density beyond j", tail},
            {"closedness: Z strong from Y_j = 1/j", yn(cl.strong_z)},
            {"closedness: delta* bounded below, Z weak", cl.weak_inf_positive ? yn(cl.weak_z) : "not probed"}};
}

inline Computed weak_not_strong_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    Computed out;
    for (auto k : {dsl::IdealKind::Fin, dsl::IdealKind::Density, dsl::IdealKind::Summable}) {
        auto rep = classify_cluster(s, *doc.target, 1, dsl::make_ideal(k));
        std::string tag = std::string(" under ") + dsl::ideal_keyword(k);
        out["weak_cluster" + tag] = yn(rep.weak_cluster.answer);
        out["delta_star_sup" + tag] = rep.delta_star_sup ? to_string(*rep.delta_star_sup) : "none";
        out["strong_cluster" + tag] = yn(rep.strong_cluster.answer);
    }
    return out;
}

inline Computed atom_ladder_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    auto I = dsl::make_ideal(*doc.ideal);
    std::string ds = "2^-k for k=1..19";
    for (int k = 1; k <= 19; ++k) {
        auto rep = classify_cluster(s, point(roughlab::pow(Rational(1, 2), k), "Y"), 0, I);
        if (rep.weak_cluster.answer != Answer::Yes || *rep.delta_star_sup != roughlab::pow(Rational(1, 2), k)) {
            ds = "mismatch at k=" + std::to_string(k);
            break;
        }
    }
    std::vector<Target> ys;
    for (int k = 1; k <= 12; ++k) ys.push_back(point(roughlab::pow(Rational(1, 2), k), "Y_" + std::to_string(k)));
    auto cl = closedness_probe(s, 0, I, ys, *doc.target);
    return {{"delta_star_sup of Y_k", ds},
            {"weak_cluster Z=0", yn(classify_cluster(s, *doc.target, 0, I).weak_cluster.answer)},
            {"closedness probe inconsistency", cl.fatal ? "true" : "false"}};
}

}  // namespace registry_detail

inline const std::vector<RegistryEntry>& registry();

namespace registry_detail {

/// Probability route at r = 0 against the Ky Fan route on every fixture with a target and an ideal.
inline std::string kyfan_agreement() {
    int total = 0, agree = 0;
    for (const auto& e : registry()) {
        auto doc = dsl::parse(e.source);
        if (!doc.target || !doc.ideal) continue;
        auto s = doc.sequence();
        auto I = dsl::make_ideal(*doc.ideal);
        ++total;
        agree += check_rough_limit(s, *doc.target, 0, I).answer == metric_verdict(s, *doc.target, I).answer;
    }
    return std::to_string(agree) + "/" + std::to_string(total);
}

inline Computed kyfan_equivalence_rows(const dsl::SpecDocument& doc) {
    auto s = doc.sequence();
    auto I = dsl::make_ideal(*doc.ideal);
    return {{"metric verdict", yn(metric_verdict(s, *doc.target, I).answer)},
            {"lim at r=0", yn(check_rough_limit(s, *doc.target, 0, I).answer)},
            {"rho at n=10", to_string(rho_at(s, *doc.target, 10))},
            {"route agreement over fixtures", kyfan_agreement()}};
}

}  // namespace registry_detail

inline const std::vector<RegistryEntry>& registry() {
    using B = Basis;
    using namespace registry_detail;
    static const std::vector<RegistryEntry> entries{
        {"sharpness", kSharpness,
         {{"lim X*=1/4 at r=1/4", "Yes", B::WorkedExample},
          {"lim Y*=-1/4 at r=1/4", "Yes", B::WorkedExample},
          {"rho(X*, Y*)", "1/2", B::WorkedExample},
          {"diameter max rho", "1/2", B::WorkedExample},
          {"diameter bound min(1, 2r)", "1/2", B::Immediate},
          {"diameter of {r, -r, 0}", "1/2", B::IndependentOracle}},
         sharpness_rows},
        {"growing-atom", kGrowingAtom,
         {{"lim X*=0 at r=0", "Yes", B::WorkedExample},
          {"exceedance vs Y*=1 off squares (r=1, eps=1/2)", "p^n", B::WorkedExample},
          {"lim Y*=1 at r=1", "Yes", B::WorkedExample},
          {"lim Z at r=1", "No", B::WorkedExample},
          {"Z witness exceedance", "3/4", B::WorkedExample},
          {"theta_bar(X*) contains Y*", "No", B::WorkedExample},
          {"closed ball contains Z", "Yes", B::WorkedExample}},
         growing_atom_rows},
        {"dyadic-family", kDyadicFamily,
         {{"strong_cluster Z=0 at r=0", "Yes", B::WorkedExample},
          {"limit_point Z=0 at r=0", "No", B::WorkedExample},
          {"weak_cluster Z=0 at r=0", "Yes", B::Immediate},
          {"density of A_j", "2^-j for j=1..20", B::WorkedExample},
          {"tail union upper density beyond j", "2^-j for j=1..20", B::IndependentOracle},
          {"closedness: Z strong from Y_j = 1/j", "Yes", B::WorkedExample},
          {"closedness: delta* bounded below, Z weak", "Yes", B::WorkedExample}},
         dyadic_family_rows},
        {"weak-not-strong", kWeakNotStrong,
         {{"weak_cluster under fin", "Yes", B::WorkedExample},
          {"delta_star_sup under fin", "1/2", B::WorkedExample},
          {"strong_cluster under fin", "No", B::WorkedExample},
          {"weak_cluster under density", "Yes", B::WorkedExample},
          {"delta_star_sup under density", "1/2", B::WorkedExample},
          {"strong_cluster under density", "No", B::WorkedExample},
          {"weak_cluster under summable", "Yes", B::WorkedExample},
          {"delta_star_sup under summable", "1/2", B::WorkedExample},
          {"strong_cluster under summable", "No", B::WorkedExample}},
         weak_not_strong_rows},
        {"atom-ladder", atom_ladder_source(),
         {{"delta_star_sup of Y_k", "2^-k for k=1..19", B::WorkedExample},
          {"weak_cluster Z=0", "No", B::WorkedExample},
          {"closedness probe inconsistency", "false", B::Immediate}},
         atom_ladder_rows},
        {"kyfan-equivalence", kKyFanEquivalence,
         {{"metric verdict", "Yes", B::Immediate},
          {"lim at r=0", "Yes", B::Immediate},
          {"rho at n=10", "1/10", B::IndependentOracle},
          {"route agreement over fixtures", "6/6", B::IndependentOracle}},
         kyfan_equivalence_rows},
    };
    return entries;
}

inline const RegistryEntry& find_entry(const std::string& id) {
    for (const auto& e : registry())
        if (e.id == id) return e;
    throw UnknownRegistryId("no registry entry '" + id + "'");
}

struct CheckRow {
    std::string id, key, expected, actual;
    Basis basis;
    bool pass;
};

inline std::vector<CheckRow> reproduce(const RegistryEntry& e) {
    auto doc = dsl::parse(e.source);
    auto got = e.compute(doc);
    std::vector<CheckRow> rows;
    for (const auto& x : e.expected) {
        auto it = got.find(x.key);
        std::string actual = it == got.end() ? "<missing>" : it->second;
        rows.push_back({e.id, x.key, x.expected, actual, x.basis, actual == x.expected});
    }
    return rows;
}

inline json rows_to_json(const std::vector<CheckRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"id", r.id}, {"key", r.key}, {"expected", r.expected}, {"actual", r.actual},
                       {"basis", basis_name(r.basis)}, {"pass", r.pass}});
    return out;
}

}  // namespace roughlab
